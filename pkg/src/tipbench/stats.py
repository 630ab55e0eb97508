"""Small statistics helpers with the conventions used across the toolkit."""

from __future__ import annotations

import statistics
from typing import Sequence


def sample_sd(values: Sequence[float]) -> float:
    """Sample standard deviation (n-1 denominator); defined as 0 for n == 1."""
    if not values:
        raise ValueError("sample_sd of empty sequence")
    if len(values) == 1:
        return 0.0
    return statistics.stdev(values)


def mean_and_sample_sd(values: Sequence[float]) -> tuple[float, float]:
    if not values:
        raise ValueError("mean of empty sequence")
    return statistics.mean(values), sample_sd(values)
