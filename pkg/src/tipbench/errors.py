"""Exception types shared across the toolkit.

Everything raised here means "your input is invalid", as opposed to I/O
failures (left to the builtin OSError family) or programming errors.
"""

from __future__ import annotations


class TipBenchError(ValueError):
    """Base class for all validation errors raised by tipbench."""


class AnnotationError(TipBenchError):
    """Malformed or inconsistent annotation data."""


class DetectionError(TipBenchError):
    """Malformed or inconsistent detector output."""


class ConfigError(TipBenchError):
    """Malformed configuration file or incompatible option values."""


class ExperimentError(TipBenchError):
    """An experiment plan cannot be executed with the supplied inputs."""
