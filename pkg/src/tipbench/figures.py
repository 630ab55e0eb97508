"""Matplotlib figure rendering for the report paths."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .dataset import Dataset
from .evaluation import EvaluationResult
from .experiments import CVReport, SweepRow

# Fixed PNG metadata keeps rerenders byte-identical.
_PNG_METADATA = {"Software": "tipbench"}


def _save(fig, path: str | Path) -> None:
    fig.savefig(path, dpi=120, metadata=_PNG_METADATA)
    plt.close(fig)


def save_scatter_figure(dataset: Dataset, path: str | Path) -> None:
    """Scatter of tip coordinates in image coordinates (y grows downward)."""
    xs = [a.tip.x for a in dataset.annotations]
    ys = [a.tip.y for a in dataset.annotations]
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    ax.scatter(xs, ys, s=6, alpha=0.5, linewidths=0)
    ax.set_xlim(0, dataset.image_width)
    ax.set_ylim(dataset.image_height, 0)
    ax.set_xlabel("x (px)")
    ax.set_ylabel("y (px)")
    ax.set_title(f"Tip coordinates ({len(dataset.annotations)} frames)")
    ax.set_aspect("equal")
    fig.tight_layout()
    _save(fig, path)


def save_sweep_figure(rows: Sequence[SweepRow], path: str | Path) -> None:
    margins = [row.margin for row in rows]
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for name, marker in (("recall", "o"), ("precision", "s"), ("f1", "^")):
        values = [getattr(row.metrics, name) for row in rows]
        pairs = [(m, v) for m, v in zip(margins, values) if v is not None]
        if pairs:
            ax.plot(*zip(*pairs), marker=marker, label=name)
    ax.set_xlabel("margin (px)")
    ax.set_ylabel("score")
    ax.set_ylim(0, 1.05)
    ax.set_xticks(margins)
    ax.grid(True, alpha=0.3)
    ax.legend()
    ax.set_title("Metrics vs training-box margin")
    fig.tight_layout()
    _save(fig, path)


def save_cv_figure(results: Sequence[EvaluationResult], report: CVReport, path: str | Path) -> None:
    folds = list(range(len(results)))
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for name, marker in (("recall", "o"), ("precision", "s"), ("f1", "^")):
        values = [getattr(r.metrics, name) for r in results]
        pairs = [(f, v) for f, v in zip(folds, values) if v is not None]
        if pairs:
            ax.plot(*zip(*pairs), marker=marker, label=name)
        aggregate = report.aggregates.get(name)
        if aggregate is not None:
            ax.axhline(aggregate.mean, linestyle="--", linewidth=0.8, alpha=0.5)
    ax.set_xlabel("fold")
    ax.set_ylabel("score")
    ax.set_ylim(0, 1.05)
    ax.set_xticks(folds)
    ax.grid(True, alpha=0.3)
    ax.legend()
    ax.set_title("Per-fold metrics (dashed: fold means)")
    fig.tight_layout()
    _save(fig, path)
