"""Experiment orchestration: margin sweeps, cross-validation, scatter export.

Per-margin results always come from the detection input keyed by that
margin and are never mixed: in practice every margin corresponds to a
separately trained detector.  Reports are rendered as Markdown, JSON and
CSV; raw (unrounded) values are always exported alongside the 3-decimal
presentation values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .dataset import Dataset, FrameKey, TipAnnotation, cv_folds, dataset_stats, frames_for_role
from .detection import FrameDetections
from .errors import ExperimentError
from .evaluation import (
    EvalConfig,
    EvaluationResult,
    Metrics,
    Tally,
    evaluate_run,
)
from .geometry import MarginSemantics
from .stats import mean_and_sample_sd

__all__ = [
    "DEFAULT_MARGINS",
    "MarginSweepPlan",
    "SweepRow",
    "MetricAggregate",
    "CVReport",
    "run_margin_sweep",
    "run_cv",
    "aggregate_cv",
    "export_scatter",
    "fmt3",
    "format_mean_sd",
    "render_sweep_markdown",
    "render_sweep_csv",
    "sweep_report_payload",
    "render_cv_markdown",
    "render_cv_csv",
    "cv_report_payload",
]

DEFAULT_MARGINS = (50, 100, 150, 200)

AGGREGATED_METRICS = ("recall", "precision", "f1", "mean_distance")


@dataclass(frozen=True)
class MarginSweepPlan:
    """Which margins to evaluate, under which semantics and eval constants."""

    margins: tuple[int, ...] = DEFAULT_MARGINS
    semantics: MarginSemantics = MarginSemantics.SIDE
    eval_config: EvalConfig = EvalConfig()

    def __post_init__(self) -> None:
        if not self.margins:
            raise ExperimentError("sweep plan needs at least one margin")
        if any(m <= 0 for m in self.margins):
            raise ExperimentError(f"margins must be positive, got {self.margins}")
        if any(b <= a for a, b in zip(self.margins, self.margins[1:])):
            raise ExperimentError(f"margins must be strictly increasing, got {self.margins}")


@dataclass(frozen=True)
class SweepRow:
    margin: int
    tally: Tally
    metrics: Metrics


def run_margin_sweep(
    dataset: Dataset,
    detections_by_margin: Mapping[int, Mapping[FrameKey, FrameDetections]],
    plan: MarginSweepPlan = MarginSweepPlan(),
    frames: Sequence[TipAnnotation] | None = None,
    distance_over: str = "all",
) -> list[SweepRow]:
    """Evaluate each margin's detection input; one row per margin, in order."""
    rows = []
    for margin in plan.margins:
        if margin not in detections_by_margin:
            raise ExperimentError(f"no detections supplied for margin {margin}")
        result = evaluate_run(
            dataset,
            detections_by_margin[margin],
            plan.eval_config,
            frames,
            distance_over,
        )
        rows.append(SweepRow(margin, result.tally, result.metrics))
    return rows


@dataclass(frozen=True)
class MetricAggregate:
    """Mean and sample SD of one metric over the folds where it is defined."""

    mean: float
    sd: float
    n_defined: int
    skipped_folds: tuple[int, ...] = ()


@dataclass(frozen=True)
class CVReport:
    fold_metrics: tuple[Metrics, ...]
    aggregates: dict[str, MetricAggregate | None]


def aggregate_cv(fold_metrics: Sequence[Metrics]) -> CVReport:
    """Aggregate per-fold metrics as mean +/- sample SD.

    Folds where a metric is undefined are excluded from that metric's
    aggregate (coercing to 0 would silently bias means) and recorded in
    ``skipped_folds``.
    """
    if len(fold_metrics) < 2:
        raise ExperimentError(f"need at least 2 folds to aggregate, got {len(fold_metrics)}")
    aggregates: dict[str, MetricAggregate | None] = {}
    for name in AGGREGATED_METRICS:
        values = []
        skipped = []
        for i, metrics in enumerate(fold_metrics):
            value = getattr(metrics, name)
            if value is None:
                skipped.append(i)
            else:
                values.append(value)
        if values:
            mean, sd = mean_and_sample_sd(values)
            aggregates[name] = MetricAggregate(mean, sd, len(values), tuple(skipped))
        else:
            aggregates[name] = None
    return CVReport(tuple(fold_metrics), aggregates)


def run_cv(
    dataset: Dataset,
    detections: Mapping[FrameKey, FrameDetections],
    config: EvalConfig = EvalConfig(),
    k: int = 9,
    per_fold_detections: Mapping[int, Mapping[FrameKey, FrameDetections]] | None = None,
    distance_over: str = "all",
) -> tuple[list, list[EvaluationResult], CVReport]:
    """Evaluate the test video of every fold; returns (folds, results, report).

    ``detections`` covers all folds unless ``per_fold_detections`` overrides
    individual folds (when each fold's detector was trained separately).
    """
    folds = cv_folds(dataset, k)
    results = []
    for i, plan in enumerate(folds):
        fold_detections = detections
        if per_fold_detections is not None and i in per_fold_detections:
            fold_detections = per_fold_detections[i]
        frames = frames_for_role(dataset, plan, "test")
        results.append(evaluate_run(dataset, fold_detections, config, frames, distance_over))
    report = aggregate_cv([r.metrics for r in results])
    return folds, results, report


# --- rendering -------------------------------------------------------------


def fmt3(value: float | None) -> str:
    """3-decimal presentation; undefined values display as n/a."""
    return "n/a" if value is None else f"{value:.3f}"


def format_mean_sd(aggregate: MetricAggregate | None) -> str:
    if aggregate is None:
        return "n/a"
    return f"{aggregate.mean:.3f} ± {aggregate.sd:.3f}"


def _fmt_raw(value: float | None) -> str:
    if value is None:
        return ""
    return str(int(value)) if value == int(value) else repr(value)


def _presentation(metrics: Metrics) -> dict[str, str]:
    return {
        "recall": fmt3(metrics.recall),
        "precision": fmt3(metrics.precision),
        "f1": fmt3(metrics.f1),
    }


def _distance_cell(metrics: Metrics) -> str:
    if metrics.mean_distance is None:
        return "n/a"
    return f"{metrics.mean_distance:.2f} ± {metrics.distance_sd:.2f}"


def render_sweep_markdown(rows: Sequence[SweepRow], meta: Mapping) -> str:
    lines = [
        f"# Margin sweep: {meta['name']} (seed {meta['seed']})",
        "",
        f"toolkit {meta['version']}, config {meta['config_hash'][:12]}",
        "",
        "| Margin size (pixel) | TP | FP | FN | Recall | Precision | F1-score | Mean distance (px) |",
        "|---:|---:|---:|---:|---:|---:|---:|---:|",
    ]
    for row in rows:
        p = _presentation(row.metrics)
        lines.append(
            f"| {row.margin} | {row.tally.tp} | {row.tally.fp} | {row.tally.fn} "
            f"| {p['recall']} | {p['precision']} | {p['f1']} | {_distance_cell(row.metrics)} |"
        )
    return "\n".join(lines) + "\n"


def render_sweep_csv(rows: Sequence[SweepRow]) -> str:
    lines = ["margin,tp,fp,fn,recall,precision,f1,mean_distance,distance_sd"]
    for row in rows:
        m = row.metrics
        lines.append(
            f"{row.margin},{row.tally.tp},{row.tally.fp},{row.tally.fn},"
            f"{_fmt_raw(m.recall)},{_fmt_raw(m.precision)},{_fmt_raw(m.f1)},"
            f"{_fmt_raw(m.mean_distance)},{_fmt_raw(m.distance_sd)}"
        )
    return "\n".join(lines) + "\n"


def sweep_report_payload(rows: Sequence[SweepRow], meta: Mapping) -> dict:
    return {
        "kind": "margin_sweep",
        **dict(meta),
        "rows": [
            {
                "margin": row.margin,
                "tp": row.tally.tp,
                "fp": row.tally.fp,
                "fn": row.tally.fn,
                **row.metrics.to_dict(),
                "presentation": _presentation(row.metrics),
            }
            for row in rows
        ],
    }


def render_cv_markdown(
    folds: Sequence,
    results: Sequence[EvaluationResult],
    report: CVReport,
    meta: Mapping,
) -> str:
    lines = [
        f"# Cross-validation: {meta['name']} (seed {meta['seed']})",
        "",
        f"toolkit {meta['version']}, config {meta['config_hash'][:12]}",
        "",
        "| Fold | Test video | Val video | TP | FP | FN | Recall | Precision | F1-score |",
        "|---:|---|---|---:|---:|---:|---:|---:|---:|",
    ]
    for i, (plan, result) in enumerate(zip(folds, results)):
        p = _presentation(result.metrics)
        test = next(iter(plan.test_videos))
        val = next(iter(plan.val_videos))
        lines.append(
            f"| {i} | {test} | {val} | {result.tally.tp} | {result.tally.fp} "
            f"| {result.tally.fn} | {p['recall']} | {p['precision']} | {p['f1']} |"
        )
    agg = report.aggregates
    lines.append(
        f"| Mean ± SD | | | | | | {format_mean_sd(agg['recall'])} "
        f"| {format_mean_sd(agg['precision'])} | {format_mean_sd(agg['f1'])} |"
    )
    return "\n".join(lines) + "\n"


def render_cv_csv(folds: Sequence, results: Sequence[EvaluationResult]) -> str:
    lines = ["fold,test_video,val_video,tp,fp,fn,recall,precision,f1,mean_distance,distance_sd"]
    for i, (plan, result) in enumerate(zip(folds, results)):
        m = result.metrics
        test = next(iter(plan.test_videos))
        val = next(iter(plan.val_videos))
        lines.append(
            f"{i},{test},{val},{result.tally.tp},{result.tally.fp},{result.tally.fn},"
            f"{_fmt_raw(m.recall)},{_fmt_raw(m.precision)},{_fmt_raw(m.f1)},"
            f"{_fmt_raw(m.mean_distance)},{_fmt_raw(m.distance_sd)}"
        )
    return "\n".join(lines) + "\n"


def cv_report_payload(
    folds: Sequence,
    results: Sequence[EvaluationResult],
    report: CVReport,
    meta: Mapping,
) -> dict:
    aggregates = {}
    for name, agg in report.aggregates.items():
        if agg is None:
            aggregates[name] = None
        else:
            aggregates[name] = {
                "mean": agg.mean,
                "sd": agg.sd,
                "n_defined": agg.n_defined,
                "skipped_folds": list(agg.skipped_folds),
                "presentation": format_mean_sd(agg),
            }
    return {
        "kind": "cross_validation",
        **dict(meta),
        "folds": [
            {
                "fold": i,
                "test_video": next(iter(plan.test_videos)),
                "val_video": next(iter(plan.val_videos)),
                "tp": result.tally.tp,
                "fp": result.tally.fp,
                "fn": result.tally.fn,
                **result.metrics.to_dict(),
                "presentation": _presentation(result.metrics),
            }
            for i, (plan, result) in enumerate(zip(folds, results))
        ],
        "aggregate": aggregates,
    }


def export_scatter(dataset: Dataset) -> str:
    """Tip coordinates as CSV plus a trailing ``#``-commented summary block.

    The coordinate rows alone round-trip: re-importing them (skipping the
    comment lines) reproduces the dataset's coordinates exactly.
    """
    if not dataset.annotations:
        raise ExperimentError("cannot export a scatter of an empty dataset")
    stats = dataset_stats(dataset)
    lines = ["x,y"]
    for ann in dataset.annotations:
        lines.append(f"{_fmt_raw(ann.tip.x)},{_fmt_raw(ann.tip.y)}")
    lines.append(f"# count,{stats.count}")
    for axis_name, axis in (("x", stats.x), ("y", stats.y)):
        for stat_name in ("mean", "median", "sd", "min", "max"):
            value = getattr(axis, stat_name)
            lines.append(f"# {axis_name}_{stat_name},{_fmt_raw(value)}")
    return "\n".join(lines) + "\n"
