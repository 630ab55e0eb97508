"""Frame classification (TP/FP/FN) and metric computation.

A frame with no selected detection is a false negative.  Otherwise the
selected box's midpoint and the ground-truth tip each get a fixed-size
measurement box; strictly greater than the IoU threshold makes the frame a
true positive, anything else a false positive.  Using the same fixed box
for every run makes models trained with different margins comparable.
"""

from __future__ import annotations

import enum
import math
import statistics
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .dataset import Dataset, FrameKey, TipAnnotation
from .detection import Detection, FrameDetections, SelectionConfig, select_top
from .errors import TipBenchError
from .geometry import (
    DEFAULT_FIXED_HEIGHT,
    DEFAULT_FIXED_WIDTH,
    Box,
    Point,
    fixed_box,
    iou,
    midpoint,
)
from .stats import sample_sd

__all__ = [
    "Outcome",
    "EvalConfig",
    "FrameOutcome",
    "Tally",
    "Metrics",
    "EvaluationResult",
    "classify_frame",
    "tally_outcomes",
    "compute_metrics",
    "evaluate_run",
    "derive_fixed_box",
]


class Outcome(enum.Enum):
    TP = "TP"
    FP = "FP"
    FN = "FN"


@dataclass(frozen=True)
class EvalConfig:
    """Measurement constants: fixed-box dimensions, IoU threshold, selection."""

    fixed_width: float = DEFAULT_FIXED_WIDTH
    fixed_height: float = DEFAULT_FIXED_HEIGHT
    iou_threshold: float = 0.5
    selection: SelectionConfig = SelectionConfig()

    def __post_init__(self) -> None:
        if self.fixed_width <= 0 or self.fixed_height <= 0:
            raise TipBenchError(
                f"fixed box dimensions must be positive, got "
                f"{self.fixed_width}x{self.fixed_height}"
            )
        if not 0.0 < self.iou_threshold < 1.0:
            raise TipBenchError(
                f"IoU threshold must lie in (0, 1), got {self.iou_threshold}"
            )


@dataclass(frozen=True)
class FrameOutcome:
    """Classification of one evaluated frame.

    ``distance`` is the Euclidean distance in pixels from the predicted
    midpoint to the ground-truth tip; it is present exactly when a detection
    was selected (TP and FP frames).
    """

    video_id: str
    frame_index: int
    outcome: Outcome
    distance: float | None

    def __post_init__(self) -> None:
        if (self.distance is None) != (self.outcome is Outcome.FN):
            raise TipBenchError("distance must be present iff the frame has a detection")
        if self.distance is not None and self.distance < 0:
            raise TipBenchError(f"distance must be non-negative, got {self.distance}")

    @property
    def key(self) -> FrameKey:
        return (self.video_id, self.frame_index)


@dataclass(frozen=True)
class Tally:
    tp: int
    fp: int
    fn: int

    def __post_init__(self) -> None:
        if min(self.tp, self.fp, self.fn) < 0:
            raise TipBenchError(f"tally counts must be non-negative, got {self}")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn


@dataclass(frozen=True)
class Metrics:
    """Derived ratios and distance statistics.

    A ratio whose denominator is zero is reported as None, never as 0 or
    NaN, so aggregation can skip undefined values explicitly.
    """

    recall: float | None
    precision: float | None
    f1: float | None
    mean_distance: float | None
    distance_sd: float | None

    def to_dict(self) -> dict:
        return {
            "recall": self.recall,
            "precision": self.precision,
            "f1": self.f1,
            "mean_distance": self.mean_distance,
            "distance_sd": self.distance_sd,
        }


def classify_frame(
    gt_tip: Point,
    selected: Detection | None,
    config: EvalConfig = EvalConfig(),
) -> tuple[Outcome, float | None]:
    """Classify one frame given its (already selected) detection, if any."""
    if selected is None:
        return Outcome.FN, None
    predicted = midpoint(selected.box)
    gt_box = fixed_box(gt_tip, config.fixed_width, config.fixed_height)
    pred_box = fixed_box(predicted, config.fixed_width, config.fixed_height)
    outcome = Outcome.TP if iou(gt_box, pred_box) > config.iou_threshold else Outcome.FP
    distance = math.hypot(predicted.x - gt_tip.x, predicted.y - gt_tip.y)
    return outcome, distance


def tally_outcomes(outcomes: Iterable[FrameOutcome]) -> Tally:
    tp = fp = fn = 0
    for o in outcomes:
        if o.outcome is Outcome.TP:
            tp += 1
        elif o.outcome is Outcome.FP:
            fp += 1
        else:
            fn += 1
    return Tally(tp, fp, fn)


def _ratio(numerator: int, denominator: int) -> float | None:
    return numerator / denominator if denominator > 0 else None


def metrics_from_tally(
    tally: Tally,
    distances: Sequence[float] = (),
) -> Metrics:
    recall = _ratio(tally.tp, tally.tp + tally.fn)
    precision = _ratio(tally.tp, tally.tp + tally.fp)
    if recall is None or precision is None or (precision + recall) == 0:
        f1 = None
    else:
        f1 = 2.0 * precision * recall / (precision + recall)
    if distances:
        mean_distance = statistics.mean(distances)
        distance_sd = sample_sd(distances)
    else:
        mean_distance = None
        distance_sd = None
    return Metrics(recall, precision, f1, mean_distance, distance_sd)


def compute_metrics(
    outcomes: Sequence[FrameOutcome],
    distance_over: str = "all",
) -> Metrics:
    """Recall, precision, F1 and distance statistics over frame outcomes.

    ``distance_over`` selects the population for the distance statistics:
    "all" uses every frame with a detection (TP and FP), "tp" restricts to
    true positives for sensitivity analysis.
    """
    if not outcomes:
        raise TipBenchError("cannot compute metrics over zero outcomes")
    if distance_over not in ("all", "tp"):
        raise TipBenchError(f"distance_over must be 'all' or 'tp', got {distance_over!r}")
    tally = tally_outcomes(outcomes)
    distances = [
        o.distance
        for o in outcomes
        if o.distance is not None and (distance_over == "all" or o.outcome is Outcome.TP)
    ]
    return metrics_from_tally(tally, distances)


@dataclass(frozen=True)
class EvaluationResult:
    tally: Tally
    metrics: Metrics
    outcomes: tuple[FrameOutcome, ...]
    warnings: tuple[str, ...] = ()


def evaluate_run(
    dataset: Dataset,
    detections: Mapping[FrameKey, FrameDetections],
    config: EvalConfig = EvalConfig(),
    frames: Sequence[TipAnnotation] | None = None,
    distance_over: str = "all",
) -> EvaluationResult:
    """Classify every selected frame and compute metrics over exactly those.

    ``frames`` defaults to the whole dataset; pass the output of
    :func:`tipbench.dataset.frames_for_role` to evaluate one split role.
    A frame with no entry in ``detections`` is treated as an empty
    detection list (a false negative).  Detections keyed by frames that are
    not in the dataset produce warnings, not failures.
    """
    if frames is None:
        frames = dataset.annotations
    known = dataset.frame_keys()
    warnings = tuple(
        f"detections for unknown frame {key} ignored"
        for key in sorted(detections.keys())
        if key not in known
    )
    outcomes = []
    for ann in frames:
        record = detections.get(ann.key)
        candidates = record.detections if record is not None else ()
        selected = select_top(candidates, config.selection)
        outcome, distance = classify_frame(ann.tip, selected, config)
        outcomes.append(FrameOutcome(ann.video_id, ann.frame_index, outcome, distance))
    metrics = compute_metrics(outcomes, distance_over)
    return EvaluationResult(
        tally=tally_outcomes(outcomes),
        metrics=metrics,
        outcomes=tuple(outcomes),
        warnings=warnings,
    )


def derive_fixed_box(boxes: Sequence[Box]) -> tuple[int, int]:
    """Mean width and height of a box collection, rounded to whole pixels.

    Halves round up.  This is how a fixed measurement box would be derived
    from a corpus of training boxes.
    """
    if not boxes:
        raise TipBenchError("cannot derive a fixed box from zero boxes")
    mean_w = statistics.mean(b.width for b in boxes)
    mean_h = statistics.mean(b.height for b in boxes)
    return int(math.floor(mean_w + 0.5)), int(math.floor(mean_h + 0.5))
