"""Synthetic datasets and simulated detectors for end-to-end verification.

Everything here is coordinate-level: the pipeline under test consumes only
coordinates, so rendering images would add weight without adding
verification power.  A tiny PGM renderer is provided for demos only.

All generation is deterministic for a given seed.  Videos get their own
derived random streams, so per-video generation can run in parallel without
changing the output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dataset import Dataset, TipAnnotation
from .detection import Detection, FrameDetections
from .errors import TipBenchError
from .evaluation import Tally
from .geometry import (
    DEFAULT_FIXED_HEIGHT,
    DEFAULT_FIXED_WIDTH,
    Box,
    MarginSemantics,
    Point,
    margin_box,
)

__all__ = [
    "SceneSpec",
    "DetectorErrorModel",
    "generate_dataset",
    "simulate_detector",
    "calibrate_to_counts",
    "render_frame_pgm",
]

# Default tip distribution parameters reproduce the center bias observed in
# real endoscopic footage, so periphery-weighted variants stay comparable.
_DEFAULT_MEAN = (316.30, 214.52)
_DEFAULT_SD = (88.44, 88.02)

_MAX_SAMPLE_ATTEMPTS = 10_000
_DECOY_MIN_DISTANCE = 200.0


@dataclass(frozen=True)
class SceneSpec:
    """Shape of a synthetic dataset: videos, frames, frame size, tip spread.

    Tips are drawn from a per-axis Gaussian truncated to the frame and
    snapped to a ``quantize``-pixel grid (1.0 mimics integer-pixel
    annotations; 0 disables snapping).
    """

    n_videos: int = 9
    frames_per_video: int = 257
    image_width: int = 640
    image_height: int = 480
    mean_x: float = _DEFAULT_MEAN[0]
    mean_y: float = _DEFAULT_MEAN[1]
    sd_x: float = _DEFAULT_SD[0]
    sd_y: float = _DEFAULT_SD[1]
    quantize: float = 1.0

    def __post_init__(self) -> None:
        if self.n_videos < 1 or self.frames_per_video < 1:
            raise TipBenchError("n_videos and frames_per_video must be positive")
        if self.image_width < 1 or self.image_height < 1:
            raise TipBenchError("image dimensions must be positive")
        if self.sd_x < 0 or self.sd_y < 0:
            raise TipBenchError("tip coordinate SDs must be non-negative")
        if not (0 <= self.mean_x < self.image_width and 0 <= self.mean_y < self.image_height):
            raise TipBenchError("tip distribution mean must lie inside the frame")
        if self.quantize < 0:
            raise TipBenchError("quantize must be non-negative")


def _sample_axis(
    rng: np.random.Generator, mean: float, sd: float, limit: float, quantize: float
) -> float:
    for _ in range(_MAX_SAMPLE_ATTEMPTS):
        value = float(rng.normal(mean, sd))
        if quantize > 0:
            value = round(value / quantize) * quantize
        if 0 <= value < limit:
            return value
    raise TipBenchError(
        f"could not draw an in-frame coordinate (mean {mean}, sd {sd}, limit {limit})"
    )


def _video_rng(seed: int, video_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(video_index,)))


def generate_dataset(seed: int, spec: SceneSpec = SceneSpec()) -> Dataset:
    """Generate a synthetic tip-annotated dataset.

    Frame indices step by 300 within each video, mimicking stills captured
    at a fixed interval from source footage.
    """
    pad = max(2, len(str(spec.n_videos - 1)))
    annotations = []
    for vi in range(spec.n_videos):
        rng = _video_rng(seed, vi)
        video_id = f"video_{vi:0{pad}d}"
        for fi in range(spec.frames_per_video):
            x = _sample_axis(rng, spec.mean_x, spec.sd_x, spec.image_width, spec.quantize)
            y = _sample_axis(rng, spec.mean_y, spec.sd_y, spec.image_height, spec.quantize)
            annotations.append(TipAnnotation(video_id, fi * 300, Point(x, y)))
    return Dataset(tuple(annotations), spec.image_width, spec.image_height)


@dataclass(frozen=True)
class DetectorErrorModel:
    """Controllable error model for a simulated single-class detector.

    The primary detection is a box of the training-margin size centered at
    the ground-truth tip displaced by either a fixed ``offset`` or Gaussian
    jitter.  By default the box is NOT clipped at frame borders, so its
    midpoint equals the displaced tip exactly even near edges; set
    ``clip_boxes`` to mimic a detector constrained to in-frame boxes.
    Dropped frames emit no detections at all.
    """

    jitter_sd: tuple[float, float] = (0.0, 0.0)
    offset: tuple[float, float] | None = None
    dropout: float = 0.0
    confidence: float = 1.0
    confidence_beta: tuple[float, float] | None = None
    decoys: int = 0
    decoy_confidence: tuple[float, float] = (0.01, 0.09)
    clip_boxes: bool = False

    def __post_init__(self) -> None:
        if self.jitter_sd[0] < 0 or self.jitter_sd[1] < 0:
            raise TipBenchError("jitter SDs must be non-negative")
        if not 0.0 <= self.dropout <= 1.0:
            raise TipBenchError(f"dropout {self.dropout} outside [0, 1]")
        if not 0.0 <= self.confidence <= 1.0:
            raise TipBenchError(f"confidence {self.confidence} outside [0, 1]")
        if self.confidence_beta is not None and (
            self.confidence_beta[0] <= 0 or self.confidence_beta[1] <= 0
        ):
            raise TipBenchError("Beta confidence parameters must be positive")
        if self.decoys < 0:
            raise TipBenchError("decoy count must be non-negative")
        lo, hi = self.decoy_confidence
        if not (0.0 <= lo <= hi <= 1.0):
            raise TipBenchError(f"decoy confidence range ({lo}, {hi}) invalid")


def _centered_box(cx: float, cy: float, half: float) -> Box:
    return Box(cx - half, cy - half, cx + half, cy + half)


def _clamp(value: float, limit: float) -> float:
    return min(max(value, 0.0), math.nextafter(limit, 0.0))


def _simulate_frame(
    rng: np.random.Generator,
    ann: TipAnnotation,
    model: DetectorErrorModel,
    half: float,
    width: int,
    height: int,
) -> FrameDetections:
    if rng.random() < model.dropout:
        return FrameDetections(ann.video_id, ann.frame_index, ())
    if model.offset is not None:
        dx, dy = model.offset
    else:
        dx = float(rng.normal(0.0, model.jitter_sd[0]))
        dy = float(rng.normal(0.0, model.jitter_sd[1]))
    cx, cy = ann.tip.x + dx, ann.tip.y + dy
    if model.clip_boxes:
        center = Point(_clamp(cx, width), _clamp(cy, height))
        box = margin_box(center, 2 * half, width, height, MarginSemantics.SIDE)
    else:
        box = _centered_box(cx, cy, half)
    if model.confidence_beta is not None:
        conf = float(rng.beta(*model.confidence_beta))
    else:
        conf = model.confidence
    detections = [Detection(box, conf)]
    for _ in range(model.decoys):
        dcx, dcy = ann.tip.x, ann.tip.y
        for _ in range(100):
            dcx = float(rng.uniform(0, width))
            dcy = float(rng.uniform(0, height))
            if math.hypot(dcx - ann.tip.x, dcy - ann.tip.y) >= _DECOY_MIN_DISTANCE:
                break
        dconf = float(rng.uniform(*model.decoy_confidence))
        detections.append(Detection(_centered_box(dcx, dcy, half), dconf))
    return FrameDetections(ann.video_id, ann.frame_index, tuple(detections))


def simulate_detector(
    dataset: Dataset,
    model: DetectorErrorModel,
    seed: int,
    margin: float,
    semantics: MarginSemantics = MarginSemantics.SIDE,
) -> list[FrameDetections]:
    """Emit one detection record per dataset frame, in dataset order."""
    if margin <= 0:
        raise TipBenchError(f"margin must be positive, got {margin}")
    half = margin / 2.0 if semantics is MarginSemantics.SIDE else float(margin)
    by_video: dict[str, list[TipAnnotation]] = {}
    for ann in dataset.annotations:
        by_video.setdefault(ann.video_id, []).append(ann)
    records: dict[tuple[str, int], FrameDetections] = {}
    for vi, video_id in enumerate(dataset.videos):
        rng = _video_rng(seed, vi)
        for ann in by_video[video_id]:
            records[ann.key] = _simulate_frame(
                rng, ann, model, half, dataset.image_width, dataset.image_height
            )
    return [records[ann.key] for ann in dataset.annotations]


def calibrate_to_counts(
    frames: Sequence[TipAnnotation],
    tally: Tally,
    fp_offset: tuple[float, float] = (70.0, 0.0),
    box_width: float = DEFAULT_FIXED_WIDTH,
    box_height: float = DEFAULT_FIXED_HEIGHT,
) -> list[FrameDetections]:
    """Scripted detections that realize an exact TP/FP/FN tally.

    The first ``tally.tp`` frames get an exact-hit detection, the next
    ``tally.fp`` frames get one displaced by ``fp_offset`` (the default 70
    px clears the 64 px IoU-0.5 boundary of the default fixed box), and the
    remaining frames get no detections.  Feeding the result through
    selection and classification reproduces the tally exactly, every run.
    """
    if tally.total != len(frames):
        raise TipBenchError(
            f"tally sums to {tally.total} but {len(frames)} frames were supplied"
        )
    records = []
    for i, ann in enumerate(frames):
        if i < tally.tp:
            center = (ann.tip.x, ann.tip.y)
        elif i < tally.tp + tally.fp:
            center = (ann.tip.x + fp_offset[0], ann.tip.y + fp_offset[1])
        else:
            records.append(FrameDetections(ann.video_id, ann.frame_index, ()))
            continue
        box = Box(
            center[0] - box_width / 2.0,
            center[1] - box_height / 2.0,
            center[0] + box_width / 2.0,
            center[1] + box_height / 2.0,
        )
        records.append(
            FrameDetections(ann.video_id, ann.frame_index, (Detection(box, 1.0),))
        )
    return records


def render_frame_pgm(width: int, height: int, tip: Point) -> bytes:
    """Render a frame as binary PGM: a bright shaft ending at the tip.

    Demo output only; nothing downstream consumes pixels.
    """
    img = np.full((height, width), 20, dtype=np.uint8)
    base_x, base_y = width / 2.0, float(height - 1)
    steps = max(2, int(math.hypot(tip.x - base_x, tip.y - base_y)) * 2)
    for t in np.linspace(0.0, 1.0, steps):
        px = int(base_x + (tip.x - base_x) * t)
        py = int(base_y + (tip.y - base_y) * t)
        img[max(0, py - 1) : py + 2, max(0, px - 1) : px + 2] = 170
    ty, tx = int(tip.y), int(tip.x)
    img[max(0, ty - 3) : ty + 4, max(0, tx - 3) : tx + 4] = 255
    return f"P5\n{width} {height}\n255\n".encode("ascii") + img.tobytes()
