"""Tip-annotated frame datasets: parsing, validation, statistics, video splits.

The annotation interchange format is a UTF-8 CSV with LF line endings and
the exact header ``video_id,frame_index,x,y``; coordinates may be integers
or decimals.  Frames are identified by (video_id, frame_index) and all
partitioning happens at the video level, never at the frame level.
"""

from __future__ import annotations

import csv
import io
import random
import statistics
from dataclasses import dataclass
from typing import Sequence

from .errors import AnnotationError
from .geometry import Point
from .stats import sample_sd

__all__ = [
    "DEFAULT_IMAGE_WIDTH",
    "DEFAULT_IMAGE_HEIGHT",
    "ANNOTATION_HEADER",
    "FrameKey",
    "TipAnnotation",
    "Dataset",
    "SplitPlan",
    "AxisStats",
    "CoordStats",
    "parse_annotations",
    "serialize_annotations",
    "dataset_stats",
    "split_random",
    "cv_folds",
    "frames_for_role",
]

DEFAULT_IMAGE_WIDTH = 640
DEFAULT_IMAGE_HEIGHT = 480

ANNOTATION_HEADER = ("video_id", "frame_index", "x", "y")

FrameKey = tuple[str, int]


@dataclass(frozen=True)
class TipAnnotation:
    """One labeled frame: which video, which frame, where the tip is."""

    video_id: str
    frame_index: int
    tip: Point

    def __post_init__(self) -> None:
        if not self.video_id:
            raise AnnotationError("video_id must be non-empty")
        if self.frame_index < 0:
            raise AnnotationError(f"frame_index must be non-negative, got {self.frame_index}")

    @property
    def key(self) -> FrameKey:
        return (self.video_id, self.frame_index)


@dataclass(frozen=True)
class Dataset:
    """An ordered collection of tip annotations plus the frame dimensions."""

    annotations: tuple[TipAnnotation, ...]
    image_width: int = DEFAULT_IMAGE_WIDTH
    image_height: int = DEFAULT_IMAGE_HEIGHT

    def __post_init__(self) -> None:
        if self.image_width <= 0 or self.image_height <= 0:
            raise AnnotationError(
                f"image dimensions must be positive, got "
                f"{self.image_width}x{self.image_height}"
            )
        seen: set[FrameKey] = set()
        for ann in self.annotations:
            if not (0 <= ann.tip.x < self.image_width and 0 <= ann.tip.y < self.image_height):
                raise AnnotationError(
                    f"tip ({ann.tip.x}, {ann.tip.y}) of frame {ann.key} outside "
                    f"frame bounds {self.image_width}x{self.image_height}"
                )
            if ann.key in seen:
                raise AnnotationError(f"duplicate annotation for {ann.key}")
            seen.add(ann.key)

    def __len__(self) -> int:
        return len(self.annotations)

    @property
    def videos(self) -> tuple[str, ...]:
        """Distinct video ids in lexicographic order."""
        return tuple(sorted({a.video_id for a in self.annotations}))

    def frame_keys(self) -> frozenset[FrameKey]:
        return frozenset(a.key for a in self.annotations)

    def video_frame_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for ann in self.annotations:
            counts[ann.video_id] = counts.get(ann.video_id, 0) + 1
        return counts


@dataclass(frozen=True)
class SplitPlan:
    """Assignment of whole videos to train/validation/test roles.

    ``seed`` records the PRNG seed used for randomized splits; it is None
    for deterministic constructions such as cross-validation folds.
    """

    train_videos: frozenset[str]
    val_videos: frozenset[str]
    test_videos: frozenset[str]
    seed: int | None = None

    def __post_init__(self) -> None:
        groups = (self.train_videos, self.val_videos, self.test_videos)
        if any(not g for g in groups):
            raise AnnotationError("every split group must be non-empty")
        total = len(self.train_videos) + len(self.val_videos) + len(self.test_videos)
        if len(self.train_videos | self.val_videos | self.test_videos) != total:
            raise AnnotationError("split groups must be pairwise disjoint")

    def all_videos(self) -> frozenset[str]:
        return self.train_videos | self.val_videos | self.test_videos

    def videos_for_role(self, role: str) -> frozenset[str]:
        try:
            return {
                "train": self.train_videos,
                "val": self.val_videos,
                "test": self.test_videos,
            }[role]
        except KeyError:
            raise AnnotationError(f"unknown split role {role!r}") from None

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "train_videos": sorted(self.train_videos),
            "val_videos": sorted(self.val_videos),
            "test_videos": sorted(self.test_videos),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SplitPlan":
        try:
            return cls(
                train_videos=frozenset(data["train_videos"]),
                val_videos=frozenset(data["val_videos"]),
                test_videos=frozenset(data["test_videos"]),
                seed=data.get("seed"),
            )
        except KeyError as exc:
            raise AnnotationError(f"split plan is missing key {exc}") from None


@dataclass(frozen=True)
class AxisStats:
    mean: float
    median: float
    sd: float
    min: float
    max: float


@dataclass(frozen=True)
class CoordStats:
    """Per-axis coordinate statistics over a dataset's tips."""

    x: AxisStats
    y: AxisStats
    count: int

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "x": vars(self.x).copy(),
            "y": vars(self.y).copy(),
        }


def _coord(row: int, name: str, raw: str, limit: int) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise AnnotationError(f"row {row}: malformed {name} coordinate {raw!r}") from None
    if not 0 <= value < limit:
        raise AnnotationError(f"row {row}: {name} {value} out of range [0, {limit})")
    return value


def parse_annotations(
    text: str,
    image_width: int = DEFAULT_IMAGE_WIDTH,
    image_height: int = DEFAULT_IMAGE_HEIGHT,
) -> Dataset:
    """Parse annotation CSV content into a validated Dataset.

    Row order is preserved.  Every error message names the 1-based CSV row
    (the header is row 1).
    """
    reader = csv.reader(io.StringIO(text))
    rows = [(i + 1, row) for i, row in enumerate(reader) if row]
    if not rows or tuple(cell.strip() for cell in rows[0][1]) != ANNOTATION_HEADER:
        raise AnnotationError(
            "row 1: expected header 'video_id,frame_index,x,y'"
        )

    annotations: list[TipAnnotation] = []
    seen: dict[FrameKey, int] = {}
    for row_no, row in rows[1:]:
        if len(row) != 4:
            raise AnnotationError(f"row {row_no}: expected 4 fields, got {len(row)}")
        video_id = row[0].strip()
        if not video_id:
            raise AnnotationError(f"row {row_no}: empty video_id")
        try:
            frame_index = int(row[1])
        except ValueError:
            raise AnnotationError(
                f"row {row_no}: malformed frame_index {row[1]!r}"
            ) from None
        if frame_index < 0:
            raise AnnotationError(f"row {row_no}: negative frame_index {frame_index}")
        x = _coord(row_no, "x", row[2], image_width)
        y = _coord(row_no, "y", row[3], image_height)
        key = (video_id, frame_index)
        if key in seen:
            raise AnnotationError(
                f"row {row_no}: duplicate annotation for {key} (first seen at row {seen[key]})"
            )
        seen[key] = row_no
        annotations.append(TipAnnotation(video_id, frame_index, Point(x, y)))

    return Dataset(tuple(annotations), image_width, image_height)


def _fmt_coord(value: float) -> str:
    # repr round-trips exactly; integral values are written without a dot.
    return str(int(value)) if value == int(value) else repr(value)


def serialize_annotations(dataset: Dataset) -> str:
    """Render a Dataset back to annotation CSV (LF endings, trailing newline)."""
    lines = [",".join(ANNOTATION_HEADER)]
    for ann in dataset.annotations:
        lines.append(
            f"{ann.video_id},{ann.frame_index},{_fmt_coord(ann.tip.x)},{_fmt_coord(ann.tip.y)}"
        )
    return "\n".join(lines) + "\n"


def _axis_stats(values: Sequence[float]) -> AxisStats:
    return AxisStats(
        mean=statistics.mean(values),
        median=statistics.median_low(values),
        sd=sample_sd(values),
        min=min(values),
        max=max(values),
    )


def dataset_stats(dataset: Dataset) -> CoordStats:
    """Per-axis mean, median, sample SD, min and max of the tip coordinates.

    The median of an even-sized axis is the lower of the two middle values
    and the SD uses the n-1 denominator (0 for a single annotation).
    """
    if not dataset.annotations:
        raise AnnotationError("cannot compute statistics of an empty dataset")
    xs = [a.tip.x for a in dataset.annotations]
    ys = [a.tip.y for a in dataset.annotations]
    return CoordStats(x=_axis_stats(xs), y=_axis_stats(ys), count=len(xs))


def split_random(
    dataset: Dataset,
    seed: int,
    n_train: int = 7,
    n_val: int = 1,
    n_test: int = 1,
) -> SplitPlan:
    """Randomly assign whole videos to train/val/test in the given counts.

    Videos are sorted lexicographically, shuffled by a PRNG seeded with
    ``seed``, then assigned in order train, val, test.  The same seed always
    reproduces the same plan.
    """
    if min(n_train, n_val, n_test) < 1:
        raise AnnotationError("each split group needs at least one video")
    videos = list(dataset.videos)
    expected = n_train + n_val + n_test
    if len(videos) != expected:
        raise AnnotationError(
            f"dataset has {len(videos)} videos but the split needs exactly "
            f"{expected} ({n_train}:{n_val}:{n_test})"
        )
    random.Random(seed).shuffle(videos)
    return SplitPlan(
        train_videos=frozenset(videos[:n_train]),
        val_videos=frozenset(videos[n_train : n_train + n_val]),
        test_videos=frozenset(videos[n_train + n_val :]),
        seed=seed,
    )


def cv_folds(dataset: Dataset, k: int = 9) -> list[SplitPlan]:
    """Leave-one-video-out folds with a rotating validation video.

    Fold i uses video i (in sorted order) as test, video (i+1) mod k as
    validation, and the remaining k-2 videos as train.
    """
    if k < 3:
        raise AnnotationError(f"cross-validation needs k >= 3, got {k}")
    videos = dataset.videos
    if len(videos) != k:
        raise AnnotationError(f"dataset has {len(videos)} videos, expected exactly {k}")
    folds = []
    for i in range(k):
        test = videos[i]
        val = videos[(i + 1) % k]
        train = frozenset(videos) - {test, val}
        folds.append(
            SplitPlan(
                train_videos=train,
                val_videos=frozenset({val}),
                test_videos=frozenset({test}),
                seed=None,
            )
        )
    return folds


def frames_for_role(dataset: Dataset, plan: SplitPlan, role: str) -> list[TipAnnotation]:
    """Annotations belonging to the plan's videos for a role, in dataset order."""
    if plan.all_videos() != set(dataset.videos):
        raise AnnotationError("split plan does not cover exactly the dataset's videos")
    wanted = plan.videos_for_role(role)
    return [a for a in dataset.annotations if a.video_id in wanted]
