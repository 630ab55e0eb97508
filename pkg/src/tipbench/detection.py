"""Detector-output ingestion and the single-detection selection rule.

Detector adapters stream one JSON object per line (JSONL), one frame per
line::

    {"video_id": "v1", "frame_index": 300,
     "detections": [{"x1": 0, "y1": 0, "x2": 10, "y2": 10, "confidence": 0.9}]}

Empty detection lists are legal; unknown extra fields are ignored.  Class
labels, if present, are ignored too: the task is single-class.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .dataset import FrameKey
from .errors import DetectionError
from .geometry import Box

__all__ = [
    "DEFAULT_CONFIDENCE_FLOOR",
    "Detection",
    "FrameDetections",
    "SelectionConfig",
    "parse_detections",
    "serialize_detections",
    "select_top",
]

DEFAULT_CONFIDENCE_FLOOR = 0.1


@dataclass(frozen=True)
class Detection:
    """One candidate box with its confidence."""

    box: Box
    confidence: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.confidence <= 1.0:
            raise DetectionError(f"confidence {self.confidence} outside [0, 1]")


@dataclass(frozen=True)
class FrameDetections:
    """All candidates a detector emitted for one frame, in input order."""

    video_id: str
    frame_index: int
    detections: tuple[Detection, ...]

    def __post_init__(self) -> None:
        if not self.video_id:
            raise DetectionError("video_id must be non-empty")
        if self.frame_index < 0:
            raise DetectionError(f"frame_index must be non-negative, got {self.frame_index}")

    @property
    def key(self) -> FrameKey:
        return (self.video_id, self.frame_index)


@dataclass(frozen=True)
class SelectionConfig:
    """Confidence floor for the single-detection selection rule.

    The comparison is inclusive: a detection exactly at the floor is kept.
    """

    confidence_floor: float = DEFAULT_CONFIDENCE_FLOOR

    def __post_init__(self) -> None:
        if not 0.0 <= self.confidence_floor <= 1.0:
            raise DetectionError(
                f"confidence floor {self.confidence_floor} outside [0, 1]"
            )


def _parse_detection(line_no: int, index: int, obj: object) -> Detection:
    if not isinstance(obj, dict):
        raise DetectionError(f"line {line_no}: detection {index} is not an object")
    try:
        x1, y1 = float(obj["x1"]), float(obj["y1"])
        x2, y2 = float(obj["x2"]), float(obj["y2"])
        confidence = float(obj["confidence"])
    except KeyError as exc:
        raise DetectionError(f"line {line_no}: detection {index} is missing {exc}") from None
    except (TypeError, ValueError):
        raise DetectionError(
            f"line {line_no}: detection {index} has a non-numeric field"
        ) from None
    if not 0.0 <= confidence <= 1.0:
        raise DetectionError(
            f"line {line_no}: confidence {confidence} outside [0, 1]"
        )
    if x1 >= x2 or y1 >= y2:
        raise DetectionError(
            f"line {line_no}: degenerate box ({x1}, {y1}, {x2}, {y2})"
        )
    return Detection(Box(x1, y1, x2, y2), confidence)


def parse_detections(text: str) -> dict[FrameKey, FrameDetections]:
    """Parse detection JSONL content into a frame-keyed map.

    Every error message names the 1-based line; duplicate frame keys are
    rejected.
    """
    frames: dict[FrameKey, FrameDetections] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DetectionError(f"line {line_no}: malformed JSON ({exc.msg})") from None
        if not isinstance(obj, dict):
            raise DetectionError(f"line {line_no}: expected a JSON object")
        try:
            video_id = str(obj["video_id"])
            frame_index = int(obj["frame_index"])
            raw_detections = obj["detections"]
        except KeyError as exc:
            raise DetectionError(f"line {line_no}: missing key {exc}") from None
        except (TypeError, ValueError):
            raise DetectionError(f"line {line_no}: malformed frame key") from None
        if not isinstance(raw_detections, list):
            raise DetectionError(f"line {line_no}: 'detections' must be a list")
        detections = tuple(
            _parse_detection(line_no, i, d) for i, d in enumerate(raw_detections)
        )
        record = FrameDetections(video_id, frame_index, detections)
        if record.key in frames:
            raise DetectionError(f"line {line_no}: duplicate frame {record.key}")
        frames[record.key] = record
    return frames


def serialize_detections(frames: Iterable[FrameDetections]) -> str:
    """Render detection records to JSONL (LF endings, trailing newline)."""
    lines = []
    for frame in frames:
        lines.append(
            json.dumps(
                {
                    "video_id": frame.video_id,
                    "frame_index": frame.frame_index,
                    "detections": [
                        {
                            "x1": d.box.x1,
                            "y1": d.box.y1,
                            "x2": d.box.x2,
                            "y2": d.box.y2,
                            "confidence": d.confidence,
                        }
                        for d in frame.detections
                    ],
                },
                separators=(",", ":"),
            )
        )
    return "\n".join(lines) + "\n" if lines else ""


def select_top(
    detections: Sequence[Detection],
    config: SelectionConfig = SelectionConfig(),
) -> Detection | None:
    """Keep the single highest-confidence detection, if it clears the floor.

    Ties break to the earliest detection in input order.  Returns None when
    the list is empty or every confidence is below the floor; downstream
    that frame becomes a false negative.
    """
    best: Detection | None = None
    for det in detections:
        if best is None or det.confidence > best.confidence:
            best = det
    if best is None or best.confidence < config.confidence_floor:
        return None
    return best
