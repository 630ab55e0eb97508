"""Axis-aligned box geometry: margin boxes, IoU, midpoints, affine transforms.

Coordinates are continuous pixels with the origin at the top-left corner of
the frame, x increasing rightward and y downward.  Boxes are half-open
regions [x1, x2) x [y1, y2) with real-valued areas, which avoids every
off-by-one pixel-counting ambiguity downstream.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Point",
    "Box",
    "MarginSemantics",
    "AffineTransform",
    "AugmentationRanges",
    "DEFAULT_FIXED_WIDTH",
    "DEFAULT_FIXED_HEIGHT",
    "margin_box",
    "fixed_box",
    "midpoint",
    "iou",
    "sample_augmentation",
    "apply_affine",
]

# Measurement-box dimensions shipped as defaults throughout the toolkit.
DEFAULT_FIXED_WIDTH = 192.0
DEFAULT_FIXED_HEIGHT = 194.0

_MIN_DETERMINANT = 1e-12


@dataclass(frozen=True)
class Point:
    """A location in continuous pixel coordinates."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"point coordinates must be finite, got ({self.x}, {self.y})")


@dataclass(frozen=True)
class Box:
    """Half-open axis-aligned rectangle [x1, x2) x [y1, y2) with positive area."""

    x1: float
    y1: float
    x2: float
    y2: float

    def __post_init__(self) -> None:
        for v in (self.x1, self.y1, self.x2, self.y2):
            if not math.isfinite(v):
                raise ValueError(f"box coordinates must be finite, got {self}")
        if not (self.x1 < self.x2 and self.y1 < self.y2):
            raise ValueError(
                f"box must satisfy x1 < x2 and y1 < y2, got "
                f"({self.x1}, {self.y1}, {self.x2}, {self.y2})"
            )

    @property
    def width(self) -> float:
        return self.x2 - self.x1

    @property
    def height(self) -> float:
        return self.y2 - self.y1

    @property
    def area(self) -> float:
        return self.width * self.height


class MarginSemantics(enum.Enum):
    """How the margin parameter M maps to a box side length.

    SIDE:   the box side equals M (an "M x M" box).
    RADIUS: M measures the center-to-edge distance, so the side equals 2M.

    Both readings are first-class so experiments can be rerun under either.
    """

    SIDE = "side"
    RADIUS = "radius"

    @classmethod
    def from_string(cls, value: str) -> "MarginSemantics":
        try:
            return cls(value.strip().lower())
        except ValueError:
            raise ValueError(
                f"unknown margin semantics {value!r}; expected 'side' or 'radius'"
            ) from None


def margin_box(
    tip: Point,
    margin: float,
    width: float,
    height: float,
    semantics: MarginSemantics = MarginSemantics.SIDE,
) -> Box:
    """Build the training box of margin ``margin`` centered on a tip.

    The box is clipped to the frame [0, width) x [0, height); clipping may
    move the box center away from the tip.  The tip must lie inside the
    frame, which guarantees the clipped box keeps positive area.
    """
    if margin <= 0:
        raise ValueError(f"margin must be positive, got {margin}")
    if width <= 0 or height <= 0:
        raise ValueError(f"frame dimensions must be positive, got {width}x{height}")
    if not (0 <= tip.x < width and 0 <= tip.y < height):
        raise ValueError(f"tip ({tip.x}, {tip.y}) outside frame {width}x{height}")
    half = margin / 2.0 if semantics is MarginSemantics.SIDE else float(margin)
    return Box(
        max(0.0, tip.x - half),
        max(0.0, tip.y - half),
        min(float(width), tip.x + half),
        min(float(height), tip.y + half),
    )


def fixed_box(
    center: Point,
    width: float = DEFAULT_FIXED_WIDTH,
    height: float = DEFAULT_FIXED_HEIGHT,
) -> Box:
    """Build the fixed measurement box centered on a point.

    Deliberately NOT clipped to any frame: the fixed box is a measurement
    construct, and clipping it near borders would silently change the metric.
    """
    if width <= 0 or height <= 0:
        raise ValueError(f"fixed box dimensions must be positive, got {width}x{height}")
    return Box(
        center.x - width / 2.0,
        center.y - height / 2.0,
        center.x + width / 2.0,
        center.y + height / 2.0,
    )


def midpoint(box: Box) -> Point:
    """Center of a box."""
    return Point((box.x1 + box.x2) / 2.0, (box.y1 + box.y2) / 2.0)


def iou(a: Box, b: Box) -> float:
    """Intersection over union of two boxes, using continuous areas.

    Disjoint boxes (including boxes that only share an edge) score 0.
    """
    ix = min(a.x2, b.x2) - max(a.x1, b.x1)
    iy = min(a.y2, b.y2) - max(a.y1, b.y1)
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = ix * iy
    union = a.area + b.area - inter
    return inter / union


@dataclass(frozen=True)
class AffineTransform:
    """A 2x3 affine map [a b tx; c d ty] acting on column vectors (x, y, 1)."""

    a: float
    b: float
    tx: float
    c: float
    d: float
    ty: float

    def __post_init__(self) -> None:
        det = self.a * self.d - self.b * self.c
        if abs(det) <= _MIN_DETERMINANT:
            raise ValueError(f"affine transform is singular (|det| = {abs(det)})")

    @classmethod
    def identity(cls) -> "AffineTransform":
        return cls(1.0, 0.0, 0.0, 0.0, 1.0, 0.0)

    @classmethod
    def translation(cls, tx: float, ty: float) -> "AffineTransform":
        return cls(1.0, 0.0, tx, 0.0, 1.0, ty)

    @classmethod
    def rotation(cls, radians: float) -> "AffineTransform":
        cos, sin = math.cos(radians), math.sin(radians)
        return cls(cos, -sin, 0.0, sin, cos, 0.0)

    @classmethod
    def shear_x(cls, factor: float) -> "AffineTransform":
        """Horizontal shear: x' = x + factor * y."""
        return cls(1.0, factor, 0.0, 0.0, 1.0, 0.0)

    @classmethod
    def scaling(cls, factor: float) -> "AffineTransform":
        return cls(factor, 0.0, 0.0, 0.0, factor, 0.0)

    def __matmul__(self, other: "AffineTransform") -> "AffineTransform":
        """Compose transforms: (A @ B) applies B first, then A."""
        return AffineTransform(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.a * other.tx + self.b * other.ty + self.tx,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
            self.c * other.tx + self.d * other.ty + self.ty,
        )

    def apply_point(self, p: Point) -> Point:
        return Point(
            self.a * p.x + self.b * p.y + self.tx,
            self.c * p.x + self.d * p.y + self.ty,
        )


@dataclass(frozen=True)
class AugmentationRanges:
    """Uniform sampling ranges for coordinate-space augmentation.

    ``translation`` is a fraction of the frame dimension per axis; the other
    entries are a rotation angle in radians, a horizontal shear factor, and
    an isotropic scale factor.
    """

    rotation: tuple[float, float] = (-0.1, 0.1)
    translation: tuple[float, float] = (-0.1, 0.1)
    shear: tuple[float, float] = (-0.1, 0.1)
    scale: tuple[float, float] = (0.9, 1.0)

    def __post_init__(self) -> None:
        for name in ("rotation", "translation", "shear", "scale"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"inverted {name} range ({lo}, {hi})")


def sample_augmentation(
    rng: np.random.Generator,
    ranges: AugmentationRanges = AugmentationRanges(),
    width: float = 640.0,
    height: float = 480.0,
) -> AffineTransform:
    """Draw one random augmentation transform.

    The linear part is composed about the frame center, applying scale, then
    shear, then rotation; the translation is added last.  Draw order is
    fixed (rotation, tx, ty, shear, scale) so a seeded generator always
    produces the same matrix.
    """
    theta = rng.uniform(*ranges.rotation)
    tx = rng.uniform(*ranges.translation) * width
    ty = rng.uniform(*ranges.translation) * height
    shear = rng.uniform(*ranges.shear)
    scale = rng.uniform(*ranges.scale)

    linear = (
        AffineTransform.rotation(theta)
        @ AffineTransform.shear_x(shear)
        @ AffineTransform.scaling(scale)
    )
    cx, cy = width / 2.0, height / 2.0
    about_center = (
        AffineTransform.translation(cx, cy)
        @ linear
        @ AffineTransform.translation(-cx, -cy)
    )
    return AffineTransform.translation(tx, ty) @ about_center


def apply_affine(transform: AffineTransform, geom: Point | Box) -> Point | Box:
    """Map a point exactly, or a box to the axis-aligned hull of its corners."""
    if isinstance(geom, Point):
        return transform.apply_point(geom)
    if isinstance(geom, Box):
        corners = [
            transform.apply_point(Point(x, y))
            for x in (geom.x1, geom.x2)
            for y in (geom.y1, geom.y2)
        ]
        xs = [p.x for p in corners]
        ys = [p.y for p in corners]
        return Box(min(xs), min(ys), max(xs), max(ys))
    raise TypeError(f"cannot apply affine transform to {type(geom).__name__}")
