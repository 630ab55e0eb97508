"""Box geometry: margin boxes, the fixed measurement box, IoU, affines."""

import math

import numpy as np
import pytest

from tipbench.geometry import (
    AffineTransform,
    AugmentationRanges,
    Box,
    MarginSemantics,
    Point,
    apply_affine,
    fixed_box,
    iou,
    margin_box,
    midpoint,
    sample_augmentation,
)


# --- Point / Box validation -------------------------------------------------


def test_point_rejects_non_finite():
    with pytest.raises(ValueError):
        Point(float("nan"), 0.0)
    with pytest.raises(ValueError):
        Point(0.0, float("inf"))


def test_box_rejects_empty_and_inverted():
    with pytest.raises(ValueError):
        Box(0, 0, 0, 10)
    with pytest.raises(ValueError):
        Box(10, 0, 0, 10)


def test_box_area():
    assert Box(1, 2, 4, 6).area == 12.0


# --- margin_box ---------------------------------------------------------------


def test_margin_box_side_semantics():
    box = margin_box(Point(320, 240), 150, 640, 480)
    assert (box.x1, box.y1, box.x2, box.y2) == (245.0, 165.0, 395.0, 315.0)


def test_margin_box_radius_doubles_side():
    box = margin_box(Point(320, 240), 150, 640, 480, MarginSemantics.RADIUS)
    assert (box.x1, box.y1, box.x2, box.y2) == (170.0, 90.0, 470.0, 390.0)
    assert box.width == 2 * margin_box(Point(320, 240), 150, 640, 480).width


def test_margin_box_clips_to_frame():
    box = margin_box(Point(10, 470), 100, 640, 480)
    assert (box.x1, box.y1, box.x2, box.y2) == (0.0, 420.0, 60.0, 480.0)


def test_margin_box_midpoint_recovers_tip_when_unclipped():
    tip = Point(320.5, 239.25)
    box = margin_box(tip, 150, 640, 480)
    assert midpoint(box) == tip


def test_margin_box_clipped_stays_inside_frame():
    rng = np.random.default_rng(11)
    for _ in range(500):
        tip = Point(float(rng.uniform(0, 640)), float(rng.uniform(0, 480)))
        margin = float(rng.uniform(1, 400))
        sem = MarginSemantics.RADIUS if rng.integers(2) else MarginSemantics.SIDE
        box = margin_box(tip, margin, 640, 480, sem)
        assert 0 <= box.x1 < box.x2 <= 640
        assert 0 <= box.y1 < box.y2 <= 480


def test_margin_box_input_validation():
    with pytest.raises(ValueError):
        margin_box(Point(10, 10), 0, 640, 480)
    with pytest.raises(ValueError):
        margin_box(Point(10, 10), -5, 640, 480)
    with pytest.raises(ValueError):
        margin_box(Point(640, 10), 50, 640, 480)
    with pytest.raises(ValueError):
        margin_box(Point(10, 10), 50, 0, 480)


def test_margin_semantics_from_string():
    assert MarginSemantics.from_string("side") is MarginSemantics.SIDE
    assert MarginSemantics.from_string(" Radius ") is MarginSemantics.RADIUS
    with pytest.raises(ValueError):
        MarginSemantics.from_string("diameter")


# --- fixed_box ----------------------------------------------------------------


def test_fixed_box_defaults_192_by_194():
    box = fixed_box(Point(320, 240))
    assert box.width == 192.0
    assert box.height == 194.0
    assert midpoint(box) == Point(320.0, 240.0)


def test_fixed_box_never_clips():
    box = fixed_box(Point(5, 5))
    assert box.x1 == -91.0 and box.y1 == -92.0
    assert midpoint(box) == Point(5.0, 5.0)


def test_fixed_box_rejects_degenerate_dims():
    with pytest.raises(ValueError):
        fixed_box(Point(0, 0), width=0)


# --- iou ------------------------------------------------------------------


def test_iou_identical_boxes():
    box = Box(10, 20, 200, 210)
    assert iou(box, box) == 1.0


def test_iou_disjoint_and_edge_sharing():
    assert iou(Box(0, 0, 10, 10), Box(20, 20, 30, 30)) == 0.0
    assert iou(Box(0, 0, 10, 10), Box(10, 0, 20, 10)) == 0.0


def test_iou_fixed_box_offset_is_half_at_64():
    a = fixed_box(Point(320, 240))
    assert iou(a, fixed_box(Point(320 + 64, 240))) == 0.5
    assert iou(a, fixed_box(Point(320 + 63, 240))) > 0.5


def test_iou_horizontal_offset_closed_form():
    # Equal w x h boxes offset by d along x: IoU = (w - d) / (w + d).
    w = 192.0
    a = fixed_box(Point(320, 240))
    for d in range(0, 193):
        expected = (w - d) / (w + d)
        assert abs(iou(a, fixed_box(Point(320 + d, 240))) - expected) <= 1e-12
    assert iou(a, fixed_box(Point(320 + 192, 240))) == 0.0


def _raster_iou(a: Box, b: Box, h: float = 0.5) -> float:
    """Counting oracle: exact when all box edges lie on the h-grid."""
    xs = np.arange(min(a.x1, b.x1) + h / 2, max(a.x2, b.x2), h)
    ys = np.arange(min(a.y1, b.y1) + h / 2, max(a.y2, b.y2), h)
    gx, gy = np.meshgrid(xs, ys)
    in_a = (gx >= a.x1) & (gx < a.x2) & (gy >= a.y1) & (gy < a.y2)
    in_b = (gx >= b.x1) & (gx < b.x2) & (gy >= b.y1) & (gy < b.y2)
    union = np.count_nonzero(in_a | in_b)
    return np.count_nonzero(in_a & in_b) / union


def _random_grid_box(rng: np.random.Generator, h: float = 0.5) -> Box:
    x1 = rng.integers(0, 80) * h
    y1 = rng.integers(0, 80) * h
    return Box(x1, y1, x1 + rng.integers(1, 60) * h, y1 + rng.integers(1, 60) * h)


def test_iou_matches_rasterization_oracle():
    rng = np.random.default_rng(5)
    for _ in range(1000):
        a, b = _random_grid_box(rng), _random_grid_box(rng)
        value = iou(a, b)
        assert 0.0 <= value <= 1.0
        assert value == iou(b, a)
        assert abs(value - _raster_iou(a, b)) <= 1e-6


# --- affine transforms ------------------------------------------------------


def test_affine_identity_and_translation():
    p = Point(3.5, -2.0)
    assert AffineTransform.identity().apply_point(p) == p
    moved = AffineTransform.translation(10, -5).apply_point(p)
    assert (moved.x, moved.y) == (13.5, -7.0)


def test_affine_rotation_quarter_turn():
    p = AffineTransform.rotation(math.pi / 2).apply_point(Point(1, 0))
    assert abs(p.x - 0.0) <= 1e-12 and abs(p.y - 1.0) <= 1e-12


def test_affine_shear_and_scale():
    assert AffineTransform.shear_x(0.5).apply_point(Point(1, 2)) == Point(2.0, 2.0)
    assert AffineTransform.scaling(0.5).apply_point(Point(4, 6)) == Point(2.0, 3.0)


def test_affine_rejects_singular():
    with pytest.raises(ValueError):
        AffineTransform(1.0, 1.0, 0.0, 1.0, 1.0, 0.0)


def test_affine_composition_applies_right_factor_first():
    rng = np.random.default_rng(17)
    for _ in range(200):
        t1 = sample_augmentation(rng)
        t2 = sample_augmentation(rng)
        p = Point(float(rng.uniform(-100, 700)), float(rng.uniform(-100, 600)))
        composed = (t1 @ t2).apply_point(p)
        stepwise = t1.apply_point(t2.apply_point(p))
        assert abs(composed.x - stepwise.x) <= 1e-9
        assert abs(composed.y - stepwise.y) <= 1e-9


def test_augmentation_ranges_reject_inverted():
    with pytest.raises(ValueError):
        AugmentationRanges(scale=(1.0, 0.9))


def test_sample_augmentation_deterministic_per_seed():
    draws1 = [sample_augmentation(np.random.default_rng(42)) for _ in range(3)]
    draws2 = [sample_augmentation(np.random.default_rng(42)) for _ in range(3)]
    assert draws1[0] == draws2[0]
    # successive draws from one generator differ
    rng = np.random.default_rng(42)
    assert sample_augmentation(rng) != sample_augmentation(rng)


def test_sample_augmentation_translation_within_range():
    # The frame center is a fixed point of the centered linear part, so its
    # displacement is exactly the translation draw.
    rng = np.random.default_rng(23)
    center = Point(320.0, 240.0)
    for _ in range(500):
        t = sample_augmentation(rng)
        moved = t.apply_point(center)
        assert abs(moved.x - center.x) <= 64.0 + 1e-9
        assert abs(moved.y - center.y) <= 48.0 + 1e-9


def test_apply_affine_box_is_corner_hull():
    rng = np.random.default_rng(31)
    for _ in range(300):
        t = sample_augmentation(rng)
        box = _random_grid_box(rng)
        hull = apply_affine(t, box)
        corners = [
            t.apply_point(Point(x, y))
            for x in (box.x1, box.x2)
            for y in (box.y1, box.y2)
        ]
        xs = [c.x for c in corners]
        ys = [c.y for c in corners]
        assert hull.x1 == min(xs) and hull.x2 == max(xs)
        assert hull.y1 == min(ys) and hull.y2 == max(ys)


def test_apply_affine_point_matches_apply_point():
    t = AffineTransform.translation(1, 2)
    assert apply_affine(t, Point(0, 0)) == Point(1.0, 2.0)


def test_apply_affine_rejects_other_types():
    with pytest.raises(TypeError):
        apply_affine(AffineTransform.identity(), (0, 0))
