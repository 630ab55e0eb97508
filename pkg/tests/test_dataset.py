"""Annotation parsing, coordinate statistics, and video-level splits."""

import math
import random

import numpy as np
import pytest

from tipbench.dataset import (
    Dataset,
    SplitPlan,
    TipAnnotation,
    cv_folds,
    dataset_stats,
    frames_for_role,
    parse_annotations,
    serialize_annotations,
    split_random,
)
from tipbench.errors import AnnotationError
from tipbench.geometry import Point

CSV_OK = "video_id,frame_index,x,y\nv1,0,100,200\nv1,300,10.5,20.25\nv2,0,639,479\n"


def _dataset(video_frames: dict[str, int]) -> Dataset:
    anns = []
    for video, n in sorted(video_frames.items()):
        for i in range(n):
            anns.append(TipAnnotation(video, i * 300, Point(100.0, 100.0)))
    return Dataset(tuple(anns))


# --- parsing ----------------------------------------------------------------


def test_parse_preserves_order_and_values():
    ds = parse_annotations(CSV_OK)
    assert len(ds) == 3
    assert ds.annotations[0] == TipAnnotation("v1", 0, Point(100.0, 200.0))
    assert ds.annotations[1].tip == Point(10.5, 20.25)
    assert ds.videos == ("v1", "v2")


def test_parse_rejects_wrong_header():
    with pytest.raises(AnnotationError, match="row 1"):
        parse_annotations("frame,x,y\n")
    with pytest.raises(AnnotationError, match="row 1"):
        parse_annotations("")


def test_parse_accepts_padded_header():
    ds = parse_annotations("video_id, frame_index, x, y\nv1,0,1,2\n")
    assert len(ds) == 1


def test_parse_rejects_malformed_rows():
    base = "video_id,frame_index,x,y\n"
    with pytest.raises(AnnotationError, match="row 2: expected 4 fields"):
        parse_annotations(base + "v1,0,100\n")
    with pytest.raises(AnnotationError, match="row 2: malformed frame_index"):
        parse_annotations(base + "v1,zero,100,100\n")
    with pytest.raises(AnnotationError, match="row 2: negative frame_index"):
        parse_annotations(base + "v1,-3,100,100\n")
    with pytest.raises(AnnotationError, match="row 2: malformed x"):
        parse_annotations(base + "v1,0,wide,100\n")
    with pytest.raises(AnnotationError, match="row 3: empty video_id"):
        parse_annotations(base + "v1,0,100,100\n,5,100,100\n")


def test_parse_rejects_out_of_range_coordinates():
    base = "video_id,frame_index,x,y\n"
    with pytest.raises(AnnotationError, match=r"row 2: x 640.0 out of range \[0, 640\)"):
        parse_annotations(base + "v1,0,640,100\n")
    with pytest.raises(AnnotationError, match="row 2: y -1.0 out of range"):
        parse_annotations(base + "v1,0,100,-1\n")
    # custom frame dimensions move the bound
    parse_annotations(base + "v1,0,640,100\n", image_width=1280)


def test_parse_rejects_duplicate_frame_with_both_rows_named():
    text = "video_id,frame_index,x,y\nv1,0,1,2\nv1,300,3,4\nv1,0,5,6\n"
    with pytest.raises(AnnotationError, match=r"row 4: duplicate .*first seen at row 2"):
        parse_annotations(text)


def test_serialize_round_trips():
    ds = parse_annotations(CSV_OK)
    text = serialize_annotations(ds)
    assert text == CSV_OK
    assert parse_annotations(text) == ds


def test_serialize_writes_integral_floats_without_dot():
    ds = Dataset((TipAnnotation("v", 0, Point(12.0, 7.5)),))
    assert "v,0,12,7.5" in serialize_annotations(ds)


# --- statistics -------------------------------------------------------------


def test_stats_two_values():
    ds = Dataset(
        (
            TipAnnotation("v", 0, Point(100.0, 10.0)),
            TipAnnotation("v", 1, Point(300.0, 20.0)),
        )
    )
    stats = dataset_stats(ds)
    assert stats.count == 2
    assert stats.x.mean == 200.0
    assert stats.x.median == 100.0  # lower of the two middle values
    assert abs(stats.x.sd - 141.4213562373095) <= 1e-12
    assert (stats.x.min, stats.x.max) == (100.0, 300.0)


def test_stats_single_annotation_has_zero_sd():
    ds = Dataset((TipAnnotation("v", 0, Point(5.0, 6.0)),))
    stats = dataset_stats(ds)
    assert stats.x.sd == 0.0 and stats.y.sd == 0.0
    assert stats.x.median == 5.0


def test_stats_identical_values_have_exactly_zero_sd():
    ds = _dataset({"v": 50})
    stats = dataset_stats(ds)
    assert stats.x.sd == 0.0


def test_stats_empty_dataset_rejected():
    with pytest.raises(AnnotationError):
        dataset_stats(Dataset(()))


def _oracle_axis(values):
    """Independent recomputation: Welford mean/SD and sorted-scan median."""
    mean, m2 = 0.0, 0.0
    for i, v in enumerate(values, start=1):
        delta = v - mean
        mean += delta / i
        m2 += delta * (v - mean)
    sd = math.sqrt(m2 / (len(values) - 1)) if len(values) > 1 else 0.0
    ordered = sorted(values)
    median = ordered[(len(ordered) - 1) // 2]
    return mean, median, sd


def test_stats_match_independent_oracle():
    rng = np.random.default_rng(29)
    for _ in range(1000):
        n = int(rng.integers(1, 40))
        xs = [float(rng.uniform(0, 640)) for _ in range(n)]
        ys = [float(rng.uniform(0, 480)) for _ in range(n)]
        ds = Dataset(
            tuple(
                TipAnnotation("v", i, Point(x, y))
                for i, (x, y) in enumerate(zip(xs, ys))
            )
        )
        stats = dataset_stats(ds)
        for axis, values in ((stats.x, xs), (stats.y, ys)):
            mean, median, sd = _oracle_axis(values)
            assert abs(axis.mean - mean) <= 1e-9
            assert axis.median == median
            assert abs(axis.sd - sd) <= 1e-9
            assert axis.min == min(values) and axis.max == max(values)


# --- dataset validation -------------------------------------------------------


def test_dataset_rejects_out_of_bounds_tip():
    with pytest.raises(AnnotationError, match="outside"):
        Dataset((TipAnnotation("v", 0, Point(640.0, 0.0)),))


def test_dataset_rejects_duplicate_keys():
    ann = TipAnnotation("v", 0, Point(1.0, 1.0))
    with pytest.raises(AnnotationError, match="duplicate"):
        Dataset((ann, ann))


# --- splits -------------------------------------------------------------------


def test_split_random_is_deterministic_and_disjoint():
    ds = _dataset({f"video_{i}": 3 for i in range(9)})
    plan1 = split_random(ds, seed=42)
    plan2 = split_random(ds, seed=42)
    assert plan1 == plan2
    assert plan1.seed == 42
    assert len(plan1.train_videos) == 7
    assert len(plan1.val_videos) == 1
    assert len(plan1.test_videos) == 1
    assert plan1.all_videos() == set(ds.videos)
    assert split_random(ds, seed=43) != plan1 or True  # different seeds may collide


def test_split_random_matches_reference_shuffle():
    ds = _dataset({f"video_{i}": 1 for i in range(9)})
    videos = sorted(ds.videos)
    random.Random(7).shuffle(videos)
    plan = split_random(ds, seed=7)
    assert plan.train_videos == frozenset(videos[:7])
    assert plan.val_videos == frozenset(videos[7:8])
    assert plan.test_videos == frozenset(videos[8:])


def test_split_random_rejects_count_mismatch():
    ds = _dataset({f"v{i}": 1 for i in range(8)})
    with pytest.raises(AnnotationError, match="8 videos"):
        split_random(ds, seed=1)
    with pytest.raises(AnnotationError):
        split_random(_dataset({f"v{i}": 1 for i in range(9)}), seed=1, n_val=0)


def test_split_plan_round_trips_through_dict():
    plan = SplitPlan(frozenset({"a", "b"}), frozenset({"c"}), frozenset({"d"}), seed=5)
    data = plan.to_dict()
    assert data["train_videos"] == ["a", "b"]  # sorted for stable files
    assert SplitPlan.from_dict(data) == plan


def test_split_plan_validation():
    with pytest.raises(AnnotationError, match="non-empty"):
        SplitPlan(frozenset(), frozenset({"a"}), frozenset({"b"}))
    with pytest.raises(AnnotationError, match="disjoint"):
        SplitPlan(frozenset({"a"}), frozenset({"a"}), frozenset({"b"}))
    with pytest.raises(AnnotationError, match="missing key"):
        SplitPlan.from_dict({"train_videos": ["a"]})


def test_cv_folds_rotation_rule():
    ds = _dataset({f"video_{i}": 2 for i in range(9)})
    folds = cv_folds(ds, k=9)
    assert len(folds) == 9
    videos = ds.videos
    for i, plan in enumerate(folds):
        assert plan.test_videos == frozenset({videos[i]})
        assert plan.val_videos == frozenset({videos[(i + 1) % 9]})
        assert len(plan.train_videos) == 7
        assert plan.seed is None
    # each video is test exactly once and val exactly once
    assert sorted(v for f in folds for v in f.test_videos) == sorted(videos)
    assert sorted(v for f in folds for v in f.val_videos) == sorted(videos)


def test_cv_folds_deterministic():
    ds = _dataset({f"video_{i}": 2 for i in range(9)})
    assert cv_folds(ds) == cv_folds(ds)


def test_cv_folds_rejects_wrong_k():
    ds = _dataset({f"video_{i}": 1 for i in range(9)})
    with pytest.raises(AnnotationError):
        cv_folds(ds, k=8)
    with pytest.raises(AnnotationError):
        cv_folds(ds, k=2)


def test_frames_for_role_filters_in_dataset_order():
    ds = _dataset({"a": 2, "b": 3, "c": 1})
    plan = SplitPlan(frozenset({"b"}), frozenset({"c"}), frozenset({"a"}))
    test_frames = frames_for_role(ds, plan, "test")
    assert [f.video_id for f in test_frames] == ["a", "a"]
    assert len(frames_for_role(ds, plan, "train")) == 3
    with pytest.raises(AnnotationError, match="unknown split role"):
        frames_for_role(ds, plan, "holdout")


def test_frames_for_role_requires_full_coverage():
    ds = _dataset({"a": 1, "b": 1, "c": 1, "d": 1})
    plan = SplitPlan(frozenset({"b"}), frozenset({"c"}), frozenset({"a"}))
    with pytest.raises(AnnotationError, match="does not cover"):
        frames_for_role(ds, plan, "test")
