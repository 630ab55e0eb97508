"""Detector-agnostic benchmark toolkit for surgical instrument tip localization.

The toolkit converts point annotations of instrument tips into
margin-parameterized training boxes, scores detector output with a
fixed-size measurement box and an IoU threshold, and runs the margin
sweep and cross-validation experiments around that scoring rule.  A
synthetic dataset generator and a simulated detector make the whole
pipeline reproducible end to end without any imaging data.
"""

from .dataset import (
    DEFAULT_IMAGE_HEIGHT,
    DEFAULT_IMAGE_WIDTH,
    CoordStats,
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
from .detection import (
    DEFAULT_CONFIDENCE_FLOOR,
    Detection,
    FrameDetections,
    SelectionConfig,
    parse_detections,
    select_top,
    serialize_detections,
)
from .errors import (
    AnnotationError,
    ConfigError,
    DetectionError,
    ExperimentError,
    TipBenchError,
)
from .evaluation import (
    EvalConfig,
    EvaluationResult,
    Metrics,
    Outcome,
    Tally,
    classify_frame,
    compute_metrics,
    derive_fixed_box,
    evaluate_run,
)
from .experiments import (
    DEFAULT_MARGINS,
    CVReport,
    MarginSweepPlan,
    SweepRow,
    aggregate_cv,
    export_scatter,
    run_cv,
    run_margin_sweep,
)
from .geometry import (
    DEFAULT_FIXED_HEIGHT,
    DEFAULT_FIXED_WIDTH,
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
from .synthetic import (
    DetectorErrorModel,
    SceneSpec,
    calibrate_to_counts,
    generate_dataset,
    simulate_detector,
)

__version__ = "0.1.0"

__all__ = [
    "AffineTransform",
    "AnnotationError",
    "AugmentationRanges",
    "Box",
    "CVReport",
    "ConfigError",
    "CoordStats",
    "DEFAULT_CONFIDENCE_FLOOR",
    "DEFAULT_FIXED_HEIGHT",
    "DEFAULT_FIXED_WIDTH",
    "DEFAULT_IMAGE_HEIGHT",
    "DEFAULT_IMAGE_WIDTH",
    "DEFAULT_MARGINS",
    "Dataset",
    "Detection",
    "DetectionError",
    "DetectorErrorModel",
    "EvalConfig",
    "EvaluationResult",
    "ExperimentError",
    "FrameDetections",
    "MarginSemantics",
    "MarginSweepPlan",
    "Metrics",
    "Outcome",
    "Point",
    "SceneSpec",
    "SelectionConfig",
    "SplitPlan",
    "SweepRow",
    "Tally",
    "TipAnnotation",
    "TipBenchError",
    "aggregate_cv",
    "apply_affine",
    "calibrate_to_counts",
    "classify_frame",
    "compute_metrics",
    "cv_folds",
    "dataset_stats",
    "derive_fixed_box",
    "evaluate_run",
    "export_scatter",
    "fixed_box",
    "frames_for_role",
    "generate_dataset",
    "iou",
    "margin_box",
    "midpoint",
    "parse_annotations",
    "parse_detections",
    "run_cv",
    "run_margin_sweep",
    "sample_augmentation",
    "select_top",
    "serialize_annotations",
    "serialize_detections",
    "simulate_detector",
    "split_random",
]
