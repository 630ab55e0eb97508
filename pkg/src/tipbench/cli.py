"""Command-line surface binding the toolkit into reproducible workflows.

Exit codes: 0 on success, 1 on validation errors (bad flags, malformed or
inconsistent inputs), 2 on I/O errors.  Diagnostics go to standard error;
data goes to files or standard output.  Every command that writes files
also writes a ``*.manifest.json`` recording argv, resolved configuration,
seeds, input digests and output paths.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .config import KVConfig
from .dataset import (
    DEFAULT_IMAGE_HEIGHT,
    DEFAULT_IMAGE_WIDTH,
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
from .detection import DEFAULT_CONFIDENCE_FLOOR, SelectionConfig, parse_detections, serialize_detections
from .errors import ConfigError, TipBenchError
from .evaluation import EvalConfig, EvaluationResult, Tally, evaluate_run
from .experiments import (
    DEFAULT_MARGINS,
    MarginSweepPlan,
    cv_report_payload,
    export_scatter,
    fmt3,
    render_cv_csv,
    render_cv_markdown,
    render_sweep_csv,
    render_sweep_markdown,
    run_cv,
    run_margin_sweep,
    sweep_report_payload,
)
from .geometry import (
    DEFAULT_FIXED_HEIGHT,
    DEFAULT_FIXED_WIDTH,
    MarginSemantics,
    margin_box,
)
from .manifest import atomic_write_bytes, atomic_write_text, build_manifest, config_hash, write_manifest
from .synthetic import (
    DetectorErrorModel,
    SceneSpec,
    calibrate_to_counts,
    generate_dataset,
    render_frame_pgm,
    simulate_detector,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; the toolkit reserves 2 for I/O.
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _err(message: str) -> None:
    print(message, file=sys.stderr)


def _read_text(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _fmt_num(value: float) -> str:
    return str(int(value)) if value == int(value) else repr(value)


def _load_dataset(args) -> Dataset:
    return parse_annotations(_read_text(args.annotations), args.width, args.height)


def _load_split_plan(path: str) -> SplitPlan:
    try:
        data = json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"split plan {path}: malformed JSON ({exc.msg})") from None
    return SplitPlan.from_dict(data)


def _load_kv(path: str) -> KVConfig:
    return KVConfig.from_text(_read_text(path), source=path)


def _warn_unused(cfg: KVConfig) -> None:
    for key in cfg.unused_keys():
        _err(f"warning: {cfg.source}: unused config key {key!r}")


def _json_text(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _write_manifest_for(
    command: str,
    argv: list[str],
    config: dict,
    seeds: dict,
    inputs: list[str],
    outputs: list[Path],
    manifest_path: Path,
) -> None:
    manifest = build_manifest(
        command, argv, config, seeds, inputs, [str(p) for p in outputs], __version__
    )
    write_manifest(manifest_path, manifest)


def _emit_single(
    text: str,
    out: str | None,
    command: str,
    argv: list[str],
    config: dict,
    seeds: dict,
    inputs: list[str],
) -> None:
    """Write to --out plus a sibling manifest, or stream to stdout."""
    if out is None:
        sys.stdout.write(text)
        return
    out_path = Path(out)
    atomic_write_text(out_path, text)
    _write_manifest_for(
        command, argv, config, seeds, inputs, [out_path],
        out_path.with_suffix(".manifest.json"),
    )


def _eval_config(fixed_w: float, fixed_h: float, iou: float, conf: float) -> EvalConfig:
    return EvalConfig(
        fixed_width=fixed_w,
        fixed_height=fixed_h,
        iou_threshold=iou,
        selection=SelectionConfig(confidence_floor=conf),
    )


def _select_frames(dataset: Dataset, split: str | None, role: str) -> list[TipAnnotation]:
    if split is None:
        return list(dataset.annotations)
    plan = _load_split_plan(split)
    return frames_for_role(dataset, plan, role)


# --- commands ---------------------------------------------------------------


def cmd_boxes(args, argv) -> int:
    dataset = _load_dataset(args)
    semantics = MarginSemantics.from_string(args.semantics)
    lines = ["video_id,frame_index,x1,y1,x2,y2"]
    for ann in dataset.annotations:
        box = margin_box(ann.tip, args.margin, dataset.image_width, dataset.image_height, semantics)
        lines.append(
            f"{ann.video_id},{ann.frame_index},{_fmt_num(box.x1)},{_fmt_num(box.y1)},"
            f"{_fmt_num(box.x2)},{_fmt_num(box.y2)}"
        )
    config = {
        "annotations": args.annotations,
        "margin": args.margin,
        "semantics": semantics.value,
        "image_width": args.width,
        "image_height": args.height,
    }
    _emit_single(
        "\n".join(lines) + "\n", args.out, "boxes", argv, config, {}, [args.annotations]
    )
    return EXIT_OK


def cmd_split(args, argv) -> int:
    dataset = _load_dataset(args)
    plan = split_random(dataset, args.seed, args.train, args.val, args.test)
    counts = dataset.video_frame_counts()
    for role in ("train", "val", "test"):
        videos = sorted(plan.videos_for_role(role))
        frames = sum(counts[v] for v in videos)
        _err(f"{role}: {len(videos)} videos, {frames} frames")
    config = {
        "annotations": args.annotations,
        "ratio": f"{args.train}:{args.val}:{args.test}",
        "image_width": args.width,
        "image_height": args.height,
    }
    _emit_single(
        _json_text(plan.to_dict()), args.out, "split", argv, config,
        {"seed": args.seed}, [args.annotations],
    )
    return EXIT_OK


def cmd_cv_plan(args, argv) -> int:
    dataset = _load_dataset(args)
    folds = cv_folds(dataset, args.k)
    payload = {"k": args.k, "folds": [plan.to_dict() for plan in folds]}
    config = {
        "annotations": args.annotations,
        "k": args.k,
        "image_width": args.width,
        "image_height": args.height,
    }
    _emit_single(
        _json_text(payload), args.out, "cv-plan", argv, config, {}, [args.annotations]
    )
    return EXIT_OK


def _outcomes_csv(result: EvaluationResult) -> str:
    lines = ["video_id,frame_index,outcome,distance"]
    for o in result.outcomes:
        distance = "" if o.distance is None else _fmt_num(o.distance)
        lines.append(f"{o.video_id},{o.frame_index},{o.outcome.value},{distance}")
    return "\n".join(lines) + "\n"


def cmd_eval(args, argv) -> int:
    dataset = _load_dataset(args)
    detections = parse_detections(_read_text(args.detections))
    frames = _select_frames(dataset, args.split, args.role)
    if not frames:
        raise TipBenchError("no frames selected for evaluation")
    cfg = _eval_config(args.fixed_w, args.fixed_h, args.iou, args.conf)
    result = evaluate_run(dataset, detections, cfg, frames, args.distance_over)
    for warning in result.warnings:
        _err(f"warning: {warning}")
    t = result.tally
    _err(f"frames {t.total}: tp {t.tp} fp {t.fp} fn {t.fn}")
    m = result.metrics
    print(f"recall {fmt3(m.recall)} precision {fmt3(m.precision)} f1 {fmt3(m.f1)}")

    if args.out_dir is None:
        return EXIT_OK
    out_dir = Path(args.out_dir)
    config = {
        "annotations": args.annotations,
        "detections": args.detections,
        "split": args.split,
        "role": args.role,
        "fixed_width": args.fixed_w,
        "fixed_height": args.fixed_h,
        "iou_threshold": args.iou,
        "confidence_floor": args.conf,
        "distance_over": args.distance_over,
        "image_width": args.width,
        "image_height": args.height,
    }
    metrics_payload = {
        "config": config,
        "config_hash": config_hash(config),
        "version": __version__,
        "tally": {"tp": t.tp, "fp": t.fp, "fn": t.fn, "total": t.total},
        "metrics": m.to_dict(),
        "presentation": {
            "recall": fmt3(m.recall),
            "precision": fmt3(m.precision),
            "f1": fmt3(m.f1),
        },
        "warnings": list(result.warnings),
    }
    outcomes_path = out_dir / f"{args.name}.outcomes.csv"
    metrics_path = out_dir / f"{args.name}.metrics.json"
    atomic_write_text(outcomes_path, _outcomes_csv(result))
    atomic_write_text(metrics_path, _json_text(metrics_payload))
    inputs = [args.annotations, args.detections] + ([args.split] if args.split else [])
    _write_manifest_for(
        "eval", argv, config, {}, inputs, [outcomes_path, metrics_path],
        out_dir / f"{args.name}.manifest.json",
    )
    return EXIT_OK


def cmd_stats(args, argv) -> int:
    dataset = _load_dataset(args)
    stats = dataset_stats(dataset)
    config = {
        "annotations": args.annotations,
        "image_width": args.width,
        "image_height": args.height,
    }
    _emit_single(
        _json_text(stats.to_dict()), args.out, "stats", argv, config, {}, [args.annotations]
    )
    return EXIT_OK


def cmd_scatter(args, argv) -> int:
    dataset = _load_dataset(args)
    text = export_scatter(dataset)
    out_dir = Path(args.out_dir)
    csv_path = out_dir / f"{args.name}.csv"
    atomic_write_text(csv_path, text)
    outputs = [csv_path]
    if not args.no_figures:
        from .figures import save_scatter_figure

        out_dir.mkdir(parents=True, exist_ok=True)
        png_path = out_dir / f"{args.name}.png"
        save_scatter_figure(dataset, png_path)
        outputs.append(png_path)
    config = {
        "annotations": args.annotations,
        "image_width": args.width,
        "image_height": args.height,
        "figures": not args.no_figures,
    }
    _write_manifest_for(
        "scatter", argv, config, {}, [args.annotations], outputs,
        out_dir / f"{args.name}.manifest.json",
    )
    return EXIT_OK


def _sweep_job(cfg: KVConfig, config_path: str) -> dict:
    margins = cfg.get_int_list("margins", DEFAULT_MARGINS)
    job = {
        "name": cfg.get_str("name", Path(config_path).stem),
        "annotations": cfg.get_str("annotations", required=True),
        "image_width": cfg.get_int("image_width", DEFAULT_IMAGE_WIDTH),
        "image_height": cfg.get_int("image_height", DEFAULT_IMAGE_HEIGHT),
        "split": cfg.get_str("split"),
        "role": cfg.get_str("role", "test"),
        "margins": list(margins),
        "semantics": cfg.get_str("semantics", "side"),
        "fixed_width": cfg.get_float("fixed_width", DEFAULT_FIXED_WIDTH),
        "fixed_height": cfg.get_float("fixed_height", DEFAULT_FIXED_HEIGHT),
        "iou_threshold": cfg.get_float("iou_threshold", 0.5),
        "confidence_floor": cfg.get_float("confidence_floor", DEFAULT_CONFIDENCE_FLOOR),
        "distance_over": cfg.get_str("distance_over", "all"),
        "seed": cfg.get_int("seed", 0),
        "detections": {
            str(m): cfg.get_str(f"detections.{m}", required=True) for m in margins
        },
    }
    return job


def cmd_sweep(args, argv) -> int:
    cfg = _load_kv(args.config)
    job = _sweep_job(cfg, args.config)
    _warn_unused(cfg)
    dataset = parse_annotations(
        _read_text(job["annotations"]), job["image_width"], job["image_height"]
    )
    frames = _select_frames(dataset, job["split"], job["role"])
    if not frames:
        raise TipBenchError("no frames selected for evaluation")
    plan = MarginSweepPlan(
        margins=tuple(job["margins"]),
        semantics=MarginSemantics.from_string(job["semantics"]),
        eval_config=_eval_config(
            job["fixed_width"], job["fixed_height"],
            job["iou_threshold"], job["confidence_floor"],
        ),
    )
    detections_by_margin = {
        m: parse_detections(_read_text(job["detections"][str(m)])) for m in plan.margins
    }
    rows = run_margin_sweep(dataset, detections_by_margin, plan, frames, job["distance_over"])

    meta = {
        "name": job["name"],
        "seed": job["seed"],
        "config_hash": config_hash(job),
        "version": __version__,
        "config": job,
    }
    markdown = render_sweep_markdown(rows, meta)
    sys.stdout.write(markdown)

    out_dir = Path(args.out_dir)
    prefix = f"{job['name']}_seed{job['seed']}"
    outputs = [out_dir / f"{prefix}.md", out_dir / f"{prefix}.csv", out_dir / f"{prefix}.json"]
    atomic_write_text(outputs[0], markdown)
    atomic_write_text(outputs[1], render_sweep_csv(rows))
    atomic_write_text(outputs[2], _json_text(sweep_report_payload(rows, meta)))
    if not args.no_figures:
        from .figures import save_sweep_figure

        png_path = out_dir / f"{prefix}.png"
        save_sweep_figure(rows, png_path)
        outputs.append(png_path)
    inputs = [args.config, job["annotations"]] + sorted(job["detections"].values())
    if job["split"]:
        inputs.append(job["split"])
    _write_manifest_for(
        "sweep", argv, job, {"seed": job["seed"]}, inputs, outputs,
        out_dir / f"{prefix}.manifest.json",
    )
    return EXIT_OK


def _cv_job(cfg: KVConfig, config_path: str) -> dict:
    k = cfg.get_int("k", 9)
    per_fold = {}
    for i in range(k):
        override = cfg.get_str(f"detections.fold{i}")
        if override is not None:
            per_fold[i] = override
    base = cfg.get_str("detections")
    if base is None and len(per_fold) < k:
        raise ConfigError(
            f"{cfg.source}: need 'detections' or a 'detections.fold<i>' entry per fold"
        )
    return {
        "name": cfg.get_str("name", Path(config_path).stem),
        "annotations": cfg.get_str("annotations", required=True),
        "image_width": cfg.get_int("image_width", DEFAULT_IMAGE_WIDTH),
        "image_height": cfg.get_int("image_height", DEFAULT_IMAGE_HEIGHT),
        "k": k,
        "fixed_width": cfg.get_float("fixed_width", DEFAULT_FIXED_WIDTH),
        "fixed_height": cfg.get_float("fixed_height", DEFAULT_FIXED_HEIGHT),
        "iou_threshold": cfg.get_float("iou_threshold", 0.5),
        "confidence_floor": cfg.get_float("confidence_floor", DEFAULT_CONFIDENCE_FLOOR),
        "distance_over": cfg.get_str("distance_over", "all"),
        "seed": cfg.get_int("seed", 0),
        "detections": base,
        "per_fold_detections": {str(i): p for i, p in sorted(per_fold.items())},
    }


def cmd_cv_run(args, argv) -> int:
    cfg = _load_kv(args.config)
    job = _cv_job(cfg, args.config)
    _warn_unused(cfg)
    dataset = parse_annotations(
        _read_text(job["annotations"]), job["image_width"], job["image_height"]
    )
    eval_config = _eval_config(
        job["fixed_width"], job["fixed_height"],
        job["iou_threshold"], job["confidence_floor"],
    )
    base = parse_detections(_read_text(job["detections"])) if job["detections"] else {}
    per_fold = {
        int(i): parse_detections(_read_text(path))
        for i, path in job["per_fold_detections"].items()
    }
    folds, results, report = run_cv(
        dataset, base, eval_config, job["k"], per_fold or None, job["distance_over"]
    )

    meta = {
        "name": job["name"],
        "seed": job["seed"],
        "config_hash": config_hash(job),
        "version": __version__,
        "config": job,
    }
    markdown = render_cv_markdown(folds, results, report, meta)
    sys.stdout.write(markdown)

    out_dir = Path(args.out_dir)
    prefix = f"{job['name']}_seed{job['seed']}"
    outputs = [out_dir / f"{prefix}.md", out_dir / f"{prefix}.csv", out_dir / f"{prefix}.json"]
    atomic_write_text(outputs[0], markdown)
    atomic_write_text(outputs[1], render_cv_csv(folds, results))
    atomic_write_text(outputs[2], _json_text(cv_report_payload(folds, results, report, meta)))
    if not args.no_figures:
        from .figures import save_cv_figure

        png_path = out_dir / f"{prefix}.png"
        save_cv_figure(results, report, png_path)
        outputs.append(png_path)
    inputs = [args.config, job["annotations"]]
    if job["detections"]:
        inputs.append(job["detections"])
    inputs.extend(sorted(job["per_fold_detections"].values()))
    _write_manifest_for(
        "cv-run", argv, job, {"seed": job["seed"]}, inputs, outputs,
        out_dir / f"{prefix}.manifest.json",
    )
    return EXIT_OK


def _scene_spec(cfg: KVConfig) -> SceneSpec:
    defaults = SceneSpec()
    return SceneSpec(
        n_videos=cfg.get_int("n_videos", defaults.n_videos),
        frames_per_video=cfg.get_int("frames_per_video", defaults.frames_per_video),
        image_width=cfg.get_int("image_width", defaults.image_width),
        image_height=cfg.get_int("image_height", defaults.image_height),
        mean_x=cfg.get_float("mean_x", defaults.mean_x),
        mean_y=cfg.get_float("mean_y", defaults.mean_y),
        sd_x=cfg.get_float("sd_x", defaults.sd_x),
        sd_y=cfg.get_float("sd_y", defaults.sd_y),
        quantize=cfg.get_float("quantize", defaults.quantize),
    )


def cmd_synth(args, argv) -> int:
    if args.spec is not None:
        cfg = _load_kv(args.spec)
        spec = _scene_spec(cfg)
        _warn_unused(cfg)
    else:
        spec = SceneSpec()
    dataset = generate_dataset(args.seed, spec)
    _err(f"generated {len(dataset)} annotations across {len(dataset.videos)} videos")
    config = {key: getattr(spec, key) for key in vars(spec)}
    inputs = [args.spec] if args.spec else []
    _emit_single(
        serialize_annotations(dataset), args.out, "synth", argv, config,
        {"seed": args.seed}, inputs,
    )
    if args.render_dir is not None:
        render_dir = Path(args.render_dir)
        render_dir.mkdir(parents=True, exist_ok=True)
        for ann in dataset.annotations:
            pgm = render_frame_pgm(dataset.image_width, dataset.image_height, ann.tip)
            atomic_write_bytes(render_dir / f"{ann.video_id}_{ann.frame_index:06d}.pgm", pgm)
        _err(f"rendered {len(dataset)} PGM frames to {render_dir}")
    return EXIT_OK


def _error_model(cfg: KVConfig) -> DetectorErrorModel:
    offset_x = cfg.get_float("offset_x")
    offset_y = cfg.get_float("offset_y")
    if (offset_x is None) != (offset_y is None):
        raise ConfigError(f"{cfg.source}: offset_x and offset_y must be set together")
    conf_alpha = cfg.get_float("conf_alpha")
    conf_beta = cfg.get_float("conf_beta")
    if (conf_alpha is None) != (conf_beta is None):
        raise ConfigError(f"{cfg.source}: conf_alpha and conf_beta must be set together")
    return DetectorErrorModel(
        jitter_sd=(cfg.get_float("jitter_sd_x", 0.0), cfg.get_float("jitter_sd_y", 0.0)),
        offset=None if offset_x is None else (offset_x, offset_y),
        dropout=cfg.get_float("dropout", 0.0),
        confidence=cfg.get_float("confidence", 1.0),
        confidence_beta=None if conf_alpha is None else (conf_alpha, conf_beta),
        decoys=cfg.get_int("decoys", 0),
        decoy_confidence=(
            cfg.get_float("decoy_conf_lo", 0.01),
            cfg.get_float("decoy_conf_hi", 0.09),
        ),
        clip_boxes=cfg.get_bool("clip_boxes", False),
    )


def cmd_simulate(args, argv) -> int:
    cfg = _load_kv(args.model)
    dataset = parse_annotations(
        _read_text(args.annotations),
        cfg.get_int("image_width", DEFAULT_IMAGE_WIDTH),
        cfg.get_int("image_height", DEFAULT_IMAGE_HEIGHT),
    )
    script_tally = cfg.get_int_list("script_tally")
    if script_tally is not None:
        # Scripted mode: reproduce an exact TP/FP/FN tally.
        if len(script_tally) != 3:
            raise ConfigError(f"{cfg.source}: script_tally must be 'tp,fp,fn'")
        tally = Tally(*script_tally)
        records = calibrate_to_counts(
            dataset.annotations,
            tally,
            fp_offset=(
                cfg.get_float("fp_offset_x", 70.0),
                cfg.get_float("fp_offset_y", 0.0),
            ),
            box_width=cfg.get_float("box_width", DEFAULT_FIXED_WIDTH),
            box_height=cfg.get_float("box_height", DEFAULT_FIXED_HEIGHT),
        )
        resolved = {"mode": "scripted", "tally": list(script_tally)}
    else:
        margin = cfg.get_float("margin")
        if margin is None:
            raise ConfigError(f"{cfg.source}: 'margin' is required for stochastic models")
        semantics = MarginSemantics.from_string(cfg.get_str("semantics", "side"))
        model = _error_model(cfg)
        records = simulate_detector(dataset, model, args.seed, margin, semantics)
        resolved = {
            "mode": "stochastic",
            "margin": margin,
            "semantics": semantics.value,
            "model": {key: getattr(model, key) for key in vars(model)},
        }
    _warn_unused(cfg)
    _err(f"simulated detections for {len(records)} frames")
    config = {"annotations": args.annotations, "model_config": args.model, **resolved}
    _emit_single(
        serialize_detections(records), args.out, "simulate", argv, config,
        {"seed": args.seed}, [args.model, args.annotations],
    )
    return EXIT_OK


# --- parser -----------------------------------------------------------------


def _add_dims(p) -> None:
    p.add_argument("--width", type=int, default=DEFAULT_IMAGE_WIDTH,
                   help="frame width in pixels (default 640)")
    p.add_argument("--height", type=int, default=DEFAULT_IMAGE_HEIGHT,
                   help="frame height in pixels (default 480)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="tipbench",
        description="Benchmark toolkit for instrument-tip localization experiments.",
    )
    parser.add_argument("--version", action="version", version=f"tipbench {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("boxes", help="turn tip annotations into margin boxes")
    p.add_argument("--annotations", required=True, help="annotation CSV path")
    p.add_argument("--margin", type=float, required=True,
                   help="margin size in pixels (no default: the sweep exists to find it)")
    p.add_argument("--semantics", choices=["side", "radius"], default="side",
                   help="side: box side = margin; radius: box side = 2*margin")
    _add_dims(p)
    p.add_argument("--out", help="output CSV path (default: stdout)")
    p.set_defaults(handler=cmd_boxes)

    p = sub.add_parser("split", help="random video-level train/val/test split")
    p.add_argument("--annotations", required=True)
    p.add_argument("--seed", type=int, required=True, help="PRNG seed, recorded in the plan")
    p.add_argument("--train", type=int, default=7, help="videos in train (default 7)")
    p.add_argument("--val", type=int, default=1, help="videos in val (default 1)")
    p.add_argument("--test", type=int, default=1, help="videos in test (default 1)")
    _add_dims(p)
    p.add_argument("--out", help="output JSON path (default: stdout)")
    p.set_defaults(handler=cmd_split)

    p = sub.add_parser("cv-plan", help="leave-one-video-out fold plans")
    p.add_argument("--annotations", required=True)
    p.add_argument("--k", type=int, default=9, help="number of folds = number of videos (default 9)")
    _add_dims(p)
    p.add_argument("--out", help="output JSON path (default: stdout)")
    p.set_defaults(handler=cmd_cv_plan)

    p = sub.add_parser("eval", help="score detector output against tip annotations")
    p.add_argument("--annotations", required=True)
    p.add_argument("--detections", required=True, help="detection JSONL path")
    p.add_argument("--split", help="split plan JSON; omit to evaluate every frame")
    p.add_argument("--role", choices=["train", "val", "test"], default="test",
                   help="which split role to evaluate (default test)")
    p.add_argument("--fixed-w", type=float, default=DEFAULT_FIXED_WIDTH,
                   help="fixed measurement box width (default 192)")
    p.add_argument("--fixed-h", type=float, default=DEFAULT_FIXED_HEIGHT,
                   help="fixed measurement box height (default 194)")
    p.add_argument("--iou", type=float, default=0.5,
                   help="IoU threshold; strictly greater counts as TP (default 0.5)")
    p.add_argument("--conf", type=float, default=DEFAULT_CONFIDENCE_FLOOR,
                   help="confidence floor for selection, inclusive (default 0.1)")
    p.add_argument("--distance-over", choices=["all", "tp"], default="all",
                   help="population for distance statistics (default all detections)")
    _add_dims(p)
    p.add_argument("--out-dir", help="write outcomes CSV + metrics JSON here")
    p.add_argument("--name", default="eval", help="output file prefix (default eval)")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("stats", help="per-axis tip coordinate statistics")
    p.add_argument("--annotations", required=True)
    _add_dims(p)
    p.add_argument("--out", help="output JSON path (default: stdout)")
    p.set_defaults(handler=cmd_stats)

    p = sub.add_parser("scatter", help="tip scatter CSV (+ figure) with summary stats")
    p.add_argument("--annotations", required=True)
    _add_dims(p)
    p.add_argument("--out-dir", default=".", help="output directory (default .)")
    p.add_argument("--name", default="scatter", help="output file prefix (default scatter)")
    p.add_argument("--no-figures", action="store_true", help="skip the PNG figure")
    p.set_defaults(handler=cmd_scatter)

    p = sub.add_parser("sweep", help="margin sweep from a config file")
    p.add_argument("--config", required=True, help="key-value experiment config")
    p.add_argument("--out-dir", default=".", help="output directory (default .)")
    p.add_argument("--no-figures", action="store_true", help="skip the PNG figure")
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("cv-run", help="cross-validation run from a config file")
    p.add_argument("--config", required=True, help="key-value experiment config")
    p.add_argument("--out-dir", default=".", help="output directory (default .)")
    p.add_argument("--no-figures", action="store_true", help="skip the PNG figure")
    p.set_defaults(handler=cmd_cv_run)

    p = sub.add_parser("synth", help="generate a synthetic tip-annotated dataset")
    p.add_argument("--spec", help="scene spec config; omit for the built-in defaults")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", help="output annotation CSV path (default: stdout)")
    p.add_argument("--render-dir", help="also render one demo PGM image per frame")
    p.set_defaults(handler=cmd_synth)

    p = sub.add_parser("simulate", help="simulate a detector over a dataset")
    p.add_argument("--model", required=True, help="error model config")
    p.add_argument("--annotations", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", help="output detection JSONL path (default: stdout)")
    p.set_defaults(handler=cmd_simulate)

    return parser


def main(argv: list[str] | None = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        _err(str(exc))
        return EXIT_VALIDATION
    except SystemExit as exc:
        # --help and --version print and exit through argparse.
        return int(exc.code or 0)
    try:
        return args.handler(args, list(argv))
    except OSError as exc:
        _err(f"I/O error: {exc}")
        return EXIT_IO
    except ValueError as exc:
        _err(f"error: {exc}")
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
