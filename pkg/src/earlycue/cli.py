"""Command-line interface.

Commands: synth, validate, preprocess, select, train-dtw, train-lstm,
evaluate, eval-dtw, gradcheck, report, run. Flags override config-file
values; EARLYCUE_THREADS caps fold-level parallelism.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import evaluation, lstm, pipeline
from .config import (
    PipelineConfig,
    config_from_overrides,
    config_hash,
    load_config,
    parse_config_text,
)
from .datamodel import extract_segments_with_stats, load_directory
from .errors import EarlycueError
from .preprocess import ewma, fit_norm_stats
from .synthgen import preset, synth_field_names
from .pipeline import resolve_schema, synthesize_dataset

log = logging.getLogger("earlycue")


def _overrides_from_sets(set_args: list[str]) -> dict:
    items = {}
    for item in set_args or []:
        if "=" not in item:
            raise SystemExit(f"--set expects key=value, got {item!r}")
        text = parse_config_text(item, source="--set")
        items.update(text)
    return items


def _build_config(args, extra: dict | None = None) -> PipelineConfig:
    overrides = _overrides_from_sets(getattr(args, "set", None) or [])
    if extra:
        overrides.update(extra)
    config_path = getattr(args, "config", None)
    if config_path:
        return load_config(config_path, overrides)
    return config_from_overrides(overrides)


def _common_eval_flags(parser):
    parser.add_argument("--config", help="pipeline config file")
    parser.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override a config key (repeatable)")
    parser.add_argument("--data-dir", help="directory of *.jsonl recordings")
    parser.add_argument("--schema", default=None, help="default50 | custom:<path>")
    parser.add_argument("--seed", type=int, default=None)


def _apply_common(args) -> dict:
    extra = {}
    if getattr(args, "data_dir", None):
        extra["data.dir"] = args.data_dir
    if getattr(args, "schema", None):
        extra["data.schema"] = args.schema
    if getattr(args, "seed", None) is not None:
        extra["seed"] = args.seed
    return extra


def cmd_synth(args) -> int:
    gen = preset(args.preset)
    for name in synth_field_names():
        value = getattr(args, name, None)
        if value is not None:
            setattr(gen, name, value)
    paths = synthesize_dataset(gen, Path(args.out))
    print(f"wrote {len(paths)} recordings to {args.out}")
    return 0


def cmd_validate(args) -> int:
    schema = resolve_schema(args.schema or "default50")
    failures = 0
    for path in sorted(Path(args.data_dir).glob("*.jsonl")):
        try:
            from .datamodel import load_recording

            rec = load_recording(path, schema=schema)
            print(f"OK   {path.name}: {rec.n_frames} frames, {len(rec.annotations)} spans")
        except EarlycueError as exc:
            failures += 1
            print(f"FAIL {path.name}: {exc}")
    if failures:
        print(f"{failures} file(s) failed validation")
    return 1 if failures else 0


def cmd_preprocess(args) -> int:
    cfg = _build_config(args, _apply_common(args))
    recordings = load_directory(cfg.data_dir, schema=resolve_schema(cfg.data_schema))
    smoothed = [ewma(r.frames, cfg.ewma_alpha) for r in recordings]
    stats = fit_norm_stats(smoothed, epsilon=cfg.norm_epsilon)
    degenerate = [
        recordings[0].schema.channels[i].qualified
        for i in np.flatnonzero(stats.degenerate)
    ]
    n_req = n_op = dropped = 0
    for rec in recordings:
        _, s = extract_segments_with_stats(rec, cfg.operating_window)
        n_req += s["requesting_segments"]
        n_op += s["operating_segments"]
        dropped += s["dropped_frames"]
    payload = {
        "alpha": cfg.ewma_alpha,
        "divisor": cfg.norm_divisor,
        "mu": stats.mu.tolist(),
        "var": stats.var.tolist(),
        "degenerate_channels": degenerate,
        "segments": {"requesting": n_req, "operating": n_op, "dropped_frames": dropped},
    }
    out = Path(args.out)
    out.write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    print(f"stats over {len(recordings)} recordings -> {out}")
    print(f"segments: {n_req} requesting, {n_op} operating, {dropped} frames dropped")
    return 0


def cmd_select(args) -> int:
    extra = _apply_common(args)
    extra["selection.m"] = args.m
    cfg = _build_config(args, extra)
    recordings = load_directory(cfg.data_dir, schema=resolve_schema(cfg.data_schema))
    selection = evaluation.run_selection(recordings, cfg)
    fset = selection.top(args.m, args.variant)
    if args.out:
        Path(args.out).write_text(
            json.dumps(fset.to_json_obj(), indent=1, sort_keys=True) + "\n", encoding="utf-8"
        )
    print(pipeline.render_feature_table(fset.to_json_obj()))
    return 0


def _train_command(args, classifier: str) -> int:
    extra = _apply_common(args)
    if getattr(args, "iterations", None) is not None:
        extra["lstm.iterations"] = args.iterations
    variant = args.features if classifier == "lstm" else f"dtw:{args.features}"
    if classifier == "lstm" and args.modality != "all":
        variant = f"fused:{args.features}"
    extra["eval.variants"] = [variant]
    cfg = _build_config(args, extra)
    recordings = load_directory(cfg.data_dir, schema=resolve_schema(cfg.data_schema))
    subjects = sorted({r.subject for r in recordings})
    # train-* commands fit on all data; reuse the fold machinery by treating
    # the first subject as a nominal held-out split for validation metrics.
    spec = evaluation.parse_variant(variant)
    selection = evaluation.run_selection(recordings, cfg) if spec.needs_selection else None
    outcome = evaluation.evaluate_fold(subjects[0], recordings, cfg, [spec], selection)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    digest = config_hash(cfg)
    models_dir = out_dir / "models"
    models_dir.mkdir(exist_ok=True)
    refs = {}
    for key, params_obj in outcome.lstm_models.items():
        rel = f"models/{outcome.fold}_{key}.json"
        (out_dir / rel).write_text(json.dumps(params_obj, sort_keys=True), encoding="utf-8")
        refs[key] = rel
    dtw_block = {}
    if outcome.dtw_models:
        first = next(iter(outcome.dtw_models.values()))
        dtw_block = {**first, "per_fold": outcome.dtw_models}
    manifest = pipeline.build_manifest(
        cfg, digest, recordings[0].schema, [outcome], selection, refs, dtw_block, classifier
    )
    from .manifest import save_manifest

    save_manifest(manifest, out_dir / "manifest.json")
    rep = outcome.reports[spec.name]
    print(f"trained {classifier} ({variant}); holdout subject {outcome.fold}: "
          f"F1@1.0 = {rep.per_tau[1.0].f1:.3f}")
    print(f"manifest -> {out_dir / 'manifest.json'}")
    return 0


def cmd_train_lstm(args) -> int:
    return _train_command(args, "lstm")


def cmd_train_dtw(args) -> int:
    return _train_command(args, "dtw")


def _run_evaluate(args, variants: list[str], taus=None) -> int:
    extra = _apply_common(args)
    extra["eval.variants"] = variants
    if args.out:
        extra["eval.out"] = args.out
    if taus:
        extra["eval.taus"] = taus
    if getattr(args, "out_dir", None):
        extra["run.out_dir"] = args.out_dir
    cfg = _build_config(args, extra)
    result = pipeline.run_pipeline(cfg)
    print(result["summary"])
    print(f"CSV -> {result['csv']}")
    return 0


def cmd_evaluate(args) -> int:
    variants = [v.strip() for v in args.variants.split(",") if v.strip()]
    return _run_evaluate(args, variants)


def cmd_eval_dtw(args) -> int:
    variants = [v.strip() for v in args.variants.split(",") if v.strip()]
    for v in variants:
        if not v.startswith("dtw:"):
            raise SystemExit(f"eval-dtw accepts only dtw variants, got {v!r}")
    taus = None
    if args.tau_grid:
        taus = [float(t) for t in args.tau_grid.split(",")]
    return _run_evaluate(args, variants, taus)


def cmd_gradcheck(args) -> int:
    worst = lstm.gradient_check(
        instances=args.instances,
        input_dim=args.input_dim,
        hidden=args.hidden,
        seq_len=args.seq_len,
        eps=args.eps,
        seed=args.seed or 0,
    )
    tolerance = 1e-4
    artifact = {
        "kind": "gradcheck",
        "instances": args.instances,
        "max_rel_error": worst,
        "tolerance": tolerance,
    }
    if args.out:
        Path(args.out).write_text(json.dumps(artifact, indent=1, sort_keys=True) + "\n",
                                  encoding="utf-8")
    print(pipeline.render_gradcheck(artifact), end="")
    return 0 if worst < tolerance else 1


def cmd_report(args) -> int:
    text = pipeline.report_command(
        manifest_path=args.manifest,
        csv_path=args.csv,
        artifact_path=args.artifact,
        fold_average=args.fold_average,
    )
    print(text, end="")
    return 0


def cmd_run(args) -> int:
    overrides = _overrides_from_sets(args.set or [])
    cfg = load_config(args.config_path, overrides)
    result = pipeline.run_pipeline(cfg)
    print(result["summary"])
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="earlycue",
                                     description="Early turn-taking prediction pipeline")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("--preset", default="easy")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--subjects", type=int, default=None)
    p.add_argument("--trials-per-subject", dest="trials_per_subject", type=int, default=None)
    p.add_argument("--requests-per-trial", dest="requests_per_trial", type=int, default=None)
    p.add_argument("--snr", type=float, default=None)
    p.add_argument("--amplitude", type=float, default=None)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("validate", help="validate recordings in a directory")
    p.add_argument("--data-dir", required=True)
    p.add_argument("--schema", default="default50")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("preprocess", help="fit smoothing/normalization stats")
    _common_eval_flags(p)
    p.add_argument("--out", default="preprocess_stats.json")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("select", help="rank features and print the top-m table")
    _common_eval_flags(p)
    p.add_argument("--m", type=int, default=10)
    p.add_argument("--variant", choices=("TE", "BTE"), default="TE")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_select)

    for name in ("train-lstm", "train-dtw"):
        p = sub.add_parser(name, help=f"{name.split('-')[1]} training on a data directory")
        _common_eval_flags(p)
        p.add_argument("--features", default="TE_10", help="Raw | TE_m | BTE_m")
        p.add_argument("--out-dir", required=True)
        if name == "train-lstm":
            p.add_argument("--modality", choices=("all", "myo", "epoc", "kinect"), default="all")
            p.add_argument("--iterations", type=int, default=None)
            p.set_defaults(func=cmd_train_lstm)
        else:
            p.set_defaults(func=cmd_train_dtw)

    p = sub.add_parser("evaluate", help="LOSO evaluation of pipeline variants")
    _common_eval_flags(p)
    p.add_argument("--variants", required=True, help="comma list, e.g. Raw,TE_10,fused:TE_10+prev+context")
    p.add_argument("--out", default=None, help="CSV filename")
    p.add_argument("--out-dir", default=None)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("eval-dtw", help="LOSO evaluation restricted to DTW variants")
    _common_eval_flags(p)
    p.add_argument("--variants", default="dtw:TE_10")
    p.add_argument("--tau-grid", default=None, help="comma list of fractions")
    p.add_argument("--out", default=None)
    p.add_argument("--out-dir", default=None)
    p.set_defaults(func=cmd_eval_dtw)

    p = sub.add_parser("gradcheck", help="finite-difference check of LSTM gradients")
    p.add_argument("--instances", type=int, default=20)
    p.add_argument("--input-dim", dest="input_dim", type=int, default=3)
    p.add_argument("--hidden", type=int, default=4)
    p.add_argument("--seq-len", dest="seq_len", type=int, default=5)
    p.add_argument("--eps", type=float, default=1e-5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="write a gradcheck artifact JSON")
    p.set_defaults(func=cmd_gradcheck)

    p = sub.add_parser("report", help="summarize stored artifacts")
    p.add_argument("--manifest", default=None)
    p.add_argument("--csv", default=None)
    p.add_argument("--artifact", default=None, help="e.g. a gradcheck JSON")
    p.add_argument("--fold-average", action="store_true")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("run", help="run a full pipeline from a config file")
    p.add_argument("config_path")
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    p.set_defaults(func=cmd_run)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except EarlycueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
