"""End-to-end orchestration: data, selection, models, fusion, reports.

Stages run in a fixed order (sense -> preprocess -> encode/select ->
temporal models -> fusion -> evaluate -> report); every artifact lands
under the configured output directory stamped with the config hash and
master seed, and re-running an unchanged config reproduces the reports
byte for byte. A failing stage leaves partial artifacts plus a FAILED
marker naming the stage.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

from . import evaluation
from .config import PipelineConfig, config_hash
from .datamodel import load_directory, save_recording
from .errors import ConfigError
from .manifest import load_manifest, save_manifest
from .schema import ChannelSchema, default_channel_schema
from .selection import SelectionResult
from .synthgen import GenConfig, generate, preset

log = logging.getLogger("earlycue")


def resolve_schema(name: str) -> ChannelSchema:
    """Schema flag grammar: ``default50`` or ``custom:<path to json>``."""
    if name == "default50":
        return default_channel_schema()
    if name.startswith("custom:"):
        path = Path(name.split(":", 1)[1])
        return ChannelSchema.from_json_obj(json.loads(path.read_text(encoding="utf-8")))
    raise ConfigError(f"schema must be 'default50' or 'custom:<path>', got {name!r}")


def synthesize_dataset(gen_cfg: GenConfig, out_dir: Path) -> list[Path]:
    """Generate recordings and write them as JSONL files."""
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for rec in generate(gen_cfg):
        path = out_dir / f"{rec.subject}_{rec.trial}.jsonl"
        save_recording(rec, path)
        paths.append(path)
    return paths


def ensure_dataset(cfg: PipelineConfig, out_dir: Path):
    """Locate or synthesize the dataset; always evaluate from the files."""
    if cfg.data_dir is not None:
        data_dir = Path(cfg.data_dir)
    elif cfg.synth_preset is not None:
        data_dir = out_dir / "data"
    else:
        raise ConfigError("config needs data.dir or data.synth_preset")
    have_files = data_dir.is_dir() and any(data_dir.glob("*.jsonl"))
    if not have_files:
        if cfg.synth_preset is None:
            raise ConfigError(f"no recordings under {data_dir} and no synth preset configured")
        gen_cfg = preset(cfg.synth_preset)
        gen_cfg.seed = cfg.seed
        log.info("synthesizing preset %r into %s", cfg.synth_preset, data_dir)
        synthesize_dataset(gen_cfg, data_dir)
    schema = resolve_schema(cfg.data_schema)
    return load_directory(data_dir, schema=schema)


def _selection_artifact(selection: SelectionResult, keep: int) -> dict:
    return {
        "sampled_segments": len(selection.sampled_keys),
        "ranking": [
            {
                "column": e.column,
                "channel": e.channel,
                "filter": e.filter_name,
                "chi2": e.chi2,
                "threshold": e.threshold,
            }
            for e in selection.ranking[:keep]
        ],
    }


def build_manifest(
    cfg: PipelineConfig,
    digest: str,
    schema: ChannelSchema,
    fold_outcomes,
    selection: SelectionResult | None,
    model_refs: dict[str, str],
    dtw_models: dict,
    classifier: str,
) -> dict:
    feature_block: dict = {"variant": "raw"}
    if selection is not None:
        feature_block = selection.top(
            min(cfg.selection_m, len(selection.ranking)), "TE"
        ).to_json_obj()
    return {
        "config_hash": digest,
        "seed": cfg.seed,
        "schema": schema.to_json_obj(),
        "preprocess": {
            "alpha": cfg.ewma_alpha,
            "divisor": cfg.norm_divisor,
            "epsilon": cfg.norm_epsilon,
            "folds": [
                {"fold": o.fold, "mu": o.stats_mu, "var": o.stats_var}
                for o in fold_outcomes
            ],
        },
        "bank": {
            "sigma": cfg.bank_sigma,
            "gabor_hz": cfg.bank_gabor_hz,
            "gabor_sigma": cfg.bank_gabor_sigma,
        },
        "feature_set": feature_block,
        "models": {"classifier": classifier, "lstm": model_refs, "dtw": dtw_models},
        "fusion": {
            "use_prev": cfg.fusion_use_prev,
            "use_context": cfg.fusion_use_context,
            "discount": cfg.fusion_discount,
            "context": {"a": cfg.context_a, "step": cfg.context_step, "source": cfg.context_source},
        },
    }


def run_pipeline(cfg: PipelineConfig) -> dict:
    """Execute all stages; returns {"reports": ..., "paths": ...}.

    On stage failure a FAILED marker naming the stage is written next to
    whatever artifacts were already produced, and the error re-raises.
    """
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    digest = config_hash(cfg)
    stage = "data"
    try:
        recordings = ensure_dataset(cfg, out_dir)

        stage = "selection"
        specs = [evaluation.parse_variant(v) for v in cfg.eval_variants]
        selection = None
        if any(s.needs_selection for s in specs):
            selection = evaluation.run_selection(recordings, cfg)
            max_m = max((s.m for s in specs if s.m is not None), default=cfg.selection_m)
            artifact = _selection_artifact(selection, keep=max(max_m, cfg.selection_m))
            (out_dir / "featureset.json").write_text(
                json.dumps({"config_hash": digest, "seed": cfg.seed, **artifact},
                           indent=1, sort_keys=True) + "\n",
                encoding="utf-8",
            )

        stage = "evaluate"
        reports, outcomes = evaluation.sweep_with_outcomes(recordings, cfg, specs, selection)

        stage = "report"
        csv_text = evaluation.reports_to_csv(reports, digest, cfg.seed)
        csv_path = out_dir / cfg.eval_out
        csv_path.write_text(csv_text, encoding="utf-8")

        models_dir = out_dir / "models"
        models_dir.mkdir(exist_ok=True)
        model_refs: dict[str, str] = {}
        dtw_models: dict = {}
        for outcome in outcomes:
            for key, params_obj in outcome.lstm_models.items():
                rel = f"models/{outcome.fold}_{key}.json"
                (out_dir / rel).write_text(
                    json.dumps(params_obj, sort_keys=True), encoding="utf-8"
                )
                model_refs[f"{outcome.fold}/{key}"] = rel
            for key, tpl in outcome.dtw_models.items():
                dtw_models[f"{outcome.fold}/{key}"] = tpl
        classifier = "both" if (model_refs and dtw_models) else ("dtw" if dtw_models else "lstm")
        dtw_block = {}
        if dtw_models:
            # canonical template pair at the top level, all folds nested
            first = next(iter(dtw_models.values()))
            dtw_block = {**first, "per_fold": dtw_models}
        manifest = build_manifest(
            cfg, digest, recordings[0].schema, outcomes, selection,
            model_refs, dtw_block, classifier,
        )
        save_manifest(manifest, out_dir / "manifest.json")

        summary = render_report(manifest, csv_text, fold_average=cfg.eval_fold_average)
        (out_dir / "report.txt").write_text(summary, encoding="utf-8")
        failed = out_dir / "FAILED"
        if failed.exists():
            failed.unlink()
        return {
            "reports": reports,
            "csv": csv_path,
            "manifest": out_dir / "manifest.json",
            "summary": summary,
        }
    except Exception as exc:
        (out_dir / "FAILED").write_text(f"stage={stage}\nerror={exc}\n", encoding="utf-8")
        raise


def parse_report_csv(csv_text: str) -> list[dict]:
    rows = []
    lines = [l for l in csv_text.splitlines() if l and not l.startswith("#")]
    if not lines:
        return rows
    header = lines[0].split(",")
    for line in lines[1:]:
        rows.append(dict(zip(header, line.split(","))))
    return rows


def render_feature_table(feature_block: dict) -> str:
    entries = feature_block.get("entries", [])
    if not entries:
        return "feature set: raw channels (no selection)\n"
    lines = [
        "Selected top features",
        f"{'rank':>4}  {'feature (channel + filter)':<42} {'chi2':>12}",
    ]
    for rank, e in enumerate(entries, start=1):
        name = f"{e['channel']} + {e['filter']}"
        lines.append(f"{rank:>4}  {name:<42} {e['chi2']:>12.1f}")
    return "\n".join(lines) + "\n"


def render_report(manifest: dict, csv_text: str, fold_average: bool = False) -> str:
    """Human-readable summary: per-tau F1 table, earliness, top features."""
    rows = parse_report_csv(csv_text)
    out = [f"config_hash={manifest['config_hash']} seed={manifest['seed']}", ""]
    if not rows:
        out.append("no rows in report CSV")
        return "\n".join(out) + "\n"
    fold_key = "mean" if fold_average else "pooled"
    summary_rows = [r for r in rows if r["fold"] == fold_key]
    variants = sorted({r["variant"] for r in summary_rows})
    taus = sorted({float(r["tau"]) for r in summary_rows})
    header = f"{'variant':<28} " + " ".join(f"F1@{t:.1f}" for t in taus) + "   PoF   PoC"
    out.append(f"F1 by fraction ({fold_key} across folds)")
    out.append(header)
    best_variant, best_score = None, -1.0
    for variant in variants:
        vrows = {float(r["tau"]): r for r in summary_rows if r["variant"] == variant}
        f1s = [float(vrows[t]["f1"]) for t in taus]
        pof = float(vrows[taus[-1]]["pof_mean"])
        poc = float(vrows[taus[-1]]["poc_mean"])
        cells = " ".join(f"{v:6.3f}" for v in f1s)
        out.append(f"{variant:<28} {cells} {pof:5.3f} {poc:5.3f}")
        mean_f1 = sum(f1s) / len(f1s)
        if mean_f1 > best_score:
            best_variant, best_score = variant, mean_f1
    if len(variants) > 1:
        out.append("")
        out.append(f"best configuration: {best_variant} (mean F1 {best_score:.3f})")
    out.append("")
    out.append(render_feature_table(manifest.get("feature_set", {})))
    return "\n".join(out) + "\n"


def render_gradcheck(artifact: dict) -> str:
    return (
        f"gradient check: {artifact['instances']} instances, "
        f"max relative error {artifact['max_rel_error']:.3e} "
        f"({'PASS' if artifact['max_rel_error'] < artifact['tolerance'] else 'FAIL'} "
        f"at tolerance {artifact['tolerance']:g})\n"
    )


def report_command(manifest_path=None, csv_path=None, artifact_path=None, fold_average=False) -> str:
    """Implements the `report` CLI verb over stored artifacts."""
    if artifact_path is not None:
        artifact = json.loads(Path(artifact_path).read_text(encoding="utf-8"))
        if artifact.get("kind") == "gradcheck":
            return render_gradcheck(artifact)
        raise ConfigError(f"unknown artifact kind {artifact.get('kind')!r}")
    if manifest_path is None or csv_path is None:
        raise ConfigError("report needs --manifest and --csv (or --artifact)")
    manifest = load_manifest(manifest_path)
    csv_text = Path(csv_path).read_text(encoding="utf-8")
    return render_report(manifest, csv_text, fold_average=fold_average)
