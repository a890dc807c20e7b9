"""Fraction-sweep evaluation and the leave-one-subject-out harness.

Every classifier is scored over a grid of event fractions: at fraction
tau only the first max(1, floor(tau * L)) frames of a test segment are
visible. Per-tau confusion counts are pooled across folds (per-fold
values are kept for error bars); earliness is summarized per test
example by the point of first detection and the point of confident
detection, with 1.0 assigned when a prediction is never (or not finally)
correct.
"""

from __future__ import annotations

import hashlib
import math
import multiprocessing
import os
import re
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import dtw as dtw_mod
from . import lstm as lstm_mod
from .config import DEFAULT_TAUS, PipelineConfig
from .datamodel import Recording, Segment, extract_segments
from .errors import ConfigError
from .filters import build_default_bank
from .fusion import VACUOUS, Bba, ContextConfig, bba_from_probs, context_bba, fuse_decision
from .preprocess import ewma, fit_norm_stats, normalize
from .selection import FeatureSet, SelectionResult, project, rank_features

FUSION_SENSOR_ORDER = ("epoc", "kinect", "myo")


@dataclass(frozen=True)
class FractionGrid:
    """Strictly increasing fractions in (0, 1], ending at 1.0."""

    taus: tuple[float, ...] = DEFAULT_TAUS

    def __post_init__(self):
        taus = tuple(float(t) for t in self.taus)
        if not taus or taus[-1] != 1.0:
            raise ValueError("fraction grid must end at 1.0")
        for prev, cur in zip((0.0,) + taus, taus):
            if not prev < cur <= 1.0:
                raise ValueError("fractions must be strictly increasing within (0, 1]")
        object.__setattr__(self, "taus", taus)

    def frames_for(self, tau: float, length: int) -> int:
        """Shared fraction-to-frames mapping: max(1, floor(tau * L))."""
        return max(1, int(math.floor(tau * length + 1e-9)))


@dataclass(frozen=True)
class ConfusionStats:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def n(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def precision(self) -> float:
        denom = self.tp + self.fp
        return self.tp / denom if denom else 0.0

    @property
    def recall(self) -> float:
        denom = self.tp + self.fn
        return self.tp / denom if denom else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2.0 * p * r / (p + r) if p + r > 0 else 0.0


def confusion_and_f1(preds: Sequence[int], truths: Sequence[int]) -> ConfusionStats:
    """Confusion counts and F1 with 0-denominator guards."""
    preds = np.asarray(preds)
    truths = np.asarray(truths)
    if preds.shape != truths.shape or preds.ndim != 1 or preds.size == 0:
        raise ValueError("preds and truths must be equal-length non-empty vectors")
    p = preds != 0
    y = truths != 0
    return ConfusionStats(
        tp=int(np.count_nonzero(p & y)),
        fp=int(np.count_nonzero(p & ~y)),
        tn=int(np.count_nonzero(~p & ~y)),
        fn=int(np.count_nonzero(~p & y)),
    )


def pof_poc(preds_by_tau: Sequence[int], truth: int, grid: FractionGrid) -> tuple[float, float]:
    """Point of first / confident detection for one example.

    PoF is the smallest fraction with a correct prediction; PoC the
    smallest fraction after which every prediction stays correct. Either
    is 1.0 when no qualifying fraction exists.
    """
    if len(preds_by_tau) != len(grid.taus):
        raise ValueError("need one prediction per grid fraction")
    correct = [p == truth for p in preds_by_tau]
    pof = 1.0
    for tau, ok in zip(grid.taus, correct):
        if ok:
            pof = tau
            break
    if not correct[-1]:
        return pof, 1.0
    start = len(correct) - 1
    while start > 0 and correct[start - 1]:
        start -= 1
    return pof, grid.taus[start]


_VARIANT_RE = re.compile(
    r"^(?:(?P<engine>lstm|dtw|fused):)?(?P<feat>Raw|TE_(?P<te_m>\d+)|BTE_(?P<bte_m>\d+))"
    r"(?P<tags>(\+prev|\+context)*)$"
)


@dataclass(frozen=True)
class VariantSpec:
    """One evaluated pipeline flavor: feature set x classifier x fusion."""

    name: str
    engine: str           # "lstm" | "dtw"
    features: str         # "raw" | "te" | "bte"
    m: int | None
    fused: bool
    use_prev: bool
    use_context: bool

    @property
    def needs_selection(self) -> bool:
        return self.features != "raw"


def parse_variant(text: str) -> VariantSpec:
    """Parse names like ``Raw``, ``TE_10``, ``dtw:TE_30``, ``fused:TE_10+prev+context``."""
    match = _VARIANT_RE.match(text.strip())
    if not match:
        raise ConfigError(f"cannot parse variant {text!r}")
    engine = match.group("engine") or "lstm"
    feat = match.group("feat")
    tags = match.group("tags") or ""
    fused = engine == "fused"
    if fused:
        engine = "lstm"
    use_prev = "+prev" in tags
    use_context = "+context" in tags
    if (use_prev or use_context) and not fused:
        raise ConfigError(f"variant {text!r}: +prev/+context require the fused engine")
    if feat == "Raw":
        features, m = "raw", None
    elif feat.startswith("BTE"):
        features, m = "bte", int(match.group("bte_m"))
    else:
        features, m = "te", int(match.group("te_m"))
    return VariantSpec(
        name=text.strip(), engine=engine, features=features, m=m,
        fused=fused, use_prev=use_prev, use_context=use_context,
    )


@dataclass
class FoldReport:
    fold: str
    per_tau: dict[float, ConfusionStats]
    pof_values: list[float]
    poc_values: list[float]
    notes: list[str] = field(default_factory=list)

    @property
    def n_test(self) -> int:
        return next(iter(self.per_tau.values())).n

    @property
    def pof_mean(self) -> float:
        return float(np.mean(self.pof_values))

    @property
    def poc_mean(self) -> float:
        return float(np.mean(self.poc_values))


@dataclass
class EvalReport:
    """Per-fraction pooled confusion plus earliness summaries for one variant."""

    variant: str
    taus: tuple[float, ...]
    per_tau: dict[float, ConfusionStats]
    pof_mean: float
    poc_mean: float
    per_fold: tuple[FoldReport, ...]
    config_echo: dict
    notes: list[str] = field(default_factory=list)

    def fold_mean_f1(self, tau: float) -> float:
        return float(np.mean([fr.per_tau[tau].f1 for fr in self.per_fold]))

    def mean_f1(self) -> float:
        """Mean over the fraction grid of pooled F1."""
        return float(np.mean([self.per_tau[t].f1 for t in self.taus]))


def derive_seed(*parts) -> int:
    """Stable 63-bit seed from arbitrary labels (independent of hash seeds)."""
    digest = hashlib.sha256("|".join(str(p) for p in parts).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little") >> 1


def thread_count(n_tasks: int) -> int:
    """Worker cap: EARLYCUE_THREADS env var, else the CPU count."""
    env = os.environ.get("EARLYCUE_THREADS")
    if env is not None:
        try:
            cap = int(env)
        except ValueError as exc:
            raise ConfigError(f"EARLYCUE_THREADS must be an integer, got {env!r}") from exc
    else:
        cap = os.cpu_count() or 1
    return max(1, min(cap, n_tasks))


def _train_config(cfg: PipelineConfig, seed: int) -> lstm_mod.TrainConfig:
    return lstm_mod.TrainConfig(
        iterations=cfg.lstm_iterations,
        learning_rate=cfg.lstm_learning_rate,
        batch_size=cfg.lstm_batch_size,
        hidden=cfg.lstm_hidden,
        adam_beta1=cfg.lstm_adam_beta1,
        adam_beta2=cfg.lstm_adam_beta2,
        adam_eps=cfg.lstm_adam_eps,
        seed=seed,
    )


class FoldModels:
    """Per-fold trained artifacts, shared across variants within a sweep."""

    def __init__(self):
        self.lstm: dict[tuple, lstm_mod.LstmParams] = {}
        self.dtw: dict[tuple, dtw_mod.DtwTemplates] = {}
        self.notes: list[str] = []


@dataclass
class FoldOutcome:
    """Everything a fold evaluation produced, including manifest material."""

    fold: str
    stats_mu: list[float]
    stats_var: list[float]
    reports: dict[str, FoldReport]
    lstm_models: dict[str, dict]
    dtw_models: dict[str, dict]


def _model_key_str(key: tuple) -> str:
    return "-".join("x" if p is None else str(p) for p in key)


def _serialize_templates(templates: dtw_mod.DtwTemplates) -> dict:
    def one(seg: Segment) -> dict:
        return {
            "source": list(seg.key),
            "label": seg.label,
            "data": seg.data.tolist(),
        }

    return {"template0": one(templates.template0), "template1": one(templates.template1)}


def _feature_key(spec: VariantSpec) -> tuple:
    return (spec.features, spec.m)


def _materialize_features(
    spec: VariantSpec,
    segments: list[Segment],
    selection: SelectionResult | None,
    bank,
    cache: dict,
) -> tuple[list[np.ndarray], FeatureSet | None]:
    """Feature matrices for the given segments under a variant's feature spec."""
    key = _feature_key(spec)
    if key in cache:
        return cache[key]
    if spec.features == "raw":
        result = ([s.data for s in segments], None)
    else:
        if selection is None:
            raise ValueError("variant needs feature selection but none was run")
        fset = selection.top(spec.m, spec.features.upper())
        result = ([project(s.data, fset, bank) for s in segments], fset)
    cache[key] = result
    return result


def _modality_inputs(
    fset: FeatureSet | None,
    feats: list[np.ndarray],
    segments: list[Segment],
    sensor: str,
    schema,
) -> tuple[list[np.ndarray], bool]:
    """Per-sensor training inputs: selected columns, or raw fallback if none."""
    if fset is not None:
        idx = fset.feature_indices_for_sensor(sensor)
        if idx:
            return [f[:, idx] for f in feats], False
    cols = schema.columns_for_sensor(sensor)
    return [s.data[:, cols] for s in segments], True


def evaluate_fold(
    fold_subject: str,
    recordings: list[Recording],
    cfg: PipelineConfig,
    specs: list[VariantSpec],
    selection: SelectionResult | None,
) -> FoldOutcome:
    """Train on every other subject, score the held-out subject's segments."""
    grid = FractionGrid(cfg.eval_taus)
    schema = recordings[0].schema
    bank = build_default_bank(
        recordings[0].sample_rate_hz,
        sigma=cfg.bank_sigma,
        gabor_hz=cfg.bank_gabor_hz,
        gabor_sigma=cfg.bank_gabor_sigma,
        strict_nyquist=cfg.bank_strict_nyquist,
    )
    excluded = selection.sampled_keys if selection is not None else frozenset()

    train_segments: list[Segment] = []
    test_segments: list[Segment] = []
    smoothed = {id(r): ewma(r.frames, cfg.ewma_alpha) for r in recordings}
    stats = fit_norm_stats(
        [smoothed[id(r)] for r in recordings if r.subject != fold_subject],
        epsilon=cfg.norm_epsilon,
    )
    for rec in recordings:
        norm = normalize(smoothed[id(rec)], stats, cfg.norm_divisor)
        rec_norm = Recording(
            rec.subject, rec.trial, rec.sample_rate_hz, norm, rec.annotations, rec.schema
        )
        for seg in extract_segments(rec_norm, cfg.operating_window):
            if seg.key in excluded:
                continue
            (test_segments if rec.subject == fold_subject else train_segments).append(seg)
    train_segments.sort(key=lambda s: s.key)
    test_segments.sort(key=lambda s: s.key)
    if not test_segments:
        raise ValueError(f"fold {fold_subject!r} has no test segments")

    models = FoldModels()
    train_feat_cache: dict = {}
    test_feat_cache: dict = {}
    train_labels = [s.label for s in train_segments]

    def lstm_model(key: tuple, sequences: list[np.ndarray]) -> lstm_mod.LstmParams:
        if key not in models.lstm:
            seed = derive_seed(cfg.seed, "lstm", fold_subject, *key)
            models.lstm[key] = lstm_mod.train(sequences, train_labels, _train_config(cfg, seed))
        return models.lstm[key]

    out: dict[str, FoldReport] = {}
    for spec in specs:
        feats_train, fset = _materialize_features(
            spec, train_segments, selection, bank, train_feat_cache
        )
        feats_test, _ = _materialize_features(
            spec, test_segments, selection, bank, test_feat_cache
        )
        notes: list[str] = []
        per_tau_counts = {tau: [0, 0, 0, 0] for tau in grid.taus}
        pofs: list[float] = []
        pocs: list[float] = []

        if spec.engine == "dtw":
            key = ("dtw",) + _feature_key(spec)
            if key not in models.dtw:
                projected = [s.with_data(f) for s, f in zip(train_segments, feats_train)]
                models.dtw[key] = dtw_mod.fit_templates(projected)
            templates = models.dtw[key]
            predict = [
                [dtw_mod.predict_fraction(feat, templates, tau) for tau in grid.taus]
                for feat in feats_test
            ]
        elif not spec.fused:
            params = lstm_model(("all",) + _feature_key(spec), feats_train)
            predict = []
            for feat in feats_test:
                _, cache = lstm_mod.forward(params, feat)
                row = []
                for tau in grid.taus:
                    probs = lstm_mod.readout(params, cache, grid.frames_for(tau, len(feat)))
                    row.append(1 if probs[1] > probs[0] else 0)
                predict.append(row)
        else:
            predict = _predict_fused(
                spec, cfg, grid, schema, fset,
                train_segments, feats_train, test_segments, feats_test,
                lstm_model, notes,
            )

        for seg, row in zip(test_segments, predict):
            for tau, pred in zip(grid.taus, row):
                counts = per_tau_counts[tau]
                if pred == 1 and seg.label == 1:
                    counts[0] += 1
                elif pred == 1:
                    counts[1] += 1
                elif seg.label == 0:
                    counts[2] += 1
                else:
                    counts[3] += 1
            pof, poc = pof_poc(row, seg.label, grid)
            pofs.append(pof)
            pocs.append(poc)
        out[spec.name] = FoldReport(
            fold=fold_subject,
            per_tau={tau: ConfusionStats(*c) for tau, c in per_tau_counts.items()},
            pof_values=pofs,
            poc_values=pocs,
            notes=notes,
        )
    return FoldOutcome(
        fold=fold_subject,
        stats_mu=stats.mu.tolist(),
        stats_var=stats.var.tolist(),
        reports=out,
        lstm_models={_model_key_str(k): p.to_json_obj() for k, p in models.lstm.items()},
        dtw_models={_model_key_str(k): _serialize_templates(t) for k, t in models.dtw.items()},
    )


def _predict_fused(
    spec: VariantSpec,
    cfg: PipelineConfig,
    grid: FractionGrid,
    schema,
    fset: FeatureSet | None,
    train_segments: list[Segment],
    feats_train: list[np.ndarray],
    test_segments: list[Segment],
    feats_test: list[np.ndarray],
    lstm_model,
    notes: list[str],
) -> list[list[int]]:
    """Per-modality readouts combined by Dempster's rule, in e, k, m order."""
    use_prev = spec.use_prev or cfg.fusion_use_prev
    use_context = spec.use_context or cfg.fusion_use_context
    ctx_cfg = ContextConfig(a=cfg.context_a, step=cfg.context_step)
    sensor_params = {}
    sensor_test_inputs = {}
    for sensor in FUSION_SENSOR_ORDER:
        train_inputs, fallback = _modality_inputs(
            fset, feats_train, train_segments, sensor, schema
        )
        if fallback:
            notes.append(f"sensor {sensor}: no selected features; trained on identity raw channels")
        key = (sensor, "fallback" if fallback else "sel") + _feature_key(spec)
        sensor_params[sensor] = lstm_model(key, train_inputs)
        sensor_test_inputs[sensor], _ = _modality_inputs(
            fset, feats_test, test_segments, sensor, schema
        )
    skip_log: list[str] = []
    predictions: list[list[int]] = []
    for si, seg in enumerate(test_segments):
        caches = {}
        for sensor in FUSION_SENSOR_ORDER:
            feat = sensor_test_inputs[sensor][si]
            _, caches[sensor] = lstm_mod.forward(sensor_params[sensor], feat)
        prev: Bba | None = VACUOUS if use_prev else None
        row: list[int] = []
        for tau in grid.taus:
            frames = grid.frames_for(tau, seg.n_frames)
            bbas = [
                bba_from_probs(
                    lstm_mod.readout(sensor_params[s], caches[s], frames),
                    discount=cfg.fusion_discount,
                )
                for s in FUSION_SENSOR_ORDER
            ]
            context = None
            if use_context:
                t_rel, window = _context_position(seg, frames, cfg.context_source, notes)
                context = context_bba(t_rel, window, ctx_cfg)
            fused, label = fuse_decision(bbas, prev=prev, context=context, skip_log=skip_log)
            if use_prev:
                prev = fused
            row.append(label)
        predictions.append(row)
    if skip_log:
        notes.append(f"total-conflict skips: {len(skip_log)}")
    return predictions


def _context_position(seg: Segment, frames: int, source: str, notes: list[str]) -> tuple[float, float]:
    """Context prior clock: window-relative by default, task progress optionally."""
    if source == "task_progress":
        if seg.start_frame is not None and seg.trial_frames:
            return float(seg.start_frame + frames), float(seg.trial_frames)
        note = "task_progress context requested but segment lacks trial position; using window"
        if note not in notes:
            notes.append(note)
    return float(frames), float(seg.n_frames)


_FOLD_SHARED: tuple | None = None


def _fold_worker(subject: str) -> FoldOutcome:
    assert _FOLD_SHARED is not None
    recordings, cfg, specs, selection = _FOLD_SHARED
    return evaluate_fold(subject, recordings, cfg, specs, selection)


def run_selection(recordings: list[Recording], cfg: PipelineConfig) -> SelectionResult:
    """One-time feature ranking on a held-out sample of segments.

    The sample is drawn from segments of all subjects; its segments never
    reappear in any fold's train or test split. Normalization here uses
    stats over all recordings, which provably cannot change the ranking
    (binarization and chi-square are invariant to per-channel affine
    maps) and is never reused by the folds.
    """
    schema = recordings[0].schema
    bank = build_default_bank(
        recordings[0].sample_rate_hz,
        sigma=cfg.bank_sigma,
        gabor_hz=cfg.bank_gabor_hz,
        gabor_sigma=cfg.bank_gabor_sigma,
        strict_nyquist=cfg.bank_strict_nyquist,
    )
    smoothed = [ewma(r.frames, cfg.ewma_alpha) for r in recordings]
    stats = fit_norm_stats(smoothed, epsilon=cfg.norm_epsilon)
    segments: list[Segment] = []
    for rec, sm in zip(recordings, smoothed):
        rec_norm = Recording(
            rec.subject, rec.trial, rec.sample_rate_hz,
            normalize(sm, stats, cfg.norm_divisor), rec.annotations, rec.schema,
        )
        segments.extend(extract_segments(rec_norm, cfg.operating_window))
    segments.sort(key=lambda s: s.key)
    return rank_features(
        segments, schema, bank,
        sample_frac=cfg.selection_sample_frac, seed=cfg.seed,
    )


def sweep_with_outcomes(
    recordings: list[Recording],
    cfg: PipelineConfig,
    variants: Sequence[str | VariantSpec],
    selection: SelectionResult | None = None,
) -> tuple[dict[str, EvalReport], list[FoldOutcome]]:
    """Evaluate all variants under LOSO, sharing data prep and trained models.

    Folds run concurrently (capped by EARLYCUE_THREADS) with per-fold
    derived seeds, so results are independent of scheduling.
    """
    global _FOLD_SHARED
    specs = [parse_variant(v) if isinstance(v, str) else v for v in variants]
    if not specs:
        raise ValueError("no variants given")
    names = [s.name for s in specs]
    if len(set(names)) != len(names):
        specs = list({s.name: s for s in specs}.values())
    subjects = sorted({r.subject for r in recordings})
    if len(subjects) < 2:
        raise ValueError("leave-one-subject-out needs at least 2 subjects")
    if selection is None and any(s.needs_selection for s in specs):
        selection = run_selection(recordings, cfg)
    workers = thread_count(len(subjects))
    if workers > 1:
        from . import _lstm_kernels

        _lstm_kernels.warmup()
        dtw_mod.md_dtw_distance(np.zeros((1, 1)), np.zeros((1, 1)))
        _FOLD_SHARED = (recordings, cfg, specs, selection)
        try:
            ctx = multiprocessing.get_context("fork")
            with ctx.Pool(processes=workers) as pool:
                fold_outcomes = pool.map(_fold_worker, subjects)
        finally:
            _FOLD_SHARED = None
    else:
        fold_outcomes = [
            evaluate_fold(s, recordings, cfg, specs, selection) for s in subjects
        ]

    reports: dict[str, EvalReport] = {}
    grid = FractionGrid(cfg.eval_taus)
    for spec in specs:
        folds = tuple(outcome.reports[spec.name] for outcome in fold_outcomes)
        pooled = {
            tau: ConfusionStats(
                tp=sum(f.per_tau[tau].tp for f in folds),
                fp=sum(f.per_tau[tau].fp for f in folds),
                tn=sum(f.per_tau[tau].tn for f in folds),
                fn=sum(f.per_tau[tau].fn for f in folds),
            )
            for tau in grid.taus
        }
        pof_all = [v for f in folds for v in f.pof_values]
        poc_all = [v for f in folds for v in f.poc_values]
        notes = [f"{f.fold}: {n}" for f in folds for n in f.notes]
        reports[spec.name] = EvalReport(
            variant=spec.name,
            taus=grid.taus,
            per_tau=pooled,
            pof_mean=float(np.mean(pof_all)),
            poc_mean=float(np.mean(poc_all)),
            per_fold=folds,
            config_echo={"seed": cfg.seed, "variant": spec.name},
            notes=notes,
        )
    return reports, fold_outcomes


def sweep(
    recordings: list[Recording],
    cfg: PipelineConfig,
    variants: Sequence[str | VariantSpec],
    selection: SelectionResult | None = None,
) -> dict[str, EvalReport]:
    """Comparative LOSO evaluation of several pipeline variants."""
    reports, _ = sweep_with_outcomes(recordings, cfg, variants, selection)
    return reports


def run_loso(
    recordings: list[Recording],
    cfg: PipelineConfig,
    variant: str | VariantSpec = "TE_10",
) -> EvalReport:
    """LOSO evaluation of a single pipeline variant."""
    reports = sweep(recordings, cfg, [variant])
    return next(iter(reports.values()))


CSV_COLUMNS = (
    "variant", "fold", "tau", "tp", "fp", "tn", "fn",
    "precision", "recall", "f1", "pof_mean", "poc_mean",
)


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def reports_to_csv(
    reports: dict[str, EvalReport], config_digest: str, seed: int
) -> str:
    """Render the merged CSV: per-fold rows plus pooled/mean/stderr summaries."""
    lines = [f"# config_hash={config_digest} seed={seed}", ",".join(CSV_COLUMNS)]

    def row(variant, fold, tau, stats: ConfusionStats, pof, poc):
        values = (
            variant, fold, _fmt(tau), stats.tp, stats.fp, stats.tn, stats.fn,
            _fmt(stats.precision), _fmt(stats.recall), _fmt(stats.f1),
            _fmt(pof), _fmt(poc),
        )
        lines.append(",".join(str(v) for v in values))

    for name in sorted(reports):
        rep = reports[name]
        for fr in rep.per_fold:
            for tau in rep.taus:
                row(name, fr.fold, tau, fr.per_tau[tau], fr.pof_mean, fr.poc_mean)
        for tau in rep.taus:
            row(name, "pooled", tau, rep.per_tau[tau], rep.pof_mean, rep.poc_mean)
        for tau in rep.taus:
            f1s = np.array([fr.per_tau[tau].f1 for fr in rep.per_fold])
            stderr = float(f1s.std(ddof=1) / math.sqrt(len(f1s))) if len(f1s) > 1 else 0.0
            values = (
                name, "mean", _fmt(tau), "", "", "", "",
                "", "", _fmt(float(f1s.mean())),
                _fmt(float(np.mean([fr.pof_mean for fr in rep.per_fold]))),
                _fmt(float(np.mean([fr.poc_mean for fr in rep.per_fold]))),
            )
            lines.append(",".join(str(v) for v in values))
            values = (name, "stderr", _fmt(tau), "", "", "", "", "", "", _fmt(stderr), "", "")
            lines.append(",".join(str(v) for v in values))
    return "\n".join(lines) + "\n"
