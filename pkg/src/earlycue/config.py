"""Pipeline configuration: plain-text files with dotted keys.

Grammar, one setting per line::

    # comment
    dotted.key = value

Values are JSON literals (numbers, true/false, quoted strings, lists);
a bare unquoted word is read as a string. Unknown keys are rejected.
CLI flags override file values. All randomness derives from the single
``seed`` key.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import ConfigError

DEFAULT_TAUS = tuple(round(k / 10, 1) for k in range(1, 11))


@dataclass
class PipelineConfig:
    seed: int = 0
    data_dir: str | None = None
    data_schema: str = "default50"
    synth_preset: str | None = None
    ewma_alpha: float = 0.2
    norm_divisor: str = "variance"
    norm_epsilon: float = 1e-8
    bank_sigma: float = 1.0
    bank_gabor_hz: float = 2.0
    bank_gabor_sigma: float = 0.15
    bank_strict_nyquist: bool = False
    operating_window: int = 40
    selection_m: int = 10
    selection_sample_frac: float = 0.10
    lstm_iterations: int = 20_000
    lstm_learning_rate: float = 0.001
    lstm_batch_size: int = 128
    lstm_hidden: int = 32
    lstm_adam_beta1: float = 0.9
    lstm_adam_beta2: float = 0.999
    lstm_adam_eps: float = 1e-8
    fusion_use_prev: bool = False
    fusion_use_context: bool = False
    fusion_discount: float = 0.0
    context_a: float = 0.4
    context_step: float = 0.2
    context_source: str = "window"
    eval_taus: tuple[float, ...] = DEFAULT_TAUS
    eval_variants: tuple[str, ...] = ("TE_10",)
    eval_out: str = "report.csv"
    eval_fold_average: bool = False
    out_dir: str = "out"

    def __post_init__(self):
        if self.ewma_alpha <= 0 or self.ewma_alpha > 1:
            raise ConfigError("ewma.alpha must be in (0, 1]")
        if self.norm_divisor not in ("variance", "stddev"):
            raise ConfigError("normalize.divisor must be variance or stddev")
        if self.context_source not in ("window", "task_progress"):
            raise ConfigError("context.source must be window or task_progress")
        if not 0 < self.selection_sample_frac <= 1:
            raise ConfigError("selection.sample_frac must be in (0, 1]")
        if self.selection_m < 1 or self.operating_window < 1:
            raise ConfigError("selection.m and segment.operating_window must be >= 1")
        if not 0 <= self.fusion_discount <= 1:
            raise ConfigError("fusion.discount must lie in [0, 1]")
        self.eval_taus = tuple(float(t) for t in self.eval_taus)
        self.eval_variants = tuple(str(v) for v in self.eval_variants)


# dotted config key -> PipelineConfig attribute
KEY_MAP = {
    "seed": "seed",
    "data.dir": "data_dir",
    "data.schema": "data_schema",
    "data.synth_preset": "synth_preset",
    "ewma.alpha": "ewma_alpha",
    "normalize.divisor": "norm_divisor",
    "normalize.epsilon": "norm_epsilon",
    "bank.sigma": "bank_sigma",
    "bank.gabor_hz": "bank_gabor_hz",
    "bank.gabor_sigma": "bank_gabor_sigma",
    "bank.strict_nyquist": "bank_strict_nyquist",
    "segment.operating_window": "operating_window",
    "selection.m": "selection_m",
    "selection.sample_frac": "selection_sample_frac",
    "lstm.iterations": "lstm_iterations",
    "lstm.learning_rate": "lstm_learning_rate",
    "lstm.batch_size": "lstm_batch_size",
    "lstm.hidden": "lstm_hidden",
    "lstm.adam_beta1": "lstm_adam_beta1",
    "lstm.adam_beta2": "lstm_adam_beta2",
    "lstm.adam_eps": "lstm_adam_eps",
    "fusion.use_prev": "fusion_use_prev",
    "fusion.use_context": "fusion_use_context",
    "fusion.discount": "fusion_discount",
    "context.a": "context_a",
    "context.step": "context_step",
    "context.source": "context_source",
    "eval.taus": "eval_taus",
    "eval.variants": "eval_variants",
    "eval.out": "eval_out",
    "eval.fold_average": "eval_fold_average",
    "run.out_dir": "out_dir",
}

_ATTR_TO_KEY = {attr: key for key, attr in KEY_MAP.items()}


def _parse_value(raw: str):
    raw = raw.strip()
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw  # bare word


def _coerce(key: str, value, target_type):
    if target_type is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{key}: expected a boolean, got {value!r}")
        return value
    if target_type is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{key}: expected an integer, got {value!r}")
        return value
    if target_type is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key}: expected a number, got {value!r}")
        return float(value)
    return value


def parse_overrides(items: dict) -> dict:
    """Validate a {dotted key: value} mapping into attribute assignments."""
    out = {}
    type_of = {f.name: f.type for f in fields(PipelineConfig)}
    simple = {"int": int, "float": float, "bool": bool, "str": str}
    for key, value in items.items():
        attr = KEY_MAP.get(key)
        if attr is None:
            raise ConfigError(f"unknown config key {key!r}")
        tname = type_of[attr]
        target = simple.get(tname)
        if target is not None:
            value = _coerce(key, value, target)
        elif attr in ("eval_taus", "eval_variants"):
            if not isinstance(value, (list, tuple)):
                raise ConfigError(f"{key}: expected a list")
            value = tuple(value)
        elif attr in ("data_dir", "synth_preset"):
            if value is not None and not isinstance(value, str):
                raise ConfigError(f"{key}: expected a string")
        out[attr] = value
    return out


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Parse config text into a {dotted key: value} mapping."""
    items: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if key in items:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        items[key] = _parse_value(raw)
    return items


def load_config(path, overrides: dict | None = None) -> PipelineConfig:
    """Read a config file and apply flag overrides on top."""
    path = Path(path)
    items = parse_config_text(path.read_text(encoding="utf-8"), source=str(path))
    if overrides:
        items.update(overrides)
    return PipelineConfig(**parse_overrides(items))


def config_from_overrides(overrides: dict) -> PipelineConfig:
    return PipelineConfig(**parse_overrides(overrides))


def config_hash(cfg: PipelineConfig) -> str:
    """Deterministic digest over the canonical key=value listing."""
    lines = []
    for f in sorted(fields(cfg), key=lambda f: f.name):
        value = getattr(cfg, f.name)
        key = _ATTR_TO_KEY[f.name]
        lines.append(f"{key}={value!r}")
    return hashlib.sha256("\n".join(lines).encode("utf-8")).hexdigest()[:16]


def dump_config(cfg: PipelineConfig) -> str:
    """Render a config back to its file grammar (canonical key order)."""
    lines = []
    for f in sorted(fields(cfg), key=lambda f: f.name):
        value = getattr(cfg, f.name)
        key = _ATTR_TO_KEY[f.name]
        if isinstance(value, tuple):
            value = list(value)
        lines.append(f"{key} = {json.dumps(value)}")
    return "\n".join(lines) + "\n"
