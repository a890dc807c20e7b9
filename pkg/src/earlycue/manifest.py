"""Trained-pipeline manifests: one JSON document describing every artifact.

A manifest is complete when it carries the channel schema, per-fold
preprocessing statistics, the feature set, model references (files for
networks, embedded data for templates) and the fusion configuration.
Loading validates completeness and resolves model references relative to
the manifest location.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import ManifestError

REQUIRED_KEYS = ("config_hash", "seed", "schema", "preprocess", "bank", "feature_set", "models", "fusion")


def validate_manifest(manifest: dict, base_dir: Path | None = None) -> None:
    """Raise ManifestError when the manifest is incomplete or dangling."""
    for key in REQUIRED_KEYS:
        if key not in manifest:
            raise ManifestError(f"manifest missing required block {key!r}")
    preprocess = manifest["preprocess"]
    folds = preprocess.get("folds")
    if not folds:
        raise ManifestError("manifest missing normalization stats (preprocess.folds empty)")
    for fold in folds:
        if "mu" not in fold or "var" not in fold:
            raise ManifestError(f"fold {fold.get('fold')!r} lacks normalization stats")
        if len(fold["mu"]) != len(fold["var"]):
            raise ManifestError("normalization stats mu/var lengths disagree")
    models = manifest["models"]
    kind = models.get("classifier")
    if kind not in ("lstm", "dtw", "both"):
        raise ManifestError(f"unknown classifier kind {kind!r}")
    for name, ref in models.get("lstm", {}).items():
        if base_dir is not None:
            target = base_dir / ref
            if not target.exists():
                raise ManifestError(f"dangling reference: model {name!r} -> {ref}")
    if kind in ("dtw", "both"):
        dtw = models.get("dtw")
        if not dtw:
            raise ManifestError("dtw classifier declared but no templates embedded")
        for slot in ("template0", "template1"):
            tpl = dtw.get(slot)
            if not tpl or "data" not in tpl or "source" not in tpl:
                raise ManifestError(f"dtw {slot} must embed 'source' and 'data'")


def save_manifest(manifest: dict, path) -> None:
    """Validate and write; the JSON round-trips field-for-field."""
    path = Path(path)
    validate_manifest(manifest, base_dir=None)
    path.write_text(
        json.dumps(manifest, indent=1, sort_keys=True) + "\n", encoding="utf-8"
    )


def load_manifest(path) -> dict:
    path = Path(path)
    try:
        manifest = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(manifest, dict):
        raise ManifestError(f"{path}: manifest must be a JSON object")
    validate_manifest(manifest, base_dir=path.parent)
    return manifest
