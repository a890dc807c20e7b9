import json

import numpy as np
import pytest

from earlycue import cli
from earlycue.config import (
    PipelineConfig,
    config_from_overrides,
    config_hash,
    dump_config,
    load_config,
    parse_config_text,
    parse_overrides,
)
from earlycue.datamodel import save_recording
from earlycue.errors import ConfigError, ManifestError
from earlycue.manifest import load_manifest, save_manifest, validate_manifest
from earlycue.pipeline import render_report, report_command, run_pipeline

from test_evaluation import fast_cfg, make_separable_dataset


class TestConfigGrammar:
    def test_parse_values(self):
        items = parse_config_text(
            """
            # comment
            seed = 7
            ewma.alpha = 0.3
            normalize.divisor = stddev
            bank.strict_nyquist = true
            eval.variants = ["Raw", "TE_10"]
            """
        )
        assert items["seed"] == 7
        assert items["ewma.alpha"] == 0.3
        assert items["normalize.divisor"] == "stddev"
        assert items["bank.strict_nyquist"] is True
        assert items["eval.variants"] == ["Raw", "TE_10"]

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown config key"):
            config_from_overrides({"lstm.momentum": 0.9})

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config_text("seed = 1\nseed = 2")

    def test_type_errors(self):
        with pytest.raises(ConfigError):
            config_from_overrides({"seed": "seven"})
        with pytest.raises(ConfigError):
            config_from_overrides({"lstm.iterations": 1.5})
        with pytest.raises(ConfigError):
            config_from_overrides({"bank.strict_nyquist": "yes"})

    def test_value_validation(self):
        with pytest.raises(ConfigError):
            config_from_overrides({"ewma.alpha": 1.5})
        with pytest.raises(ConfigError):
            config_from_overrides({"normalize.divisor": "mad"})

    def test_hash_tracks_values(self):
        a = PipelineConfig()
        b = PipelineConfig(seed=1)
        assert config_hash(a) != config_hash(b)
        assert config_hash(a) == config_hash(PipelineConfig())

    def test_dump_round_trip(self, tmp_path):
        cfg = PipelineConfig(seed=9, lstm_hidden=8, eval_variants=("Raw",))
        path = tmp_path / "cfg.cfg"
        path.write_text(dump_config(cfg), encoding="utf-8")
        back = load_config(path)
        assert back == cfg

    def test_flag_overrides_file(self, tmp_path):
        path = tmp_path / "cfg.cfg"
        path.write_text("seed = 1\n", encoding="utf-8")
        cfg = load_config(path, parse_config_text("seed = 5"))
        assert cfg.seed == 5


class TestManifest:
    def _minimal(self):
        return {
            "config_hash": "abc",
            "seed": 0,
            "schema": {"name": "default50", "groups": []},
            "preprocess": {"alpha": 0.2, "divisor": "variance", "epsilon": 1e-8,
                           "folds": [{"fold": "S01", "mu": [0.0], "var": [1.0]}]},
            "bank": {"sigma": 1.0, "gabor_hz": 2.0, "gabor_sigma": 0.15},
            "feature_set": {"variant": "raw"},
            "models": {"classifier": "lstm", "lstm": {}, "dtw": {}},
            "fusion": {"use_prev": False, "use_context": False, "discount": 0.0},
        }

    def test_round_trip(self, tmp_path):
        manifest = self._minimal()
        manifest["feature_set"] = {
            "variant": "TE",
            "m": 2,
            "entries": [
                {"column": 9, "channel": "epoc.gyro_yaw", "filter": "identity",
                 "chi2": 12.5, "threshold": 0.1},
                {"column": 3, "channel": "myo.emg_1", "filter": "sobel3",
                 "chi2": 4.25, "threshold": None},
            ],
        }
        path = tmp_path / "manifest.json"
        save_manifest(manifest, path)
        assert load_manifest(path) == manifest

    def test_missing_stats_rejected(self, tmp_path):
        manifest = self._minimal()
        manifest["preprocess"]["folds"] = []
        with pytest.raises(ManifestError, match="normalization stats"):
            save_manifest(manifest, tmp_path / "m.json")

    def test_dangling_model_reference(self, tmp_path):
        manifest = self._minimal()
        manifest["models"]["lstm"] = {"all": "models/gone.json"}
        path = tmp_path / "manifest.json"
        save_manifest(manifest, path)  # path check happens on load
        with pytest.raises(ManifestError, match="dangling"):
            load_manifest(path)

    def test_missing_block_rejected(self):
        manifest = self._minimal()
        del manifest["fusion"]
        with pytest.raises(ManifestError, match="fusion"):
            validate_manifest(manifest)


@pytest.fixture(scope="module")
def tiny_data_dir(tmp_path_factory):
    data_dir = tmp_path_factory.mktemp("tinydata")
    for rec in make_separable_dataset():
        save_recording(rec, data_dir / f"{rec.subject}_{rec.trial}.jsonl")
    return data_dir


def run_cfg(tiny_data_dir, out_dir, **overrides) -> PipelineConfig:
    cfg = fast_cfg(
        data_dir=str(tiny_data_dir),
        out_dir=str(out_dir),
        eval_variants=("TE_4", "dtw:TE_4"),
        **overrides,
    )
    return cfg


class TestRunPipeline:
    def test_produces_artifacts_and_is_reproducible(self, tiny_data_dir, tmp_path):
        out_dir = tmp_path / "out"
        cfg = run_cfg(tiny_data_dir, out_dir)
        result = run_pipeline(cfg)
        csv_path = result["csv"]
        assert csv_path.exists()
        manifest = load_manifest(result["manifest"])
        assert manifest["config_hash"] == config_hash(cfg)
        assert len(manifest["preprocess"]["folds"]) == 2
        assert manifest["models"]["classifier"] == "both"
        assert (out_dir / "featureset.json").exists()
        assert not (out_dir / "FAILED").exists()
        first = csv_path.read_bytes()
        run_pipeline(cfg)
        assert csv_path.read_bytes() == first

    def test_failure_leaves_marker(self, tmp_path):
        cfg = fast_cfg(data_dir=str(tmp_path / "absent"), out_dir=str(tmp_path / "o"))
        with pytest.raises(Exception):
            run_pipeline(cfg)
        marker = (tmp_path / "o" / "FAILED").read_text()
        assert "stage=data" in marker

    def test_report_rendering(self, tiny_data_dir, tmp_path):
        out_dir = tmp_path / "out"
        result = run_pipeline(run_cfg(tiny_data_dir, out_dir))
        text = result["summary"]
        assert "TE_4" in text and "dtw:TE_4" in text
        assert "best configuration" in text
        assert "Selected top features" in text
        via_command = report_command(
            manifest_path=out_dir / "manifest.json", csv_path=out_dir / "report.csv"
        )
        assert via_command == text

    def test_report_empty_csv(self):
        manifest = {"config_hash": "x", "seed": 0, "feature_set": {"variant": "raw"}}
        text = render_report(manifest, "# only a comment\n")
        assert "no rows" in text


class TestCli:
    def test_synth_validate_roundtrip(self, tmp_path, capsys):
        out = tmp_path / "synth"
        code = cli.main([
            "synth", "--preset", "easy", "--out", str(out),
            "--subjects", "2", "--trials-per-subject", "1", "--seed", "4",
        ])
        assert code == 0
        assert len(list(out.glob("*.jsonl"))) == 2
        assert cli.main(["validate", "--data-dir", str(out)]) == 0
        captured = capsys.readouterr().out
        assert "OK" in captured

    def test_validate_flags_bad_file(self, tmp_path, capsys):
        bad = tmp_path / "bad.jsonl"
        bad.write_text('{"schema": "default50", "annotations": []}\n[1, 2]\n')
        assert cli.main(["validate", "--data-dir", str(tmp_path)]) == 1
        assert "FAIL" in capsys.readouterr().out

    def test_gradcheck_and_report(self, tmp_path, capsys):
        artifact = tmp_path / "gradcheck.json"
        code = cli.main([
            "gradcheck", "--instances", "2", "--out", str(artifact),
        ])
        assert code == 0
        assert cli.main(["report", "--artifact", str(artifact)]) == 0
        out = capsys.readouterr().out
        assert "max relative error" in out
        assert "PASS" in out

    def test_select_prints_table(self, tiny_data_dir, capsys):
        code = cli.main([
            "select", "--data-dir", str(tiny_data_dir), "--m", "4",
            "--set", "selection.sample_frac = 0.3",
        ])
        assert code == 0
        out = capsys.readouterr().out
        assert "Selected top features" in out

    def test_eval_dtw_rejects_lstm_variants(self, tiny_data_dir):
        with pytest.raises(SystemExit):
            cli.main([
                "eval-dtw", "--data-dir", str(tiny_data_dir), "--variants", "TE_4",
            ])

    def test_unknown_preset_errors(self, tmp_path):
        with pytest.raises(KeyError):
            cli.main(["synth", "--preset", "imaginary", "--out", str(tmp_path)])
