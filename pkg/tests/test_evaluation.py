import numpy as np
import pytest
from hypothesis import given, strategies as st

from earlycue.config import PipelineConfig
from earlycue.datamodel import OPERATING, REQUESTING, Recording, StateSpan
from earlycue.errors import ConfigError
from earlycue.evaluation import (
    FractionGrid,
    confusion_and_f1,
    parse_variant,
    pof_poc,
    reports_to_csv,
    run_loso,
    sweep,
)
from earlycue.schema import default_channel_schema

GRID = FractionGrid()


class TestFractionGrid:
    def test_default_grid(self):
        assert GRID.taus == (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)

    def test_must_end_at_one(self):
        with pytest.raises(ValueError):
            FractionGrid((0.1, 0.5))

    def test_must_increase(self):
        with pytest.raises(ValueError):
            FractionGrid((0.5, 0.5, 1.0))
        with pytest.raises(ValueError):
            FractionGrid((-0.1, 1.0))

    def test_frames_for_avoids_float_droop(self):
        # 0.3 * 10 is 2.999... in binary; the mapping must still yield 3
        assert GRID.frames_for(0.3, 10) == 3
        assert GRID.frames_for(0.1, 10) == 1
        assert GRID.frames_for(1.0, 37) == 37

    def test_frames_for_clamps_to_one(self):
        assert GRID.frames_for(0.1, 3) == 1


class TestConfusion:
    def test_perfect_prediction(self):
        stats = confusion_and_f1([1, 0, 1, 0], [1, 0, 1, 0])
        assert stats.f1 == 1.0
        assert (stats.tp, stats.fp, stats.tn, stats.fn) == (2, 0, 2, 0)

    def test_worked_example(self):
        # TP=8, FP=2, FN=2 -> P = R = 0.8 -> F1 = 0.8
        preds = [1] * 8 + [1] * 2 + [0] * 2 + [0] * 3
        truths = [1] * 8 + [0] * 2 + [1] * 2 + [0] * 3
        stats = confusion_and_f1(preds, truths)
        assert stats.precision == pytest.approx(0.8)
        assert stats.recall == pytest.approx(0.8)
        assert stats.f1 == pytest.approx(0.8)

    def test_no_positives_guarded_to_zero(self):
        stats = confusion_and_f1([0, 0], [0, 0])
        assert stats.precision == 0.0
        assert stats.recall == 0.0
        assert stats.f1 == 0.0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            confusion_and_f1([0], [0, 1])

    def test_counts_total_is_n(self):
        rng = np.random.default_rng(0)
        preds = rng.integers(0, 2, 37)
        truths = rng.integers(0, 2, 37)
        assert confusion_and_f1(preds, truths).n == 37


class TestPofPoc:
    def test_scan_example(self):
        truth = 1
        preds = [0, 0, 1, 1, 0, 1, 1, 1, 1, 1]
        assert pof_poc(preds, truth, GRID) == (0.3, 0.6)

    def test_all_correct(self):
        assert pof_poc([1] * 10, 1, GRID) == (0.1, 0.1)

    def test_never_correct_is_one(self):
        assert pof_poc([0] * 10, 1, GRID) == (1.0, 1.0)

    def test_wrong_at_full_fraction_gives_poc_one(self):
        preds = [1] * 9 + [0]
        assert pof_poc(preds, 1, GRID) == (0.1, 1.0)

    def test_constant_predictor_balanced_mean_is_055(self):
        values = []
        for truth in (1, 1, 0, 0):
            pof, poc = pof_poc([1] * 10, truth, GRID)
            values.append((pof, poc))
        pofs = [v[0] for v in values]
        pocs = [v[1] for v in values]
        assert np.mean(pofs) == pytest.approx(0.55)
        assert np.mean(pocs) == pytest.approx(0.55)

    @given(st.lists(st.integers(0, 1), min_size=10, max_size=10), st.integers(0, 1))
    def test_pof_never_exceeds_poc(self, preds, truth):
        pof, poc = pof_poc(preds, truth, GRID)
        assert pof <= poc


class TestParseVariant:
    def test_plain_names(self):
        spec = parse_variant("TE_10")
        assert (spec.engine, spec.features, spec.m, spec.fused) == ("lstm", "te", 10, False)
        spec = parse_variant("Raw")
        assert (spec.features, spec.m) == ("raw", None)
        spec = parse_variant("BTE_30")
        assert (spec.features, spec.m) == ("bte", 30)

    def test_engines(self):
        assert parse_variant("dtw:TE_10").engine == "dtw"
        spec = parse_variant("fused:TE_10+prev+context")
        assert spec.fused and spec.use_prev and spec.use_context

    def test_tags_require_fusion(self):
        with pytest.raises(ConfigError):
            parse_variant("TE_10+prev")
        with pytest.raises(ConfigError):
            parse_variant("dtw:TE_10+context")

    def test_garbage_rejected(self):
        with pytest.raises(ConfigError):
            parse_variant("TE_ten")
        with pytest.raises(ConfigError):
            parse_variant("fused:")


def make_separable_dataset(n_subjects=2, trials=2, rate=20.0):
    """Tiny 50-channel corpus where one channel per sensor codes the state."""
    schema = default_channel_schema()
    informative = [
        schema.index_of("kinect.lean_fb"),
        schema.index_of("epoc.gyro_pitch"),
        schema.index_of("myo.orientation_pitch"),
    ]
    recordings = []
    rng = np.random.default_rng(99)
    for s in range(n_subjects):
        for t in range(trials):
            spans = []
            cursor = 0
            for _ in range(4):
                spans.append(StateSpan(cursor, cursor + 12, OPERATING))
                cursor += 12
                spans.append(StateSpan(cursor, cursor + 10, REQUESTING))
                cursor += 10
            frames = rng.normal(size=(cursor, schema.total_dims))
            for span in spans:
                if span.state == REQUESTING:
                    for col in informative:
                        frames[span.start : span.end, col] += 8.0
            recordings.append(
                Recording(
                    subject=f"S{s + 1:02d}",
                    trial=f"T{t + 1:02d}",
                    sample_rate_hz=rate,
                    frames=frames,
                    annotations=tuple(spans),
                    schema=schema,
                )
            )
    return recordings


def fast_cfg(**overrides) -> PipelineConfig:
    base = dict(
        seed=3,
        operating_window=12,
        lstm_iterations=800,
        lstm_batch_size=8,
        lstm_hidden=8,
        lstm_learning_rate=0.01,
        selection_m=4,
        selection_sample_frac=0.3,
    )
    base.update(overrides)
    return PipelineConfig(**base)


@pytest.fixture(scope="module")
def separable():
    return make_separable_dataset()


class TestLoso:
    def test_two_identical_subjects_reach_perfect_f1(self, separable):
        report = run_loso(separable, fast_cfg(), "TE_4")
        assert len(report.per_fold) == 2
        assert report.per_tau[1.0].f1 == 1.0

    def test_single_subject_rejected(self, separable):
        only_one = [r for r in separable if r.subject == "S01"]
        with pytest.raises(ValueError):
            run_loso(only_one, fast_cfg(), "Raw")

    def test_counts_sum_to_test_size_at_every_tau(self, separable):
        report = run_loso(separable, fast_cfg(), "Raw")
        sizes = {stats.n for stats in report.per_tau.values()}
        assert len(sizes) == 1
        for fold in report.per_fold:
            fold_sizes = {stats.n for stats in fold.per_tau.values()}
            assert fold_sizes == {fold.n_test}

    def test_subject_order_invariance(self, separable):
        cfg = fast_cfg()
        a = run_loso(separable, cfg, "Raw")
        b = run_loso(list(reversed(separable)), cfg, "Raw")
        for tau in a.taus:
            assert a.per_tau[tau].f1 == b.per_tau[tau].f1
        assert a.pof_mean == b.pof_mean

    def test_sweep_shares_selection_and_reports_each_variant(self, separable):
        cfg = fast_cfg(eval_variants=("TE_4", "dtw:TE_4"))
        reports = sweep(separable, cfg, ["TE_4", "dtw:TE_4"])
        assert set(reports) == {"TE_4", "dtw:TE_4"}
        for rep in reports.values():
            assert rep.per_tau[1.0].n > 0

    def test_fused_variant_runs_with_context_and_prev(self, separable):
        report = run_loso(separable, fast_cfg(), "fused:TE_4+prev+context")
        assert report.per_tau[1.0].f1 > 0.9

    def test_duplicate_variants_collapse_deterministically(self, separable):
        reports = sweep(separable, fast_cfg(), ["Raw", "Raw"])
        assert list(reports) == ["Raw"]


class TestCsv:
    def test_csv_schema_and_determinism(self, separable):
        cfg = fast_cfg()
        reports = sweep(separable, cfg, ["Raw"])
        text_a = reports_to_csv(reports, "deadbeef", cfg.seed)
        text_b = reports_to_csv(reports, "deadbeef", cfg.seed)
        assert text_a == text_b
        lines = text_a.splitlines()
        assert lines[0].startswith("# config_hash=deadbeef")
        assert lines[1] == (
            "variant,fold,tau,tp,fp,tn,fn,precision,recall,f1,pof_mean,poc_mean"
        )
        folds = {line.split(",")[1] for line in lines[2:]}
        assert folds == {"S01", "S02", "pooled", "mean", "stderr"}
