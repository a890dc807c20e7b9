import math

import numpy as np
import pytest

from earlycue.errors import NumericError
from earlycue.lstm import (
    LstmParams,
    TrainConfig,
    batch_loss,
    forward,
    gradient_check,
    init_params,
    loss_and_gradients,
    predict_fraction,
    readout,
    train,
)


def zero_params(input_dim=3, hidden=4):
    zdim = input_dim + hidden
    return LstmParams(
        *(np.zeros((hidden, zdim)) for _ in range(4)),
        *(np.zeros(hidden) for _ in range(4)),
        np.zeros((2, hidden)),
    )


def scalar_reference_forward(params, x, upto):
    """Independent scalar re-implementation of the cell recursion."""
    H = params.hidden
    h = [0.0] * H
    c = [0.0] * H

    def sig(v):
        return 1.0 / (1.0 + math.exp(-v))

    for t in range(upto):
        z = list(x[t]) + h
        new_h, new_c = [], []
        for j in range(H):
            af = sum(params.w_f[j][k] * z[k] for k in range(len(z))) + params.b_f[j]
            ai = sum(params.w_i[j][k] * z[k] for k in range(len(z))) + params.b_i[j]
            ag = sum(params.w_g[j][k] * z[k] for k in range(len(z))) + params.b_g[j]
            ao = sum(params.w_o[j][k] * z[k] for k in range(len(z))) + params.b_o[j]
            cc = sig(af) * c[j] + sig(ai) * math.tanh(ag)
            new_c.append(cc)
            new_h.append(sig(ao) * math.tanh(cc))
        h, c = new_h, new_c
    logits = [sum(params.w_y[r][j] * h[j] for j in range(H)) for r in range(2)]
    mx = max(logits)
    exps = [math.exp(v - mx) for v in logits]
    return [e / sum(exps) for e in exps]


class TestForward:
    def test_zero_params_give_uniform_probs(self):
        probs, _ = forward(zero_params(), np.ones((5, 3)))
        assert probs[0] == pytest.approx(0.5, abs=1e-15)
        assert probs[1] == pytest.approx(0.5, abs=1e-15)

    def test_statefulness_across_steps(self):
        rng = np.random.default_rng(0)
        params = init_params(2, 4, rng)
        x = rng.normal(size=(8, 2))
        p1, _ = forward(params, x, upto=1)
        p8, _ = forward(params, x, upto=8)
        assert not np.allclose(p1, p8)

    def test_matches_scalar_reference(self):
        h, m = 2, 1
        params = LstmParams(
            w_f=np.array([[0.3, -0.2, 0.1], [0.0, 0.5, -0.4]]),
            w_i=np.array([[-0.1, 0.2, 0.3], [0.4, -0.5, 0.6]]),
            w_g=np.array([[0.7, 0.1, -0.3], [-0.2, 0.2, 0.2]]),
            w_o=np.array([[0.05, -0.15, 0.25], [0.35, 0.45, -0.55]]),
            b_f=np.array([1.0, 0.5]),
            b_i=np.array([0.1, -0.1]),
            b_g=np.array([0.0, 0.2]),
            b_o=np.array([-0.2, 0.3]),
            w_y=np.array([[0.6, -0.6], [-0.4, 0.9]]),
        )
        x = np.array([[0.5], [-1.5]])
        probs, _ = forward(params, x, upto=2)
        expected = scalar_reference_forward(params, x.tolist(), 2)
        assert probs[0] == pytest.approx(expected[0], abs=1e-12)
        assert probs[1] == pytest.approx(expected[1], abs=1e-12)
        assert probs.sum() == pytest.approx(1.0, abs=1e-12)

    def test_random_params_match_reference(self):
        rng = np.random.default_rng(1)
        params = init_params(3, 5, rng)
        x = rng.normal(size=(6, 3))
        probs, _ = forward(params, x)
        expected = scalar_reference_forward(params, x.tolist(), 6)
        assert np.allclose(probs, expected, atol=1e-12)

    def test_softmax_sums_to_one(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            params = init_params(2, 3, rng)
            probs, _ = forward(params, rng.normal(size=(4, 2)))
            assert probs.sum() == pytest.approx(1.0, abs=1e-12)
            assert np.all(probs > 0) and np.all(probs < 1)

    def test_upto_bounds(self):
        params = zero_params()
        with pytest.raises(ValueError):
            forward(params, np.zeros((3, 3)), upto=0)
        with pytest.raises(ValueError):
            forward(params, np.zeros((3, 3)), upto=4)

    def test_non_finite_activation_raises_with_timestep(self):
        params = zero_params()
        x = np.zeros((3, 3))
        x[1, 0] = np.inf
        with pytest.raises(NumericError, match="timestep 2"):
            forward(params, x)

    def test_forced_gates_keep_memory_constant(self):
        rng = np.random.default_rng(3)
        params = init_params(2, 4, rng)
        params.b_f[:] = 50.0   # forget gate ~1
        params.b_i[:] = -50.0  # input gate ~0
        _, cache = forward(params, rng.normal(size=(12, 2)))
        assert np.all(np.abs(cache.c) < 1e-12)

    def test_readout_matches_prefix_forward(self):
        rng = np.random.default_rng(4)
        params = init_params(2, 4, rng)
        x = rng.normal(size=(9, 2))
        probs_full, cache = forward(params, x)
        for t in (1, 4, 9):
            probs_t, _ = forward(params, x, upto=t)
            assert np.allclose(readout(params, cache, t), probs_t, atol=1e-12)
        assert np.allclose(readout(params, cache, 9), probs_full)


class TestLossAndGradients:
    def test_zero_params_loss_is_ln2(self):
        loss, _ = loss_and_gradients(zero_params(), [(np.ones((4, 3)), 1)])
        assert loss == pytest.approx(math.log(2.0), abs=1e-12)

    def test_duplicated_batch_same_loss(self):
        rng = np.random.default_rng(5)
        params = init_params(3, 4, rng)
        batch = [(rng.normal(size=(5, 3)), 1), (rng.normal(size=(3, 3)), 0)]
        loss_once, _ = loss_and_gradients(params, batch)
        loss_twice, _ = loss_and_gradients(params, batch + batch)
        assert loss_twice == pytest.approx(loss_once, abs=1e-12)

    def test_loss_matches_forward_probabilities(self):
        rng = np.random.default_rng(6)
        params = init_params(2, 4, rng)
        x = rng.normal(size=(7, 2))
        probs, _ = forward(params, x)
        loss, _ = loss_and_gradients(params, [(x, 1)])
        assert loss == pytest.approx(-math.log(probs[1]), abs=1e-12)

    def test_variable_lengths_no_padding_leakage(self):
        rng = np.random.default_rng(7)
        params = init_params(2, 4, rng)
        a = rng.normal(size=(3, 2))
        b = rng.normal(size=(9, 2))
        joint, _ = loss_and_gradients(params, [(a, 0), (b, 1)])
        la, _ = loss_and_gradients(params, [(a, 0)])
        lb, _ = loss_and_gradients(params, [(b, 1)])
        assert joint == pytest.approx((la + lb) / 2.0, abs=1e-12)

    def test_empty_batch_rejected(self):
        with pytest.raises(ValueError):
            loss_and_gradients(zero_params(), [])

    def test_bad_label_rejected(self):
        with pytest.raises(ValueError):
            loss_and_gradients(zero_params(), [(np.zeros((2, 3)), 2)])

    def test_gradient_check_small(self):
        assert gradient_check(instances=3) < 1e-4


class TestTrain:
    def _separable_data(self, n=16):
        seqs = []
        labels = []
        for i in range(n):
            label = i % 2
            seqs.append(np.full((6, 1), float(label)))
            labels.append(label)
        return seqs, labels

    def test_learns_linearly_separable_constants(self):
        seqs, labels = self._separable_data()
        cfg = TrainConfig(iterations=2000, batch_size=8, hidden=4, seed=1)
        params = train(seqs, labels, cfg)
        preds = [predict_fraction(params, s, 1.0) for s in seqs]
        assert preds == labels

    def test_bit_deterministic(self):
        seqs, labels = self._separable_data(8)
        cfg = TrainConfig(iterations=50, batch_size=4, hidden=3, seed=9)
        a = train(seqs, labels, cfg)
        b = train(seqs, labels, cfg)
        for arr_a, arr_b in zip(a.arrays(), b.arrays()):
            assert np.array_equal(arr_a, arr_b)

    def test_zero_learning_rate_keeps_init(self):
        seqs, labels = self._separable_data(6)
        cfg = TrainConfig(iterations=25, batch_size=4, hidden=3, learning_rate=0.0, seed=5)
        params = train(seqs, labels, cfg)
        expected = init_params(1, 3, np.random.default_rng(5))
        for got, want in zip(params.arrays(), expected.arrays()):
            assert np.array_equal(got, want)

    def test_single_class_rejected(self):
        with pytest.raises(ValueError):
            train([np.zeros((3, 1))] * 4, [1, 1, 1, 1], TrainConfig(iterations=1))

    def test_config_validation(self):
        with pytest.raises(ValueError):
            TrainConfig(iterations=0)
        with pytest.raises(ValueError):
            TrainConfig(adam_beta1=1.0)


class TestPredictFraction:
    def test_tau_one_is_final_step(self):
        rng = np.random.default_rng(8)
        params = init_params(2, 3, rng)
        x = rng.normal(size=(10, 2))
        probs, _ = forward(params, x, upto=10)
        assert predict_fraction(params, x, 1.0) == int(probs[1] > probs[0])

    def test_tiny_tau_clamps_to_first_frame(self):
        rng = np.random.default_rng(9)
        params = init_params(2, 3, rng)
        x = rng.normal(size=(10, 2))
        probs, _ = forward(params, x, upto=1)
        assert predict_fraction(params, x, 0.01) == int(probs[1] > probs[0])

    def test_tie_maps_to_operating(self):
        assert predict_fraction(zero_params(input_dim=2), np.ones((4, 2)), 1.0) == 0

    def test_tau_validation(self):
        with pytest.raises(ValueError):
            predict_fraction(zero_params(input_dim=2), np.ones((4, 2)), 0.0)
