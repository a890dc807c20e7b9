"""Recurrent network for early prediction, trained from scratch.

One LSTM cell (sigmoid forget/input/output gates, tanh candidate) feeds a
2-way softmax readout of the hidden state. Because the readout can be
taken at any intermediate timestep, the same trained network classifies
partial segments: fraction tau reads the hidden state after
max(1, floor(tau * L)) frames.

Training minimizes mean softmax cross-entropy at each sequence's final
valid timestep with full backpropagation through time and Adam updates;
given a seed it is bit-deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _lstm_kernels
from .datamodel import Segment
from .errors import NumericError

N_CLASSES = 2


@dataclass
class TrainConfig:
    """Training hyperparameters; defaults follow the source study."""

    iterations: int = 100_000
    learning_rate: float = 0.001
    batch_size: int = 128
    hidden: int = 32
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.iterations < 1 or self.batch_size < 1 or self.hidden < 1:
            raise ValueError("iterations, batch_size and hidden must be positive")
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be nonnegative")
        if not (0 < self.adam_beta1 < 1 and 0 < self.adam_beta2 < 1):
            raise ValueError("adam betas must lie in (0, 1)")
        if self.adam_eps <= 0:
            raise ValueError("adam_eps must be positive")


@dataclass
class LstmParams:
    """Gate weights over the concatenated [x_t, h_{t-1}] input."""

    w_f: np.ndarray
    w_i: np.ndarray
    w_g: np.ndarray
    w_o: np.ndarray
    b_f: np.ndarray
    b_i: np.ndarray
    b_g: np.ndarray
    b_o: np.ndarray
    w_y: np.ndarray

    def __post_init__(self):
        h = self.b_f.shape[0]
        zdim = self.w_f.shape[1]
        for w in (self.w_f, self.w_i, self.w_g, self.w_o):
            if w.shape != (h, zdim):
                raise ValueError("gate weight shapes disagree")
        for b in (self.b_f, self.b_i, self.b_g, self.b_o):
            if b.shape != (h,):
                raise ValueError("gate bias shapes disagree")
        if self.w_y.shape != (N_CLASSES, h):
            raise ValueError("readout weight must be (2, hidden)")
        for arr in self.arrays():
            if not np.all(np.isfinite(arr)):
                raise ValueError("parameters must be finite")

    @property
    def hidden(self) -> int:
        return self.b_f.shape[0]

    @property
    def input_dim(self) -> int:
        return self.w_f.shape[1] - self.hidden

    def arrays(self) -> tuple[np.ndarray, ...]:
        return (self.w_f, self.w_i, self.w_g, self.w_o,
                self.b_f, self.b_i, self.b_g, self.b_o, self.w_y)

    def copy(self) -> "LstmParams":
        return LstmParams(*(a.copy() for a in self.arrays()))

    def to_json_obj(self) -> dict:
        names = ("w_f", "w_i", "w_g", "w_o", "b_f", "b_i", "b_g", "b_o", "w_y")
        return {n: a.tolist() for n, a in zip(names, self.arrays())}

    @classmethod
    def from_json_obj(cls, obj: dict) -> "LstmParams":
        return cls(**{k: np.asarray(v, dtype=np.float64) for k, v in obj.items()})


def init_params(input_dim: int, hidden: int, rng: np.random.Generator) -> LstmParams:
    """Uniform +-0.1 weights, zero biases except forget bias at +1.0."""
    zdim = input_dim + hidden

    def w():
        return rng.uniform(-0.1, 0.1, size=(hidden, zdim))

    return LstmParams(
        w_f=w(), w_i=w(), w_g=w(), w_o=w(),
        b_f=np.full(hidden, 1.0),
        b_i=np.zeros(hidden),
        b_g=np.zeros(hidden),
        b_o=np.zeros(hidden),
        w_y=rng.uniform(-0.1, 0.1, size=(N_CLASSES, hidden)),
    )


def _pack(params: LstmParams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    h = params.hidden
    zdim = params.w_f.shape[1]
    W = np.empty((zdim, 4 * h), dtype=np.float64)
    b = np.empty(4 * h, dtype=np.float64)
    for k, (w_g, b_g) in enumerate(
        ((params.w_f, params.b_f), (params.w_i, params.b_i),
         (params.w_g, params.b_g), (params.w_o, params.b_o))
    ):
        W[:, k * h : (k + 1) * h] = w_g.T
        b[k * h : (k + 1) * h] = b_g
    return W, b, np.ascontiguousarray(params.w_y, dtype=np.float64)


def _unpack(W: np.ndarray, b: np.ndarray, Wy: np.ndarray, hidden: int) -> LstmParams:
    blocks = [np.ascontiguousarray(W[:, k * hidden : (k + 1) * hidden].T) for k in range(4)]
    biases = [b[k * hidden : (k + 1) * hidden].copy() for k in range(4)]
    return LstmParams(*blocks, *biases, Wy.copy())


def softmax2(logits: np.ndarray) -> np.ndarray:
    mx = logits.max()
    e = np.exp(logits - mx)
    return e / e.sum()


@dataclass
class LstmCache:
    """Per-timestep activations of one forward pass (arrays of shape (T, H))."""

    h: np.ndarray
    c: np.ndarray
    f: np.ndarray
    i: np.ndarray
    g: np.ndarray
    o: np.ndarray


def _sigmoid(a: np.ndarray) -> np.ndarray:
    out = np.empty_like(a)
    pos = a >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-a[pos]))
    ea = np.exp(a[~pos])
    out[~pos] = ea / (1.0 + ea)
    return out


def forward(params: LstmParams, x: np.ndarray, upto: int | None = None) -> tuple[np.ndarray, LstmCache]:
    """Run the cell over x[0:upto] from zero state; return class probabilities.

    Probabilities come from the softmax readout of the hidden state at
    step ``upto`` and sum to 1.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 1:
        raise ValueError("x must be a non-empty L x m matrix")
    L = x.shape[0]
    if upto is None:
        upto = L
    if not 1 <= upto <= L:
        raise ValueError(f"upto must be in [1, {L}], got {upto}")
    hdim = params.hidden
    cache = LstmCache(*(np.empty((upto, hdim)) for _ in range(6)))
    h = np.zeros(hdim)
    c = np.zeros(hdim)
    with np.errstate(invalid="ignore", over="ignore"):
        for t in range(upto):
            z = np.concatenate((x[t], h))
            f = _sigmoid(params.w_f @ z + params.b_f)
            i = _sigmoid(params.w_i @ z + params.b_i)
            g = np.tanh(params.w_g @ z + params.b_g)
            o = _sigmoid(params.w_o @ z + params.b_o)
            c = f * c + i * g
            h = o * np.tanh(c)
            if not (np.all(np.isfinite(c)) and np.all(np.isfinite(h))):
                raise NumericError(f"non-finite activation at timestep {t + 1}")
            cache.f[t], cache.i[t], cache.g[t], cache.o[t] = f, i, g, o
            cache.c[t], cache.h[t] = c, h
    return softmax2(params.w_y @ h), cache


def readout(params: LstmParams, cache: LstmCache, step: int) -> np.ndarray:
    """Class probabilities from a cached hidden state (1-based step index)."""
    return softmax2(params.w_y @ cache.h[step - 1])


def _pad_batch(batch: Sequence[tuple[np.ndarray, int]]):
    if not batch:
        raise ValueError("batch must be non-empty")
    m = batch[0][0].shape[1]
    lengths = np.array([len(x) for x, _ in batch], dtype=np.int64)
    y = np.empty(len(batch), dtype=np.int64)
    X = np.zeros((len(batch), int(lengths.max()), m), dtype=np.float64)
    for k, (x, label) in enumerate(batch):
        if label not in (0, 1):
            raise ValueError("labels must be 0 or 1")
        if x.shape[1] != m:
            raise ValueError("inconsistent input dimension in batch")
        X[k, : len(x)] = x
        y[k] = label
    return X, lengths, y


def loss_and_gradients(params: LstmParams, batch: Sequence[tuple[np.ndarray, int]]):
    """Mean cross-entropy over the batch and its gradient for every parameter."""
    X, lengths, y = _pad_batch(batch)
    W, b, Wy = _pack(params)
    dW = np.zeros_like(W)
    db = np.zeros_like(b)
    dWy = np.zeros_like(Wy)
    loss = _lstm_kernels.fwd_bwd(X, lengths, W, b, Wy, y, dW, db, dWy)
    if not math.isfinite(loss):
        raise NumericError("non-finite training loss")
    return float(loss), _unpack(dW, db, dWy, params.hidden)


def batch_loss(params: LstmParams, batch: Sequence[tuple[np.ndarray, int]]) -> float:
    return loss_and_gradients(params, batch)[0]


class _Adam:
    def __init__(self, shapes, cfg: TrainConfig):
        self.m = [np.zeros(s) for s in shapes]
        self.v = [np.zeros(s) for s in shapes]
        self.cfg = cfg
        self.t = 0

    def step(self, tensors, grads):
        self.t += 1
        cfg = self.cfg
        bc1 = 1.0 - cfg.adam_beta1 ** self.t
        bc2 = 1.0 - cfg.adam_beta2 ** self.t
        for p, g, m, v in zip(tensors, grads, self.m, self.v):
            m *= cfg.adam_beta1
            m += (1.0 - cfg.adam_beta1) * g
            v *= cfg.adam_beta2
            v += (1.0 - cfg.adam_beta2) * (g * g)
            p -= cfg.learning_rate * (m / bc1) / (np.sqrt(v / bc2) + cfg.adam_eps)


def train(
    sequences: Sequence[np.ndarray],
    labels: Sequence[int],
    cfg: TrainConfig,
) -> LstmParams:
    """Train on variable-length sequences; bit-deterministic given the seed.

    Minibatches are sampled with replacement; the loss of each sequence is
    read at its own final timestep, so padding never leaks across
    sequences.
    """
    if len(sequences) != len(labels) or not sequences:
        raise ValueError("sequences and labels must be non-empty and equal length")
    labels = np.asarray(labels, dtype=np.int64)
    if not (np.any(labels == 0) and np.any(labels == 1)):
        raise ValueError("training data must contain both classes")
    m = sequences[0].shape[1]
    rng = np.random.default_rng(cfg.seed)
    params = init_params(m, cfg.hidden, rng)
    W, b, Wy = _pack(params)
    dW = np.zeros_like(W)
    db = np.zeros_like(b)
    dWy = np.zeros_like(Wy)
    lengths = np.array([len(s) for s in sequences], dtype=np.int64)
    X_all = np.zeros((len(sequences), int(lengths.max()), m), dtype=np.float64)
    for k, s in enumerate(sequences):
        X_all[k, : len(s)] = np.asarray(s, dtype=np.float64)
    adam = _Adam([W.shape, b.shape, Wy.shape], cfg)
    for _ in range(cfg.iterations):
        idx = rng.integers(0, len(sequences), size=cfg.batch_size)
        lb = lengths[idx]
        span = int(lb.max())
        Xb = np.ascontiguousarray(X_all[idx, :span])
        dW[:] = 0.0
        db[:] = 0.0
        dWy[:] = 0.0
        loss = _lstm_kernels.fwd_bwd(Xb, lb, W, b, Wy, labels[idx], dW, db, dWy)
        if not math.isfinite(loss):
            raise NumericError("non-finite training loss")
        adam.step((W, b, Wy), (dW, db, dWy))
    return _unpack(W, b, Wy, cfg.hidden)


def predict_fraction(params: LstmParams, x: Segment | np.ndarray, tau: float) -> int:
    """Label from the readout after max(1, floor(tau * L)) frames; ties -> 0."""
    if not 0.0 < tau <= 1.0:
        raise ValueError("tau must be in (0, 1]")
    data = x.data if isinstance(x, Segment) else np.asarray(x, dtype=np.float64)
    upto = max(1, int(math.floor(tau * data.shape[0] + 1e-9)))
    probs, _ = forward(params, data, upto=upto)
    return 1 if probs[1] > probs[0] else 0


def gradient_check(
    instances: int = 20,
    input_dim: int = 3,
    hidden: int = 4,
    seq_len: int = 5,
    eps: float = 1e-5,
    seed: int = 0,
) -> float:
    """Compare analytic gradients against central finite differences.

    Returns the worst relative error over all parameters of all random
    instances, with relative error |a - n| / max(1, |a|, |n|).
    """
    worst = 0.0
    for inst in range(instances):
        rng = np.random.default_rng(np.random.SeedSequence((seed, inst)))
        zdim = input_dim + hidden
        params = LstmParams(
            *(rng.uniform(-0.5, 0.5, size=(hidden, zdim)) for _ in range(4)),
            *(rng.uniform(-0.5, 0.5, size=hidden) for _ in range(4)),
            rng.uniform(-0.5, 0.5, size=(N_CLASSES, hidden)),
        )
        batch = []
        for _ in range(3):
            length = int(rng.integers(2, seq_len + 1))
            batch.append((rng.normal(size=(length, input_dim)), int(rng.integers(0, 2))))
        _, grads = loss_and_gradients(params, batch)
        for arr, garr in zip(params.arrays(), grads.arrays()):
            flat = arr.ravel()
            gflat = garr.ravel()
            for k in range(flat.size):
                orig = flat[k]
                flat[k] = orig + eps
                lp = batch_loss(params, batch)
                flat[k] = orig - eps
                lm = batch_loss(params, batch)
                flat[k] = orig
                numeric = (lp - lm) / (2.0 * eps)
                err = abs(gflat[k] - numeric) / max(1.0, abs(gflat[k]), abs(numeric))
                if err > worst:
                    worst = err
    return worst
