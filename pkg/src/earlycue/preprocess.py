"""Noise reduction and channel normalization.

The pipeline order is fixed: EWMA smoothing over the whole recording,
then global per-channel normalization, then segmentation. Normalization
divides by the channel *variance* by default; dividing by the standard
deviation is available behind the ``divisor`` switch.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

DEFAULT_ALPHA = 0.2
DEFAULT_EPSILON = 1e-8
DIVISORS = ("variance", "stddev")


def ewma(stream: np.ndarray, alpha: float = DEFAULT_ALPHA) -> np.ndarray:
    """Exponentially weighted moving average, applied per channel.

    s_0 = r_0 and s_t = alpha * r_t + (1 - alpha) * s_{t-1}. The filter is
    applied to a whole recording before segmentation and resets at every
    recording boundary.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    stream = np.asarray(stream, dtype=np.float64)
    if stream.ndim != 2 or stream.shape[0] < 1:
        raise ValueError("stream must be a non-empty L x M matrix")
    out = np.empty_like(stream)
    out[0] = stream[0]
    beta = 1.0 - alpha
    for t in range(1, stream.shape[0]):
        out[t] = alpha * stream[t] + beta * out[t - 1]
    return out


@dataclass(frozen=True)
class NormStats:
    """Per-channel mean and population variance of the smoothed signal."""

    mu: np.ndarray
    var: np.ndarray
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=np.float64)
        var = np.asarray(self.var, dtype=np.float64)
        if mu.shape != var.shape or mu.ndim != 1:
            raise ValueError("mu and var must be 1-D vectors of equal length")
        if np.any(var < 0):
            raise ValueError("variances must be nonnegative")
        mu.flags.writeable = False
        var.flags.writeable = False
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "var", var)

    @property
    def n_channels(self) -> int:
        return self.mu.shape[0]

    @property
    def degenerate(self) -> np.ndarray:
        """Boolean mask of channels whose variance falls below epsilon."""
        return self.var < self.epsilon


def fit_norm_stats(streams: Iterable[np.ndarray], epsilon: float = DEFAULT_EPSILON) -> NormStats:
    """Pool frames from the given (smoothed) streams and fit mean/variance.

    Statistics are fit on the training split only; both states are pooled.
    Variance is the population variance (ddof=0).
    """
    arrays = [np.asarray(s, dtype=np.float64) for s in streams]
    if not arrays:
        raise ValueError("no streams given")
    pooled = arrays[0] if len(arrays) == 1 else np.concatenate(arrays, axis=0)
    if pooled.shape[0] < 2:
        raise ValueError("need at least 2 frames per channel to fit statistics")
    return NormStats(mu=pooled.mean(axis=0), var=pooled.var(axis=0), epsilon=epsilon)


def normalize(stream: np.ndarray, stats: NormStats, divisor: str = "variance") -> np.ndarray:
    """Center each channel and divide by its variance (or stddev).

    Degenerate channels (variance below epsilon) map to all zeros.
    """
    if divisor not in DIVISORS:
        raise ValueError(f"divisor must be one of {DIVISORS}")
    stream = np.asarray(stream, dtype=np.float64)
    if stream.ndim != 2 or stream.shape[1] != stats.n_channels:
        raise ValueError(
            f"stream width {stream.shape[1] if stream.ndim == 2 else '?'} "
            f"does not match stats width {stats.n_channels}"
        )
    denom = stats.var if divisor == "variance" else np.sqrt(stats.var)
    good = ~stats.degenerate
    out = np.zeros_like(stream)
    out[:, good] = (stream[:, good] - stats.mu[good]) / denom[good]
    return out


def smooth_and_normalize(
    frames_list: Sequence[np.ndarray],
    train_index: Sequence[int],
    alpha: float = DEFAULT_ALPHA,
    divisor: str = "variance",
    epsilon: float = DEFAULT_EPSILON,
) -> tuple[list[np.ndarray], NormStats]:
    """Smooth every stream, fit stats on the training subset, normalize all."""
    smoothed = [ewma(f, alpha) for f in frames_list]
    stats = fit_norm_stats([smoothed[i] for i in train_index], epsilon=epsilon)
    return [normalize(s, stats, divisor) for s in smoothed], stats
