"""Temporal filter bank and per-channel encoding.

Each channel is filtered with Q=6 kernels (identity, 3-point central
difference, derivative of Gaussian, Laplacian of Gaussian, and a Gabor
quadrature pair), producing an M*Q representation. Filtering is
same-length correlation with replicate (edge value) padding, so encoded
frame indices stay aligned with raw frame indices. Output columns are
channel-major: channel c, filter q lands at column c*Q + q.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

DEFAULT_SIGMA = 1.0          # samples; deriv-gaussian and LoG
DEFAULT_GABOR_HZ = 2.0       # the stated 100 Hz exceeds Nyquist at 20 Hz sampling
DEFAULT_GABOR_SIGMA = 0.15   # seconds


@dataclass(frozen=True)
class FilterBank:
    """Ordered (name, kernel) pairs; every kernel has odd length."""

    filters: tuple[tuple[str, np.ndarray], ...]

    def __post_init__(self):
        fixed = []
        for name, kernel in self.filters:
            kernel = np.asarray(kernel, dtype=np.float64)
            if kernel.ndim != 1 or kernel.size < 1 or kernel.size % 2 == 0:
                raise ValueError(f"kernel {name!r} must be 1-D with odd length >= 1")
            kernel.flags.writeable = False
            fixed.append((name, kernel))
        object.__setattr__(self, "filters", tuple(fixed))

    @property
    def q(self) -> int:
        return len(self.filters)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.filters)

    def kernel(self, name: str) -> np.ndarray:
        for n, k in self.filters:
            if n == name:
                return k
        raise KeyError(name)


def _gaussian_derivative_kernel(sigma: float) -> np.ndarray:
    radius = int(math.ceil(3.0 * sigma))
    t = np.arange(-radius, radius + 1, dtype=np.float64)
    k = t * np.exp(-(t * t) / (2.0 * sigma * sigma))
    # unit response to a unit-slope ramp
    k /= np.sum(t * k)
    return k


def _log_kernel(sigma: float) -> np.ndarray:
    radius = int(math.ceil(3.0 * sigma))
    t = np.arange(-radius, radius + 1, dtype=np.float64)
    s2 = sigma * sigma
    k = (t * t - s2) / (s2 * s2) * np.exp(-(t * t) / (2.0 * s2))
    k /= sigma * math.sqrt(2.0 * math.pi)
    # remove the DC leak introduced by truncation
    k -= k.mean()
    return k


def _gabor_kernel(sample_rate_hz: float, freq_hz: float, sigma_s: float, phase: float) -> np.ndarray:
    radius = int(math.ceil(3.0 * sigma_s * sample_rate_hz))
    t = np.arange(-radius, radius + 1, dtype=np.float64) / sample_rate_hz
    return np.exp(-(t * t) / (2.0 * sigma_s * sigma_s)) * np.cos(2.0 * math.pi * freq_hz * t + phase)


def build_default_bank(
    sample_rate_hz: float,
    sigma: float = DEFAULT_SIGMA,
    gabor_hz: float = DEFAULT_GABOR_HZ,
    gabor_sigma: float = DEFAULT_GABOR_SIGMA,
    strict_nyquist: bool = False,
) -> FilterBank:
    """Build the six-filter default bank for the given sampling rate.

    A Gabor central frequency at or above Nyquist raises when
    ``strict_nyquist`` is set and warns (then proceeds) otherwise.
    """
    if sample_rate_hz <= 0:
        raise ValueError("sample_rate_hz must be positive")
    nyquist = sample_rate_hz / 2.0
    if gabor_hz >= nyquist:
        msg = f"gabor frequency {gabor_hz} Hz >= Nyquist {nyquist} Hz"
        if strict_nyquist:
            raise ValueError(msg)
        warnings.warn(msg, stacklevel=2)
    return FilterBank(
        filters=(
            ("identity", np.array([1.0])),
            ("sobel3", np.array([-1.0, 0.0, 1.0])),
            ("deriv_gaussian", _gaussian_derivative_kernel(sigma)),
            ("log", _log_kernel(sigma)),
            ("gabor_phase0", _gabor_kernel(sample_rate_hz, gabor_hz, gabor_sigma, 0.0)),
            ("gabor_phase90", _gabor_kernel(sample_rate_hz, gabor_hz, gabor_sigma, math.pi / 2.0)),
        )
    )


def apply_kernel(channel: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Same-length filtering of one channel with replicate padding.

    out[t] = sum_d kernel[r + d] * x[t + d] for offsets d in [-r, r],
    i.e. correlation; an antisymmetric kernel such as [-1, 0, 1] responds
    with x[t+1] - x[t-1].
    """
    channel = np.asarray(channel, dtype=np.float64)
    radius = kernel.size // 2
    if radius == 0:
        return channel * kernel[0]
    padded = np.empty(channel.size + 2 * radius, dtype=np.float64)
    padded[:radius] = channel[0]
    padded[radius:-radius] = channel
    padded[-radius:] = channel[-1]
    return np.correlate(padded, kernel, mode="valid")


def encode(segment: np.ndarray, bank: FilterBank) -> np.ndarray:
    """Filter every channel with every kernel: (L, M) -> (L, M*Q)."""
    segment = np.asarray(segment, dtype=np.float64)
    if segment.ndim != 2 or segment.shape[0] < 1:
        raise ValueError("segment must be a non-empty L x M matrix")
    n, m = segment.shape
    q = bank.q
    out = np.empty((n, m * q), dtype=np.float64)
    for c in range(m):
        col = segment[:, c]
        for fi, (_, kernel) in enumerate(bank.filters):
            out[:, c * q + fi] = apply_kernel(col, kernel)
    return out


def encode_pairs(
    segment: np.ndarray, bank: FilterBank, pairs: list[tuple[int, int]]
) -> np.ndarray:
    """Encode only the given (channel, filter) pairs: (L, M) -> (L, len(pairs)).

    Column j of the result equals column channel*Q + filter of
    :func:`encode`; this is the cheap projection path used once a feature
    set is fixed.
    """
    segment = np.asarray(segment, dtype=np.float64)
    out = np.empty((segment.shape[0], len(pairs)), dtype=np.float64)
    for j, (c, fi) in enumerate(pairs):
        out[:, j] = apply_kernel(segment[:, c], bank.filters[fi][1])
    return out


def column_pair(column: int, q: int) -> tuple[int, int]:
    """Map an encoded column index back to its (channel, filter) pair."""
    return column // q, column % q
