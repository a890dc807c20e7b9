"""Multi-dimensional dynamic time warping and template classification.

Distances use the 1-norm between frames as the local cost and classic
unconstrained dynamic programming (diagonal/up/left steps) with no
windowing and no path-length normalization. Training picks, per class,
the segment with the least cumulative distance to its classmates;
prediction compares a query prefix against the two *full* templates and
takes the closer one, breaking ties toward the operating class.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numba import njit

from .datamodel import Segment


@njit(cache=True)
def _dtw_core(a: np.ndarray, b: np.ndarray) -> float:
    la, lb = a.shape[0], b.shape[0]
    m = a.shape[1]
    prev = np.empty(lb)
    cur = np.empty(lb)
    for j in range(lb):
        cost = 0.0
        for k in range(m):
            cost += abs(a[0, k] - b[j, k])
        prev[j] = cost if j == 0 else prev[j - 1] + cost
    for i in range(1, la):
        for j in range(lb):
            cost = 0.0
            for k in range(m):
                cost += abs(a[i, k] - b[j, k])
            if j == 0:
                cur[0] = prev[0] + cost
            else:
                best = prev[j - 1]
                if prev[j] < best:
                    best = prev[j]
                if cur[j - 1] < best:
                    best = cur[j - 1]
                cur[j] = best + cost
        prev, cur = cur, prev
    return prev[lb - 1]


@njit(cache=True)
def _cumulative_sums(data: np.ndarray, lengths: np.ndarray) -> np.ndarray:
    """Sum of pairwise DTW distances for each row of a padded segment stack."""
    n = data.shape[0]
    sums = np.zeros(n)
    for i in range(n):
        for j in range(i + 1, n):
            d = _dtw_core(data[i, : lengths[i]], data[j, : lengths[j]])
            sums[i] += d
            sums[j] += d
    return sums


def md_dtw_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Cumulative DTW distance between two (L, m) sequences."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[0] < 1 or b.shape[0] < 1:
        raise ValueError("sequences must be non-empty 2-D matrices")
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"dimension mismatch: {a.shape[1]} vs {b.shape[1]}")
    return float(_dtw_core(a, b))


@dataclass(frozen=True)
class DtwTemplates:
    """Per-class consensus templates; template0 operating, template1 requesting."""

    template0: Segment
    template1: Segment

    def __post_init__(self):
        if self.template0.label != 0 or self.template1.label != 1:
            raise ValueError("templates must carry labels 0 and 1 respectively")
        if self.template0.width != self.template1.width:
            raise ValueError("templates must share the feature dimension")


def _class_template(segments: list[Segment]) -> Segment:
    ordered = sorted(segments, key=lambda s: s.key)
    if len(ordered) == 1:
        return ordered[0]
    width = ordered[0].width
    max_len = max(s.n_frames for s in ordered)
    stack = np.zeros((len(ordered), max_len, width), dtype=np.float64)
    lengths = np.empty(len(ordered), dtype=np.int64)
    for i, seg in enumerate(ordered):
        stack[i, : seg.n_frames] = seg.data
        lengths[i] = seg.n_frames
    sums = _cumulative_sums(stack, lengths)
    return ordered[int(np.argmin(sums))]  # argmin keeps the earliest on ties


def fit_templates(segments: Sequence[Segment]) -> DtwTemplates:
    """Pick, per class, the segment minimizing its within-class distance sum."""
    by_label: dict[int, list[Segment]] = {0: [], 1: []}
    for seg in segments:
        by_label[seg.label].append(seg)
    for label in (0, 1):
        if not by_label[label]:
            raise ValueError(f"no segments with label {label}")
    return DtwTemplates(
        template0=_class_template(by_label[0]),
        template1=_class_template(by_label[1]),
    )


def prefix_frames(tau: float, length: int) -> int:
    """Frames visible at fraction tau: max(1, floor(tau * L))."""
    if not 0.0 < tau <= 1.0:
        raise ValueError("tau must be in (0, 1]")
    return max(1, int(math.floor(tau * length + 1e-9)))


def predict_fraction(x: Segment | np.ndarray, templates: DtwTemplates, tau: float) -> int:
    """Classify from the beginning tau fraction of a segment.

    The truncated query is compared against the full templates (at
    inference time the event end is unknown); equal distances fall back
    to operating, the conservative no-action class.
    """
    data = x.data if isinstance(x, Segment) else np.asarray(x, dtype=np.float64)
    n = prefix_frames(tau, data.shape[0])
    prefix = data[:n]
    d0 = md_dtw_distance(prefix, templates.template0.data)
    d1 = md_dtw_distance(prefix, templates.template1.data)
    return 1 if d1 < d0 else 0
