"""Dempster-Shafer evidence combination over the two-state frame.

The frame of discernment is {operating, requesting}; a basic belief
assignment puts mass on each singleton and on the full frame (the empty
set carries none by construction). Dempster's rule renormalizes the
conjunctive combination by 1 - K where K is the conflict mass; total
conflict (K = 1) leaves the rule undefined and raises.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

from .errors import TotalConflictError

_MASS_TOL = 1e-9
_CONFLICT_TOL = 1e-12


@dataclass(frozen=True)
class Bba:
    """Masses on operating, requesting, and the full frame theta."""

    m_operating: float
    m_requesting: float
    m_theta: float = 0.0

    def __post_init__(self):
        for v in (self.m_operating, self.m_requesting, self.m_theta):
            if v < -_MASS_TOL:
                raise ValueError(f"negative mass {v}")
        total = self.m_operating + self.m_requesting + self.m_theta
        if abs(total - 1.0) > _MASS_TOL:
            raise ValueError(f"masses sum to {total}, expected 1")

    @property
    def label(self) -> int:
        """argmax over the singleton masses; ties fall back to operating."""
        return 1 if self.m_requesting > self.m_operating else 0


VACUOUS = Bba(0.0, 0.0, 1.0)


def conflict_mass(b1: Bba, b2: Bba) -> float:
    """K: total mass the two beliefs place on incompatible singletons."""
    return b1.m_operating * b2.m_requesting + b1.m_requesting * b2.m_operating


def combine(b1: Bba, b2: Bba) -> Bba:
    """Dempster's rule of combination for the two-state frame."""
    k = conflict_mass(b1, b2)
    if k >= 1.0 - _CONFLICT_TOL:
        raise TotalConflictError(f"total conflict between beliefs (K = {k})")
    norm = 1.0 - k
    m_o = (
        b1.m_operating * b2.m_operating
        + b1.m_operating * b2.m_theta
        + b1.m_theta * b2.m_operating
    ) / norm
    m_r = (
        b1.m_requesting * b2.m_requesting
        + b1.m_requesting * b2.m_theta
        + b1.m_theta * b2.m_requesting
    ) / norm
    m_t = b1.m_theta * b2.m_theta / norm
    # near-total conflict makes 1 - K cancel catastrophically; rescaling by
    # the actual sum keeps the unit-mass invariant without moving the argmax
    total = m_o + m_r + m_t
    return Bba(m_o / total, m_r / total, m_t / total)


def bba_from_probs(probs: Sequence[float], discount: float = 0.0) -> Bba:
    """Turn classifier softmax output into a belief assignment.

    With discount 0 the probabilities land directly on the singletons;
    a positive discount moves that share of mass onto the full frame.
    """
    if len(probs) != 2:
        raise ValueError("probs must have exactly 2 entries")
    p0, p1 = float(probs[0]), float(probs[1])
    if p0 < -_MASS_TOL or p1 < -_MASS_TOL or abs(p0 + p1 - 1.0) > _MASS_TOL:
        raise ValueError(f"probs must be nonnegative and sum to 1, got ({p0}, {p1})")
    if not 0.0 <= discount <= 1.0:
        raise ValueError("discount must lie in [0, 1]")
    keep = 1.0 - discount
    return Bba(keep * p0, keep * p1, discount)


@dataclass(frozen=True)
class ContextConfig:
    """Linear-in-time prior: requesting mass a + step * t / L."""

    a: float = 0.4
    step: float = 0.2

    def __post_init__(self):
        if self.a < 0 or self.a + self.step > 1.0 + _MASS_TOL:
            raise ValueError("require a >= 0 and a + step <= 1")


def context_bba(t: float, length: float, cfg: ContextConfig = ContextConfig()) -> Bba:
    """Task-progress prior at time t within a window of the given length."""
    if length < 1:
        raise ValueError("window length must be >= 1")
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t > length:
        warnings.warn(f"context time {t} exceeds window length {length}; clamping", stacklevel=2)
        t = length
    m_r = cfg.a + cfg.step * t / length
    return Bba(1.0 - m_r, m_r, 0.0)


def fuse_decision(
    modality_bbas: Sequence[Bba],
    prev: Bba | None = None,
    context: Bba | None = None,
    skip_log: list[str] | None = None,
) -> tuple[Bba, int]:
    """Left-fold Dempster combination over modalities, then prev, then context.

    Any single combination hitting total conflict skips that evidence
    source (recorded in ``skip_log`` when given) so the remaining sensors
    still contribute. Returns the fused belief and its argmax label.
    """
    if not modality_bbas:
        raise ValueError("at least one modality belief is required")
    evidence: list[tuple[str, Bba]] = [
        (f"modality[{i}]", b) for i, b in enumerate(modality_bbas)
    ]
    if prev is not None:
        evidence.append(("prev", prev))
    if context is not None:
        evidence.append(("context", context))
    fused: Bba | None = None
    for name, bba in evidence:
        if fused is None:
            fused = bba
            continue
        try:
            fused = combine(fused, bba)
        except TotalConflictError:
            if skip_log is not None:
                skip_log.append(name)
    assert fused is not None
    return fused, fused.label
