"""Seeded generator of synthetic multi-subject recordings.

Each trial alternates operating stretches with requesting spans. During a
requesting span, designated channels carry smooth bump/ramp signatures
whose onsets are staggered per cue group: torso lean and gaze shift start
early, arm motion mid-span, speech and hand extension late. Operating
stretches are baseline noise. Noise standard deviation is 1/snr, so
growing snr cleans the signatures without changing their scale.

Everything is derived from (seed, subject, trial), so output is
deterministic regardless of generation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .datamodel import OPERATING, REQUESTING, Recording, StateSpan
from .schema import default_channel_schema

DEFAULT_CUE_OFFSETS = {
    "torso": 0.0,
    "gaze": 0.1,
    "arm": 0.25,
    "speech": 1.0,
    "hand": 1.2,
}

# cue group -> (channel, weight, shape); shapes are "ramp" (rise then hold)
# or "bump" (gaussian pulse shortly after onset)
CUE_CHANNELS: dict[str, tuple[tuple[str, float, str], ...]] = {
    "torso": (
        ("kinect.lean_fb", 1.0, "ramp"),
        ("kinect.lean_lr", 0.5, "ramp"),
    ),
    "gaze": (
        ("epoc.gyro_pitch", 1.0, "ramp"),
        ("epoc.gyro_yaw", 0.8, "bump"),
        ("kinect.face_yaw", 0.7, "ramp"),
    ),
    "arm": (
        ("myo.orientation_pitch", 1.0, "ramp"),
        ("myo.orientation_roll", 0.6, "ramp"),
        ("myo.acceleration_y", 0.8, "bump"),
        ("myo.gyro_y", 0.5, "bump"),
    ),
    "speech": (("kinect.audio", 1.0, "bump"),),
    "hand": (
        ("kinect.rhand_x", 1.0, "ramp"),
        ("kinect.rhand_y", 0.7, "ramp"),
        ("kinect.rhand_z", 0.7, "ramp"),
    ),
}

_RISE_S = 0.3        # ramp rise time
_RELEASE_S = 0.4     # ramps fall back before the span ends, so the smoothing
                     # filter carries no cue residue into the following gap
_BUMP_DELAY_S = 0.35  # bump center after cue onset
_BUMP_WIDTH_S = 0.25
_LEN_LOG_SIGMA = 0.18
_BACKGROUND_STD = 1.0  # non-cue channels; keeps variance normalization tame
_WANDER_FRAC = 0.15   # slow motion on cue channels during all states,
_WANDER_TAU_S = 1.5   # relative to cue amplitude; AR(1) time constant


@dataclass
class GenConfig:
    """Scale, noise and cue staggering of the synthetic corpus."""

    subjects: int = 12
    trials_per_subject: int = 5
    requests_per_trial: int = 14
    sample_rate_hz: float = 20.0
    cue_offsets: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_CUE_OFFSETS))
    snr: float = 4.0
    amplitude: float = 1.0
    subject_jitter: float = 0.15
    seed: int = 0
    request_median_frames: int = 40
    operating_gap: tuple[int, int] = (50, 90)

    def __post_init__(self):
        if min(self.subjects, self.trials_per_subject, self.requests_per_trial) < 1:
            raise ValueError("subject/trial/request counts must be positive")
        if self.snr <= 0:
            raise ValueError("snr must be positive")
        if self.sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be positive")
        if self.request_median_frames < 1:
            raise ValueError("request_median_frames must be >= 1")


def difficulty_presets() -> dict[str, GenConfig]:
    """Named difficulty levels; they differ only in snr/amplitude."""
    return {
        "easy": GenConfig(snr=6.0, amplitude=2.0),
        "medium": GenConfig(snr=1.4, amplitude=1.0),
        "hard": GenConfig(snr=0.6, amplitude=0.6),
    }


def preset(name: str) -> GenConfig:
    presets = difficulty_presets()
    if name not in presets:
        raise KeyError(f"unknown preset {name!r}; available: {sorted(presets)}")
    return presets[name]


def synth_field_names() -> tuple[str, ...]:
    """GenConfig fields the synth CLI may override."""
    return ("seed", "subjects", "trials_per_subject", "requests_per_trial", "snr", "amplitude")


def _smoothstep(s: np.ndarray) -> np.ndarray:
    s = np.clip(s, 0.0, 1.0)
    return s * s * (3.0 - 2.0 * s)


def _ramp(t: np.ndarray, onset: float, fs: float) -> np.ndarray:
    """Rise after onset, hold, then release before the span ends."""
    rise = max(_RISE_S * fs, 1.0)
    release = max(_RELEASE_S * fs, 1.0)
    span_end = float(t[-1]) + 1.0
    up = _smoothstep((t - onset) / rise)
    down = _smoothstep((span_end - release - t) / rise + 1.0)
    return up * down


def _bump(t: np.ndarray, onset: float, fs: float) -> np.ndarray:
    center = onset + _BUMP_DELAY_S * fs
    width = max(_BUMP_WIDTH_S * fs, 1.0)
    return np.exp(-((t - center) ** 2) / (2.0 * width * width))


def _subject_profile(cfg: GenConfig, subject_index: int):
    rng = np.random.default_rng(np.random.SeedSequence((cfg.seed, 7001, subject_index)))
    groups = sorted(CUE_CHANNELS)
    amp = {g: max(0.3, 1.0 + cfg.subject_jitter * rng.standard_normal()) for g in groups}
    shift = {g: 0.2 * cfg.subject_jitter * rng.standard_normal() for g in groups}
    schema = default_channel_schema()
    baseline = 0.1 * rng.standard_normal(schema.total_dims)
    return amp, shift, baseline


def _request_length(rng: np.random.Generator, cfg: GenConfig) -> int:
    length = int(round(cfg.request_median_frames * math.exp(_LEN_LOG_SIGMA * rng.standard_normal())))
    lo = max(2, int(0.6 * cfg.request_median_frames))
    hi = int(1.4 * cfg.request_median_frames)
    return min(max(length, lo), hi)


def _generate_recording(cfg: GenConfig, subject_index: int, trial_index: int) -> Recording:
    schema = default_channel_schema()
    fs = cfg.sample_rate_hz
    rng = np.random.default_rng(np.random.SeedSequence((cfg.seed, subject_index, trial_index)))
    amp, shift, baseline = _subject_profile(cfg, subject_index)

    gap_lo, gap_hi = cfg.operating_gap
    spans: list[StateSpan] = []
    cursor = 0
    for k in range(cfg.requests_per_trial):
        gap = int(rng.integers(gap_lo, gap_hi + 1))
        spans.append(StateSpan(cursor, cursor + gap, OPERATING))
        cursor += gap
        req = _request_length(rng, cfg)
        spans.append(StateSpan(cursor, cursor + req, REQUESTING))
        cursor += req
    tail = int(rng.integers(gap_lo, gap_hi + 1))
    spans.append(StateSpan(cursor, cursor + tail, OPERATING))
    cursor += tail

    cue_cols = sorted(
        {schema.index_of(ch) for chans in CUE_CHANNELS.values() for ch, _, _ in chans}
    )
    cue_noise_std = 1.0 / cfg.snr if math.isfinite(cfg.snr) else 0.0
    per_channel_std = np.full(schema.total_dims, _BACKGROUND_STD)
    per_channel_std[cue_cols] = cue_noise_std
    frames = rng.standard_normal(size=(cursor, schema.total_dims)) * per_channel_std
    frames += baseline
    # slow task motion on cue channels in every state: operating never looks
    # like a frozen baseline, which keeps per-modality confidences honest
    wander_std = _WANDER_FRAC * cfg.amplitude
    if wander_std > 0:
        rho = math.exp(-1.0 / (_WANDER_TAU_S * fs))
        innov = rng.standard_normal(size=(cursor, len(cue_cols)))
        wander = np.empty_like(innov)
        wander[0] = innov[0]
        scale = math.sqrt(1.0 - rho * rho)
        for k in range(1, cursor):
            wander[k] = rho * wander[k - 1] + scale * innov[k]
        frames[:, cue_cols] += wander_std * wander

    for span in spans:
        if span.state != REQUESTING:
            continue
        t = np.arange(span.length, dtype=np.float64)
        for group in sorted(CUE_CHANNELS):
            onset = (cfg.cue_offsets.get(group, 0.0) + shift[group]) * fs
            for channel, weight, shape in CUE_CHANNELS[group]:
                col = schema.index_of(channel)
                profile = _ramp(t, onset, fs) if shape == "ramp" else _bump(t, onset, fs)
                frames[span.start : span.end, col] += (
                    cfg.amplitude * amp[group] * weight * profile
                )

    frames = np.round(frames, 6)
    return Recording(
        subject=f"S{subject_index + 1:02d}",
        trial=f"T{trial_index + 1:02d}",
        sample_rate_hz=fs,
        frames=frames,
        annotations=tuple(spans),
        schema=schema,
    )


def generate(cfg: GenConfig) -> list[Recording]:
    """All subjects x trials, with per-recording derived seeds."""
    return [
        _generate_recording(cfg, s, t)
        for s in range(cfg.subjects)
        for t in range(cfg.trials_per_subject)
    ]
