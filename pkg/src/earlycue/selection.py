"""Statistics-based feature selection over the encoded representation.

Each encoded column is binarized with deterministic 2-means, scored with
a Pearson chi-square test against the frame-broadcast segment labels, and
ranked. The top-m columns form the feature set; the TE variant keeps the
continuous encoded values, the BTE variant re-binarizes with the
thresholds learned here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .datamodel import Segment
from .filters import FilterBank, column_pair, encode_pairs
from .schema import ChannelSchema

MAX_LLOYD_ITERS = 100


def _two_means_threshold(column: np.ndarray) -> float | None:
    """Lloyd's algorithm on scalars with centers seeded at (min, max).

    Returns the midpoint between the converged cluster centers, or None
    for a constant column. Values >= threshold belong to the
    larger-mean cluster.
    """
    lo = float(column.min())
    hi = float(column.max())
    if lo == hi:
        return None
    c0, c1 = lo, hi
    thresh = 0.5 * (c0 + c1)
    for _ in range(MAX_LLOYD_ITERS):
        upper = column >= thresh
        c0_new = float(column[~upper].mean())
        c1_new = float(column[upper].mean())
        new_thresh = 0.5 * (c0_new + c1_new)
        if new_thresh == thresh:
            break
        c0, c1, thresh = c0_new, c1_new, new_thresh
    return thresh


def binarize(column: np.ndarray) -> np.ndarray:
    """2-means binarization; the cluster with the larger mean maps to 1."""
    column = np.asarray(column, dtype=np.float64)
    if column.ndim != 1 or column.size < 2:
        raise ValueError("column must be a 1-D vector with at least 2 values")
    thresh = _two_means_threshold(column)
    if thresh is None:
        return np.zeros(column.size, dtype=np.int64)
    return (column >= thresh).astype(np.int64)


def chi2_stat(feature: np.ndarray, labels: np.ndarray) -> float:
    """Pearson chi-square on the 2x2 table of a binary feature vs labels.

    df = 1, no continuity correction. Any zero margin makes the table
    degenerate and the statistic is 0 by convention.
    """
    feature = np.asarray(feature)
    labels = np.asarray(labels)
    if feature.shape != labels.shape or feature.ndim != 1 or feature.size == 0:
        raise ValueError("feature and labels must be equal-length non-empty vectors")
    f = feature != 0
    y = labels != 0
    a = float(np.count_nonzero(f & y))
    b = float(np.count_nonzero(f & ~y))
    c = float(np.count_nonzero(~f & y))
    d = float(np.count_nonzero(~f & ~y))
    n = a + b + c + d
    row1, row0, col1, col0 = a + b, c + d, a + c, b + d
    if row1 == 0 or row0 == 0 or col1 == 0 or col0 == 0:
        return 0.0
    stat = 0.0
    for observed, r, cc in ((a, row1, col1), (b, row1, col0), (c, row0, col1), (d, row0, col0)):
        expected = r * cc / n
        diff = observed - expected
        stat += diff * diff / expected
    return stat


@dataclass(frozen=True)
class FeatureEntry:
    column: int          # index into the M*Q encoding
    channel: str         # qualified name, e.g. "epoc.gyro_yaw"
    filter_name: str
    chi2: float
    threshold: float | None  # 2-means boundary learned at selection time

    @property
    def sensor(self) -> str:
        return self.channel.split(".", 1)[0]


@dataclass(frozen=True)
class FeatureSet:
    """Ordered top-m features; ordering is chi2 descending, column ascending."""

    entries: tuple[FeatureEntry, ...]
    variant: str  # "TE" | "BTE"

    def __post_init__(self):
        if self.variant not in ("TE", "BTE"):
            raise ValueError("variant must be TE or BTE")
        cols = [e.column for e in self.entries]
        if len(set(cols)) != len(cols):
            raise ValueError("duplicate columns in feature set")
        for prev, cur in zip(self.entries, self.entries[1:]):
            if (-cur.chi2, cur.column) < (-prev.chi2, prev.column):
                raise ValueError("entries are not sorted by descending chi2")

    @property
    def m(self) -> int:
        return len(self.entries)

    @property
    def columns(self) -> list[int]:
        return [e.column for e in self.entries]

    def pairs(self, q: int) -> list[tuple[int, int]]:
        return [column_pair(e.column, q) for e in self.entries]

    def feature_indices_for_sensor(self, sensor: str) -> list[int]:
        return [j for j, e in enumerate(self.entries) if e.sensor == sensor]

    def to_json_obj(self) -> dict:
        return {
            "variant": self.variant,
            "m": self.m,
            "entries": [
                {
                    "column": e.column,
                    "channel": e.channel,
                    "filter": e.filter_name,
                    "chi2": e.chi2,
                    "threshold": e.threshold,
                }
                for e in self.entries
            ],
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "FeatureSet":
        entries = tuple(
            FeatureEntry(
                column=int(d["column"]),
                channel=d["channel"],
                filter_name=d["filter"],
                chi2=float(d["chi2"]),
                threshold=None if d["threshold"] is None else float(d["threshold"]),
            )
            for d in obj["entries"]
        )
        return cls(entries=entries, variant=obj["variant"])


@dataclass(frozen=True)
class SelectionResult:
    """Full ranking over all M*Q columns plus the sample that produced it."""

    ranking: tuple[FeatureEntry, ...]   # all columns, sorted
    sampled_keys: frozenset             # Segment.key of segments consumed by selection

    def top(self, m: int, variant: str = "TE") -> FeatureSet:
        if m > len(self.ranking):
            raise ValueError(f"m={m} exceeds the {len(self.ranking)} ranked columns")
        return FeatureSet(entries=self.ranking[:m], variant=variant)


def draw_selection_sample(n: int, sample_frac: float, seed: int) -> np.ndarray:
    """Seeded draw of round(sample_frac * n) segment indices, sorted."""
    if not 0.0 < sample_frac <= 1.0:
        raise ValueError("sample_frac must be in (0, 1]")
    k = max(1, int(round(sample_frac * n)))
    rng = np.random.default_rng(np.random.SeedSequence((seed, 0x5E1EC7)))
    idx = rng.choice(n, size=min(k, n), replace=False)
    return np.sort(idx)


def _rank_columns(
    pooled: np.ndarray,
    frame_labels: np.ndarray,
    schema: ChannelSchema,
    bank: FilterBank,
) -> tuple[FeatureEntry, ...]:
    entries = []
    for col in range(pooled.shape[1]):
        column = pooled[:, col]
        thresh = _two_means_threshold(column)
        if thresh is None:
            bits = np.zeros(column.size, dtype=np.int64)
        else:
            bits = (column >= thresh).astype(np.int64)
        stat = chi2_stat(bits, frame_labels)
        c, fi = column_pair(col, bank.q)
        entries.append(
            FeatureEntry(
                column=col,
                channel=schema.channels[c].qualified,
                filter_name=bank.names[fi],
                chi2=stat,
                threshold=thresh,
            )
        )
    entries.sort(key=lambda e: (-e.chi2, e.column))
    return tuple(entries)


def rank_features(
    segments: Sequence[Segment],
    schema: ChannelSchema,
    bank: FilterBank,
    sample_frac: float = 0.10,
    seed: int = 0,
) -> SelectionResult:
    """Draw the selection sample, encode it, and rank all encoded columns.

    Only the sampled segments are encoded and scored; callers must exclude
    them from downstream train/test splits (their keys are returned).
    """
    if not segments:
        raise ValueError("no segments given")
    idx = draw_selection_sample(len(segments), sample_frac, seed)
    sample = [segments[i] for i in idx]
    all_pairs = [(c, fi) for c in range(schema.total_dims) for fi in range(bank.q)]
    encoded = [encode_pairs(s.data, bank, all_pairs) for s in sample]
    pooled = np.concatenate(encoded, axis=0)
    frame_labels = np.concatenate([np.full(s.n_frames, s.label, dtype=np.int64) for s in sample])
    ranking = _rank_columns(pooled, frame_labels, schema, bank)
    return SelectionResult(
        ranking=ranking, sampled_keys=frozenset(s.key for s in sample)
    )


def select(
    encoded_segments: Sequence[np.ndarray],
    labels: Sequence[int],
    m: int,
    schema: ChannelSchema,
    bank: FilterBank,
    sample_frac: float = 0.10,
    seed: int = 0,
    variant: str = "TE",
) -> FeatureSet:
    """Rank already-encoded segments (L_i x M*Q each) and keep the top m.

    The segment sample is drawn internally under the seed; frames of the
    sampled segments are pooled and scored against their broadcast labels.
    """
    if len(encoded_segments) != len(labels):
        raise ValueError("encoded_segments and labels must have equal length")
    mq = encoded_segments[0].shape[1]
    if m > mq:
        raise ValueError(f"m={m} exceeds the encoded width {mq}")
    idx = draw_selection_sample(len(encoded_segments), sample_frac, seed)
    pooled = np.concatenate([np.asarray(encoded_segments[i], dtype=np.float64) for i in idx])
    frame_labels = np.concatenate(
        [np.full(len(encoded_segments[i]), labels[i], dtype=np.int64) for i in idx]
    )
    ranking = _rank_columns(pooled, frame_labels, schema, bank)
    return FeatureSet(entries=ranking[:m], variant=variant)


def project(data: np.ndarray, feature_set: FeatureSet, bank: FilterBank) -> np.ndarray:
    """Project raw segment data (L x M) onto the feature set (L x m).

    TE keeps continuous filter responses; BTE thresholds them with the
    2-means boundaries learned during selection (constant columns map
    to 0).
    """
    values = encode_pairs(data, bank, feature_set.pairs(bank.q))
    if feature_set.variant == "TE":
        return values
    out = np.zeros_like(values)
    for j, entry in enumerate(feature_set.entries):
        if entry.threshold is not None:
            out[:, j] = (values[:, j] >= entry.threshold).astype(np.float64)
    return out
