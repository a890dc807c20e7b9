"""Recordings, state annotations, segments, and JSONL persistence.

A recording file is JSON Lines: the first line is a header object
(subject, trial, sample rate, schema, annotations), every following line
is one frame as an array of reals. Annotations are frame-indexed,
half-open spans that alternate between the two states.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import AnnotationError, RecordingParseError, SchemaError
from .schema import ChannelSchema, default_channel_schema

OPERATING = "operating"
REQUESTING = "requesting"
STATES = (OPERATING, REQUESTING)
STATE_LABELS = {OPERATING: 0, REQUESTING: 1}


@dataclass(frozen=True)
class StateSpan:
    start: int
    end: int  # exclusive
    state: str

    def __post_init__(self):
        if self.state not in STATES:
            raise AnnotationError(f"unknown state {self.state!r}")
        if not 0 <= self.start < self.end:
            raise AnnotationError(f"bad span [{self.start}, {self.end})")

    @property
    def length(self) -> int:
        return self.end - self.start

    @property
    def label(self) -> int:
        return STATE_LABELS[self.state]


def _check_annotations(spans: tuple[StateSpan, ...], n_frames: int) -> None:
    prev: StateSpan | None = None
    for span in spans:
        if span.end > n_frames:
            raise AnnotationError(f"span [{span.start}, {span.end}) exceeds {n_frames} frames")
        if prev is not None:
            if span.start < prev.end:
                raise AnnotationError(
                    f"overlap: spans [{prev.start}, {prev.end}) and [{span.start}, {span.end})"
                )
            if span.state == prev.state:
                raise AnnotationError(f"consecutive spans both {span.state!r}")
        prev = span


@dataclass(frozen=True)
class Recording:
    """One subject/trial stream: frames are an L x M matrix, one row per tick."""

    subject: str
    trial: str
    sample_rate_hz: float
    frames: np.ndarray
    annotations: tuple[StateSpan, ...] = ()
    schema: ChannelSchema = field(default_factory=default_channel_schema)

    def __post_init__(self):
        if self.sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be positive")
        frames = np.asarray(self.frames, dtype=np.float64)
        if frames.ndim != 2:
            raise SchemaError("frames must be a 2-D matrix")
        if frames.shape[1] != self.schema.total_dims:
            raise SchemaError(
                f"frame width {frames.shape[1]} != schema width {self.schema.total_dims}"
            )
        frames.flags.writeable = False
        object.__setattr__(self, "frames", frames)
        _check_annotations(self.annotations, len(frames))

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]

    def requesting_spans(self) -> list[StateSpan]:
        return [s for s in self.annotations if s.state == REQUESTING]


@dataclass(frozen=True)
class Segment:
    """A contiguous single-state window of frames with a binary label.

    ``start_frame``/``trial_frames`` locate the segment inside its source
    recording; they feed the task-progress context prior and are not part
    of the classification payload.
    """

    subject: str
    trial: str
    span_index: int
    label: int
    data: np.ndarray
    window_index: int = 0
    start_frame: int | None = None
    trial_frames: int | None = None

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 2 or data.shape[0] < 1:
            raise ValueError("segment data must be a non-empty 2-D matrix")
        if self.label not in (0, 1):
            raise ValueError("label must be 0 or 1")
        data.flags.writeable = False
        object.__setattr__(self, "data", data)

    @property
    def n_frames(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def source(self) -> tuple[str, str, int]:
        return (self.subject, self.trial, self.span_index)

    @property
    def key(self) -> tuple[str, str, int, int]:
        """Total order used for deterministic tie-breaking."""
        return (self.subject, self.trial, self.span_index, self.window_index)

    def with_data(self, data: np.ndarray) -> "Segment":
        return Segment(
            self.subject, self.trial, self.span_index, self.label, data,
            self.window_index, self.start_frame, self.trial_frames,
        )


def extract_segments(rec: Recording, operating_window: int = 40) -> list[Segment]:
    """Turn an annotated recording into labeled segments.

    Every requesting span yields exactly one segment covering the whole
    span. Operating spans are tiled into non-overlapping windows of
    exactly ``operating_window`` frames anchored at the span start; the
    remainder shorter than a window is dropped.
    """
    segments, _ = extract_segments_with_stats(rec, operating_window)
    return segments


def extract_segments_with_stats(
    rec: Recording, operating_window: int = 40
) -> tuple[list[Segment], dict]:
    """Like :func:`extract_segments` but also reports ingestion statistics."""
    if operating_window < 1:
        raise ValueError("operating_window must be >= 1")
    segments: list[Segment] = []
    dropped = 0
    for idx, span in enumerate(rec.annotations):
        if span.state == REQUESTING:
            segments.append(
                Segment(
                    rec.subject, rec.trial, idx, 1,
                    rec.frames[span.start : span.end],
                    start_frame=span.start, trial_frames=rec.n_frames,
                )
            )
        else:
            n_windows = span.length // operating_window
            for w in range(n_windows):
                lo = span.start + w * operating_window
                segments.append(
                    Segment(
                        rec.subject, rec.trial, idx, 0,
                        rec.frames[lo : lo + operating_window],
                        window_index=w,
                        start_frame=lo, trial_frames=rec.n_frames,
                    )
                )
            dropped += span.length - n_windows * operating_window
    stats = {
        "requesting_segments": sum(1 for s in segments if s.label == 1),
        "operating_segments": sum(1 for s in segments if s.label == 0),
        "dropped_frames": dropped,
    }
    return segments, stats


def _parse_header(line: str, path: Path) -> tuple[dict, ChannelSchema]:
    try:
        header = json.loads(line)
    except json.JSONDecodeError as exc:
        raise RecordingParseError(f"{path}: line 1: malformed header: {exc}") from exc
    if not isinstance(header, dict):
        raise RecordingParseError(f"{path}: line 1: header must be an object")
    schema = ChannelSchema.from_json_obj(header.get("schema", "default50"))
    return header, schema


def load_recording(path, schema: ChannelSchema | None = None) -> Recording:
    """Read one JSONL recording file and validate it against its schema.

    An explicitly passed ``schema`` must agree with the file header.
    """
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline()
        if not first.strip():
            raise RecordingParseError(f"{path}: empty file")
        header, file_schema = _parse_header(first, path)
        if schema is not None and schema.groups != file_schema.groups:
            raise SchemaError(f"{path}: file schema disagrees with requested schema")
        width = file_schema.total_dims
        rows: list[list[float]] = []
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise RecordingParseError(f"{path}: line {lineno}: {exc}") from exc
            if not isinstance(row, list):
                raise RecordingParseError(f"{path}: line {lineno}: frame must be an array")
            if len(row) != width:
                raise SchemaError(
                    f"{path}: line {lineno}: frame has {len(row)} values, schema expects {width}"
                )
            rows.append(row)
    frames = np.asarray(rows, dtype=np.float64).reshape(len(rows), width)
    try:
        spans = tuple(StateSpan(int(s), int(e), str(st)) for s, e, st in header.get("annotations", []))
    except (TypeError, ValueError) as exc:
        raise AnnotationError(f"{path}: malformed annotations: {exc}") from exc
    return Recording(
        subject=str(header.get("subject", "")),
        trial=str(header.get("trial", "")),
        sample_rate_hz=float(header.get("sample_rate_hz", 20.0)),
        frames=frames,
        annotations=spans,
        schema=file_schema,
    )


def save_recording(rec: Recording, path) -> None:
    """Write a recording as JSONL; numeric round-trip is exact."""
    path = Path(path)
    header = {
        "subject": rec.subject,
        "trial": rec.trial,
        "sample_rate_hz": rec.sample_rate_hz,
        "schema": rec.schema.to_json_obj(),
        "annotations": [[s.start, s.end, s.state] for s in rec.annotations],
    }
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(header, separators=(",", ":")) + "\n")
        for row in rec.frames:
            fh.write(json.dumps([float(v) for v in row], separators=(",", ":")) + "\n")


def load_directory(data_dir, schema: ChannelSchema | None = None) -> list[Recording]:
    """Load every ``*.jsonl`` recording under ``data_dir``, sorted by filename."""
    data_dir = Path(data_dir)
    paths = sorted(data_dir.glob("*.jsonl"))
    if not paths:
        raise FileNotFoundError(f"no *.jsonl recordings under {data_dir}")
    return [load_recording(p, schema=schema) for p in paths]
