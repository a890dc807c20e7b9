import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from earlycue.datamodel import (
    OPERATING,
    REQUESTING,
    Recording,
    StateSpan,
    extract_segments,
    extract_segments_with_stats,
    load_recording,
    save_recording,
)
from earlycue.errors import AnnotationError, RecordingParseError, SchemaError
from earlycue.schema import default_channel_schema

from conftest import make_recording


def write_jsonl(path, header, rows):
    lines = [json.dumps(header)] + [json.dumps(r) for r in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


class TestLoadRecording:
    def test_three_frame_file_with_one_requesting_span(self, tmp_path):
        path = tmp_path / "rec.jsonl"
        header = {
            "subject": "S01",
            "trial": "T01",
            "sample_rate_hz": 20.0,
            "schema": "default50",
            "annotations": [[1, 3, "requesting"]],
        }
        write_jsonl(path, header, [[0.0] * 50 for _ in range(3)])
        rec = load_recording(path)
        assert rec.n_frames == 3
        assert len(rec.annotations) == 1
        assert rec.annotations[0] == StateSpan(1, 3, REQUESTING)
        assert rec.schema.total_dims == 50

    def test_short_frame_names_line(self, tmp_path):
        path = tmp_path / "rec.jsonl"
        header = {"schema": "default50", "annotations": []}
        write_jsonl(path, header, [[0.0] * 50, [0.0] * 49])
        with pytest.raises(SchemaError, match="line 3"):
            load_recording(path)

    def test_overlapping_spans_rejected(self, tmp_path):
        path = tmp_path / "rec.jsonl"
        header = {
            "schema": "default50",
            "annotations": [[0, 5, "operating"], [3, 8, "requesting"]],
        }
        write_jsonl(path, header, [[0.0] * 50 for _ in range(10)])
        with pytest.raises(AnnotationError, match="overlap"):
            load_recording(path)

    def test_malformed_line_reports_line_number(self, tmp_path):
        path = tmp_path / "rec.jsonl"
        path.write_text('{"schema": "default50"}\n[0.1, not json\n', encoding="utf-8")
        with pytest.raises(RecordingParseError, match="line 2"):
            load_recording(path)

    def test_consecutive_same_state_spans_rejected(self):
        with pytest.raises(AnnotationError, match="consecutive"):
            make_recording(
                np.zeros((10, 2)),
                [(0, 3, REQUESTING), (4, 6, REQUESTING)],
            )

    def test_round_trip_exact(self, tmp_path):
        rng = np.random.default_rng(3)
        rec = Recording(
            subject="S07",
            trial="T03",
            sample_rate_hz=20.0,
            frames=rng.normal(size=(17, 50)),
            annotations=(
                StateSpan(0, 5, OPERATING),
                StateSpan(5, 9, REQUESTING),
                StateSpan(9, 17, OPERATING),
            ),
            schema=default_channel_schema(),
        )
        path = tmp_path / "rt.jsonl"
        save_recording(rec, path)
        back = load_recording(path)
        assert back.subject == rec.subject
        assert back.trial == rec.trial
        assert back.sample_rate_hz == rec.sample_rate_hz
        assert back.annotations == rec.annotations
        assert np.array_equal(back.frames, rec.frames)
        assert back.schema.groups == rec.schema.groups


class TestExtractSegments:
    def test_requesting_span_copied_whole(self):
        rec = make_recording(np.arange(80).reshape(40, 2), [(0, 3, OPERATING), (3, 40, REQUESTING)])
        segs = extract_segments(rec, operating_window=40)
        assert len(segs) == 1
        seg = segs[0]
        assert seg.label == 1
        assert seg.n_frames == 37
        assert np.array_equal(seg.data, rec.frames[3:40])

    def test_operating_stretch_tiled_remainder_dropped(self):
        # floor(100 / 40) = 2 windows, 20 frames dropped
        rec = make_recording(np.zeros((110, 2)), [(0, 100, OPERATING), (100, 110, REQUESTING)])
        segs, stats = extract_segments_with_stats(rec, operating_window=40)
        operating = [s for s in segs if s.label == 0]
        assert len(operating) == 2
        assert all(s.n_frames == 40 for s in operating)
        assert stats["dropped_frames"] == 20
        assert operating[0].start_frame == 0
        assert operating[1].start_frame == 40

    def test_short_stretch_yields_nothing(self):
        rec = make_recording(np.zeros((49, 2)), [(0, 39, OPERATING), (39, 49, REQUESTING)])
        segs = extract_segments(rec, operating_window=40)
        assert [s.label for s in segs] == [1]

    def test_zero_annotations_empty_list(self):
        rec = make_recording(np.zeros((10, 2)))
        assert extract_segments(rec) == []

    def test_window_must_be_positive(self):
        rec = make_recording(np.zeros((10, 2)))
        with pytest.raises(ValueError):
            extract_segments(rec, operating_window=0)

    @given(
        gaps=st.lists(st.integers(min_value=1, max_value=130), min_size=1, max_size=6),
        window=st.integers(min_value=1, max_value=50),
    )
    def test_operating_count_matches_floor_sum(self, gaps, window):
        spans = []
        cursor = 0
        for k, gap in enumerate(gaps):
            spans.append((cursor, cursor + gap, OPERATING))
            cursor += gap
            if k < len(gaps) - 1:
                spans.append((cursor, cursor + 3, REQUESTING))
                cursor += 3
        rec = make_recording(np.zeros((cursor, 2)), spans)
        segs = extract_segments(rec, operating_window=window)
        expected = sum(g // window for g in gaps)
        assert sum(1 for s in segs if s.label == 0) == expected
        # exactly one segment per requesting span
        assert sum(1 for s in segs if s.label == 1) == len(gaps) - 1
