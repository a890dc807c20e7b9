import numpy as np
import pytest

from earlycue.datamodel import Recording, StateSpan
from earlycue.schema import ChannelDef, ChannelSchema, default_channel_schema


@pytest.fixture(scope="session")
def schema50():
    return default_channel_schema()


def tiny_schema(n_channels: int = 2) -> ChannelSchema:
    """A minimal schema for tests that do not need the 50-channel layout."""
    return ChannelSchema(
        name=f"tiny{n_channels}",
        channels=tuple(ChannelDef("myo", f"ch_{i}", "unit") for i in range(n_channels)),
    )


def make_recording(frames, annotations=(), subject="S01", trial="T01", rate=20.0):
    frames = np.asarray(frames, dtype=np.float64)
    schema = tiny_schema(frames.shape[1])
    spans = tuple(StateSpan(s, e, st) for s, e, st in annotations)
    return Recording(
        subject=subject, trial=trial, sample_rate_hz=rate,
        frames=frames, annotations=spans, schema=schema,
    )
