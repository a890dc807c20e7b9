"""Channel schema: which sensor owns which column of a synchronized frame.

The default layout carries 50 channels from three wearable/ambient sensors
(forearm band, EEG headset, depth camera) synchronized at a common frame
rate. Column order is fixed; feature indices elsewhere in the pipeline
depend on it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import SchemaError

SENSORS = ("myo", "epoc", "kinect")


@dataclass(frozen=True)
class ChannelDef:
    sensor: str
    name: str
    unit: str

    @property
    def qualified(self) -> str:
        return f"{self.sensor}.{self.name}"


@dataclass(frozen=True)
class ChannelSchema:
    name: str
    channels: tuple[ChannelDef, ...]

    def __post_init__(self):
        seen = set()
        for ch in self.channels:
            if ch.sensor not in SENSORS:
                raise SchemaError(f"unknown sensor {ch.sensor!r}")
            if ch.name in seen:
                raise SchemaError(f"duplicate channel name {ch.name!r}")
            seen.add(ch.name)

    @property
    def total_dims(self) -> int:
        return len(self.channels)

    @property
    def groups(self) -> tuple[tuple[str, str, str], ...]:
        """Ordered (sensor, channel_name, unit) triples covering every column."""
        return tuple((c.sensor, c.name, c.unit) for c in self.channels)

    def sensor_of(self, column: int) -> str:
        return self.channels[column].sensor

    def columns_for_sensor(self, sensor: str) -> list[int]:
        return [i for i, c in enumerate(self.channels) if c.sensor == sensor]

    def index_of(self, qualified: str) -> int:
        for i, c in enumerate(self.channels):
            if c.qualified == qualified:
                return i
        raise SchemaError(f"no channel named {qualified!r}")

    def to_json_obj(self) -> dict:
        return {"name": self.name, "groups": [list(g) for g in self.groups]}

    @classmethod
    def from_json_obj(cls, obj) -> "ChannelSchema":
        if isinstance(obj, str):
            if obj == "default50":
                return default_channel_schema()
            raise SchemaError(f"unknown schema name {obj!r}")
        try:
            groups = obj["groups"]
            name = obj.get("name", "custom")
            channels = tuple(ChannelDef(s, n, u) for s, n, u in groups)
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"malformed schema object: {exc}") from exc
        return cls(name=name, channels=channels)


def _myo() -> list[ChannelDef]:
    chans = [ChannelDef("myo", f"orientation_{a}", "rad") for a in ("roll", "pitch", "yaw")]
    chans += [ChannelDef("myo", f"acceleration_{a}", "g") for a in "xyz"]
    chans += [ChannelDef("myo", f"gyro_{a}", "deg/s") for a in "xyz"]
    chans += [ChannelDef("myo", f"emg_{i}", "uV") for i in range(1, 9)]
    return chans


def _epoc() -> list[ChannelDef]:
    sites = ("af3", "f7", "f3", "fc5", "t7", "p7", "o1", "o2", "p8", "t8", "fc6", "f4", "f8", "af4")
    chans = [ChannelDef("epoc", f"eeg_{s}", "uV") for s in sites]
    chans += [ChannelDef("epoc", "gyro_pitch", "deg/s"), ChannelDef("epoc", "gyro_yaw", "deg/s")]
    moods = ("engagement", "frustration", "meditation", "excitement", "valence")
    chans += [ChannelDef("epoc", f"emotion_{m}", "score") for m in moods]
    return chans


def _kinect() -> list[ChannelDef]:
    chans = [ChannelDef("kinect", f"face_{a}", "deg") for a in ("roll", "pitch", "yaw")]
    chans += [ChannelDef("kinect", "lean_lr", "score"), ChannelDef("kinect", "lean_fb", "score")]
    chans += [ChannelDef("kinect", f"lhand_{a}", "m") for a in "xyz"]
    chans += [ChannelDef("kinect", f"rhand_{a}", "m") for a in "xyz"]
    chans.append(ChannelDef("kinect", "audio", "amplitude"))
    return chans


def default_channel_schema() -> ChannelSchema:
    """The 50-channel layout: myo 17 (3+3+3+8), epoc 21 (14+2+5), kinect 12 (3+2+3+3+1)."""
    return ChannelSchema(name="default50", channels=tuple(_myo() + _epoc() + _kinect()))
