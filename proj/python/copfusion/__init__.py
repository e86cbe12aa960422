"""Python access to the maritime fusion core.

Structured results come back from the extension as JSON text and are decoded
here into plain dicts and lists.
"""

import json

from . import _copfusion
from ._copfusion import (
    CopError,
    dead_reckon,
    destination,
    haversine,
    initial_bearing,
    nmea_checksum,
    point_in_box,
    project_2d,
    reference_scenarios,
)

__all__ = [
    "CopError",
    "Engine",
    "dead_reckon",
    "decode_lines",
    "destination",
    "geolocate_pixel",
    "haversine",
    "initial_bearing",
    "nmea_checksum",
    "point_in_box",
    "project_2d",
    "reference_scenarios",
    "simulate",
]


def _text(value):
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    return json.dumps(value)


def decode_lines(lines, receipt_time=0.0):
    """Decodes AIVDM lines; returns {"messages": [...], "counters": {...}}."""
    return json.loads(_copfusion.decode_lines(list(lines), receipt_time))


def geolocate_pixel(frame, u, v):
    return _copfusion.geolocate_pixel(_text(frame), u, v)


def simulate(scenario, seed=None, config=None):
    """Runs a reference scenario by name, or a scenario given as a dict."""
    return json.loads(_copfusion.simulate(_text(scenario), seed, _text(config)))


class Engine:
    """One fusion engine. With log_dir set, events and inputs are written to
    events.ndjson and inputs.ndjson there."""

    def __init__(self, config=None, log_dir=None):
        self._e = _copfusion.Engine(_text(config), None if log_dir is None else str(log_dir))

    def process_line(self, line):
        self._e.process_line(line)

    def process_ais(self, sentence, t):
        self._e.process_ais(sentence, t)

    def process_fmv(self, frame, t):
        self._e.process_fmv(_text(frame), t)

    def run(self, ais_lines=(), fmv_lines=()):
        """Feeds simulator output in time order and runs trailing epochs."""
        records = []
        for line in ais_lines:
            t = _tag_time(line)
            records.append((t, 0, "ais", line))
        for line in fmv_lines:
            frame = json.loads(line)
            meta = frame.get("frame", frame)
            records.append((meta["timestamp"], 1, "fmv", line))
        records.sort(key=lambda r: (r[0], r[1]))
        for t, _, kind, line in records:
            if kind == "ais":
                self._e.process_ais(line, t)
            else:
                self._e.process_fmv(line, t)
        self._e.finish()

    def tick(self, t):
        self._e.tick(t)

    def finish(self):
        self._e.finish()

    @property
    def clock(self):
        return self._e.clock()

    def tracks(self):
        return json.loads(self._e.tracks())

    def track(self, mmsi):
        text = self._e.track(mmsi)
        return None if text is None else json.loads(text)

    def predict(self, mmsi, t):
        return json.loads(self._e.predict(mmsi, t))

    def events(self, kind="", since_seq=0, limit=None):
        return json.loads(self._e.events(kind, since_seq, limit))

    def add_geofence(self, fence_id, min_lat, max_lat, min_lon, max_lon):
        return json.loads(self._e.add_geofence(fence_id, min_lat, max_lat, min_lon, max_lon))

    def delete_geofence(self, fence_id):
        self._e.delete_geofence(fence_id)

    def geofences(self):
        return json.loads(self._e.geofences())

    def cue(self, mmsi, reason="manual"):
        return json.loads(self._e.cue(mmsi, reason))

    def cues(self):
        return json.loads(self._e.cues())

    def detections(self, since_t=0.0, class_label=""):
        return json.loads(self._e.detections(since_t, class_label))

    def add_feature(self, feature_id, values, class_label=""):
        self._e.add_feature(feature_id, [float(x) for x in values], class_label)

    def search(self, feature_id=None, values=None, k=10):
        if (feature_id is None) == (values is None):
            raise ValueError("give exactly one of feature_id or values")
        if feature_id is not None:
            return json.loads(self._e.search_id(feature_id, k))
        return json.loads(self._e.search_values([float(x) for x in values], k))

    def projection(self, seed=None, k=None):
        return json.loads(self._e.projection(seed, k))

    def counts(self, class_label="", since_t=0.0):
        return json.loads(self._e.counts(class_label, since_t))

    def status(self):
        return json.loads(self._e.status())

    def replay(self, path):
        """Replays a recorded inputs.ndjson; returns (records, corrupt)."""
        return self._e.replay(str(path))


def _tag_time(line):
    if line.startswith("\\"):
        end = line.index("\\", 1)
        for field in line[1:end].split("*")[0].split(","):
            if field.startswith("c:"):
                return float(field[2:])
    raise ValueError("line has no receipt time: " + line)
