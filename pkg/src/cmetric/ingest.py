"""Trajectory parsing, validation and speed estimation.

Two on-disk formats are supported:

* CSV with header ``agent_id,frame,x,y`` (the header may be omitted), one
  observation per row.
* JSON ``{"frame_rate_hz": f, "points": [{"agent_id": .., "frame": .., "x": .., "y": ..}]}``.

Both writers emit floats with ``repr`` so that write -> parse is bit-exact.
"""
from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass
from typing import IO, Iterable, Iterator, Union

import numpy as np

from .errors import FrameRangeError, ParameterError, ParseError, ValidationError

DEFAULT_FRAME_RATE_HZ = 10.0
CSV_HEADER = ("agent_id", "frame", "x", "y")

Source = Union[bytes, str, IO[bytes], IO[str]]


@dataclass(frozen=True)
class TrajectoryPoint:
    agent_id: str
    frame: int
    x: float
    y: float


@dataclass(frozen=True)
class VelocityEstimate:
    agent_id: str
    frame: int
    speed: float


def agent_sort_key(agent_id: str):
    """Numeric ids sort numerically and before any non-numeric id."""
    if re.fullmatch(r"-?\d+", agent_id):
        return (0, int(agent_id), agent_id)
    return (1, 0, agent_id)


class TrajectoryDataset:
    """Immutable, frame-indexed collection of 2-D agent trajectories.

    Each agent occupies a contiguous run of integer frames. Positions are
    stored per agent as an ``(n, 2)`` float array; ``at_frame`` gives the
    cross-section of all agents present at one frame.
    """

    def __init__(self, tracks: dict, frame_rate_hz: float = DEFAULT_FRAME_RATE_HZ):
        if not (isinstance(frame_rate_hz, (int, float)) and math.isfinite(frame_rate_hz)
                and frame_rate_hz > 0):
            raise ValidationError(f"frame_rate_hz must be a positive finite number, got {frame_rate_hz!r}")
        self.frame_rate_hz = float(frame_rate_hz)
        self._first = {}
        self._pos = {}
        for agent in sorted(tracks, key=agent_sort_key):
            first, xy = tracks[agent]
            xy = np.array(xy, dtype=float).reshape(-1, 2)
            xy.setflags(write=False)
            if len(xy) == 0:
                raise ValidationError(f"agent {agent!r} has no observations")
            if not np.all(np.isfinite(xy)):
                raise ValidationError(f"agent {agent!r} has a non-finite coordinate")
            self._first[agent] = int(first)
            self._pos[agent] = xy
        if not self._pos:
            raise ValidationError("dataset contains no trajectory points")
        self.agents = tuple(self._pos)
        self._by_frame = None

    @classmethod
    def from_points(cls, points: Iterable[TrajectoryPoint],
                    frame_rate_hz: float = DEFAULT_FRAME_RATE_HZ) -> "TrajectoryDataset":
        rows = {}
        for p in points:
            if not (math.isfinite(p.x) and math.isfinite(p.y)):
                raise ValidationError(
                    f"non-finite coordinate for agent {p.agent_id!r} at frame {p.frame}")
            if p.frame < 0:
                raise ValidationError(f"negative frame {p.frame} for agent {p.agent_id!r}")
            per_agent = rows.setdefault(p.agent_id, {})
            if p.frame in per_agent:
                raise ValidationError(f"duplicate observation for agent {p.agent_id!r} at frame {p.frame}")
            per_agent[p.frame] = (p.x, p.y)
        tracks = {}
        for agent, per_agent in rows.items():
            frames = sorted(per_agent)
            if frames[-1] - frames[0] + 1 != len(frames):
                missing = sorted(set(range(frames[0], frames[-1] + 1)) - set(frames))
                raise ValidationError(
                    f"agent {agent!r} has non-contiguous frames (missing {missing[:5]})")
            tracks[agent] = (frames[0], [per_agent[f] for f in frames])
        return cls(tracks, frame_rate_hz)

    @property
    def frame_range(self) -> tuple:
        return (min(self._first.values()),
                max(self._first[a] + len(self._pos[a]) - 1 for a in self.agents))

    @property
    def n_points(self) -> int:
        return sum(len(xy) for xy in self._pos.values())

    def frames_of(self, agent_id: str) -> range:
        first = self._first[agent_id]
        return range(first, first + len(self._pos[agent_id]))

    def positions(self, agent_id: str) -> np.ndarray:
        return self._pos[agent_id]

    def position(self, agent_id: str, frame: int) -> np.ndarray:
        return self._pos[agent_id][frame - self._first[agent_id]]

    def _index(self):
        if self._by_frame is None:
            t0, t1 = self.frame_range
            members = {t: [] for t in range(t0, t1 + 1)}
            for agent in self.agents:
                for t in self.frames_of(agent):
                    members[t].append(agent)
            self._by_frame = {t: tuple(a) for t, a in members.items()}
        return self._by_frame

    def agents_at(self, frame: int) -> tuple:
        t0, t1 = self.frame_range
        if not t0 <= frame <= t1:
            raise FrameRangeError(f"frame {frame} outside dataset range [{t0}, {t1}]")
        return self._index()[frame]

    def at_frame(self, frame: int):
        """Agents present at ``frame`` (dataset order) and their ``(k, 2)`` positions."""
        agents = self.agents_at(frame)
        xy = np.array([self.position(a, frame) for a in agents], dtype=float).reshape(-1, 2)
        return agents, xy

    def points(self) -> Iterator[TrajectoryPoint]:
        for agent in self.agents:
            for t, (x, y) in zip(self.frames_of(agent), self._pos[agent]):
                yield TrajectoryPoint(agent, t, float(x), float(y))

    def translated(self, dx: float, dy: float) -> "TrajectoryDataset":
        return self.transformed(np.eye(2), np.array([dx, dy]))

    def transformed(self, rotation, offset) -> "TrajectoryDataset":
        """Apply ``p -> rotation @ p + offset`` to every position."""
        rotation = np.asarray(rotation, dtype=float)
        offset = np.asarray(offset, dtype=float)
        tracks = {a: (self._first[a], self._pos[a] @ rotation.T + offset) for a in self.agents}
        return TrajectoryDataset(tracks, self.frame_rate_hz)

    def __eq__(self, other):
        if not isinstance(other, TrajectoryDataset):
            return NotImplemented
        return (self.frame_rate_hz == other.frame_rate_hz and self.agents == other.agents
                and self._first == other._first
                and all(np.array_equal(self._pos[a], other._pos[a]) for a in self.agents))

    def __repr__(self):
        return (f"TrajectoryDataset(agents={len(self.agents)}, frames={self.frame_range}, "
                f"frame_rate_hz={self.frame_rate_hz})")


def _read_text(source: Source) -> str:
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        try:
            return source.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not valid UTF-8: {exc}") from None
    return source


def _parse_number(text, what, line):
    try:
        return float(text)
    except (TypeError, ValueError):
        raise ParseError(f"{what} is not a number: {text!r}", line) from None


def _parse_frame(value, line):
    if isinstance(value, bool):
        raise ParseError(f"frame is not an integer: {value!r}", line)
    if isinstance(value, int):
        return value
    if isinstance(value, str) and re.fullmatch(r"\s*[+-]?\d+\s*", value):
        return int(value)
    raise ParseError(f"frame is not an integer: {value!r}", line)


def _parse_csv(text: str) -> list:
    points = []
    for line, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        if line == 1 and tuple(c.strip() for c in row) == CSV_HEADER:
            continue
        if len(row) != 4:
            raise ParseError(f"expected 4 fields (agent_id,frame,x,y), got {len(row)}", line)
        agent = row[0].strip()
        if not agent:
            raise ParseError("empty agent_id", line)
        frame = _parse_frame(row[1], line)
        points.append(TrajectoryPoint(agent, frame, _parse_number(row[2], "x", line),
                                      _parse_number(row[3], "y", line)))
    return points


def _parse_json(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno) from None
    if not isinstance(doc, dict) or not isinstance(doc.get("points"), list):
        raise ParseError("expected an object with a 'points' list")
    points = []
    for i, item in enumerate(doc["points"]):
        where = f"points[{i}]"
        if not isinstance(item, dict) or not {"agent_id", "frame", "x", "y"} <= item.keys():
            raise ParseError(f"{where} must have agent_id, frame, x, y")
        try:
            frame = _parse_frame(item["frame"], None)
        except ParseError:
            raise ParseError(f"{where}.frame is not an integer: {item['frame']!r}") from None
        coords = []
        for key in ("x", "y"):
            v = item[key]
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ParseError(f"{where}.{key} is not a number: {v!r}")
            coords.append(float(v))
        points.append(TrajectoryPoint(str(item["agent_id"]), frame, *coords))
    return points, doc.get("frame_rate_hz")


def parse_trajectories(source: Source, format: str = "csv",
                       frame_rate_hz: float | None = None) -> TrajectoryDataset:
    """Parse a CSV or JSON trajectory stream into a validated dataset.

    ``frame_rate_hz`` overrides the JSON header; when neither is given the
    default of 10 Hz applies.
    """
    text = _read_text(source)
    if format == "csv":
        points, header_rate = _parse_csv(text), None
    elif format == "json":
        points, header_rate = _parse_json(text)
    else:
        raise ParameterError(f"unknown trajectory format {format!r}")
    rate = frame_rate_hz if frame_rate_hz is not None else header_rate
    if rate is None:
        rate = DEFAULT_FRAME_RATE_HZ
    return TrajectoryDataset.from_points(points, rate)


def write_csv(ds: TrajectoryDataset) -> str:
    out = io.StringIO()
    out.write(",".join(CSV_HEADER) + "\n")
    for p in ds.points():
        out.write(f"{p.agent_id},{p.frame},{p.x!r},{p.y!r}\n")
    return out.getvalue()


def write_json(ds: TrajectoryDataset) -> str:
    doc = {
        "frame_rate_hz": ds.frame_rate_hz,
        "points": [{"agent_id": p.agent_id, "frame": p.frame, "x": p.x, "y": p.y}
                   for p in ds.points()],
    }
    return json.dumps(doc, indent=1) + "\n"


def format_for_path(path) -> str:
    return "json" if str(path).lower().endswith(".json") else "csv"


def agent_speeds(ds: TrajectoryDataset, agent_id: str) -> np.ndarray:
    """Speed (m/s) of one agent at each of its frames.

    Backward differences, with the first frame copying the forward difference
    (zero for a single-frame track).
    """
    xy = ds.positions(agent_id)
    if len(xy) == 1:
        return np.zeros(1)
    step = np.hypot(*np.diff(xy, axis=0).T) * ds.frame_rate_hz
    return np.concatenate([step[:1], step])


def estimate_velocities(ds: TrajectoryDataset) -> list:
    return [VelocityEstimate(agent, t, float(v))
            for agent in ds.agents
            for t, v in zip(ds.frames_of(agent), agent_speeds(ds, agent))]


def speeds_by_frame(ds: TrajectoryDataset) -> dict:
    """``{frame: {agent_id: speed}}`` for every frame in the dataset range."""
    t0, t1 = ds.frame_range
    table = {t: {} for t in range(t0, t1 + 1)}
    for agent in ds.agents:
        for t, v in zip(ds.frames_of(agent), agent_speeds(ds, agent)):
            table[t][agent] = float(v)
    return table
