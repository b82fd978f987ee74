"""Deterministic synthetic straight-road scenarios with scripted maneuvers.

Every scenario is a pure function of its parameters and seed. The seed only
perturbs initial longitudinal offsets and maneuver timing (and drives the
optional positional jitter); scripted speeds are exact.

Lane centres sit at ``y = k * lane_width``; traffic moves along +x.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ParameterError
from .ingest import TrajectoryDataset

KINDS = ("conservative_platoon", "overspeeding_pass", "overtake_single",
         "sudden_lane_change", "weaving_sinusoid", "mixed")

OVERSPEEDING = "overspeeding"
OVERTAKING = "overtaking_or_sudden_lane_change"
WEAVING = "weaving"


@dataclass(frozen=True)
class GroundTruthEvent:
    agent_id: str
    style: str
    window: tuple
    expected_frame: int

    def to_dict(self) -> dict:
        return {"agent_id": self.agent_id, "style": self.style,
                "window": list(self.window), "expected_frame": self.expected_frame}


@dataclass(frozen=True)
class Scenario:
    """Scenario recipe. ``None`` fields take the per-kind defaults below."""

    kind: str
    frames: int = 200
    frame_rate_hz: float = 10.0
    seed: int = 0
    agents: int | None = None
    lane_width: float = 3.5
    spacing: float | None = None
    speed: float | None = None
    speed_fast: float | None = None
    amplitude: float = 3.0
    period: float = 40.0
    lane_change_frames: int = 10
    event_frame: int | None = None
    mu: float = 10.0
    offset_spread: float = 1.0
    timing_spread: int = 3
    jitter: float = 0.0

    def resolved(self) -> "Scenario":
        if self.kind not in KINDS:
            raise ParameterError(f"unknown scenario kind {self.kind!r}; expected one of {KINDS}")
        fill = dict(_DEFAULTS[self.kind])
        fill = {k: v for k, v in fill.items() if getattr(self, k) is None}
        values = asdict(self)
        values.update(fill)
        return Scenario(**values)

    def to_dict(self) -> dict:
        return asdict(self.resolved())


_DEFAULTS = {
    "conservative_platoon": dict(agents=4, spacing=8.0, speed=12.0, speed_fast=12.0, event_frame=0),
    "overspeeding_pass": dict(agents=6, spacing=6.0, speed=0.0, speed_fast=20.0, event_frame=60),
    "overtake_single": dict(agents=1, spacing=8.0, speed=10.0, speed_fast=25.0, event_frame=60),
    "sudden_lane_change": dict(agents=4, spacing=5.0, speed=12.0, speed_fast=12.0, event_frame=90),
    "weaving_sinusoid": dict(agents=4, spacing=5.0, speed=12.0, speed_fast=12.0, event_frame=0),
    "mixed": dict(agents=4, spacing=5.0, speed=12.0, speed_fast=40.0, event_frame=110),
}


def _check(s: Scenario):
    if s.frames < 2:
        raise ParameterError("frames must be >= 2")
    if not s.frame_rate_hz > 0:
        raise ParameterError("frame_rate_hz must be positive")
    if s.agents < 1:
        raise ParameterError("agents must be >= 1")
    for name in ("lane_width", "spacing", "period", "mu"):
        if not getattr(s, name) > 0:
            raise ParameterError(f"{name} must be positive")
    for name in ("speed", "speed_fast", "amplitude", "offset_spread", "jitter"):
        if getattr(s, name) < 0:
            raise ParameterError(f"{name} must be non-negative")
    if s.lane_change_frames < 1 or s.timing_spread < 0:
        raise ParameterError("lane_change_frames must be >= 1 and timing_spread >= 0")


class _Builder:
    def __init__(self, s: Scenario):
        self.s = s
        self.t = np.arange(s.frames) / s.frame_rate_hz
        self.rng = np.random.default_rng(s.seed)
        self.tracks = {}

    def offset(self) -> float:
        return float(self.rng.uniform(-self.s.offset_spread, self.s.offset_spread))

    def shift(self) -> int:
        return int(self.rng.integers(-self.s.timing_spread, self.s.timing_spread + 1))

    def add(self, x0: float, speed: float, y) -> str:
        agent = str(len(self.tracks))
        x = x0 + speed * self.t
        y = np.broadcast_to(np.asarray(y, dtype=float), x.shape)
        self.tracks[agent] = np.column_stack([x, y])
        return agent

    def dataset(self) -> TrajectoryDataset:
        tracks = {}
        for agent, xy in self.tracks.items():
            if self.s.jitter > 0:
                xy = xy + self.rng.uniform(-self.s.jitter, self.s.jitter, xy.shape)
            tracks[agent] = (0, xy)
        return TrajectoryDataset(tracks, self.s.frame_rate_hz)

    def contact_window(self, agent: str, others) -> tuple:
        """First and last frame at which ``agent`` is within mu of any of ``others``."""
        me = self.tracks[agent]
        near = np.zeros(len(me), dtype=bool)
        for other in others:
            near |= np.hypot(*(self.tracks[other] - me).T) < self.s.mu
        hits = np.flatnonzero(near)
        if len(hits) == 0:
            raise ParameterError("scripted pass never comes within mu of the queue")
        return int(hits[0]), int(hits[-1])

    def closest_frame(self, agent: str, x_target) -> int:
        return int(np.argmin(np.abs(self.tracks[agent][:, 0] - x_target)))


def _platoon(b: _Builder, n: int, lane_y: float, speed: float) -> list:
    """``n`` agents centred on x = 0, ``spacing`` apart, with small seeded offsets."""
    s = b.s
    return [b.add((k - (n - 1) / 2) * s.spacing + 0.25 * b.offset(), speed, lane_y)
            for k in range(n)]


def _pass(b: _Builder, queue: list, lane_y: float, queue_lane_y: float):
    """Add a fast agent timed to come within mu of the queue's rear at ``event_frame``."""
    s = b.s
    rel = s.speed_fast - s.speed
    if rel <= 0:
        raise ParameterError("speed_fast must exceed speed for a passing maneuver")
    reach = math.sqrt(max(s.mu ** 2 - (lane_y - queue_lane_y) ** 2, 0.0))
    rear_x0 = min(b.tracks[a][0, 0] for a in queue)
    start = s.event_frame + b.shift()
    x0 = rear_x0 - reach - rel * (start - 0.5) / s.frame_rate_hz
    return b.add(x0, s.speed_fast, lane_y)


def _pass_events(b: _Builder, fast: str, queue: list, styles) -> list:
    """Events for a completed pass.

    Overspeeding is centred between the first and last new-neighbour
    encounter; overtaking on the frame the fast agent is abreast of the
    queue's centre.
    """
    window = b.contact_window(fast, queue)
    encounters = [b.contact_window(fast, [a])[0] for a in queue]
    mid_x = np.mean([b.tracks[a][:, 0] for a in queue], axis=0)
    expected = {OVERSPEEDING: int(round((min(encounters) + max(encounters)) / 2)),
                OVERTAKING: b.closest_frame(fast, mid_x)}
    return [GroundTruthEvent(fast, style, window, _clamp(expected[style], window))
            for style in styles]


def _lane_change_profile(s: Scenario, y_from: float, y_to: float, start: int) -> np.ndarray:
    tau = np.clip((np.arange(s.frames) - start) / s.lane_change_frames, 0.0, 1.0)
    return y_from + (y_to - y_from) * (1.0 - np.cos(np.pi * tau)) / 2.0


def _weave(b: _Builder, x0: float, lane_y: float, phase_frames: int):
    s = b.s
    frames = np.arange(s.frames)
    y = lane_y + s.amplitude * np.sin(2.0 * np.pi * (frames - phase_frames) / s.period)
    agent = b.add(x0, s.speed, y)
    peaks = [phase_frames + s.period * (0.25 + k) for k in range(-1, int(s.frames / s.period) + 2)]
    troughs = [p + s.period / 2 for p in peaks]
    peaks = [int(round(p)) for p in peaks if 0 <= p <= s.frames - 1]
    troughs = [int(round(p)) for p in troughs if 0 <= p <= s.frames - 1]
    if not peaks or not troughs or troughs[-1] <= peaks[0]:
        raise ParameterError("weaving scenario too short for one peak and a later trough")
    window = (peaks[0], troughs[-1])
    event = GroundTruthEvent(agent, WEAVING, window, int(round(sum(window) / 2)))
    return agent, event, sorted(peaks + troughs)


def generate(scenario: Scenario):
    """Build ``(dataset, events)`` for ``scenario``."""
    ds, events, _ = _generate(scenario)
    return ds, events


def _generate(scenario: Scenario):
    s = scenario.resolved()
    _check(s)
    b = _Builder(s)
    events = []
    extrema = []
    lw = s.lane_width

    if s.kind == "conservative_platoon":
        _platoon(b, s.agents, 0.0, s.speed)

    elif s.kind in ("overspeeding_pass", "overtake_single"):
        queue = _platoon(b, s.agents, lw, s.speed)
        fast = _pass(b, queue, 0.0, lw)
        style = OVERSPEEDING if s.kind == "overspeeding_pass" else OVERTAKING
        events.extend(_pass_events(b, fast, queue, [style]))

    elif s.kind == "sudden_lane_change":
        # abrupt two-lane swerve away from the platoon it was driving beside
        _platoon(b, s.agents, 0.0, s.speed)
        start = s.event_frame + b.shift()
        y = _lane_change_profile(s, lw, 3 * lw, start)
        changer = b.add(b.offset(), s.speed, y)
        window = (max(start, 0), min(start + s.lane_change_frames, s.frames - 1))
        events.append(GroundTruthEvent(changer, OVERTAKING, window,
                                       _clamp(start + s.lane_change_frames // 2, window)))

    elif s.kind == "weaving_sinusoid":
        _platoon(b, s.agents, 0.0, s.speed)
        _, event, extrema = _weave(b, b.offset(), lw, s.event_frame + b.shift())
        events.append(event)

    elif s.kind == "mixed":
        platoon = _platoon(b, s.agents, 0.0, s.speed)
        _, event, extrema = _weave(b, b.offset(), lw, b.shift())
        events.append(event)
        fast = _pass(b, platoon, -lw, 0.0)
        events.extend(_pass_events(b, fast, platoon, [OVERSPEEDING, OVERTAKING]))

    return b.dataset(), events, extrema


def _clamp(frame: int, window: tuple) -> int:
    return int(min(max(frame, window[0]), window[1]))


def scripted_extrema(scenario: Scenario) -> list:
    """Frames of the weaver's lateral peaks and troughs (weaving kinds only)."""
    return _generate(scenario)[2]


def truth_to_dict(events, frame_rate_hz: float, scenario: Scenario | None = None) -> dict:
    doc = {"frame_rate_hz": frame_rate_hz, "events": [e.to_dict() for e in events]}
    if scenario is not None:
        doc["scenario"] = scenario.to_dict()
    return doc
