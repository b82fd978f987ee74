"""Driving-style detection from smoothed centrality rows.

Row 0 (closeness) carries overtaking / sudden lane-change, weaving and
lane keeping; row 1 (degree) carries overspeeding and uniform speed.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .centrality import CentralitySeries, compute_series
from .config import Config
from .ingest import TrajectoryDataset
from .signal import (ExtremePoint, SmoothedSeries, argmax_sle, find_extreme_points, sie, sle,
                     smooth_and_differentiate)

SCHEMA_VERSION = 1

OVERSPEEDING = "overspeeding"
OVERTAKING = "overtaking_or_sudden_lane_change"
WEAVING = "weaving"
UNIFORM_SPEED = "conservative_uniform_speed"
NO_LANE_CHANGE = "conservative_no_lane_change"

AGGRESSIVE_STYLES = (OVERSPEEDING, OVERTAKING, WEAVING)
CONSERVATIVE_STYLES = (UNIFORM_SPEED, NO_LANE_CHANGE)
STYLES = AGGRESSIVE_STYLES + CONSERVATIVE_STYLES

AGGRESSIVE, CONSERVATIVE, NEUTRAL = "aggressive", "conservative", "neutral"
INSUFFICIENT_DATA = "insufficient_data"

# style -> centrality row it is read from (0 closeness, 1 degree)
STYLE_ROW = {OVERSPEEDING: 1, OVERTAKING: 0, WEAVING: 0, UNIFORM_SPEED: 1, NO_LANE_CHANGE: 0}


@dataclass(frozen=True)
class StyleDetection:
    agent_id: str
    style: str
    t_sle: int
    sle_max: float
    sie_at_t: float
    evidence: tuple = ()

    def to_dict(self) -> dict:
        return {"style": self.style, "t_sle": self.t_sle, "sle_max": self.sle_max,
                "sie": self.sie_at_t, "evidence": [p.to_dict() for p in self.evidence]}


@dataclass(frozen=True)
class AgentResult:
    agent_id: str
    global_behavior: str
    detections: tuple = ()

    @property
    def styles(self) -> list:
        return [d.style for d in self.detections]

    def to_dict(self) -> dict:
        return {"agent_id": self.agent_id, "global_behavior": self.global_behavior,
                "detections": [d.to_dict() for d in self.detections]}


@dataclass(frozen=True)
class StyleReport:
    agents: tuple
    parameters: dict = field(default_factory=dict)

    def agent(self, agent_id) -> AgentResult:
        for result in self.agents:
            if result.agent_id == agent_id:
                return result
        raise KeyError(agent_id)

    def detections(self):
        for result in self.agents:
            yield from result.detections

    def labels(self) -> dict:
        return {r.agent_id: r.styles for r in self.agents}

    def to_dict(self) -> dict:
        return {"schema": SCHEMA_VERSION, "parameters": dict(self.parameters),
                "agents": [r.to_dict() for r in self.agents]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, doc: dict) -> "StyleReport":
        agents = []
        for a in doc["agents"]:
            dets = tuple(
                StyleDetection(a["agent_id"], d["style"], int(d["t_sle"]), float(d["sle_max"]),
                               float(d["sie"]),
                               tuple(ExtremePoint(int(p["frame"]), p["kind"], float(p["sharpness"]))
                                     for p in d.get("evidence", [])))
                for d in a["detections"])
            agents.append(AgentResult(a["agent_id"], a["global_behavior"], dets))
        return cls(tuple(agents), doc.get("parameters", {}))


def _interior(series: SmoothedSeries) -> np.ndarray:
    mask = ~series.low_confidence
    return mask if mask.any() else np.ones_like(mask)


def _intensity(series: SmoothedSeries, t: int, epsilon: int) -> float:
    i = series.index_of(t)
    lo, hi = max(0, i - epsilon), i + epsilon + 1
    return float(sie(series)[lo:hi].max())


def _slope_detection(agent_id, style, series, threshold, epsilon):
    t = argmax_sle(series)
    peak = float(sle(series)[series.index_of(t)])
    if peak < threshold:
        return None
    return StyleDetection(agent_id, style, t, peak, _intensity(series, t, epsilon))


def detect_overspeeding(degree_series: SmoothedSeries, config: Config = Config(),
                        agent_id=None) -> StyleDetection | None:
    """Overspeeding: the cumulative count of slower new neighbours rises fast enough."""
    return _slope_detection(agent_id, OVERSPEEDING, degree_series,
                            config.threshold_overspeed, config.epsilon)


def detect_overtaking(closeness_series: SmoothedSeries, config: Config = Config(),
                      agent_id=None) -> StyleDetection | None:
    return _slope_detection(agent_id, OVERTAKING, closeness_series,
                            config.threshold_overtake, config.epsilon)


def separated_extrema(points, min_gap: int) -> list:
    """Greedy non-maximum suppression: keep the sharpest points at least ``min_gap`` apart."""
    kept = []
    for p in sorted(points, key=lambda p: (-p.sharpness, p.frame)):
        if all(abs(p.frame - q.frame) >= min_gap for q in kept):
            kept.append(p)
    return sorted(kept, key=lambda p: p.frame)


def detect_weaving(closeness_series: SmoothedSeries, config: Config = Config(),
                   agent_id=None) -> StyleDetection | None:
    """Weaving: repeated, well-separated sharp extrema of closeness.

    Extrema closer than ``2 * epsilon`` frames to a sharper one belong to the
    same local disturbance and are dropped before counting.
    """
    points = [p for p in find_extreme_points(closeness_series, config.epsilon, config.zero_tol)
              if p.sharpness > config.sharp_tol]
    evidence = separated_extrema(points, 2 * config.epsilon)
    if len(evidence) < config.min_extrema:
        return None
    sharpest = max(evidence, key=lambda p: (p.sharpness, -p.frame))
    t = sharpest.frame
    return StyleDetection(agent_id, WEAVING, t, float(sle(closeness_series)[closeness_series.index_of(t)]),
                          float(np.mean([p.sharpness for p in evidence])), tuple(evidence))


def detect_conservative(closeness_series: SmoothedSeries, degree_series: SmoothedSeries,
                        config: Config = Config(), agent_id=None) -> list:
    """Lane keeping and uniform speed, reported together when both rows are flat.

    Intensity is the unused slope budget ``zero_tol - max SLE`` (floored at 0).
    """
    found = []
    for style, series in ((NO_LANE_CHANGE, closeness_series), (UNIFORM_SPEED, degree_series)):
        likelihood = sle(series)[_interior(series)]
        peak = float(likelihood.max())
        if peak > config.zero_tol:
            return []
        t = argmax_sle(series)
        found.append(StyleDetection(agent_id, style, t, float(sle(series)[series.index_of(t)]),
                                    max(config.zero_tol - peak, 0.0)))
    return found


def _restrict(series: CentralitySeries, interval):
    t0, t1 = series.frame_range
    if interval is None:
        return series.first_frame, series.closeness, series.degree
    lo, hi = max(t0, interval[0]), min(t1, interval[1])
    if hi < lo:
        return lo, series.closeness[:0], series.degree[:0]
    a, b = lo - t0, hi - t0 + 1
    return lo, series.closeness[a:b], series.degree[a:b]


def smooth_rows(series: CentralitySeries, config: Config, frame_rate_hz: float, interval=None):
    first, closeness, degree = _restrict(series, interval)
    kw = dict(window=config.window, poly_degree=config.poly_degree,
              frame_rate_hz=frame_rate_hz, first_frame=first)
    return smooth_and_differentiate(closeness, **kw), smooth_and_differentiate(degree, **kw)


def detect_styles(agent_id, closeness: SmoothedSeries, degree: SmoothedSeries,
                  config: Config = Config()) -> list:
    """All detections for one agent, aggressive styles first."""
    found = []
    weaving = detect_weaving(closeness, config, agent_id)
    overtaking = detect_overtaking(closeness, config, agent_id)
    if overtaking is not None and weaving is not None:
        # a slope peak within half a cycle of the oscillation is one of its flanks
        frames = [p.frame for p in weaving.evidence]
        margin = max(config.epsilon, int(np.median(np.diff(frames))))
        if frames[0] - margin <= overtaking.t_sle <= frames[-1] + margin:
            overtaking = None
    for detection in (detect_overspeeding(degree, config, agent_id), overtaking, weaving):
        if detection is not None:
            found.append(detection)
    if not found:
        found.extend(detect_conservative(closeness, degree, config, agent_id))
    return found


def global_behavior(detections) -> str:
    styles = {d.style for d in detections}
    if styles & set(AGGRESSIVE_STYLES):
        return AGGRESSIVE
    if styles and styles <= set(CONSERVATIVE_STYLES):
        return CONSERVATIVE
    return NEUTRAL


def analyze_series(series: dict, config: Config, frame_rate_hz: float) -> StyleReport:
    results = []
    for agent_id, s in series.items():
        _, closeness, _ = _restrict(s, config.interval)
        if len(closeness) < config.window:
            results.append(AgentResult(agent_id, INSUFFICIENT_DATA))
            continue
        c, d = smooth_rows(s, config, frame_rate_hz, config.interval)
        detections = detect_styles(agent_id, c, d, config)
        results.append(AgentResult(agent_id, global_behavior(detections), tuple(detections)))
    params = config.to_dict()
    params["frame_rate_hz"] = frame_rate_hz
    return StyleReport(tuple(results), params)


def classify(ds: TrajectoryDataset, config: Config = Config()) -> StyleReport:
    """Full pipeline: centrality series, smoothing, detectors, global labels.

    The dataset's own frame rate is used for derivative units and recorded in
    the report parameters.
    """
    return analyze_series(compute_series(ds, config.mu), config, ds.frame_rate_hz)
