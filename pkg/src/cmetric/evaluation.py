"""Time deviation error between predicted maximum-likelihood frames and ground truth."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .errors import ConfigError, ParameterError, ValidationError
from .styles import OVERSPEEDING, OVERTAKING, WEAVING, StyleReport

MATCHING = "greedy nearest frame within (agent_id, style)"

# short column labels for the summary table
STYLE_LABELS = {OVERSPEEDING: "OS", OVERTAKING: "OT/SLC", WEAVING: "W"}


def expected_frame(annotator_frames) -> float:
    """Mean of the annotated frame stamps."""
    frames = list(annotator_frames)
    if not frames:
        raise ParameterError("expected_frame needs at least one annotator frame")
    return sum(float(f) for f in frames) / len(frames)


def tde_seconds(t_sle: float, expected: float, frame_rate_hz: float) -> float:
    if not frame_rate_hz > 0:
        raise ParameterError("frame_rate_hz must be positive")
    return abs(t_sle - expected) / frame_rate_hz


@dataclass(frozen=True)
class AnnotatedEvent:
    agent_id: str
    style: str
    expected_frame: float
    annotator_frames: tuple = ()
    window: tuple | None = None

    @classmethod
    def from_dict(cls, doc: dict) -> "AnnotatedEvent":
        try:
            agent, style = str(doc["agent_id"]), str(doc["style"])
        except KeyError as exc:
            raise ValidationError(f"truth event missing field {exc.args[0]!r}") from None
        frames = tuple(int(f) for f in doc.get("annotator_frames") or ())
        if "expected_frame" in doc and doc["expected_frame"] is not None:
            expected = float(doc["expected_frame"])
        elif frames:
            expected = expected_frame(frames)
        else:
            raise ValidationError(f"truth event for agent {agent!r} ({style}) has neither "
                                  "annotator_frames nor expected_frame")
        window = tuple(int(v) for v in doc["window"]) if doc.get("window") is not None else None
        return cls(agent, style, expected, frames, window)


@dataclass(frozen=True)
class AnnotationSet:
    events: tuple
    frame_rate_hz: float | None = None

    @classmethod
    def from_dict(cls, doc: dict) -> "AnnotationSet":
        if not isinstance(doc, dict) or not isinstance(doc.get("events"), list):
            raise ValidationError("truth document must be an object with an 'events' list")
        rate = doc.get("frame_rate_hz")
        if rate is not None and not float(rate) > 0:
            raise ValidationError("truth frame_rate_hz must be positive")
        return cls(tuple(AnnotatedEvent.from_dict(e) for e in doc["events"]),
                   None if rate is None else float(rate))

    @classmethod
    def from_json(cls, text: str) -> "AnnotationSet":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ValidationError(f"truth file is not valid JSON: {exc}") from None


@dataclass(frozen=True)
class EventTde:
    agent_id: str
    style: str
    t_sle: int
    expected_frame: float
    tde_seconds: float

    def to_dict(self) -> dict:
        return {"agent_id": self.agent_id, "style": self.style, "t_sle": self.t_sle,
                "expected_frame": self.expected_frame, "tde_seconds": self.tde_seconds}


@dataclass(frozen=True)
class TdeResult:
    events: tuple
    per_style: dict
    unmatched: tuple
    frame_rate_hz: float
    matching: str = MATCHING
    parameters: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "frame_rate_hz": self.frame_rate_hz,
            "matching": self.matching,
            "per_style_mean_tde_seconds": dict(self.per_style),
            "events": [e.to_dict() for e in self.events],
            "unmatched": [{"agent_id": e.agent_id, "style": e.style,
                           "expected_frame": e.expected_frame} for e in self.unmatched],
            "parameters": dict(self.parameters),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def table(self) -> str:
        """Plain-text per-style summary; unobserved styles show '-'."""
        rows = [f"{'style':<8}{'mean TDE (s)':>14}{'matched':>9}{'unmatched':>11}"]
        for style, label in STYLE_LABELS.items():
            mean = self.per_style.get(style)
            matched = sum(e.style == style for e in self.events)
            missing = sum(e.style == style for e in self.unmatched)
            cell = "-" if mean is None else f"{mean:.3f}"
            rows.append(f"{label:<8}{cell:>14}{matched:>9}{missing:>11}")
        return "\n".join(rows) + "\n"


def _resolve_rate(report: StyleReport, truth: AnnotationSet, frame_rate_hz):
    rates = {}
    if report.parameters.get("frame_rate_hz") is not None:
        rates["report"] = float(report.parameters["frame_rate_hz"])
    if truth.frame_rate_hz is not None:
        rates["truth"] = float(truth.frame_rate_hz)
    if frame_rate_hz is not None:
        rates["requested"] = float(frame_rate_hz)
    if not rates:
        raise ConfigError("no frame rate given by the report, the truth file or the caller")
    values = set(rates.values())
    if len(values) > 1:
        detail = ", ".join(f"{k}={v:g}" for k, v in rates.items())
        raise ConfigError(f"frame rate mismatch: {detail}")
    rate = values.pop()
    if not rate > 0:
        raise ConfigError("frame rate must be positive")
    return rate


def compute_tde(report: StyleReport, truth: AnnotationSet, frame_rate_hz=None) -> TdeResult:
    """Match truth events to detections and compute per-event and per-style TDE.

    Within each (agent, style) pair, truth events and detections are paired
    greedily by smallest frame distance, each used at most once. Truth events
    left without a detection are reported as unmatched and excluded from the
    means.
    """
    rate = _resolve_rate(report, truth, frame_rate_hz)
    detections = {}
    for d in report.detections():
        detections.setdefault((d.agent_id, d.style), []).append(d.t_sle)

    pairs = []
    for i, event in enumerate(truth.events):
        for j, t in enumerate(detections.get((event.agent_id, event.style), ())):
            pairs.append((abs(t - event.expected_frame), i, j, t))
    pairs.sort(key=lambda p: p[:3])

    used_events, used_dets, matched = set(), set(), {}
    for _, i, j, t in pairs:
        key = (truth.events[i].agent_id, truth.events[i].style, j)
        if i in used_events or key in used_dets:
            continue
        used_events.add(i)
        used_dets.add(key)
        matched[i] = t

    results, unmatched = [], []
    for i, event in enumerate(truth.events):
        if i in matched:
            results.append(EventTde(event.agent_id, event.style, matched[i], event.expected_frame,
                                    tde_seconds(matched[i], event.expected_frame, rate)))
        else:
            unmatched.append(event)

    per_style = {}
    for style in sorted({e.style for e in results}):
        values = [e.tde_seconds for e in results if e.style == style]
        per_style[style] = math.fsum(values) / len(values)
    return TdeResult(tuple(results), per_style, tuple(unmatched), rate,
                     parameters=dict(report.parameters))
