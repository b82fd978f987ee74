import pytest
from hypothesis import given, strategies as st

from cmetric.errors import ConfigError, ParameterError, ValidationError
from cmetric.evaluation import AnnotationSet, compute_tde, expected_frame, tde_seconds
from cmetric.styles import (OVERSPEEDING, OVERTAKING, WEAVING, AgentResult, StyleDetection,
                            StyleReport, classify)
from cmetric.synth import Scenario, generate, truth_to_dict


def report(dets, rate=30.0):
    agents = {}
    for agent, style, t in dets:
        agents.setdefault(agent, []).append(StyleDetection(agent, style, t, 1.0, 0.0))
    return StyleReport(tuple(AgentResult(a, "aggressive", tuple(d)) for a, d in agents.items()),
                       {"frame_rate_hz": rate})


def truth(events, rate=30.0):
    return AnnotationSet.from_dict({"frame_rate_hz": rate, "events": events})


@pytest.mark.parametrize("frames, mean", [([5], 5.0), ([4, 6], 5.0), ([3, 5, 10], 6.0)])
def test_expected_frame(frames, mean):
    assert expected_frame(frames) == mean


def test_expected_frame_empty():
    with pytest.raises(ParameterError):
        expected_frame([])


def test_worked_example():
    r = compute_tde(report([("1", OVERSPEEDING, 7)]),
                    truth([{"agent_id": "1", "style": OVERSPEEDING, "annotator_frames": [5]}]))
    assert r.events[0].tde_seconds == pytest.approx(0.0667, abs=5e-4)
    assert r.per_style[OVERSPEEDING] == pytest.approx(2 / 30)


def test_perfect_prediction_and_unmatched():
    r = compute_tde(report([("1", WEAVING, 40)]),
                    truth([{"agent_id": "1", "style": WEAVING, "expected_frame": 40},
                           {"agent_id": "2", "style": OVERTAKING, "expected_frame": 10},
                           {"agent_id": "1", "style": OVERSPEEDING, "expected_frame": 10}]))
    assert r.per_style == {WEAVING: 0.0}
    assert {(e.agent_id, e.style) for e in r.unmatched} == {("2", OVERTAKING), ("1", OVERSPEEDING)}
    assert "-" in r.table().splitlines()[1]


def test_greedy_nearest_matching():
    r = compute_tde(report([("a", OVERTAKING, 100), ("a", OVERTAKING, 12)], rate=10),
                    truth([{"agent_id": "a", "style": OVERTAKING, "expected_frame": 10},
                           {"agent_id": "a", "style": OVERTAKING, "expected_frame": 90}], rate=10))
    assert [(e.expected_frame, e.t_sle) for e in r.events] == [(10.0, 12), (90.0, 100)]
    assert r.per_style[OVERTAKING] == pytest.approx((0.2 + 1.0) / 2)


def test_more_events_than_detections():
    r = compute_tde(report([("a", OVERTAKING, 50)], rate=10),
                    truth([{"agent_id": "a", "style": OVERTAKING, "expected_frame": 10},
                           {"agent_id": "a", "style": OVERTAKING, "expected_frame": 45}], rate=10))
    assert [e.expected_frame for e in r.events] == [45.0]
    assert [e.expected_frame for e in r.unmatched] == [10.0]


def test_frame_rate_mismatch():
    with pytest.raises(ConfigError):
        compute_tde(report([], rate=10), truth([], rate=30))
    with pytest.raises(ConfigError):
        compute_tde(report([], rate=10), truth([], rate=10), frame_rate_hz=30)
    with pytest.raises(ConfigError):
        compute_tde(StyleReport(()), AnnotationSet(()))
    assert compute_tde(StyleReport(()), AnnotationSet(()), 25).frame_rate_hz == 25


@pytest.mark.parametrize("doc", [{"events": [{"agent_id": 1, "style": "weaving"}]}, {"events": "x"},
                                 {"events": [{"style": "weaving", "expected_frame": 1}]},
                                 {"frame_rate_hz": 0, "events": []}])
def test_bad_truth(doc):
    with pytest.raises(ValidationError):
        AnnotationSet.from_dict(doc)


def test_bad_truth_json():
    with pytest.raises(ValidationError):
        AnnotationSet.from_json("{")


@given(st.integers(0, 10_000), st.integers(0, 10_000), st.floats(1, 240))
def test_tde_symmetry_and_scale(a, b, f):
    assert tde_seconds(a, b, f) == tde_seconds(b, a, f)
    assert tde_seconds(a, b, 2 * f) == pytest.approx(tde_seconds(a, b, f) / 2)
    assert tde_seconds(a, b, f) >= 0


def test_truth_as_report_gives_zero():
    ds, events = generate(Scenario("mixed", seed=0))
    fake = report([(e.agent_id, e.style, e.expected_frame) for e in events], rate=10)
    r = compute_tde(fake, AnnotationSet.from_dict(truth_to_dict(events, 10.0)))
    assert all(e.tde_seconds == 0 for e in r.events) and not r.unmatched


def test_pipeline_tde_on_overspeeding_pass():
    ds, events = generate(Scenario("overspeeding_pass", seed=0))
    r = compute_tde(classify(ds), AnnotationSet.from_dict(truth_to_dict(events, ds.frame_rate_hz)))
    assert r.per_style[OVERSPEEDING] <= 1.0
    assert r.to_dict()["matching"].startswith("greedy")
