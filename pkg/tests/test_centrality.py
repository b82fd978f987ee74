import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cmetric.centrality import (NeighborHistory, closeness_at, compute_series, degree_step,
                                shortest_path_costs)
from cmetric.errors import AgentNotPresentError, ConsistencyError
from cmetric.graph import build_frame_graph
from cmetric.ingest import TrajectoryDataset, speeds_by_frame
from cmetric.synth import KINDS, Scenario, generate

from oracles import brute_closeness, floyd_warshall
from test_graph import frame_ds


def test_two_agents():
    g = build_frame_graph(frame_ds({"a": (0, 0), "b": (4, 0)}), 0)
    assert closeness_at(g, "a") == closeness_at(g, "b") == 0.25


def test_isolated_is_zero():
    g = build_frame_graph(frame_ds({"a": (0, 0), "b": (40, 0)}), 0)
    assert closeness_at(g, "a") == 0.0


def test_path_graph_uses_shortest_paths():
    # a-b-c on a line, a and c out of direct range
    g = build_frame_graph(frame_ds({"a": (0, 0), "b": (6, 0), "c": (12, 0)}), 0)
    assert closeness_at(g, "a") == pytest.approx(2 / (6 + 12))
    assert closeness_at(g, "b") == pytest.approx(2 / 12)


def test_reachable_set_only():
    g = build_frame_graph(frame_ds({"a": (0, 0), "b": (2, 0), "c": (50, 0), "d": (55, 0)}), 0)
    assert closeness_at(g, "a") == pytest.approx(0.5)
    assert closeness_at(g, "c") == pytest.approx(0.2)


def test_absent_agent():
    g = build_frame_graph(frame_ds({"a": (0, 0)}), 0)
    with pytest.raises(AgentNotPresentError):
        closeness_at(g, "zz")


def test_dijkstra_matches_floyd_warshall():
    rng = np.random.default_rng(5)
    for _ in range(20):
        pts = rng.uniform(0, 50, (12, 2))
        g = build_frame_graph(frame_ds({str(i): tuple(p) for i, p in enumerate(pts)}), 0, 20.0)
        fw = floyd_warshall(g.adjacency)
        for s in range(g.n):
            costs = shortest_path_costs(g.adjacency, s)
            assert set(costs) == set(np.flatnonzero(np.isfinite(fw[s])))
            for v, c in costs.items():
                assert c == pytest.approx(fw[s, v], abs=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.floats(0, 50), st.floats(0, 50)), min_size=1, max_size=12))
def test_closeness_property_against_brute_force(points):
    g = build_frame_graph(frame_ds({str(i): p for i, p in enumerate(points)}), 0, 20.0)
    for i, agent in enumerate(g.agents):
        value = closeness_at(g, agent)
        assert value >= 0 and np.isfinite(value)
        assert abs(value - brute_closeness(g.adjacency, i)) <= 1e-9


def test_degree_counts_slower_new_neighbours_once():
    # "f" drives past a, b (slower) then meets "s" which is faster
    ds = TrajectoryDataset({
        "f": (0, [(0, 0), (10, 0), (20, 0), (30, 0)]),
        "a": (0, [(5, 3), (6, 3), (7, 3), (8, 3)]),
        "b": (0, [(25, 3), (26, 3), (27, 3), (28, 3)]),
        "s": (0, [(40, 0), (55, 0), (70, 0), (85, 0)]),
    }, 1.0)
    series = compute_series(ds, 10.0)
    # a adjacent at 0 and 1 (counted once), b adjacent at 2 and 3
    assert series["f"].degree.tolist() == [1, 1, 2, 2]
    # a never counts f (f is faster), a is not adjacent to anybody else
    assert series["a"].degree.tolist() == [0, 0, 0, 0]


def test_degree_history_grows_with_uncounted_neighbours():
    g = build_frame_graph(frame_ds({"a": (0, 0), "b": (3, 0)}), 0)
    value, hist = degree_step(NeighborHistory("a"), g, {"a": 1.0, "b": 5.0}, 0)
    assert value == 0 and hist.ever_adjacent == {"b"}
    # b later slows down: still not new, so not counted
    value, hist = degree_step(hist, g, {"a": 1.0, "b": 0.5}, value)
    assert value == 0


def test_equal_speed_counts():
    g = build_frame_graph(frame_ds({"a": (0, 0), "b": (3, 0)}), 0)
    assert degree_step(NeighborHistory("a"), g, {"a": 2.0, "b": 2.0}, 7)[0] == 8


def test_missing_speed_is_consistency_error():
    g = build_frame_graph(frame_ds({"a": (0, 0), "b": (3, 0)}), 0)
    with pytest.raises(ConsistencyError):
        degree_step(NeighborHistory("a"), g, {"a": 1.0}, 0)


def _check_degree_rows(ds):
    series = compute_series(ds, 10.0)
    for agent, s in series.items():
        steps = np.diff(np.concatenate([[0], s.degree]))
        assert (steps >= 0).all()
        for t, step in zip(s.frames, steps):
            assert step <= len(ds.agents_at(int(t))) - 1
        assert (s.closeness >= 0).all() and np.isfinite(s.closeness).all()


@pytest.mark.parametrize("kind", KINDS)
def test_degree_monotone_on_synthetic(kind):
    _check_degree_rows(generate(Scenario(kind, seed=2))[0])


def test_series_follow_agent_lifetimes():
    ds = TrajectoryDataset({"a": (0, np.zeros((5, 2))), "b": (2, np.ones((4, 2)))}, 10.0)
    series = compute_series(ds)
    assert series["b"].frame_range == (2, 5)
    assert len(series["b"].closeness) == 4
    assert series["a"].row(1) is series["a"].degree
