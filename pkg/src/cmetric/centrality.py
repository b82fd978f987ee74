"""Closeness and cumulative-degree centrality time series per agent."""
from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .errors import AgentNotPresentError, ConsistencyError
from .graph import DEFAULT_MU, FrameGraph, build_frame_graph
from .ingest import TrajectoryDataset, speeds_by_frame


@dataclass(frozen=True)
class CentralitySeries:
    """One agent's two centrality rows over its frame interval."""

    agent_id: str
    first_frame: int
    closeness: np.ndarray
    degree: np.ndarray

    @property
    def frames(self) -> np.ndarray:
        return np.arange(self.first_frame, self.first_frame + len(self.closeness))

    @property
    def frame_range(self) -> tuple:
        return (self.first_frame, self.first_frame + len(self.closeness) - 1)

    def row(self, k: int) -> np.ndarray:
        """Row ``k`` of the 2 x T matrix: 0 is closeness, 1 is degree."""
        return (self.closeness, self.degree)[k]


@dataclass(frozen=True)
class NeighborHistory:
    agent_id: str
    ever_adjacent: frozenset = frozenset()


def shortest_path_costs(adjacency: np.ndarray, source: int) -> dict:
    """Dijkstra from ``source``; returns ``{vertex: cost}`` for reachable vertices."""
    dist = {source: 0.0}
    done = set()
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        for v in np.flatnonzero(adjacency[u]):
            v = int(v)
            nd = d + adjacency[u, v]
            if v not in done and nd < dist.get(v, np.inf):
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def closeness_at(g: FrameGraph, agent) -> float:
    """Closeness of ``agent`` restricted to the vertices it can reach.

    ``|R| / sum of shortest-path costs to R``; on a connected graph this is the
    usual ``(N - 1) / sum``. Isolated agents get 0.
    """
    if agent not in g.agents:
        raise AgentNotPresentError(f"agent {agent!r} not present at frame {g.frame}")
    i = g.index_of(agent)
    costs = shortest_path_costs(g.adjacency, i)
    del costs[i]
    if not costs:
        return 0.0
    return len(costs) / sum(costs[j] for j in sorted(costs))


def degree_step(history: NeighborHistory, g: FrameGraph, speeds: dict, prev_value: int):
    """Advance the cumulative degree of ``history.agent_id`` by one frame.

    Counts current neighbours that are no faster than the agent and have
    never been adjacent to it before. Every current neighbour, counted or
    not, is added to the history.
    """
    agent = history.agent_id
    neighbors = g.neighbors(agent)
    try:
        own = speeds[agent]
        neighbor_speeds = {j: speeds[j] for j in neighbors}
    except KeyError as exc:
        raise ConsistencyError(f"no speed for agent {exc.args[0]!r} at frame {g.frame}") from None
    fresh = [j for j in neighbors
             if j not in history.ever_adjacent and neighbor_speeds[j] <= own]
    if neighbors:
        history = NeighborHistory(agent, history.ever_adjacent | frozenset(neighbors))
    return prev_value + len(fresh), history


def compute_series(ds: TrajectoryDataset, mu: float = DEFAULT_MU) -> dict:
    """``{agent_id: CentralitySeries}`` for every agent in ``ds``."""
    speeds = speeds_by_frame(ds)
    closeness = {a: [] for a in ds.agents}
    degree = {a: [] for a in ds.agents}
    history = {a: NeighborHistory(a) for a in ds.agents}
    t0, t1 = ds.frame_range
    for t in range(t0, t1 + 1):
        if not ds.agents_at(t):
            continue
        g = build_frame_graph(ds, t, mu)
        for agent in g.agents:
            closeness[agent].append(closeness_at(g, agent))
            prev = degree[agent][-1] if degree[agent] else 0
            value, history[agent] = degree_step(history[agent], g, speeds[t], prev)
            degree[agent].append(value)
    return {a: CentralitySeries(a, ds.frames_of(a)[0], np.array(closeness[a], dtype=float),
                                np.array(degree[a], dtype=int))
            for a in ds.agents}
