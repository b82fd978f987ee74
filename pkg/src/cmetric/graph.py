"""Per-frame weighted proximity graphs and their Laplacians.

Two agents share an edge when their Euclidean distance is strictly below the
threshold ``mu``; the edge weight is that distance.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .ingest import TrajectoryDataset

DEFAULT_MU = 10.0
DEFAULT_N_MAX = 256


@dataclass(frozen=True)
class FrameGraph:
    frame: int
    agents: tuple
    positions: np.ndarray
    adjacency: np.ndarray
    mu: float

    @property
    def vertices(self):
        return list(zip(self.agents, map(tuple, self.positions)))

    @property
    def n(self) -> int:
        return len(self.agents)

    def index_of(self, agent_id) -> int:
        return self.agents.index(agent_id)

    def neighbors(self, agent_id) -> list:
        i = self.index_of(agent_id)
        return [self.agents[j] for j in np.flatnonzero(self.adjacency[i])]

    def edges(self) -> list:
        """Edge list ``[i, j, w]`` with ``i < j``, in row-major order."""
        iu, ju = np.nonzero(np.triu(self.adjacency, 1))
        return [[int(i), int(j), float(self.adjacency[i, j])] for i, j in zip(iu, ju)]

    def to_dict(self) -> dict:
        return {"frame": self.frame, "agents": list(self.agents), "edges": self.edges()}


def proximity_adjacency(positions: np.ndarray, mu: float) -> np.ndarray:
    positions = np.asarray(positions, dtype=float).reshape(-1, 2)
    diff = positions[:, None, :] - positions[None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    adjacency = np.where((dist < mu) & (dist > 0), dist, 0.0)
    np.fill_diagonal(adjacency, 0.0)
    return adjacency


def build_frame_graph(ds: TrajectoryDataset, frame: int, mu: float = DEFAULT_MU) -> FrameGraph:
    if not mu > 0:
        raise ParameterError(f"mu must be positive, got {mu!r}")
    agents, xy = ds.at_frame(frame)
    xy.setflags(write=False)
    adjacency = proximity_adjacency(xy, mu)
    adjacency.setflags(write=False)
    return FrameGraph(frame, agents, xy, adjacency, float(mu))


def degree_matrix(g: FrameGraph) -> np.ndarray:
    return np.diag(g.adjacency.sum(axis=1))


def laplacian(g: FrameGraph) -> np.ndarray:
    return degree_matrix(g) - g.adjacency


@dataclass
class LaplacianState:
    """Running Laplacian over the union of all edges seen since the last reset.

    Agents get a stable row index in order of first appearance. A retained
    edge keeps its most recently observed distance.
    """

    n_max: int = DEFAULT_N_MAX
    L: np.ndarray = None
    index: dict = field(default_factory=dict)
    resets: int = 0

    def __post_init__(self):
        if self.n_max < 1:
            raise ParameterError("n_max must be at least 1")
        if self.L is None:
            self.L = np.zeros((self.n_max, self.n_max))

    @property
    def active_count(self) -> int:
        return len(self.index)

    def active_block(self) -> np.ndarray:
        k = self.active_count
        return self.L[:k, :k]

    def copy(self) -> "LaplacianState":
        return LaplacianState(self.n_max, self.L.copy(), dict(self.index), self.resets)


def update_laplacian(state: LaplacianState, g: FrameGraph, new_agents=None) -> LaplacianState:
    """Fold one frame graph into the running union Laplacian.

    ``new_agents`` lists agents not yet indexed; it is derived from the state
    when omitted. Returns a new state; ``state`` is left untouched.
    """
    out = state.copy()
    if new_agents is None:
        new_agents = [a for a in g.agents if a not in out.index]
    else:
        new_agents = [a for a in g.agents if a in set(new_agents) and a not in out.index]
    if out.active_count + len(new_agents) > out.n_max:
        if g.n > out.n_max:
            raise ParameterError(f"frame {g.frame} has {g.n} agents, more than n_max={out.n_max}")
        out = LaplacianState(out.n_max, resets=state.resets + 1)
        new_agents = list(g.agents)
    for agent in new_agents:
        out.index[agent] = out.active_count

    idx = np.array([out.index[a] for a in g.agents], dtype=int)
    rows, cols = np.nonzero(g.adjacency)
    L = out.L
    L[idx[rows], idx[cols]] = -g.adjacency[rows, cols]
    touched = np.unique(idx[rows])
    if len(touched):
        L[touched, touched] = 0.0
        L[touched, touched] = -L[touched].sum(axis=1)
    return out
