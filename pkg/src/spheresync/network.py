"""Communication graphs, switching signals and dwell-time validation.

Signals are right-continuous: the graph listed for a switch instant is the one
active from that instant on. switch_times[0] is the signal start; the actual
discontinuities are switch_times[1:].
"""
from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .errors import InputError, SignalConstructionError


@dataclass(frozen=True)
class Graph:
    """Undirected weighted graph on agents 0..n_agents-1, no self-loops."""

    n_agents: int
    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        if self.n_agents < 1:
            raise InputError(f"graph needs at least one agent, got {self.n_agents}")
        seen = set()
        norm_edges = []
        for e in self.edges:
            i, j, w = int(e[0]), int(e[1]), float(e[2])
            if not 0 <= i < j < self.n_agents:
                raise InputError(f"edge ({i}, {j}) must satisfy 0 <= i < j < {self.n_agents}")
            if (i, j) in seen:
                raise InputError(f"duplicate edge ({i}, {j})")
            if not (w > 0.0 and math.isfinite(w)):
                raise InputError(f"edge ({i}, {j}) weight {w} must be positive and finite")
            seen.add((i, j))
            norm_edges.append((i, j, w))
        object.__setattr__(self, "edges", tuple(norm_edges))

    @classmethod
    def complete(cls, n_agents: int, weight: float = 1.0) -> "Graph":
        return cls(n_agents, tuple((i, j, weight)
                                   for i in range(n_agents) for j in range(i + 1, n_agents)))

    @classmethod
    def cycle(cls, n_agents: int, weight: float = 1.0) -> "Graph":
        edges = [(i, i + 1, weight) for i in range(n_agents - 1)]
        if n_agents > 2:
            edges.append((0, n_agents - 1, weight))
        return cls(n_agents, tuple(edges))

    @classmethod
    def path(cls, n_agents: int, weight: float = 1.0) -> "Graph":
        return cls(n_agents, tuple((i, i + 1, weight) for i in range(n_agents - 1)))

    def neighbors(self, i: int) -> list[tuple[int, float]]:
        out = []
        for a, b, w in self.edges:
            if a == i:
                out.append((b, w))
            elif b == i:
                out.append((a, w))
        return out

    def adjacency_matrix(self) -> np.ndarray:
        m = np.zeros((self.n_agents, self.n_agents))
        for i, j, w in self.edges:
            m[i, j] = m[j, i] = w
        return m

    def laplacian(self) -> np.ndarray:
        a = self.adjacency_matrix()
        return np.diag(a.sum(axis=1)) - a


def is_connected(g: Graph) -> bool:
    """Union-find connectivity over the undirected edges."""
    parent = list(range(g.n_agents))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    components = g.n_agents
    for i, j, _ in g.edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            components -= 1
    return components == 1


@dataclass(frozen=True)
class SwitchingSignal:
    """Piecewise-constant selection of a graph index over time."""

    switch_times: tuple[float, ...]
    graph_indices: tuple[int, ...]

    def __post_init__(self):
        times = tuple(float(t) for t in self.switch_times)
        indices = tuple(int(i) for i in self.graph_indices)
        if len(times) == 0:
            raise InputError("signal needs at least one interval")
        if len(times) != len(indices):
            raise InputError(
                f"{len(times)} switch times vs {len(indices)} graph indices")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise InputError("switch times must be strictly increasing")
        if any(i < 0 for i in indices):
            raise InputError("graph indices must be nonnegative")
        object.__setattr__(self, "switch_times", times)
        object.__setattr__(self, "graph_indices", indices)

    @property
    def start_time(self) -> float:
        return self.switch_times[0]


@dataclass(frozen=True)
class DwellTimeSpec:
    """Either a fixed minimum gap tau_d, or the average constraint
    N(tau, t) <= n0 + (t - tau)/tau_a."""

    mode: str
    tau_d: float = 0.0
    n0: float = 0.0
    tau_a: float = 0.0

    def __post_init__(self):
        if self.mode == "fixed_dwell":
            if not self.tau_d > 0.0:
                raise InputError(f"fixed dwell needs tau_d > 0, got {self.tau_d}")
        elif self.mode == "average_dwell":
            if not self.n0 >= 1.0:
                raise InputError(f"average dwell needs n0 >= 1, got {self.n0}")
            if not self.tau_a > 0.0:
                raise InputError(f"average dwell needs tau_a > 0, got {self.tau_a}")
        else:
            raise InputError(f"unknown dwell mode {self.mode!r}")

    @classmethod
    def fixed(cls, tau_d: float) -> "DwellTimeSpec":
        return cls("fixed_dwell", tau_d=float(tau_d))

    @classmethod
    def average(cls, n0: float, tau_a: float) -> "DwellTimeSpec":
        return cls("average_dwell", n0=float(n0), tau_a=float(tau_a))


def active_graph(sig: SwitchingSignal, t: float) -> int:
    """Graph index active at time t; right-continuous at switch instants."""
    if t < sig.switch_times[0]:
        raise InputError(f"t = {t} precedes the signal start {sig.switch_times[0]}")
    return sig.graph_indices[bisect_right(sig.switch_times, t) - 1]


def count_switches(sig: SwitchingSignal, tau: float, t: float) -> int:
    """Number of switch times s with tau < s <= t."""
    if tau > t:
        raise InputError(f"need tau <= t, got tau = {tau} > t = {t}")
    return bisect_right(sig.switch_times, t) - bisect_right(sig.switch_times, tau)


@dataclass(frozen=True)
class DwellReport:
    ok: bool
    worst_pair: tuple[float, float] | None
    margin: float


def validate_dwell(sig: SwitchingSignal, spec: DwellTimeSpec, horizon: float) -> DwellReport:
    """Check the signal against its dwell spec up to `horizon`.

    Fixed mode: every gap between consecutive listed times must be >= tau_d
    (margin in seconds). Average mode: for every pair of discontinuities
    d_a <= d_b within the horizon, the count of discontinuities in [d_a, d_b]
    must be <= n0 + (d_b - d_a)/tau_a (margin in switch counts). The closed
    interval captures the supremum of the counting inequality, which is
    approached as tau tends to a discontinuity from the left.
    """
    times = [t for t in sig.switch_times if t <= horizon]
    if spec.mode == "fixed_dwell":
        if len(times) < 2:
            return DwellReport(ok=True, worst_pair=None, margin=math.inf)
        gaps = [(b - a, (a, b)) for a, b in zip(times, times[1:])]
        worst_gap, worst_pair = min(gaps, key=lambda g: g[0])
        margin = worst_gap - spec.tau_d
        return DwellReport(ok=margin >= 0.0, worst_pair=worst_pair, margin=margin)

    disc = times[1:]  # discontinuities; times[0] is the signal start
    if not disc:
        return DwellReport(ok=True, worst_pair=None, margin=math.inf)
    margin = math.inf
    worst = None
    for a in range(len(disc)):
        for b in range(a, len(disc)):
            count = b - a + 1
            slack = spec.n0 + (disc[b] - disc[a]) / spec.tau_a - count
            if slack < margin:
                margin = slack
                worst = (disc[a], disc[b])
    return DwellReport(ok=margin >= 0.0, worst_pair=worst, margin=margin)


def generate_switching_signal(seed: int, n_graphs: int, spec: DwellTimeSpec,
                              horizon: float, start_time: float = 0.0) -> SwitchingSignal:
    """Random signal satisfying `spec` on [start_time, horizon], deterministic in seed.

    Indices are uniform with no immediate repetition when n_graphs > 1. The
    average-dwell generator emits occasional bursts and pushes any switch that
    would break the counting inequality to the earliest feasible instant.
    """
    if n_graphs < 1:
        raise InputError(f"n_graphs must be >= 1, got {n_graphs}")
    if horizon <= start_time:
        raise SignalConstructionError(
            f"horizon {horizon} leaves no room after start time {start_time}")
    rng = np.random.default_rng(seed)
    if n_graphs == 1:
        return SwitchingSignal((start_time,), (0,))

    times = [start_time]
    if spec.mode == "fixed_dwell":
        t = start_time
        while True:
            t = t + spec.tau_d * (1.0 + 1.5 * rng.random())
            if t > horizon:
                break
            times.append(t)
    else:
        tau_a, n0 = spec.tau_a, spec.n0
        disc: list[float] = []
        t = start_time
        while True:
            if disc and rng.random() < 0.35:
                gap = 0.05 * tau_a * (1.0 + rng.random())  # burst
            else:
                gap = tau_a * (0.9 + 1.2 * rng.random())
            candidate = t + gap
            # earliest instant keeping every closed-pair count within budget:
            # adding the switch makes m - k + 1 switches in [disc[k], candidate]
            m = len(disc)
            for k, dk in enumerate(disc):
                need = m - k + 1 - n0
                if need > 0:
                    candidate = max(candidate, dk + tau_a * need + 1e-9)
            if disc:
                candidate = max(candidate, disc[-1] + 1e-9)
            if candidate > horizon:
                break
            disc.append(candidate)
            t = candidate
        times.extend(disc)

    indices = [int(rng.integers(n_graphs))]
    for _ in range(len(times) - 1):
        indices.append((indices[-1] + 1 + int(rng.integers(n_graphs - 1))) % n_graphs)
    return SwitchingSignal(tuple(times), tuple(indices))


def random_connected_graph(rng: np.random.Generator, n_agents: int, edge_prob: float = 0.5,
                           weight_range: tuple[float, float] = (1.0, 1.0)) -> Graph:
    """Erdos-Renyi sample, resampled until connected; weights uniform in range."""
    if n_agents == 1:
        return Graph(1, ())
    lo, hi = weight_range
    while True:
        edges = []
        for i in range(n_agents):
            for j in range(i + 1, n_agents):
                if rng.random() < edge_prob:
                    edges.append((i, j, float(lo + (hi - lo) * rng.random())))
        g = Graph(n_agents, tuple(edges))
        if is_connected(g):
            return g
