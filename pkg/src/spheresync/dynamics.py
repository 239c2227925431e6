"""Closed-loop dynamics: the neighbor-coupling law on S^n and its integrator.

Each agent moves along the tangent projection of its neighbors, weighted by
w(theta) = f'(theta)/sin(theta), which makes the stacked law the negative
Riemannian gradient of V = sum over edges of a_ij f(theta_ij). Updates are
synchronous (all controls from the pre-step state) and advance with the
sphere exponential map, so norms are preserved to round-off.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DwellSpecViolationError, InputError, SingularConfigurationError
from .manifold import (ANTIPODAL_COS_TOL, Quaternion, RotationMatrix, TangentVector,
                       UnitVector, quat_to_rotmat, reduced_attitude)
from .network import DwellTimeSpec, Graph, SwitchingSignal, active_graph, validate_dwell
from .shaping import DistanceFunction

MODES = ("generic_sn", "so3_complete_via_s3", "so3_incomplete_via_s2", "rn_consensus_via_sn")

# Per-step Lyapunov increase beyond MONOTONICITY_TOL_PER_DT * dt counts as a violation.
MONOTONICITY_TOL_PER_DT = 1e-8


@dataclass(frozen=True, eq=False)
class AgentStates:
    """Stacked agent states: N points on a common S^n, plus the current time."""

    states: tuple[UnitVector, ...]
    time: float = 0.0

    def __post_init__(self):
        states = tuple(self.states)
        if not states:
            raise InputError("need at least one agent")
        dims = {x.dim for x in states}
        if len(dims) != 1:
            raise InputError(f"agents live on different spheres: dims {sorted(dims)}")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "time", float(self.time))

    @classmethod
    def from_matrix(cls, m: np.ndarray, time: float = 0.0) -> "AgentStates":
        return cls(tuple(UnitVector(row) for row in np.asarray(m, dtype=np.float64)), time)

    def as_matrix(self) -> np.ndarray:
        return np.stack([x.coords for x in self.states])

    @property
    def n_agents(self) -> int:
        return len(self.states)

    @property
    def sphere_dim(self) -> int:
        return self.states[0].dim

    def __eq__(self, other) -> bool:
        if not isinstance(other, AgentStates):
            return NotImplemented
        return self.time == other.time and self.states == other.states


@dataclass(frozen=True)
class Scenario:
    """Everything a run needs: network, shaping, initial condition, clocks."""

    sphere_dim: int
    n_agents: int
    graphs: tuple[Graph, ...]
    signal: SwitchingSignal
    shaping: DistanceFunction
    init: AgentStates
    dt: float
    horizon: float
    mode: str = "generic_sn"
    dwell: DwellTimeSpec | None = None
    embed_radius: float | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise InputError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if not self.dt > 0.0:
            raise InputError(f"dt must be > 0, got {self.dt}")
        if not self.horizon > 0.0:
            raise InputError(f"horizon must be > 0, got {self.horizon}")
        if self.mode == "so3_complete_via_s3" and self.sphere_dim != 3:
            raise InputError("so3_complete_via_s3 requires sphere_dim = 3")
        if self.mode == "so3_incomplete_via_s2" and self.sphere_dim != 2:
            raise InputError("so3_incomplete_via_s2 requires sphere_dim = 2")
        if self.sphere_dim < 1:
            raise InputError(f"sphere_dim must be >= 1, got {self.sphere_dim}")
        if self.init.sphere_dim != self.sphere_dim:
            raise InputError(
                f"initial states live on S^{self.init.sphere_dim}, scenario wants S^{self.sphere_dim}")
        if self.init.n_agents != self.n_agents:
            raise InputError(
                f"{self.init.n_agents} initial states for {self.n_agents} agents")
        if not self.graphs:
            raise InputError("scenario needs at least one graph")
        for k, g in enumerate(self.graphs):
            if g.n_agents != self.n_agents:
                raise InputError(f"graph {k} has {g.n_agents} agents, scenario has {self.n_agents}")
        if max(self.signal.graph_indices) >= len(self.graphs):
            raise InputError("signal references a graph index outside the library")
        if self.signal.start_time != self.init.time:
            raise InputError(
                f"signal starts at {self.signal.start_time}, initial states at {self.init.time}")
        if self.mode == "rn_consensus_via_sn":
            if self.embed_radius is None or not self.embed_radius > 0.0:
                raise InputError("rn_consensus_via_sn requires embed_radius > 0")

    @property
    def end_time(self) -> float:
        return self.init.time + self.horizon


@dataclass(frozen=True)
class TraceEvent:
    time: float
    kind: str
    detail: str


@dataclass
class Trace:
    """Time-indexed record of a run."""

    times: np.ndarray          # (T,)
    states: np.ndarray         # (T, N, n+1)
    graph_index: np.ndarray    # (T,) int
    lyapunov: np.ndarray       # (T,)
    sync_error: np.ndarray     # (T,)
    events: list[TraceEvent] = field(default_factory=list)
    monotonicity_violations: int = 0
    truncated: bool = False

    def agent_states(self, k: int) -> AgentStates:
        return AgentStates.from_matrix(self.states[k], float(self.times[k]))

    @property
    def final_states(self) -> AgentStates:
        return self.agent_states(len(self.times) - 1)


def control_law(i: int, s: AgentStates, g: Graph, d: DistanceFunction) -> TangentVector:
    """Coupling input for agent i: sum of weighted tangent projections of its neighbors."""
    if not 0 <= i < s.n_agents:
        raise InputError(f"agent index {i} out of range for {s.n_agents} agents")
    if g.n_agents != s.n_agents:
        raise InputError(f"graph has {g.n_agents} agents, states have {s.n_agents}")
    x = s.states[i].coords
    u = np.zeros_like(x)
    for j, a_ij in g.neighbors(i):
        y = s.states[j].coords
        c = float(np.dot(x, y))
        if c <= -1.0 + ANTIPODAL_COS_TOL:
            raise SingularConfigurationError(
                f"agents {i} and {j} are antipodal; the coupling direction is undefined")
        theta = float(np.arccos(np.clip(c, -1.0, 1.0)))
        u += a_ij * d.coupling_weight(theta) * (y - c * x)
    u -= np.dot(x, u) * x  # re-project to keep tangency at round-off level
    return TangentVector(s.states[i], u)


def _eval_state(X: np.ndarray, adj: np.ndarray, shaping: DistanceFunction):
    """Controls, Lyapunov value and sync error of one state, in a single pass."""
    G = np.clip(X @ X.T, -1.0, 1.0)
    mask = adj > 0.0
    if np.any(G[mask] <= -1.0 + ANTIPODAL_COS_TOL):
        raise SingularConfigurationError("an antipodal neighbor pair was reached")
    theta = np.arccos(G)
    np.fill_diagonal(theta, 0.0)  # self-distance is 0 by definition, not arccos(1 - eps)
    with np.errstate(divide="ignore", invalid="ignore"):
        w = np.where(mask, adj * shaping.coupling_weight(theta), 0.0)
    U = w @ X - (w * G).sum(axis=1)[:, None] * X
    V = 0.5 * float(np.where(mask, adj * shaping.value(theta), 0.0).sum())
    sync = float(theta.max())
    return U, V, sync


def _exp_step(X: np.ndarray, U: np.ndarray, dt: float) -> np.ndarray:
    s = dt * np.linalg.norm(U, axis=1)
    Xn = np.cos(s)[:, None] * X + (dt * np.sinc(s / np.pi))[:, None] * U
    return Xn / np.linalg.norm(Xn, axis=1)[:, None]


def step(s: AgentStates, g: Graph, d: DistanceFunction, dt: float) -> AgentStates:
    """One synchronous geometric Euler step of the closed loop."""
    if not dt > 0.0:
        raise InputError(f"dt must be > 0, got {dt}")
    if g.n_agents != s.n_agents:
        raise InputError(f"graph has {g.n_agents} agents, states have {s.n_agents}")
    X = s.as_matrix()
    U, _, _ = _eval_state(X, g.adjacency_matrix(), d)
    return AgentStates.from_matrix(_exp_step(X, U, dt), s.time + dt)


def simulate(sc: Scenario) -> Trace:
    """Integrate the scenario from its initial time to the horizon.

    The step grid lands exactly on every switch time, the active graph is
    right-continuous, and the per-step Lyapunov decrease is monitored against
    the integrator tolerance. Raises DwellSpecViolationError before touching
    the state if the scenario carries a dwell spec its signal violates.
    """
    t0, end = sc.init.time, sc.end_time
    if sc.dwell is not None:
        rep = validate_dwell(sc.signal, sc.dwell, end)
        if not rep.ok:
            raise DwellSpecViolationError(
                f"signal violates its dwell spec: worst pair {rep.worst_pair}, "
                f"margin {rep.margin}")

    events: list[TraceEvent] = []
    init = sc.init
    if sc.mode == "so3_complete_via_s3":
        alignment = quaternion_sign_align(init, sc.graphs[active_graph(sc.signal, t0)])
        if not alignment.aligned:
            events.append(TraceEvent(t0, "sign_alignment_failed",
                                     "no sign assignment makes all edge inner products >= 0"))
        init = alignment.states

    adjs = [g.adjacency_matrix() for g in sc.graphs]
    disc = sorted({d for d in sc.signal.switch_times[1:] if t0 < d <= end})
    breaks = [t0] + disc + ([end] if (not disc or disc[-1] < end) else [])

    times: list[float] = []
    state_rows: list[np.ndarray] = []
    gidx: list[int] = []
    lyap: list[float] = []
    sync: list[float] = []
    violations = 0
    truncated = False
    step_tol = MONOTONICITY_TOL_PER_DT * sc.dt

    def record(t: float, X: np.ndarray, gi: int, V: float, S: float):
        times.append(t)
        state_rows.append(X.copy())
        gidx.append(gi)
        lyap.append(V)
        sync.append(S)

    X = init.as_matrix()
    for a, b in zip(breaks, breaks[1:]):
        gi = active_graph(sc.signal, a)
        adj = adjs[gi]
        if a > t0:
            events.append(TraceEvent(a, "switch", f"graph {gi} becomes active"))
        try:
            U, V, S = _eval_state(X, adj, sc.shaping)
        except SingularConfigurationError as exc:
            record(a, X, gi, float("nan"), float("nan"))
            events.append(TraceEvent(a, "singular_configuration", str(exc)))
            truncated = True
            break
        record(a, X, gi, V, S)
        t = a
        k = 0
        while t < b:
            k += 1
            t_next = a + k * sc.dt
            if t_next > b or b - t_next < 1e-9 * sc.dt:
                t_next = b
            X_new = _exp_step(X, U, t_next - t)
            try:
                U_new, V_new, S_new = _eval_state(X_new, adj, sc.shaping)
            except SingularConfigurationError as exc:
                record(t_next, X_new, gi, float("nan"), float("nan"))
                events.append(TraceEvent(t_next, "singular_configuration", str(exc)))
                truncated = True
                break
            if V_new - V > step_tol:
                violations += 1
                events.append(TraceEvent(
                    t_next, "monotonicity_violation",
                    f"Lyapunov rose by {V_new - V:.3e} under graph {gi}"))
            X, U, V, S = X_new, U_new, V_new, S_new
            t = t_next
            if t < b:
                record(t, X, gi, V, S)
        if truncated:
            break
    else:
        final_gi = active_graph(sc.signal, end)
        _, V, S = _eval_state(X, adjs[final_gi], sc.shaping)
        record(end, X, final_gi, V, S)

    return Trace(
        times=np.array(times),
        states=np.stack(state_rows),
        graph_index=np.array(gidx, dtype=np.int64),
        lyapunov=np.array(lyap),
        sync_error=np.array(sync),
        events=events,
        monotonicity_violations=violations,
        truncated=truncated,
    )


def lift_so3_complete(quats: AgentStates) -> list[RotationMatrix]:
    """Element-wise covering map of S^3 states into rotation matrices."""
    if quats.sphere_dim != 3:
        raise InputError(f"quaternion states must live on S^3, got S^{quats.sphere_dim}")
    return [quat_to_rotmat(Quaternion.from_array(x.coords)) for x in quats.states]


def project_so3_incomplete(rots: list[RotationMatrix], b: UnitVector,
                           time: float = 0.0) -> AgentStates:
    """Element-wise reduced attitudes R_i b, as S^2 states."""
    return AgentStates(tuple(reduced_attitude(R, b) for R in rots), time)


@dataclass(frozen=True)
class SignAlignment:
    states: AgentStates
    aligned: bool
    flipped: tuple[bool, ...]


def quaternion_sign_align(s: AgentStates, g: Graph) -> SignAlignment:
    """Flip individual quaternion signs so every edge inner product is >= 0.

    Sign flips do not change the represented rotations. Propagates signs over
    the subgraph of edges with nonzero inner product and verifies the result;
    when no assignment exists (an unbalanced cycle), returns the input
    unchanged with aligned=False.
    """
    if s.sphere_dim != 3:
        raise InputError(f"quaternion states must live on S^3, got S^{s.sphere_dim}")
    if g.n_agents != s.n_agents:
        raise InputError(f"graph has {g.n_agents} agents, states have {s.n_agents}")
    X = s.as_matrix()
    n = s.n_agents
    inner = {}
    adj: list[list[int]] = [[] for _ in range(n)]
    for i, j, _ in g.edges:
        rho = float(np.dot(X[i], X[j]))
        inner[(i, j)] = rho
        if rho != 0.0:
            adj[i].append(j)
            adj[j].append(i)

    signs = [0] * n
    for root in range(n):
        if signs[root] != 0:
            continue
        signs[root] = 1
        queue = [root]
        while queue:
            i = queue.pop()
            for j in adj[i]:
                if signs[j] == 0:
                    rho = inner.get((i, j) if i < j else (j, i), 0.0)
                    signs[j] = signs[i] * (1 if rho > 0.0 else -1)
                    queue.append(j)

    for (i, j), rho in inner.items():
        if signs[i] * signs[j] * rho < 0.0:
            return SignAlignment(states=s, aligned=False, flipped=(False,) * n)

    flipped = tuple(sig < 0 for sig in signs)
    if not any(flipped):
        return SignAlignment(states=s, aligned=True, flipped=flipped)
    new_states = tuple(
        UnitVector(-x.coords) if flip else x for x, flip in zip(s.states, flipped))
    return SignAlignment(states=AgentStates(new_states, s.time), aligned=True, flipped=flipped)
