"""Runtime certificates: Lyapunov evaluation, sync diagnostics, hemisphere
containment, the planar-consensus casting, and the end-to-end verdict."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import AgentStates, Scenario, Trace, simulate
from .errors import DegenerateConfigurationError, InputError, SingularProjectionError
from .manifold import UnitVector, geodesic_distance
from .network import DwellReport, Graph, SwitchingSignal, is_connected, validate_dwell
from .shaping import DistanceFunction


def lyapunov_value(s: AgentStates, g: Graph, d: DistanceFunction) -> float:
    """Edge sum of the reshaped geodesic distances: V = sum a_ij f(theta_ij)."""
    if g.n_agents != s.n_agents:
        raise InputError(f"graph has {g.n_agents} agents, states have {s.n_agents}")
    total = 0.0
    for i, j, w in g.edges:
        total += w * d.value(geodesic_distance(s.states[i], s.states[j]))
    return total


def sync_error(s: AgentStates) -> float:
    """Maximum pairwise geodesic distance; zero iff fully synchronized."""
    m = s.as_matrix()
    theta = np.arccos(np.clip(m @ m.T, -1.0, 1.0))
    np.fill_diagonal(theta, 0.0)
    return float(theta.max())


@dataclass(frozen=True)
class HemisphereCertificate:
    certified: bool
    pole: UnitVector | None
    min_inner: float


def hemisphere_certificate(s: AgentStates) -> HemisphereCertificate:
    """One-sided containment check via the normalized Euclidean mean.

    Certifies an open hemisphere (pole = normalized mean) when every state has
    positive inner product with the pole; an uncertified result is
    inconclusive, not a disproof.
    """
    m = s.as_matrix()
    mean = m.mean(axis=0)
    norm = float(np.linalg.norm(mean))
    if norm <= 1e-14:
        raise DegenerateConfigurationError(
            "states have zero Euclidean mean; no hemisphere pole can be extracted")
    pole = UnitVector(mean / norm)
    min_inner = float((m @ pole.coords).min())
    if min_inner > 0.0:
        return HemisphereCertificate(certified=True, pole=pole, min_inner=min_inner)
    return HemisphereCertificate(certified=False, pole=None, min_inner=min_inner)


def consensus_embed(z, radius_param: float, time: float = 0.0) -> AgentStates:
    """Inverse stereographic embedding of planar points into S^n.

    x = (2 rho z, rho^2 - |z|^2) / (rho^2 + |z|^2); the origin maps to the
    north pole and |z| < rho stays strictly inside the upper hemisphere.
    """
    if not radius_param > 0.0:
        raise InputError(f"radius_param must be > 0, got {radius_param}")
    zs = np.atleast_2d(np.asarray(z, dtype=np.float64))
    if zs.ndim != 2:
        raise InputError(f"expected a list of vectors, got array of shape {zs.shape}")
    rho = float(radius_param)
    states = []
    for row in zs:
        nsq = float(np.dot(row, row))
        denom = rho * rho + nsq
        coords = np.concatenate((2.0 * rho * row, [rho * rho - nsq])) / denom
        states.append(UnitVector.normalized(coords))
    return AgentStates(tuple(states), time)


def consensus_unembed(s: AgentStates, radius_param: float) -> np.ndarray:
    """Exact inverse of consensus_embed: z = rho u / (1 + x_last)."""
    if not radius_param > 0.0:
        raise InputError(f"radius_param must be > 0, got {radius_param}")
    rho = float(radius_param)
    out = []
    for x in s.states:
        last = float(x.coords[-1])
        if 1.0 + last <= 1e-15:
            raise SingularProjectionError("a state sits at the south pole")
        out.append(rho * x.coords[:-1] / (1.0 + last))
    return np.stack(out)


@dataclass(frozen=True)
class ConsensusComparison:
    max_deviation: float        # gap between the two agreement values at the horizon
    linear_disagreement: float  # max pairwise distance of the Laplacian flow at the horizon
    sphere_disagreement: float  # same metric for the unembedded sphere flow
    radius_param: float


def consensus_oracle_compare(z0, g: Graph, horizon: float, dt: float,
                             radius_param: float | None = None) -> ConsensusComparison:
    """Run Laplacian consensus and the embedded sphere flow side by side.

    Both systems must reach agreement; their transient paths are not required
    to coincide. The reported deviation compares the two agreement values
    (state means) at the horizon.
    """
    if not is_connected(g):
        raise InputError("consensus comparison requires a connected graph")
    zs = np.atleast_2d(np.asarray(z0, dtype=np.float64))
    if zs.shape[0] != g.n_agents:
        raise InputError(f"{zs.shape[0]} states for a graph on {g.n_agents} agents")
    if radius_param is None:
        diam = max(
            (float(np.linalg.norm(a - b)) for a in zs for b in zs), default=0.0)
        radius_param = 10.0 * diam if diam > 0.0 else 10.0

    # Laplacian flow, explicit Euler on the same grid.
    lap = g.laplacian()
    z = zs.copy()
    t = 0.0
    while t < horizon:
        h = min(dt, horizon - t)
        z = z - h * (lap @ z)
        t += h

    init = consensus_embed(zs, radius_param)
    sc = Scenario(
        sphere_dim=zs.shape[1], n_agents=g.n_agents, graphs=(g,),
        signal=SwitchingSignal((0.0,), (0,)), shaping=DistanceFunction.chordal(),
        init=init, dt=dt, horizon=horizon, mode="rn_consensus_via_sn",
        embed_radius=radius_param)
    trace = simulate(sc)
    z_sphere = consensus_unembed(trace.final_states, radius_param)

    def spread(m: np.ndarray) -> float:
        return max((float(np.linalg.norm(a - b)) for a in m for b in m), default=0.0)

    deviation = float(np.max(np.abs(z.mean(axis=0) - z_sphere.mean(axis=0))))
    return ConsensusComparison(
        max_deviation=deviation,
        linear_disagreement=spread(z),
        sphere_disagreement=spread(z_sphere),
        radius_param=radius_param,
    )


@dataclass(frozen=True)
class CertificateReport:
    """Hypothesis checks and conclusion metrics for one run."""

    graph_connected: tuple[bool, ...]
    active_graphs_connected: bool
    dwell: DwellReport
    dwell_inferred: bool
    hemisphere_certified: bool
    hemisphere_pole: UnitVector | None
    hemisphere_min_inner: float | None
    hypotheses_certified: bool
    epsilon: float
    final_sync_error: float
    time_to_epsilon: float | None
    monotonicity_violations: int
    truncated: bool
    verdict: str  # theorem_consistent | certificate_violation | hypotheses_not_certified


def certify(trace: Trace, sc: Scenario, epsilon: float = 1e-6) -> CertificateReport:
    """Package the theorem's hypotheses and conclusion as a report.

    Theorem-consistent means: every active graph connected, dwell spec
    satisfied, initial states certified inside an open hemisphere, and the
    sync error reached epsilon. Runs with uncertified hypotheses are neutral
    regardless of the outcome.
    """
    end = sc.end_time
    connected = tuple(is_connected(g) for g in sc.graphs)
    active = {gi for st, gi in zip(sc.signal.switch_times, sc.signal.graph_indices)
              if st <= end}
    active_ok = all(connected[gi] for gi in active)

    if sc.dwell is not None:
        dwell_report = validate_dwell(sc.signal, sc.dwell, end)
        dwell_inferred = False
    else:
        # Any finite switching signal has a positive dwell time; certify it
        # with the observed minimum gap as the margin.
        times = [t for t in sc.signal.switch_times if t <= end]
        if len(times) < 2:
            dwell_report = DwellReport(ok=True, worst_pair=None, margin=math.inf)
        else:
            gaps = [(b - a, (a, b)) for a, b in zip(times, times[1:])]
            gap, pair = min(gaps, key=lambda g: g[0])
            dwell_report = DwellReport(ok=True, worst_pair=pair, margin=gap)
        dwell_inferred = True

    try:
        hemi = hemisphere_certificate(sc.init)
    except DegenerateConfigurationError:
        hemi = HemisphereCertificate(certified=False, pole=None, min_inner=float("nan"))

    hypotheses = active_ok and dwell_report.ok and hemi.certified

    final_err = float(trace.sync_error[-1])
    synchronized = (not trace.truncated) and final_err <= epsilon
    time_to_eps = None
    if synchronized:
        below = np.nonzero(trace.sync_error <= epsilon)[0]
        time_to_eps = float(trace.times[below[0]])

    if not hypotheses:
        verdict = "hypotheses_not_certified"
    elif synchronized:
        verdict = "theorem_consistent"
    else:
        verdict = "certificate_violation"

    return CertificateReport(
        graph_connected=connected,
        active_graphs_connected=active_ok,
        dwell=dwell_report,
        dwell_inferred=dwell_inferred,
        hemisphere_certified=hemi.certified,
        hemisphere_pole=hemi.pole,
        hemisphere_min_inner=hemi.min_inner,
        hypotheses_certified=hypotheses,
        epsilon=float(epsilon),
        final_sync_error=final_err,
        time_to_epsilon=time_to_eps,
        monotonicity_violations=trace.monotonicity_violations,
        truncated=trace.truncated,
        verdict=verdict,
    )
