"""Graphs, switching signals, dwell-time validation and generation."""
from __future__ import annotations

import math

import numpy as np
import pytest

from spheresync import (DwellTimeSpec, Graph, InputError, SignalConstructionError,
                        SwitchingSignal, active_graph, count_switches,
                        generate_switching_signal, is_connected, random_connected_graph,
                        validate_dwell)

from conftest import bfs_connected


def dense_grid_dwell_oracle(sig: SwitchingSignal, spec: DwellTimeSpec, horizon: float,
                            step: float = 1e-3) -> bool:
    """Independent dwell verdict from a dense time grid.

    Fixed mode: recover switch instants by scanning active_graph over the grid
    and measure the gaps. Average mode: test the counting inequality over all
    grid pairs (tau, t); with phi(u) = N(start, u) - u/tau_a the pair condition
    N(tau, t) <= n0 + (t - tau)/tau_a for all tau <= t is exactly
    max_t [phi(t) - min_{tau <= t} phi(tau)] <= n0.
    """
    t0 = sig.switch_times[0]
    grid = np.arange(t0, horizon + step / 2, step)
    grid = np.unique(np.concatenate([grid, [t for t in sig.switch_times if t <= horizon]]))
    if spec.mode == "fixed_dwell":
        idx = np.array([active_graph(sig, float(t)) for t in grid])
        changes = grid[1:][idx[1:] != idx[:-1]]
        if len(changes) < 1:
            return True
        instants = np.concatenate([[t0], changes])
        return bool(np.min(np.diff(instants)) >= spec.tau_d - 1e-12)
    counts = np.searchsorted(sig.switch_times, grid, side="right")
    phi = counts - grid / spec.tau_a
    worst = np.max(phi - np.minimum.accumulate(phi))
    return bool(worst <= spec.n0 + 1e-12)


def random_signal(rng, horizon: float = 10.0, n_graphs: int = 3) -> SwitchingSignal:
    """Random switch times with a mix of comfortable and tight gaps."""
    times = [0.0]
    while True:
        gap = float(rng.choice([0.04, 0.12, 0.35, 0.9])) * (0.8 + 0.4 * rng.random())
        nxt = times[-1] + gap
        if nxt > horizon:
            break
        times.append(nxt)
    indices = [int(rng.integers(n_graphs))]
    for _ in times[1:]:
        indices.append((indices[-1] + 1 + int(rng.integers(n_graphs - 1))) % n_graphs)
    return SwitchingSignal(tuple(times), tuple(indices))


class TestGraph:
    def test_edge_validation(self):
        with pytest.raises(InputError):
            Graph(3, ((0, 0, 1.0),))
        with pytest.raises(InputError):
            Graph(3, ((1, 0, 1.0),))
        with pytest.raises(InputError):
            Graph(3, ((0, 3, 1.0),))
        with pytest.raises(InputError):
            Graph(3, ((0, 1, 0.0),))
        with pytest.raises(InputError):
            Graph(3, ((0, 1, 1.0), (0, 1, 2.0)))

    def test_neighbors_and_laplacian(self):
        g = Graph(3, ((0, 1, 2.0), (1, 2, 3.0)))
        assert g.neighbors(1) == [(0, 2.0), (2, 3.0)]
        lap = g.laplacian()
        assert np.allclose(lap, lap.T)
        assert np.allclose(lap.sum(axis=1), 0.0)


class TestConnectivity:
    def test_complete_graph_connected(self):
        assert is_connected(Graph.complete(4))

    def test_two_disjoint_edges_disconnected(self):
        assert not is_connected(Graph(4, ((0, 1, 1.0), (2, 3, 1.0))))

    def test_single_node(self):
        assert is_connected(Graph(1, ()))

    def test_matches_bfs_oracle(self, rng):
        for _ in range(200):
            edges = tuple((i, j, 1.0) for i in range(8) for j in range(i + 1, 8)
                          if rng.random() < 0.5)
            g = Graph(8, edges)
            assert is_connected(g) == bfs_connected(8, edges)


class TestActiveGraph:
    SIG = SwitchingSignal((0.0, 1.0, 2.0), (0, 1, 2))

    def test_interior_lookup(self):
        assert active_graph(self.SIG, 0.5) == 0

    def test_right_continuity_at_switch(self):
        assert active_graph(self.SIG, 1.0) == 1

    def test_before_start(self):
        with pytest.raises(InputError):
            active_graph(self.SIG, -0.1)

    def test_matches_linear_scan(self, rng):
        sig = random_signal(rng)
        for _ in range(1000):
            t = float(rng.uniform(0.0, 12.0))
            want = sig.graph_indices[0]
            for k, s in enumerate(sig.switch_times):
                if s <= t:
                    want = sig.graph_indices[k]
            assert active_graph(sig, t) == want


class TestCountSwitches:
    SIG = SwitchingSignal((0.0, 1.0, 2.0, 3.0), (0, 1, 0, 1))

    def test_empty_interval(self):
        assert count_switches(self.SIG, 1.5, 1.5) == 0

    def test_half_open_convention(self):
        assert count_switches(self.SIG, 0.5, 2.5) == 2

    def test_rejects_reversed_interval(self):
        with pytest.raises(InputError):
            count_switches(self.SIG, 2.0, 1.0)

    def test_matches_brute_force(self, rng):
        for _ in range(50):
            sig = random_signal(rng)
            for _ in range(20):
                a, b = sorted(rng.uniform(-1.0, 12.0, size=2))
                want = sum(1 for s in sig.switch_times if a < s <= b)
                assert count_switches(sig, float(a), float(b)) == want

    def test_additivity(self, rng):
        sig = random_signal(rng)
        for _ in range(200):
            tau, s, t = sorted(rng.uniform(0.0, 12.0, size=3))
            assert (count_switches(sig, tau, s) + count_switches(sig, s, t)
                    == count_switches(sig, tau, t))


class TestValidateDwell:
    def test_no_switches_is_always_ok(self):
        sig = SwitchingSignal((0.0,), (0,))
        for spec in (DwellTimeSpec.fixed(5.0), DwellTimeSpec.average(1.0, 5.0)):
            report = validate_dwell(sig, spec, 100.0)
            assert report.ok
            assert report.margin == math.inf
            assert report.worst_pair is None

    def test_fixed_gap_violation(self):
        sig = SwitchingSignal((0.0, 0.05, 0.2), (0, 1, 0))
        report = validate_dwell(sig, DwellTimeSpec.fixed(0.1), 1.0)
        assert not report.ok
        assert report.worst_pair == (0.0, 0.05)
        assert report.margin == pytest.approx(-0.05)

    def test_average_left_limit_violation(self):
        # passes the naive half-open check at switch times, but the supremum
        # as tau -> 1.0- violates the inequality; the dense grid agrees
        sig = SwitchingSignal((0.0, 1.0, 1.5), (0, 1, 0))
        spec = DwellTimeSpec.average(1.0, 1.0)
        report = validate_dwell(sig, spec, 2.0)
        assert not report.ok
        assert report.worst_pair == (1.0, 1.5)
        assert not dense_grid_dwell_oracle(sig, spec, 2.0)

    def test_average_burst_within_budget(self):
        sig = SwitchingSignal((0.0, 1.0, 1.1, 1.2, 4.0), (0, 1, 0, 1, 0))
        spec = DwellTimeSpec.average(3.0, 1.0)
        report = validate_dwell(sig, spec, 5.0)
        assert report.ok
        assert dense_grid_dwell_oracle(sig, spec, 5.0)

    def test_verdicts_match_dense_grid(self, rng):
        for _ in range(60):
            sig = random_signal(rng)
            if rng.random() < 0.5:
                spec = DwellTimeSpec.fixed(float(rng.choice([0.02, 0.1, 0.3])))
            else:
                spec = DwellTimeSpec.average(float(rng.integers(1, 4)),
                                             float(rng.choice([0.1, 0.3, 0.8])))
            assert validate_dwell(sig, spec, 10.0).ok == dense_grid_dwell_oracle(
                sig, spec, 10.0), (sig.switch_times, spec)


class TestGenerateSwitchingSignal:
    def test_single_graph_means_single_interval(self):
        sig = generate_switching_signal(0, 1, DwellTimeSpec.fixed(0.1), 10.0)
        assert sig.switch_times == (0.0,)
        assert sig.graph_indices == (0,)

    def test_fixed_dwell_pigeonhole(self):
        sig = generate_switching_signal(3, 4, DwellTimeSpec.fixed(0.1), 1.0)
        assert len(sig.switch_times) <= 11

    def test_self_validation_over_seeds(self):
        for seed in range(100):
            spec = (DwellTimeSpec.fixed(0.2) if seed % 2 == 0
                    else DwellTimeSpec.average(3.0, 0.4))
            sig = generate_switching_signal(seed, 3, spec, 20.0)
            assert validate_dwell(sig, spec, 20.0).ok

    def test_reproducible(self):
        spec = DwellTimeSpec.average(2.0, 0.3)
        a = generate_switching_signal(7, 5, spec, 15.0)
        b = generate_switching_signal(7, 5, spec, 15.0)
        assert a == b

    def test_no_immediate_repetition(self):
        sig = generate_switching_signal(11, 2, DwellTimeSpec.fixed(0.05), 30.0)
        assert all(a != b for a, b in zip(sig.graph_indices, sig.graph_indices[1:]))

    def test_infeasible_horizon(self):
        with pytest.raises(SignalConstructionError):
            generate_switching_signal(0, 2, DwellTimeSpec.fixed(0.1), 0.0)


def test_fixed_implies_average(rng):
    # standard implication: fixed dwell tau_d gives average dwell (1, tau_d)
    checked = 0
    for seed in range(200):
        sig = generate_switching_signal(seed, 3, DwellTimeSpec.fixed(0.15), 10.0)
        assert validate_dwell(sig, DwellTimeSpec.average(1.0, 0.15), 10.0).ok
        checked += 1
        if checked >= 100:
            break


def test_random_connected_graph_is_connected(rng):
    for _ in range(20):
        g = random_connected_graph(rng, int(rng.integers(2, 11)), edge_prob=0.4,
                                   weight_range=(0.5, 2.0))
        assert is_connected(g)
        assert all(0.5 <= w <= 2.0 for _, _, w in g.edges)
