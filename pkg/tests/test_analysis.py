"""Certificates: Lyapunov, sync error, hemisphere, consensus casting, verdicts."""
from __future__ import annotations

import itertools

import numpy as np
import pytest

from spheresync import (AgentStates, DegenerateConfigurationError, DistanceFunction,
                        DwellTimeSpec, Graph, InputError, Scenario,
                        SingularProjectionError, SwitchingSignal, UnitVector, certify,
                        consensus_embed, consensus_oracle_compare, consensus_unembed,
                        generate_switching_signal, geodesic_distance,
                        hemisphere_certificate, lyapunov_value, random_connected_graph,
                        simulate, sync_error)

from conftest import cap_states, random_unit

CHORDAL = DistanceFunction.chordal()


class TestLyapunovValue:
    def test_synchronized_is_zero(self, rng):
        x = random_unit(rng, 2)
        s = AgentStates((x, x, x), 0.0)
        assert lyapunov_value(s, Graph.complete(3), CHORDAL) == 0.0

    def test_two_agent_closed_form(self):
        theta = 0.8
        s = AgentStates((UnitVector(np.array([1.0, 0.0])),
                         UnitVector(np.array([np.cos(theta), np.sin(theta)]))), 0.0)
        v = lyapunov_value(s, Graph.complete(2), CHORDAL)
        assert v == pytest.approx(1.0 - np.cos(theta), rel=1e-14)

    def test_matches_double_loop_oracle(self, rng):
        for _ in range(20):
            n = int(rng.integers(2, 8))
            s = cap_states(rng, 2, n, radius=1.0)
            g = random_connected_graph(rng, n, 0.6, (0.5, 2.0))
            d = DistanceFunction.power_chordal(2.0)
            want = 0.0
            for i in range(n):
                for j in range(i + 1, n):
                    weight = next((w for a, b, w in g.edges if (a, b) == (i, j)), 0.0)
                    want += weight * d.value(geodesic_distance(s.states[i], s.states[j]))
            assert abs(lyapunov_value(s, g, d) - want) <= 1e-12

    def test_rotation_invariance(self, rng):
        s = cap_states(rng, 2, 5, radius=1.0)
        g = random_connected_graph(rng, 5, 0.7)
        q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
        rotated = AgentStates(tuple(UnitVector.normalized(q @ x.coords)
                                    for x in s.states), 0.0)
        assert abs(lyapunov_value(rotated, g, CHORDAL)
                   - lyapunov_value(s, g, CHORDAL)) <= 1e-10


class TestSyncError:
    def test_single_agent(self, rng):
        assert sync_error(AgentStates((random_unit(rng, 3),), 0.0)) == 0.0

    def test_antipodal_pair(self):
        x = UnitVector(np.array([1.0, 0.0, 0.0]))
        assert sync_error(AgentStates((x, UnitVector(-x.coords)), 0.0)) == pytest.approx(np.pi)

    def test_matches_brute_force(self, rng):
        for _ in range(20):
            n = int(rng.integers(2, 9))
            s = cap_states(rng, 3, n, radius=1.3)
            want = max(geodesic_distance(a, b)
                       for a, b in itertools.combinations(s.states, 2))
            assert sync_error(s) == pytest.approx(want, abs=1e-15)

    def test_relabeling_invariance(self, rng):
        s = cap_states(rng, 2, 6, radius=1.0)
        perm = rng.permutation(6)
        shuffled = AgentStates(tuple(s.states[k] for k in perm), 0.0)
        assert sync_error(shuffled) == sync_error(s)


class TestHemisphereCertificate:
    def test_all_equal_certifies_that_state(self, rng):
        x = random_unit(rng, 2)
        cert = hemisphere_certificate(AgentStates((x, x, x), 0.0))
        assert cert.certified
        assert np.allclose(cert.pole.coords, x.coords, atol=1e-15)
        assert cert.min_inner == pytest.approx(1.0)

    def test_antipodal_pair_is_degenerate(self):
        x = UnitVector(np.array([1.0, 0.0]))
        with pytest.raises(DegenerateConfigurationError):
            hemisphere_certificate(AgentStates((x, UnitVector(-x.coords)), 0.0))

    def test_cap_sample_certifies(self, rng):
        s = cap_states(rng, 2, 20, radius=0.7)
        cert = hemisphere_certificate(s)
        assert cert.certified
        assert cert.min_inner > 0.0
        # the certificate is re-evaluable exactly as reported
        m = s.as_matrix()
        assert cert.min_inner == pytest.approx(float((m @ cert.pole.coords).min()))

    def test_spread_states_are_uncertified(self):
        states = (UnitVector(np.array([1.0, 0.0, 0.0])),
                  UnitVector(np.array([0.0, 1.0, 0.0])),
                  UnitVector(np.array([-1.0, 0.0, 0.0])))
        cert = hemisphere_certificate(AgentStates(states, 0.0))
        assert not cert.certified
        assert cert.pole is None


class TestConsensusEmbedding:
    def test_origin_maps_to_north_pole(self):
        s = consensus_embed([[0.0, 0.0]], 5.0)
        assert np.array_equal(s.states[0].coords, [0.0, 0.0, 1.0])

    def test_radius_lands_on_equator(self):
        s = consensus_embed([[3.0, 4.0]], 5.0)
        assert s.states[0].coords[-1] == 0.0

    def test_beyond_radius_leaves_upper_hemisphere(self):
        # allowed, but lands below the equator (the certificate would flag it)
        s = consensus_embed([[6.0, 8.0]], 5.0)
        assert s.states[0].coords[-1] < 0.0

    def test_round_trip(self, rng):
        rho = 7.0
        z = rng.uniform(-0.9, 0.9, size=(1000, 3)) * rho / np.sqrt(3)
        back = consensus_unembed(consensus_embed(z, rho), rho)
        assert np.max(np.abs(back - z)) <= 1e-10

    def test_agreement_iff_equal_embeddings(self, rng):
        z = rng.uniform(-1, 1, size=2)
        s = consensus_embed([z, z, z], 10.0)
        m = s.as_matrix()
        assert np.array_equal(m[0], m[1]) and np.array_equal(m[0], m[2])
        assert sync_error(s) == 0.0
        t = consensus_embed([z, z + 1e-9], 10.0).as_matrix()
        assert not np.array_equal(t[0], t[1])

    def test_odd_symmetry_of_planar_part(self, rng):
        z = rng.uniform(-1, 1, size=(1, 2))
        plus = consensus_embed(z, 4.0).states[0].coords
        minus = consensus_embed(-z, 4.0).states[0].coords
        assert np.allclose(plus[:-1], -minus[:-1], atol=1e-15)
        assert plus[-1] == minus[-1]

    def test_unembed_rejects_south_pole(self):
        s = AgentStates((UnitVector(np.array([0.0, 0.0, -1.0])),), 0.0)
        with pytest.raises(SingularProjectionError):
            consensus_unembed(s, 5.0)

    def test_embed_rejects_bad_radius(self):
        with pytest.raises(InputError):
            consensus_embed([[1.0]], 0.0)


class TestConsensusOracleCompare:
    def test_equal_states_stay_equal(self):
        z0 = [[0.3, -0.2]] * 4
        out = consensus_oracle_compare(z0, Graph.complete(4), horizon=5.0, dt=0.01,
                                       radius_param=10.0)
        assert out.max_deviation <= 1e-12
        assert out.linear_disagreement <= 1e-12
        assert out.sphere_disagreement <= 1e-12

    def test_scalar_pair(self):
        out = consensus_oracle_compare([[1.0], [-1.0]], Graph.complete(2),
                                       horizon=50.0, dt=0.01, radius_param=10.0)
        assert out.linear_disagreement <= 1e-6
        assert out.sphere_disagreement <= 1e-6

    def test_planar_five_agents(self, rng):
        z0 = rng.uniform(-1.0, 1.0, size=(5, 2))
        out = consensus_oracle_compare(z0, Graph.complete(5), horizon=50.0, dt=0.01,
                                       radius_param=10.0)
        assert out.linear_disagreement <= 1e-6
        assert out.sphere_disagreement <= 1e-6

    def test_refuses_disconnected_graph(self):
        g = Graph(4, ((0, 1, 1.0), (2, 3, 1.0)))
        with pytest.raises(InputError):
            consensus_oracle_compare([[0.1], [0.2], [0.3], [0.4]], g, 1.0, 0.01, 10.0)


def make_scenario(seed: int, dt: float = 0.01, horizon: float = 40.0) -> Scenario:
    """Hypothesis-satisfying scenario: connected graphs, dwell-valid signal,
    certified initial cap."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 7))
    graphs = tuple(random_connected_graph(rng, n, 0.7, (0.8, 1.2)) for _ in range(3))
    signal = generate_switching_signal(seed + 1, 3, DwellTimeSpec.fixed(0.3), horizon)
    shaping = (DistanceFunction.chordal() if seed % 2 == 0
               else DistanceFunction.geodesic_quadratic())
    init = cap_states(rng, 2, n, radius=0.7)
    return Scenario(sphere_dim=2, n_agents=n, graphs=graphs, signal=signal,
                    shaping=shaping, init=init, dt=dt, horizon=horizon,
                    dwell=DwellTimeSpec.fixed(0.3))


class TestCertify:
    def test_single_agent_trivially_consistent(self, rng):
        sc = Scenario(sphere_dim=2, n_agents=1, graphs=(Graph(1, ()),),
                      signal=SwitchingSignal((0.0,), (0,)), shaping=CHORDAL,
                      init=AgentStates((random_unit(rng, 2),), 0.0), dt=0.1, horizon=1.0)
        report = certify(simulate(sc), sc)
        assert report.verdict == "theorem_consistent"
        assert report.hypotheses_certified
        assert report.time_to_epsilon == 0.0

    def test_disconnected_active_graph_is_neutral(self, rng):
        g = Graph(4, ((0, 1, 1.0), (2, 3, 1.0)))
        sc = Scenario(sphere_dim=2, n_agents=4, graphs=(g,),
                      signal=SwitchingSignal((0.0,), (0,)), shaping=CHORDAL,
                      init=cap_states(rng, 2, 4, radius=0.5), dt=0.01, horizon=2.0)
        report = certify(simulate(sc), sc)
        assert report.verdict == "hypotheses_not_certified"
        assert not report.active_graphs_connected
        assert report.graph_connected == (False,)

    def test_unused_disconnected_graph_does_not_block(self, rng):
        good = Graph.complete(3)
        bad = Graph(3, ())
        sc = Scenario(sphere_dim=2, n_agents=3, graphs=(good, bad),
                      signal=SwitchingSignal((0.0,), (0,)), shaping=CHORDAL,
                      init=cap_states(rng, 2, 3, radius=0.5), dt=0.01, horizon=30.0)
        report = certify(simulate(sc), sc)
        assert report.graph_connected == (True, False)
        assert report.active_graphs_connected
        assert report.verdict == "theorem_consistent"

    def test_hypothesis_satisfying_run_is_consistent(self):
        sc = make_scenario(5)
        report = certify(simulate(sc), sc)
        assert report.verdict == "theorem_consistent"
        assert report.dwell.ok and not report.dwell_inferred
        assert report.hemisphere_certified
        assert report.monotonicity_violations == 0
        assert report.time_to_epsilon is not None

    def test_dwell_inferred_when_no_spec(self, rng):
        sc = Scenario(sphere_dim=2, n_agents=3, graphs=(Graph.complete(3),),
                      signal=SwitchingSignal((0.0, 1.0), (0, 0)), shaping=CHORDAL,
                      init=cap_states(rng, 2, 3, radius=0.5), dt=0.01, horizon=30.0)
        report = certify(simulate(sc), sc)
        assert report.dwell_inferred
        assert report.dwell.ok
        assert report.dwell.margin == pytest.approx(1.0)

    def test_short_horizon_is_certificate_violation(self, rng):
        # certified hypotheses but too little time to synchronize
        sc = Scenario(sphere_dim=2, n_agents=4, graphs=(Graph.complete(4),),
                      signal=SwitchingSignal((0.0,), (0,)), shaping=CHORDAL,
                      init=cap_states(rng, 2, 4, radius=0.7, min_pairwise=0.2),
                      dt=0.01, horizon=0.05)
        report = certify(simulate(sc), sc)
        assert report.verdict == "certificate_violation"
        assert report.time_to_epsilon is None


def test_hundred_seeded_scenarios_all_consistent():
    """Executable form of the convergence claim across 100 seeded runs."""
    for seed in range(100):
        sc = make_scenario(seed)
        report = certify(simulate(sc), sc)
        assert report.verdict == "theorem_consistent", (seed, report.final_sync_error)
        assert report.monotonicity_violations == 0, seed
