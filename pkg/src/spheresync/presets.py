"""Canned scenarios covering the three castings.

Parameter choices are this package's own: sized so each run certifies its
hypotheses and synchronizes well before the horizon at dt = 1e-3..1e-2.
Every preset is an ordinary config dict, so reproduce writes a config file
that round-trips through the normal loader.
"""
from __future__ import annotations

import numpy as np

from .network import random_connected_graph

PRESET_NAMES = ("so3-complete", "s2-pointing", "rn-consensus")


def _edges(graph) -> list[list[float]]:
    return [[i, j, w] for i, j, w in graph.edges]


def so3_complete() -> dict:
    """Six rotations, as quaternions on S^3, switching among three graphs."""
    return {
        "scenario": {"mode": "so3_complete_via_s3", "sphere_dim": 3, "n_agents": 6,
                     "dt": 0.001, "horizon": 30.0, "seed": 20},
        "shaping": {"kind": "chordal", "domain_limit": 1.5707963267948966},
        "graphs": [
            {"edges": [[0, 1, 1.0], [1, 2, 1.0], [2, 3, 1.0], [3, 4, 1.0],
                       [4, 5, 1.0], [0, 5, 1.0]]},
            {"edges": [[0, 1, 1.0], [0, 2, 1.0], [0, 3, 1.0], [0, 4, 1.0], [0, 5, 1.0]]},
            {"edges": [[0, 1, 1.0], [1, 2, 1.0], [0, 2, 1.0], [2, 3, 1.0],
                       [3, 4, 1.0], [4, 5, 1.0], [3, 5, 1.0]]},
        ],
        "signal": {"generate": True, "mode": "fixed_dwell", "tau_d": 0.2},
        "init": {"cap_radius": 0.7},
        "output": {"trace_path": "so3-complete-trace.csv",
                   "report_path": "so3-complete-report.txt", "sample_stride": 10},
    }


def s2_pointing() -> dict:
    """Ten reduced attitudes on S^2 under three switching random graphs."""
    rng = np.random.default_rng(1234)
    graphs = [{"edges": _edges(random_connected_graph(rng, 10, edge_prob=0.5))}
              for _ in range(3)]
    return {
        "scenario": {"mode": "so3_incomplete_via_s2", "sphere_dim": 2, "n_agents": 10,
                     "dt": 0.001, "horizon": 40.0, "seed": 21},
        "shaping": {"kind": "chordal", "domain_limit": 1.5707963267948966},
        "graphs": graphs,
        "signal": {"generate": True, "mode": "fixed_dwell", "tau_d": 0.25},
        "init": {"cap_radius": 0.7},
        "output": {"trace_path": "s2-pointing-trace.csv",
                   "report_path": "s2-pointing-report.txt", "sample_stride": 10},
    }


def rn_consensus() -> dict:
    """Five planar points cast onto S^2 by the stereographic embedding."""
    rng = np.random.default_rng(99)
    pts = []
    for _ in range(5):
        while True:
            p = rng.uniform(-1.0, 1.0, size=2)
            if float(np.linalg.norm(p)) <= 1.0:
                pts.append([float(p[0]), float(p[1])])
                break
    return {
        "scenario": {"mode": "rn_consensus_via_sn", "sphere_dim": 2, "n_agents": 5,
                     "dt": 0.01, "horizon": 50.0, "seed": 22},
        "shaping": {"kind": "chordal", "domain_limit": 1.5707963267948966},
        "graphs": [{"edges": [[i, j, 1.0] for i in range(5) for j in range(i + 1, 5)]}],
        "signal": {"generate": True, "mode": "fixed_dwell", "tau_d": 1.0},
        "init": {"euclidean": pts, "embed_radius": 10.0},
        "output": {"trace_path": "rn-consensus-trace.csv",
                   "report_path": "rn-consensus-report.txt", "sample_stride": 1},
    }


def preset_config(name: str) -> dict:
    builders = {"so3-complete": so3_complete, "s2-pointing": s2_pointing,
                "rn-consensus": rn_consensus}
    if name not in builders:
        raise KeyError(name)
    return builders[name]()
