"""Shared helpers and independent oracles for the test suite.

Oracles here deliberately avoid the package's own code paths: dense matrices
instead of projected arithmetic, Rodrigues instead of quaternion algebra,
BFS instead of union-find, brute-force loops instead of vectorized kernels.
"""
from __future__ import annotations

import numpy as np
import pytest

from spheresync import AgentStates, Quaternion, UnitVector


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


def random_unit(rng, dim: int) -> UnitVector:
    v = rng.standard_normal(dim + 1)
    return UnitVector(v / np.linalg.norm(v))


def random_quat(rng) -> Quaternion:
    v = rng.standard_normal(4)
    v /= np.linalg.norm(v)
    return Quaternion(float(v[0]), v[1:])


def cap_states(rng, dim: int, count: int, radius: float = 0.7,
               center: UnitVector | None = None, min_pairwise: float = 0.0) -> AgentStates:
    """Random states in a geodesic cap, optionally with a pairwise-distance floor."""
    if center is None:
        center = random_unit(rng, dim)
    while True:
        states = []
        for _ in range(count):
            v = rng.standard_normal(dim + 1)
            v -= np.dot(center.coords, v) * center.coords
            v /= np.linalg.norm(v)
            alpha = radius * rng.random()
            states.append(UnitVector.normalized(
                np.cos(alpha) * center.coords + np.sin(alpha) * v))
        m = np.stack([s.coords for s in states])
        gram = np.clip(m @ m.T, -1.0, 1.0)
        theta = np.arccos(gram)
        np.fill_diagonal(theta, np.inf)
        if count == 1 or theta.min() >= min_pairwise:
            return AgentStates(tuple(states), 0.0)


# -- independent oracles ------------------------------------------------------

def dense_projection(x: np.ndarray, v: np.ndarray) -> np.ndarray:
    """(I - x x^T) v via an explicit matrix."""
    return (np.eye(len(x)) - np.outer(x, x)) @ v


def rodrigues(axis: np.ndarray, angle: float) -> np.ndarray:
    """Rotation matrix about a unit axis, built from the skew form."""
    k = np.asarray(axis, dtype=float)
    k = k / np.linalg.norm(k)
    K = np.array([[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]])
    return np.eye(3) + np.sin(angle) * K + (1.0 - np.cos(angle)) * (K @ K)


def bfs_connected(n: int, edges) -> bool:
    """Reachability from node 0 via breadth-first search."""
    if n == 0:
        return False
    adj = [[] for _ in range(n)]
    for i, j, *_ in edges:
        adj[i].append(j)
        adj[j].append(i)
    seen = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for i in frontier:
            for j in adj[i]:
                if j not in seen:
                    seen.add(j)
                    nxt.append(j)
        frontier = nxt
    return len(seen) == n
