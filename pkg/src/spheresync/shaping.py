"""Reshaping functions: the distance-like maps that weight the coupling law.

Each kind defines f on [0, pi] with f(0) = 0, f increasing on (0, domain_limit).
The coupling weight f'(theta)/sin(theta) makes the neighbor law the negative
gradient of the edge sum of f over geodesic distances.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError

KINDS = ("chordal", "geodesic_quadratic", "power_chordal")

DERIVATIVE_FD_STEP = 1e-5
DERIVATIVE_REL_TOL = 1e-6
MONOTONE_STEP = 1e-4


@dataclass(frozen=True)
class DistanceFunction:
    """A reshaping function, selected by kind.

    chordal:             f(s) = 1 - cos s
    geodesic_quadratic:  f(s) = s^2 / 2
    power_chordal:       f(s) = (1 - cos s)^p / p, p >= 1

    domain_limit is the largest pairwise geodesic distance for which
    admissibility is guaranteed; it only scopes verify_admissibility.
    """

    kind: str
    power: float = 1.0
    domain_limit: float = math.pi / 2

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown shaping kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "power_chordal" and self.power < 1.0:
            raise InputError(f"power_chordal needs power >= 1, got {self.power}")
        if not 0.0 < self.domain_limit <= math.pi:
            raise InputError(f"domain_limit must be in (0, pi], got {self.domain_limit}")

    @classmethod
    def chordal(cls, domain_limit: float = math.pi / 2) -> "DistanceFunction":
        return cls("chordal", domain_limit=domain_limit)

    @classmethod
    def geodesic_quadratic(cls, domain_limit: float = math.pi / 2) -> "DistanceFunction":
        return cls("geodesic_quadratic", domain_limit=domain_limit)

    @classmethod
    def power_chordal(cls, power: float, domain_limit: float = math.pi / 2) -> "DistanceFunction":
        return cls("power_chordal", power=power, domain_limit=domain_limit)

    def value(self, s):
        """f(s) for s in [0, pi]; accepts scalars or arrays."""
        s = _check_domain(s)
        half = 2.0 * np.square(np.sin(0.5 * s))  # == 1 - cos s, stable near 0
        if self.kind == "chordal":
            out = half
        elif self.kind == "geodesic_quadratic":
            out = 0.5 * np.square(s)
        else:
            out = np.power(half, self.power) / self.power
        return out if isinstance(out, np.ndarray) else float(out)

    def derivative(self, s):
        """f'(s) for s in [0, pi]; accepts scalars or arrays."""
        s = _check_domain(s)
        if self.kind == "chordal":
            out = np.sin(s)
        elif self.kind == "geodesic_quadratic":
            out = np.asarray(s, dtype=np.float64) if isinstance(s, np.ndarray) else s
        else:
            half = 2.0 * np.square(np.sin(0.5 * s))
            out = np.power(half, self.power - 1.0) * np.sin(s)
        return out if isinstance(out, np.ndarray) else float(out)

    def coupling_weight(self, s):
        """f'(s)/sin(s), extended by its limit at s = 0; diverging kinds return
        inf at s = pi (callers exclude antipodal pairs before weighting)."""
        if self.kind == "chordal":
            return np.ones_like(s, dtype=np.float64) if isinstance(s, np.ndarray) else 1.0
        if self.kind == "power_chordal":
            half = 2.0 * np.square(np.sin(0.5 * np.asarray(s, dtype=np.float64)))
            out = np.power(half, self.power - 1.0)
            return out if isinstance(s, np.ndarray) else float(out)
        # geodesic_quadratic: s / sin s, via sinc for the removable zero
        arr = np.asarray(s, dtype=np.float64)
        with np.errstate(divide="ignore"):
            out = 1.0 / np.sinc(arr / np.pi)
        return out if isinstance(s, np.ndarray) else float(out)


def _check_domain(s):
    arr = np.asarray(s, dtype=np.float64)
    if np.any(arr < 0.0) or np.any(arr > np.pi):
        raise InputError("shaping functions are defined on [0, pi]")
    return arr if isinstance(s, np.ndarray) else float(s)


@dataclass(frozen=True)
class AdmissibilityViolation:
    point: float
    check: str
    detail: str


@dataclass(frozen=True)
class AdmissibilityReport:
    ok: bool
    violations: tuple[AdmissibilityViolation, ...] = field(default=())


def check_shaping_callables(f, fprime, domain_limit: float,
                            grid_points: int) -> AdmissibilityReport:
    """Grid certificate for an arbitrary (f, f') pair on (0, domain_limit).

    Checks f > 0, strict increase over a step of 1e-4, f' > 0, and agreement
    of f' with a central finite difference of f.
    """
    if grid_points < 100:
        raise InputError(f"grid_points must be >= 100, got {grid_points}")
    if not 0.0 < domain_limit <= math.pi:
        raise InputError(f"domain_limit must be in (0, pi], got {domain_limit}")
    grid = np.linspace(0.0, domain_limit, grid_points + 2)[1:-1]
    violations: list[AdmissibilityViolation] = []
    for s in grid:
        s = float(s)
        fs = float(f(s))
        if fs <= 0.0:
            violations.append(AdmissibilityViolation(s, "positivity", f"f({s}) = {fs}"))
        ahead = s + MONOTONE_STEP
        if ahead <= domain_limit and float(f(ahead)) <= fs:
            violations.append(AdmissibilityViolation(
                s, "monotonicity", f"f({ahead}) = {float(f(ahead))} <= f({s}) = {fs}"))
        ds = float(fprime(s))
        if ds <= 0.0:
            violations.append(AdmissibilityViolation(s, "derivative_sign", f"f'({s}) = {ds}"))
        # h shrinks near the endpoints: kinds with high-order zeros of f' need
        # h = o(s) there to keep the relative FD error below the tolerance
        h = min(DERIVATIVE_FD_STEP, 3e-4 * s, 3e-4 * (math.pi - s))
        if h > 0.0:
            fd = (float(f(s + h)) - float(f(s - h))) / (2.0 * h)
            scale = max(abs(ds), abs(fd), 1e-12)
            if abs(fd - ds) / scale > DERIVATIVE_REL_TOL:
                violations.append(AdmissibilityViolation(
                    s, "derivative_consistency",
                    f"f'({s}) = {ds} vs finite difference {fd}"))
    return AdmissibilityReport(ok=not violations, violations=tuple(violations))


def verify_admissibility(d: DistanceFunction, grid_points: int) -> AdmissibilityReport:
    """Certify a built-in kind on (0, d.domain_limit)."""
    return check_shaping_callables(d.value, d.derivative, d.domain_limit, grid_points)
