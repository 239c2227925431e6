"""Geometry of S^n, SO(3) and unit quaternions.

Conventions:
- Points on S^n are unit (n+1)-vectors (float64), n >= 1.
- Quaternions are scalar-first [w, x, y, z], Hamilton product, unit norm.
- q and -q map to the same rotation matrix (double cover).
- Rotation matrices act on column vectors from the left.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError

UNIT_TOL = 1e-12          # |norm - 1| allowed at construction
TANGENT_TOL = 1e-10       # |<x, v>| allowed for tangent vectors
ROTATION_TOL = 1e-10      # ||R^T R - I||_F and |det R - 1| allowed
ANTIPODAL_COS_TOL = 1e-12  # <x, y> <= -1 + tol counts as antipodal


def _as_float_vector(v, name: str) -> np.ndarray:
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1:
        raise InputError(f"{name} must be a 1-d vector, got shape {arr.shape}")
    return arr


@dataclass(frozen=True, eq=False)
class UnitVector:
    """A point on S^n, stored as an immutable unit (n+1)-vector."""

    coords: np.ndarray

    def __post_init__(self):
        arr = _as_float_vector(self.coords, "coords").copy()
        if arr.size < 2:
            raise InputError("UnitVector needs at least 2 components (S^1 or higher)")
        norm = float(np.linalg.norm(arr))
        if abs(norm - 1.0) > UNIT_TOL:
            raise InputError(f"UnitVector norm {norm!r} deviates from 1 by more than {UNIT_TOL}")
        arr.setflags(write=False)
        object.__setattr__(self, "coords", arr)

    @classmethod
    def normalized(cls, v) -> "UnitVector":
        """Build from any nonzero vector by normalizing."""
        arr = _as_float_vector(v, "v")
        norm = float(np.linalg.norm(arr))
        if norm == 0.0:
            raise InputError("cannot normalize the zero vector")
        return cls(arr / norm)

    @property
    def dim(self) -> int:
        """Sphere dimension n (one less than the ambient dimension)."""
        return self.coords.size - 1

    def __eq__(self, other) -> bool:
        if not isinstance(other, UnitVector):
            return NotImplemented
        return np.array_equal(self.coords, other.coords)

    def __hash__(self):
        return hash(self.coords.tobytes())


@dataclass(frozen=True, eq=False)
class TangentVector:
    """A vector in the tangent space of S^n at `at`."""

    at: UnitVector
    components: np.ndarray

    def __post_init__(self):
        arr = _as_float_vector(self.components, "components").copy()
        if arr.size != self.at.coords.size:
            raise InputError(
                f"tangent components have dimension {arr.size}, "
                f"base point has {self.at.coords.size}"
            )
        inner = float(np.dot(self.at.coords, arr))
        if abs(inner) > TANGENT_TOL:
            raise InputError(f"components are not tangent: <x, v> = {inner!r}")
        arr.setflags(write=False)
        object.__setattr__(self, "components", arr)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.components))

    def __eq__(self, other) -> bool:
        if not isinstance(other, TangentVector):
            return NotImplemented
        return self.at == other.at and np.array_equal(self.components, other.components)


@dataclass(frozen=True, eq=False)
class Quaternion:
    """Unit quaternion, scalar-first."""

    scalar: float
    vector: np.ndarray

    def __post_init__(self):
        vec = _as_float_vector(self.vector, "vector").copy()
        if vec.size != 3:
            raise InputError(f"quaternion vector part must have 3 components, got {vec.size}")
        s = float(self.scalar)
        norm = float(np.sqrt(s * s + float(np.dot(vec, vec))))
        if abs(norm - 1.0) > UNIT_TOL:
            raise InputError(f"quaternion norm {norm!r} deviates from 1 by more than {UNIT_TOL}")
        vec.setflags(write=False)
        object.__setattr__(self, "scalar", s)
        object.__setattr__(self, "vector", vec)

    @classmethod
    def identity(cls) -> "Quaternion":
        return cls(1.0, np.zeros(3))

    @classmethod
    def from_array(cls, wxyz) -> "Quaternion":
        arr = _as_float_vector(wxyz, "wxyz")
        if arr.size != 4:
            raise InputError(f"quaternion array must have 4 components, got {arr.size}")
        return cls(float(arr[0]), arr[1:])

    @classmethod
    def from_axis_angle(cls, axis, angle: float) -> "Quaternion":
        ax = _as_float_vector(axis, "axis")
        n = float(np.linalg.norm(ax))
        if n == 0.0:
            raise InputError("rotation axis must be nonzero")
        half = 0.5 * float(angle)
        return cls(float(np.cos(half)), np.sin(half) * ax / n)

    def as_array(self) -> np.ndarray:
        return np.concatenate(([self.scalar], self.vector))

    def conjugate(self) -> "Quaternion":
        return Quaternion(self.scalar, -self.vector)

    def canonicalized(self) -> "Quaternion":
        """Flip sign so the scalar part is >= 0; at exactly 0, make the first
        nonzero vector component positive. Deterministic representative of {q, -q}."""
        if self.scalar < 0.0:
            return Quaternion(-self.scalar, -self.vector)
        if self.scalar == 0.0:
            for c in self.vector:
                if c != 0.0:
                    return self if c > 0.0 else Quaternion(-self.scalar, -self.vector)
        return self

    def to_unit_vector(self) -> UnitVector:
        """The same point viewed as an element of S^3."""
        return UnitVector(self.as_array())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Quaternion):
            return NotImplemented
        return self.scalar == other.scalar and np.array_equal(self.vector, other.vector)


@dataclass(frozen=True, eq=False)
class RotationMatrix:
    """Element of SO(3): orthogonal 3x3 with determinant 1."""

    entries: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=np.float64).copy()
        if arr.shape != (3, 3):
            raise InputError(f"rotation matrix must be 3x3, got shape {arr.shape}")
        defect = float(np.linalg.norm(arr.T @ arr - np.eye(3)))
        if defect > ROTATION_TOL:
            raise InputError(f"matrix is not orthogonal: ||R^T R - I||_F = {defect!r}")
        det = float(np.linalg.det(arr))
        if abs(det - 1.0) > ROTATION_TOL:
            raise InputError(f"matrix determinant {det!r} is not 1")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @classmethod
    def identity(cls) -> "RotationMatrix":
        return cls(np.eye(3))

    def apply(self, v) -> np.ndarray:
        return self.entries @ _as_float_vector(v, "v")

    def compose(self, other: "RotationMatrix") -> "RotationMatrix":
        return RotationMatrix(self.entries @ other.entries)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RotationMatrix):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)


def tangent_project(x: UnitVector, v) -> TangentVector:
    """Project an ambient vector onto the tangent space at x: v - <x,v> x."""
    arr = _as_float_vector(v, "v")
    if arr.size != x.coords.size:
        raise InputError(f"vector dimension {arr.size} != point dimension {x.coords.size}")
    return TangentVector(x, arr - np.dot(x.coords, arr) * x.coords)


def geodesic_distance(x: UnitVector, y: UnitVector) -> float:
    """Great-circle angle between two points, in [0, pi]."""
    if x.coords.size != y.coords.size:
        raise InputError(
            f"points live on different spheres ({x.coords.size} vs {y.coords.size} components)"
        )
    # Clamp to kill round-off at nearly identical / antipodal pairs.
    return float(np.arccos(np.clip(np.dot(x.coords, y.coords), -1.0, 1.0)))


def sphere_exp(x: UnitVector, v: TangentVector) -> UnitVector:
    """Exponential map: follow the great circle from x in direction v for arc length |v|."""
    if v.at != x:
        raise InputError("tangent vector is not based at x")
    s = v.norm
    if s == 0.0:
        return x
    out = np.cos(s) * x.coords + (np.sin(s) / s) * v.components
    return UnitVector(out / np.linalg.norm(out))


def quat_mul(p: Quaternion, q: Quaternion) -> Quaternion:
    """Hamilton product p q."""
    w = p.scalar * q.scalar - np.dot(p.vector, q.vector)
    vec = p.scalar * q.vector + q.scalar * p.vector + np.cross(p.vector, q.vector)
    norm = float(np.sqrt(w * w + float(np.dot(vec, vec))))
    if abs(norm - 1.0) > UNIT_TOL:
        w, vec = w / norm, vec / norm
    return Quaternion(float(w), vec)


def quat_to_rotmat(q: Quaternion) -> RotationMatrix:
    """The covering map S^3 -> SO(3); quat_to_rotmat(q) == quat_to_rotmat(-q)."""
    w, (x, y, z) = q.scalar, q.vector
    ww, xx, yy, zz = w * w, x * x, y * y, z * z
    wx, wy, wz = w * x, w * y, w * z
    xy, xz, yz = x * y, x * z, y * z
    return RotationMatrix(np.array([
        [ww + xx - yy - zz, 2 * (xy - wz), 2 * (xz + wy)],
        [2 * (xy + wz), ww - xx + yy - zz, 2 * (yz - wx)],
        [2 * (xz - wy), 2 * (yz + wx), ww - xx - yy + zz],
    ]))


def rotmat_to_quat(R: RotationMatrix) -> Quaternion:
    """Inverse of the covering map, canonical sign (scalar >= 0)."""
    m = R.entries
    tr = float(np.trace(m))
    # Shepperd's branch selection: pick the numerically largest component.
    candidates = (1.0 + tr, 1.0 + 2.0 * m[0, 0] - tr, 1.0 + 2.0 * m[1, 1] - tr,
                  1.0 + 2.0 * m[2, 2] - tr)
    branch = int(np.argmax(candidates))
    t = candidates[branch]
    r = np.sqrt(t)
    if branch == 0:
        w = 0.5 * r
        x = (m[2, 1] - m[1, 2]) / (2.0 * r)
        y = (m[0, 2] - m[2, 0]) / (2.0 * r)
        z = (m[1, 0] - m[0, 1]) / (2.0 * r)
    elif branch == 1:
        x = 0.5 * r
        w = (m[2, 1] - m[1, 2]) / (2.0 * r)
        y = (m[0, 1] + m[1, 0]) / (2.0 * r)
        z = (m[0, 2] + m[2, 0]) / (2.0 * r)
    elif branch == 2:
        y = 0.5 * r
        w = (m[0, 2] - m[2, 0]) / (2.0 * r)
        x = (m[0, 1] + m[1, 0]) / (2.0 * r)
        z = (m[1, 2] + m[2, 1]) / (2.0 * r)
    else:
        z = 0.5 * r
        w = (m[1, 0] - m[0, 1]) / (2.0 * r)
        x = (m[0, 2] + m[2, 0]) / (2.0 * r)
        y = (m[1, 2] + m[2, 1]) / (2.0 * r)
    vec = np.array([x, y, z])
    norm = float(np.sqrt(w * w + float(np.dot(vec, vec))))
    return Quaternion(w / norm, vec / norm).canonicalized()


def reduced_attitude(R: RotationMatrix, b: UnitVector) -> UnitVector:
    """Pointing direction R b of the body axis b, a point on S^2."""
    if b.dim != 2:
        raise InputError(f"body axis must lie on S^2, got S^{b.dim}")
    out = R.entries @ b.coords
    return UnitVector(out / np.linalg.norm(out))


def rotation_about(axis, angle: float) -> RotationMatrix:
    """Rodrigues rotation by `angle` around `axis`."""
    ax = _as_float_vector(axis, "axis")
    n = float(np.linalg.norm(ax))
    if n == 0.0:
        raise InputError("rotation axis must be nonzero")
    k = ax / n
    K = np.array([[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]])
    m = np.eye(3) + np.sin(angle) * K + (1.0 - np.cos(angle)) * (K @ K)
    return RotationMatrix(m)


def random_unit_vector(rng: np.random.Generator, dim: int) -> UnitVector:
    """Uniform sample on S^dim."""
    if dim < 1:
        raise InputError(f"sphere dimension must be >= 1, got {dim}")
    while True:
        v = rng.standard_normal(dim + 1)
        n = float(np.linalg.norm(v))
        if n > 1e-8:
            return UnitVector(v / n)


def sample_in_cap(rng: np.random.Generator, center: UnitVector, radius: float,
                  count: int) -> list[UnitVector]:
    """`count` points within geodesic distance `radius` of `center`."""
    if not 0.0 < radius < np.pi:
        raise InputError(f"cap radius must be in (0, pi), got {radius}")
    out = []
    for _ in range(count):
        while True:
            v = rng.standard_normal(center.coords.size)
            v -= np.dot(center.coords, v) * center.coords
            n = float(np.linalg.norm(v))
            if n > 1e-8:
                break
        direction = v / n
        alpha = radius * rng.random()
        out.append(UnitVector.normalized(
            np.cos(alpha) * center.coords + np.sin(alpha) * direction))
    return out


def rotation_aligning(a: UnitVector, b: UnitVector) -> RotationMatrix:
    """Minimal rotation taking a to b (no twist about the common axis)."""
    if a.dim != 2 or b.dim != 2:
        raise InputError("rotation_aligning works on S^2 points")
    c = float(np.dot(a.coords, b.coords))
    axis = np.cross(a.coords, b.coords)
    s = float(np.linalg.norm(axis))
    if s < 1e-15:
        if c > 0.0:
            return RotationMatrix.identity()
        raise InputError("antipodal points have no unique minimal rotation")
    return rotation_about(axis, float(np.arctan2(s, c)))
