"""Frames, vectors and rotations.

World frame is right-handed with z up. A body orientation is stored as the
3x3 body-to-world matrix; the antenna axis of every platform is body z, so
the world-frame antenna axis is simply the third matrix column.

Hot loops in the optimizers work on plain float tuples through the
underscore helpers at the bottom of this module; the public functions accept
anything array-like and return numpy arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CoincidentPoints, DomainError, ZeroVector

GRAVITY = 9.81
ZERO_NORM = 1e-12
COINCIDENT_TOL = 1e-9

WORLD_X = (1.0, 0.0, 0.0)
WORLD_Y = (0.0, 1.0, 0.0)
WORLD_Z = (0.0, 0.0, 1.0)


def as_vec3(v) -> np.ndarray:
    a = np.asarray(v, dtype=float)
    if a.shape != (3,):
        raise DomainError(f"expected a 3-vector, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError("vector components must be finite")
    return a


def unit(v) -> np.ndarray:
    """Return ``v / ||v||``; raises :class:`ZeroVector` for ``||v|| <= 1e-12``."""
    return np.array(_unit(tuple(as_vec3(v).tolist())))


def angle_between(a, b) -> float:
    """Angle in ``[0, pi]`` between two unit vectors.

    Evaluated as ``atan2(|a x b|, a . b)``, which equals the clamped arccos of
    the dot product but stays exact for parallel and antiparallel inputs
    (cross product exactly zero gives exactly 0 or pi).
    """
    return _angle(tuple(as_vec3(a).tolist()), tuple(as_vec3(b).tolist()))


def link(src, dst) -> tuple[np.ndarray, float]:
    """Unit direction ``src -> dst`` and the distance between the points."""
    d, dist = _link(tuple(as_vec3(src).tolist()), tuple(as_vec3(dst).tolist()))
    return np.array(d), dist


@dataclass(frozen=True, eq=False)
class Rotation:
    """Proper rotation, stored as the body-to-world matrix."""

    matrix: np.ndarray = field(default_factory=lambda: np.eye(3))

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.shape != (3, 3) or not np.all(np.isfinite(m)):
            raise DomainError("rotation matrix must be a finite 3x3 array")
        if np.max(np.abs(m.T @ m - np.eye(3))) > 1e-9 or abs(np.linalg.det(m) - 1.0) > 1e-9:
            raise DomainError("matrix is not a proper rotation")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls) -> Rotation:
        return cls(np.eye(3))

    @classmethod
    def from_quaternion(cls, q) -> Rotation:
        """From a ``(w, x, y, z)`` quaternion; it is normalized first."""
        q = np.asarray(q, dtype=float)
        n = np.linalg.norm(q)
        if n <= ZERO_NORM:
            raise ZeroVector("zero quaternion")
        w, x, y, z = q / n
        return cls(np.array([
            [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
            [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
            [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
        ]))

    @classmethod
    def from_axis_angle(cls, axis, angle: float) -> Rotation:
        k = unit(axis)
        kx = np.array([[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]])
        return cls(np.eye(3) + math.sin(angle) * kx + (1.0 - math.cos(angle)) * (kx @ kx))

    @classmethod
    def from_antenna_axis(cls, axis) -> Rotation:
        """Orientation whose body z equals ``axis``, with zero roll.

        Body x is world x projected onto the plane normal to the axis (world y
        when the axis is parallel to world x). The axis itself is stored
        verbatim as the third column so ``antenna_axis`` returns it bit-exact.
        """
        a = tuple(as_vec3(axis).tolist())
        if abs(_norm(a) - 1.0) > 1e-15:
            a = _unit(a)
        return cls(_frame_from_axis(a))

    @classmethod
    def random(cls, rng: np.random.Generator, n: int) -> list[Rotation]:
        """``n`` orientations drawn uniformly from SO(3) (normalized Gaussian quaternions)."""
        qs = rng.standard_normal((n, 4))
        return [cls.from_quaternion(q) for q in qs]

    @property
    def antenna_axis(self) -> np.ndarray:
        return self.matrix[:, 2].copy()

    def apply(self, v) -> np.ndarray:
        return self.matrix @ as_vec3(v)

    def inverse(self) -> Rotation:
        return Rotation(self.matrix.T)

    def __matmul__(self, other: Rotation) -> Rotation:
        return Rotation(self.matrix @ other.matrix)

    def as_quaternion(self) -> np.ndarray:
        """``(w, x, y, z)`` with ``w >= 0``."""
        m = self.matrix
        tr = np.trace(m)
        if tr > 0:
            s = 2.0 * math.sqrt(tr + 1.0)
            q = [0.25 * s, (m[2, 1] - m[1, 2]) / s, (m[0, 2] - m[2, 0]) / s, (m[1, 0] - m[0, 1]) / s]
        else:
            i = int(np.argmax(np.diag(m)))
            j, k = (i + 1) % 3, (i + 2) % 3
            s = 2.0 * math.sqrt(1.0 + m[i, i] - m[j, j] - m[k, k])
            q = [0.0] * 4
            q[0] = (m[k, j] - m[j, k]) / s
            q[1 + i] = 0.25 * s
            q[1 + j] = (m[j, i] + m[i, j]) / s
            q[1 + k] = (m[k, i] + m[i, k]) / s
        q = np.array(q)
        return -q if q[0] < 0 else q

    def allclose(self, other: Rotation, atol: float = 1e-9) -> bool:
        return bool(np.allclose(self.matrix, other.matrix, atol=atol, rtol=0.0))


@dataclass(frozen=True, eq=False)
class Pose:
    position: np.ndarray
    orientation: Rotation = field(default_factory=Rotation.identity)

    def __post_init__(self):
        p = as_vec3(self.position).copy()
        p.setflags(write=False)
        object.__setattr__(self, "position", p)

    @property
    def antenna_axis(self) -> np.ndarray:
        return self.orientation.antenna_axis


# Scalar helpers on float tuples; used by every objective evaluation.

def _sub(a, b):
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _norm(a):
    return math.hypot(a[0], a[1], a[2])


def _unit(a):
    n = _norm(a)
    if not n > ZERO_NORM:
        raise ZeroVector(f"cannot normalize vector of norm {n:g}")
    return (a[0] / n, a[1] / n, a[2] / n)


def _angle(a, b):
    cx = a[1] * b[2] - a[2] * b[1]
    cy = a[2] * b[0] - a[0] * b[2]
    cz = a[0] * b[1] - a[1] * b[0]
    return math.atan2(math.hypot(cx, cy, cz), a[0] * b[0] + a[1] * b[1] + a[2] * b[2])


def _link(src, dst):
    dx, dy, dz = dst[0] - src[0], dst[1] - src[1], dst[2] - src[2]
    dist = math.hypot(dx, dy, dz)
    if not dist > COINCIDENT_TOL:
        raise CoincidentPoints(f"points {src} and {dst} coincide")
    return (dx / dist, dy / dist, dz / dist), dist


def _spherical_axis(polar, azimuth):
    s = math.sin(polar)
    return (s * math.cos(azimuth), s * math.sin(azimuth), math.cos(polar))


def _frame_from_axis(axis):
    ref = WORLD_X if abs(axis[0]) < 1.0 - 1e-12 else WORLD_Y
    xb = _unit(_sub(ref, tuple(_dot(ref, axis) * c for c in axis)))
    yb = _cross(axis, xb)
    return np.array([[xb[i], yb[i], axis[i]] for i in range(3)])
