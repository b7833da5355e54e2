"""Planar point sets and their moment statistics.

Points live in a dimensionless plane. A set is *isotropic* when its second
moment about the centroid is a multiple of the identity; regular polygons
("trivial" sets) are the simplest example, and unions, rigid rotations and
reflections of isotropic sets stay isotropic.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidArgumentError, PreconditionError

DEFAULT_ISOTROPY_TOL = 1e-9

E = np.array([[0.0, -1.0], [1.0, 0.0]])


def rotation(alpha: float) -> np.ndarray:
    """2x2 counterclockwise rotation, ``cos(a)*1 + sin(a)*E``."""
    c, s = math.cos(alpha), math.sin(alpha)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True, eq=False)
class PointSet2:
    """Ordered set of n >= 2 planar points, stored as a read-only (n, 2) array."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise InvalidArgumentError(f"points must have shape (n, 2), got {pts.shape}")
        if pts.shape[0] < 2:
            raise InvalidArgumentError("a point set needs at least 2 points")
        if not np.all(np.isfinite(pts)):
            raise InvalidArgumentError("point coordinates must be finite")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if not isinstance(other, PointSet2):
            return NotImplemented
        return self.points.shape == other.points.shape and bool(np.all(self.points == other.points))

    def __hash__(self):
        return hash(self.points.tobytes())

    def relabel(self, permutation: Sequence[int]) -> "PointSet2":
        """Return the set with point ``i`` taken from ``permutation[i]``."""
        perm = _check_permutation(permutation, self.n)
        return PointSet2(self.points[perm])

    def to_dict(self) -> dict:
        return {"points": self.points.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "PointSet2":
        if not isinstance(data, dict) or "points" not in data:
            raise InvalidArgumentError('point set JSON must be an object with a "points" key')
        return cls(np.asarray(data["points"], dtype=float))

    @classmethod
    def from_json(cls, text: str) -> "PointSet2":
        return cls.from_dict(json.loads(text))


def _check_permutation(permutation: Sequence[int], n: int) -> np.ndarray:
    perm = np.asarray(permutation, dtype=int)
    if perm.shape != (n,) or sorted(perm.tolist()) != list(range(n)):
        raise InvalidArgumentError(f"{list(permutation)} is not a permutation of 0..{n - 1}")
    return perm


@dataclass(frozen=True)
class IsotropyReport:
    second_moment: np.ndarray = field(repr=False)
    eigenvalue_low: float
    eigenvalue_high: float
    relative_spread: float
    is_isotropic: bool


def centroid(s: PointSet2) -> np.ndarray:
    return s.points.mean(axis=0)


def second_moment(s: PointSet2) -> np.ndarray:
    """Sum of (p - c)(p - c)^T over the set."""
    d = s.points - centroid(s)
    m = d.T @ d
    return 0.5 * (m + m.T)


def d_rms(s: PointSet2, about: Sequence[float] | None = None) -> float:
    """Root-mean-square distance of the points to ``about`` (centroid by default)."""
    ref = centroid(s) if about is None else np.asarray(about, dtype=float)
    d = s.points - ref
    return math.sqrt(float(np.sum(d * d)) / s.n)


def geometric_inertia(s: PointSet2) -> np.ndarray:
    """Planar moment of inertia of unit masses at the points, tr(M)*1 - M."""
    m = second_moment(s)
    return np.trace(m) * np.eye(2) - m


def check_isotropy(s: PointSet2, tol: float = DEFAULT_ISOTROPY_TOL) -> IsotropyReport:
    if not tol > 0:
        raise InvalidArgumentError("tol must be positive")
    m = second_moment(s)
    low, high = np.linalg.eigvalsh(m)
    spread = (high - low) / max(high, np.finfo(float).tiny)
    return IsotropyReport(
        second_moment=m,
        eigenvalue_low=float(low),
        eigenvalue_high=float(high),
        relative_spread=float(spread),
        is_isotropic=bool(high > 0 and spread <= tol),
    )


def default_phase(n: int) -> float:
    # Puts the last vertex straight down; for n=3 this gives the points
    # (sqrt6/2, sqrt2/2), (-sqrt6/2, sqrt2/2), (0, -sqrt2) in that order.
    return -math.pi / 2 + 2 * math.pi / n


def trivial_set(n: int, phase: float | None = None) -> PointSet2:
    """Vertices of a regular n-gon of radius sqrt(2), counterclockwise from ``phase``.

    The radius makes ``sum k k^T = n * 1``, the normalization a 3 x n model
    matrix needs to be isotropic with triple singular value sqrt(n).
    """
    if int(n) != n or n < 3:
        raise InvalidArgumentError(f"a trivial set needs n >= 3, got {n}")
    n = int(n)
    if phase is None:
        phase = default_phase(n)
    ang = phase + 2 * np.pi * np.arange(n) / n
    pts = math.sqrt(2.0) * np.column_stack([np.cos(ang), np.sin(ang)])
    return PointSet2(pts)


def default_model_set(n: int) -> PointSet2:
    """Regular n-gon for n >= 3; for n = 2 the antipodal pair (+-sqrt2, 0),
    which is centred with sum |k|^2 = 2n but necessarily not isotropic."""
    if n == 2:
        return PointSet2([[math.sqrt(2.0), 0.0], [-math.sqrt(2.0), 0.0]])
    return trivial_set(n)


def rotate_set(s: PointSet2, alpha: float, about: Sequence[float] | None = None) -> PointSet2:
    ref = centroid(s) if about is None else np.asarray(about, dtype=float)
    return PointSet2((s.points - ref) @ rotation(alpha).T + ref)


def union_sets(s1: PointSet2, s2: PointSet2, tol: float = 1e-9) -> PointSet2:
    gap = float(np.linalg.norm(centroid(s1) - centroid(s2)))
    if gap > tol:
        raise PreconditionError(f"centroids differ by {gap:.3g} (> {tol:g}); union would not be isotropic")
    return PointSet2(np.vstack([s1.points, s2.points]))


def reflect_set(s: PointSet2, axis_angle: float) -> PointSet2:
    """Mirror every point about the line through the centroid at ``axis_angle``."""
    c = centroid(s)
    c2, s2 = math.cos(2 * axis_angle), math.sin(2 * axis_angle)
    mirror = np.array([[c2, s2], [s2, -c2]])
    return PointSet2((s.points - c) @ mirror.T + c)


def cross_product_matrix(v: Sequence[float]) -> np.ndarray:
    x, y, z = v
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])
