"""Distance of a planar Jacobian to an isotropic model matrix.

The translational rows of ``J`` carry units of length. Dividing them by a
posture-dependent *conditioning length* ``l_P`` gives a dimensionless
``Jbar``; ``l_P`` and the orientation ``alpha`` of the model point set are
chosen in closed form so that

    z = 1/2 * (1/n) * tr[(Jbar - K)(Jbar - K)^T]

is minimal. ``z = 0`` means the posture is isotropic.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateAlignmentError,
    IndeterminateRotationError,
    InvalidArgumentError,
    PreconditionError,
)
from .geometry import (
    DEFAULT_ISOTROPY_TOL,
    E,
    PointSet2,
    centroid,
    check_isotropy,
    default_model_set,
    rotation,
    second_moment,
)
from .kinematics import JacobianBlocks, Manipulator, Posture, jacobian

RR_FLOOR = 1e-30


@dataclass(frozen=True)
class ModelMatrix:
    """3 x n isotropic reference: a row of ones over the columns ``E R(alpha) k_j``."""

    K: np.ndarray
    source_set: PointSet2 = field(repr=False)
    alpha: float = 0.0

    @property
    def n(self) -> int:
        return self.K.shape[1]

    @property
    def rotated_points(self) -> np.ndarray:
        return self.source_set.points @ rotation(self.alpha).T

    def generalized_inverse(self) -> np.ndarray:
        # K K^T = n * 1, so no factorization is needed
        return self.K.T / self.n


@dataclass(frozen=True)
class NormalizedJacobian:
    Jbar: np.ndarray
    lam: float
    l_P: float


@dataclass(frozen=True)
class ConditioningResult:
    z: float
    l_P: float
    alpha_opt: float
    kappa: float
    d_rms: float
    model_rescaled: bool = field(default=False, compare=False)

    def to_dict(self) -> dict:
        return {
            "z": self.z,
            "l_P": self.l_P,
            "alpha_opt_rad": self.alpha_opt,
            "kappa": self.kappa,
            "d_rms": self.d_rms,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "ConditioningResult":
        return cls(
            z=float(data["z"]),
            l_P=float(data["l_P"]),
            alpha_opt=float(data["alpha_opt_rad"]),
            kappa=float(data["kappa"]),
            d_rms=float(data["d_rms"]),
        )


def frobenius_distance(A: np.ndarray, K: np.ndarray) -> float:
    """Distance under the inner product (A, B) = tr(A B^T) / n, n = column count."""
    A = np.asarray(A, dtype=float)
    K = np.asarray(K, dtype=float)
    if A.shape != K.shape or A.ndim != 2:
        raise InvalidArgumentError(f"shape mismatch: {A.shape} vs {K.shape}")
    D = A - K
    return math.sqrt(np.trace(D @ D.T) / A.shape[1])


def _check_model_set(s: PointSet2, tol: float):
    # Two points are never isotropic; for n = 2 the centred pair with
    # sum |k|^2 = 2n is accepted as the closest available model.
    n = s.n
    if n > 2 and not check_isotropy(s, tol).is_isotropic:
        raise PreconditionError("model point set is not isotropic")
    if np.linalg.norm(centroid(s)) > tol * math.sqrt(2 * n):
        raise PreconditionError("model point set must be centred on the origin")
    M = second_moment(s)
    if n > 2 and np.linalg.norm(M - n * np.eye(2)) > tol * n:
        raise PreconditionError("model point set must satisfy sum k k^T = n * 1")
    if n == 2 and abs(np.trace(M) - 2 * n) > tol * n:
        raise PreconditionError("a two-point model set must satisfy sum |k|^2 = 4")


def model_matrix(s: PointSet2, alpha: float = 0.0, tol: float = DEFAULT_ISOTROPY_TOL) -> ModelMatrix:
    """Build K from a centred isotropic set with ``sum k k^T = n * 1``, rotated by ``alpha``."""
    _check_model_set(s, tol)
    cols = E @ rotation(alpha) @ s.points.T
    K = np.vstack([np.ones((1, s.n)), cols])
    K.setflags(write=False)
    return ModelMatrix(K=K, source_set=s, alpha=float(alpha))


def normalize_model_set(s: PointSet2, tol: float = DEFAULT_ISOTROPY_TOL) -> tuple[PointSet2, bool]:
    """Centre and rescale an isotropic set so that ``sum k k^T = n * 1``.

    Returns the normalized set and whether anything had to change.
    """
    if s.n > 2 and not check_isotropy(s, tol).is_isotropic:
        raise PreconditionError("model point set is not isotropic")
    c = centroid(s)
    if np.trace(second_moment(s)) <= 0:
        raise PreconditionError("model point set is degenerate (all points coincide)")
    scale = math.sqrt(2 * s.n / np.trace(second_moment(s)))
    if np.linalg.norm(c) <= tol * math.sqrt(2 * s.n) and abs(scale - 1) <= tol:
        return s, False
    return PointSet2((s.points - c) * scale), True


def projection_sums(jb: JacobianBlocks, points: np.ndarray) -> tuple[float, float, float]:
    """``(D, N, RR)``: sum of r_j . k_j, sum of r_j . E k_j, sum of |r_j|^2."""
    r = jb.r
    D = float(np.sum(r * points))
    N = float(np.sum(r * (points @ E.T)))
    RR = float(np.sum(r * r))
    return D, N, RR


def normalized_jacobian(jb: JacobianBlocks, l_P: float) -> NormalizedJacobian:
    Jbar = np.vstack([jb.A, jb.B / l_P])
    return NormalizedJacobian(Jbar=Jbar, lam=1.0 / l_P, l_P=l_P)


def conditioning_length(jb: JacobianBlocks, K: ModelMatrix) -> tuple[float, float]:
    """Least-squares ``(lambda, l_P)`` for a fixed model orientation.

    ``lambda = sum(k~_j . r_j) / sum |r_j|^2`` where ``k~_j = R(alpha) k_j``.
    """
    if K.n != jb.n:
        raise InvalidArgumentError(f"model matrix has {K.n} columns, Jacobian has {jb.n}")
    r = jb.r
    proj = float(np.sum(r * K.rotated_points))
    RR = max(float(np.sum(r * r)), RR_FLOOR)
    if not proj > 0:
        raise DegenerateAlignmentError(
            f"projection sum {proj:.3g} is not positive; re-optimize the model rotation first"
        )
    lam = proj / RR
    return lam, 1.0 / lam


def _z_at(jb: JacobianBlocks, points: np.ndarray, alpha: float) -> float:
    # z at a given rotation with the best nonnegative lambda
    kt = points @ rotation(alpha).T
    proj = float(np.sum(jb.r * kt))
    RR = max(float(np.sum(jb.r * jb.r)), RR_FLOOR)
    lam = max(proj / RR, 0.0)
    return (lam * lam * RR - 2 * lam * proj + float(np.sum(kt * kt))) / (2 * jb.n)


def optimal_alpha(jb: JacobianBlocks, s: PointSet2) -> float:
    """Rotation of the model set in (-pi, pi] that minimizes z.

    The stationarity condition ``cos(a) N - sin(a) D = 0`` has two roots pi
    apart; both are evaluated and the smaller z wins.
    """
    if s.n != jb.n:
        raise InvalidArgumentError(f"model set has {s.n} points, Jacobian has {jb.n} columns")
    D, N, RR = projection_sums(jb, s.points)
    scale = math.sqrt(max(RR, RR_FLOOR) * float(np.sum(s.points * s.points)))
    if math.hypot(N, D) <= 1e-14 * scale:
        raise IndeterminateRotationError("both projection sums vanish; every rotation is stationary")
    a0 = math.atan2(N, D)
    a1 = a0 - math.pi if a0 > 0 else a0 + math.pi
    best = a0 if _z_at(jb, s.points, a0) <= _z_at(jb, s.points, a1) else a1
    return math.pi if best == -math.pi else best


def condition_number(A: np.ndarray) -> float:
    """``||A|| ||A^+||`` with the weighted Frobenius norm.

    For a square matrix this is the usual ``||A|| ||A^-1||``; for wide matrices
    the Moore-Penrose inverse stands in. Equals 1 exactly for isotropic A.
    """
    A = np.asarray(A, dtype=float)
    sv = np.linalg.svd(A, compute_uv=False)
    if sv[-1] <= sv[0] * np.finfo(float).eps * max(A.shape):
        return math.inf
    return math.sqrt(float(np.sum(sv**2)) * float(np.sum(sv**-2))) / A.shape[0]


def z_trace(Jbar: np.ndarray, K: np.ndarray) -> float:
    """``z = d(Jbar, K)^2 / 2`` by the direct trace expansion."""
    Jbar = np.asarray(Jbar)
    K = np.asarray(K)
    n = K.shape[1]
    return 0.5 / n * float(np.trace(Jbar @ Jbar.T - 2 * K @ Jbar.T + K @ K.T))


def z_ratio(points: np.ndarray, d_rms: float, l_P: float) -> float:
    """``z`` from the ratio d_rms / l_P, valid at the optimal lambda."""
    n = points.shape[0]
    return float(np.sum(points * points)) / (2 * n) - 0.5 * (d_rms / l_P) ** 2


def z_value(
    jb: JacobianBlocks,
    s: PointSet2,
    permutation: Sequence[int] | None = None,
    tol: float = DEFAULT_ISOTROPY_TOL,
) -> ConditioningResult:
    """Full conditioning record of one posture.

    ``s`` is centred and rescaled to ``sum k k^T = n * 1`` if needed (a
    warning is emitted and ``model_rescaled`` set). ``permutation[j]`` picks
    the model point matched to joint j; identity by default.
    """
    s, rescaled = normalize_model_set(s, tol)
    if rescaled:
        warnings.warn("model point set was centred/rescaled to sum k k^T = n * 1", stacklevel=2)
    if permutation is not None:
        s = s.relabel(permutation)
    alpha = optimal_alpha(jb, s)
    K = model_matrix(s, alpha, tol)
    _, l_P = conditioning_length(jb, K)
    nj = normalized_jacobian(jb, l_P)
    d = math.sqrt(float(np.sum(jb.r * jb.r)) / jb.n)

    z = z_trace(nj.Jbar, K.K)
    z_alt = z_ratio(s.points, d, l_P)
    if abs(z - z_alt) > 1e-9 * max(1.0, abs(z)):
        raise ArithmeticError(f"z paths disagree: trace {z!r} vs ratio {z_alt!r}")
    return ConditioningResult(
        z=max(z, 0.0),
        l_P=l_P,
        alpha_opt=alpha,
        kappa=condition_number(nj.Jbar),
        d_rms=d,
        model_rescaled=rescaled,
    )


def analyze(
    m: Manipulator,
    p: Posture,
    s: PointSet2 | None = None,
    permutation: Sequence[int] | None = None,
) -> ConditioningResult:
    """Conditioning of manipulator ``m`` at posture ``p`` against model set ``s``
    (the regular n-gon by default)."""
    if s is None:
        s = default_model_set(m.n)
    return z_value(jacobian(m, p), s, permutation=permutation)
