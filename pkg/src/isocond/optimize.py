"""Global search for the best-conditioned posture.

z depends only on joints 2..n (turning the whole arm about joint 1 rotates the
r vectors and the optimal model orientation together), so joint 1 is pinned and
the remaining angles are searched on a dense periodic lattice. Every lattice
local minimum is then polished with Nelder-Mead. At each evaluated posture
alpha and lambda are taken from their closed forms, never searched.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from . import kernels
from .conditioning import analyze, normalize_model_set
from .errors import ConfigError, InvalidArgumentError
from .geometry import E, PointSet2, default_model_set
from .kinematics import Manipulator, Posture, r_vectors

TWO_PI = 2 * math.pi
MAX_SEARCH_DIMS = 5
MAX_LATTICE_POINTS = 60_000_000
TIE_TOL = 1e-9
MERGE_TOL = 1e-6
# seeds beyond this count are dropped (best z first); flat regions can
# otherwise turn every lattice point into a "local minimum"
MAX_SEEDS = 256


@dataclass(frozen=True)
class OptimizationConfig:
    """Search settings. ``grid_resolution`` is the lattice step in radians;
    ``None`` picks 0.5 deg for up to two searched joints and 2 deg for three."""

    grid_resolution: float | None = None
    refine_tolerance: float = 1e-12
    max_refine_iters: int = 200
    theta1: float = 0.0

    def __post_init__(self):
        if self.grid_resolution is not None and not self.grid_resolution > 0:
            raise ConfigError("grid_resolution must be positive")
        if not self.refine_tolerance > 0:
            raise ConfigError("refine_tolerance must be positive")
        if self.max_refine_iters < 1:
            raise ConfigError("max_refine_iters must be at least 1")

    def samples_per_axis(self, dims: int) -> int:
        if dims > MAX_SEARCH_DIMS:
            raise ConfigError(f"searching {dims} joints is not supported (at most {MAX_SEARCH_DIMS})")
        step = self.grid_resolution
        if step is None:
            if dims <= 2:
                step = TWO_PI / 720
            elif dims == 3:
                step = TWO_PI / 180
            else:
                raise ConfigError(
                    f"{dims} searched joints need an explicit coarse grid_resolution"
                )
        res = max(int(round(TWO_PI / step)), 4)
        if res**dims > MAX_LATTICE_POINTS:
            raise ConfigError(f"lattice of {res}^{dims} points is too large; coarsen grid_resolution")
        return res

    @classmethod
    def from_dict(cls, data: dict) -> "OptimizationConfig":
        known = {"grid_resolution", "refine_tolerance", "max_refine_iters", "theta1"}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        try:
            kwargs = {key: (int(v) if key == "max_refine_iters" else float(v))
                      for key, v in data.items() if v is not None}
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad config value: {exc}") from None
        return cls(**kwargs)


@dataclass(frozen=True)
class OptimumPosture:
    theta: Posture
    z_min: float
    l_P: float
    alpha_opt: float
    is_global: bool
    all_local_minima: list = field(default_factory=list)
    grid_samples: int = 0
    grid_z_min: float = math.nan

    def to_dict(self) -> dict:
        return {
            "theta_rad": list(self.theta.theta),
            "theta_deg": list(self.theta.degrees()),
            "z_min": self.z_min,
            "l_P": self.l_P,
            "alpha_opt_rad": self.alpha_opt,
            "is_global": self.is_global,
            "grid_samples": self.grid_samples,
            "grid_z_min": self.grid_z_min,
            "all_local_minima": [
                {"theta_rad": list(p.theta), "z": z} for p, z in self.all_local_minima
            ],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "OptimumPosture":
        return cls(
            theta=Posture(tuple(data["theta_rad"])),
            z_min=float(data["z_min"]),
            l_P=float(data["l_P"]),
            alpha_opt=float(data["alpha_opt_rad"]),
            is_global=bool(data["is_global"]),
            all_local_minima=[
                (Posture(tuple(item["theta_rad"])), float(item["z"]))
                for item in data["all_local_minima"]
            ],
            grid_samples=int(data["grid_samples"]),
            grid_z_min=float(data["grid_z_min"]),
        )


def _model_points(m: Manipulator, s: PointSet2 | None, permutation) -> PointSet2:
    if s is None:
        s = default_model_set(m.n)
    if s.n != m.n:
        raise InvalidArgumentError(f"model set has {s.n} points, manipulator has {m.n} joints")
    s, _ = normalize_model_set(s)
    if permutation is not None:
        s = s.relabel(permutation)
    return s


def _torus_local_minima(Z: np.ndarray) -> np.ndarray:
    mask = np.ones(Z.shape, dtype=bool)
    for ax in range(Z.ndim):
        mask &= Z <= np.roll(Z, 1, axis=ax)
        mask &= Z <= np.roll(Z, -1, axis=ax)
    flat = np.flatnonzero(mask)
    order = np.lexsort((flat, Z.ravel()[flat]))
    return flat[order]


def _z_gradient(m: Manipulator, k: np.ndarray, th: np.ndarray) -> tuple[float, np.ndarray]:
    """z and its gradient in all joint angles, from d r_j / d theta_i = E r_max(i,j)."""
    r = r_vectors(m, Posture(tuple(th)))
    n = m.n
    D = float(np.sum(r * k))
    N = float(np.sum(r * (k @ E.T)))
    RR = float(np.sum(r * r))
    Er = r @ E.T
    idx = np.maximum.outer(np.arange(n), np.arange(n))  # [i, j] -> max(i, j)
    dr = Er[idx]  # dr[i, j] = d r_j / d theta_i
    dD = np.einsum("ijc,jc->i", dr, k)
    dN = np.einsum("ijc,jc->i", dr, k @ E.T)
    dRR = 2 * np.einsum("ijc,jc->i", dr, r)
    S2 = D * D + N * N
    z = (float(np.sum(k * k)) - S2 / RR) / (2 * n)
    grad = (-(2 * D * dD + 2 * N * dN) / RR + S2 * dRR / RR**2) / (2 * n)
    return z, grad


def _newton_polish(m: Manipulator, k: np.ndarray, theta1: float, x: np.ndarray) -> np.ndarray:
    # z is flat to second order at a minimum, so minimizing z alone stops
    # near sqrt(eps) in the angles; solving grad z = 0 gets to ~eps
    def grad(y):
        return _z_gradient(m, k, np.concatenate(([theta1], y)))[1][1:]

    h = 1e-6
    g = grad(x)
    for _ in range(8):
        H = np.array([(grad(x + h * e) - grad(x - h * e)) / (2 * h) for e in np.eye(x.size)])
        step = np.linalg.lstsq(0.5 * (H + H.T), -g, rcond=1e-10)[0]
        if not np.all(np.isfinite(step)) or np.max(np.abs(step)) > 1e-4:
            break
        g_new = grad(x + step)
        if np.linalg.norm(g_new) >= np.linalg.norm(g):
            break
        x, g = x + step, g_new
        if np.max(np.abs(step)) < 1e-15:
            break
    return x


def _torus_gap(a: np.ndarray, b: np.ndarray) -> float:
    d = np.remainder(a - b + math.pi, TWO_PI) - math.pi
    return float(np.max(np.abs(d)))


def optimum_posture(
    m: Manipulator,
    s: PointSet2 | None = None,
    cfg: OptimizationConfig | None = None,
    permutation: Sequence[int] | None = None,
) -> OptimumPosture:
    """Globally best-conditioned posture of ``m`` against model set ``s``.

    Joint 1 is fixed at ``cfg.theta1``. Among postures whose z ties the best
    within 1e-9 the lexicographically smallest angle vector (each angle in
    [0, 2pi)) is reported; all refined local minima are listed, best first.
    """
    cfg = cfg or OptimizationConfig()
    k_set = _model_points(m, s, permutation)
    links = m.as_array()
    k = np.ascontiguousarray(k_set.points)
    dims = m.n - 1
    res = cfg.samples_per_axis(dims)
    axis = TWO_PI * np.arange(res) / res

    Z = kernels.lattice_z(links, k, cfg.theta1, axis, dims).reshape((res,) * dims)
    grid_min = float(Z.min())
    seeds = _torus_local_minima(Z)[:MAX_SEEDS]

    def objective(x):
        th = np.concatenate(([cfg.theta1], x))
        return float(kernels.batch_z(links, k, th[None, :])[0])

    step = TWO_PI / res
    found: list[tuple[np.ndarray, float]] = []
    for flat in seeds:
        x0 = axis[np.array(np.unravel_index(flat, Z.shape))]
        simplex = np.vstack([x0, x0 + 0.5 * step * np.eye(dims)])
        sol = minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options={
                "initial_simplex": simplex,
                "xatol": 1e-10,
                "fatol": cfg.refine_tolerance,
                "maxiter": cfg.max_refine_iters,
            },
        )
        x, zx = sol.x, float(sol.fun)
        z_seed = float(Z.ravel()[flat])
        if zx > z_seed:
            x, zx = x0, z_seed
        x_pol = _newton_polish(m, k, cfg.theta1, x)
        z_pol = objective(x_pol)
        # z differences below rounding cannot rank the two; the polished
        # point is the better stationary point
        if z_pol <= zx + 1e-15:
            x, zx = x_pol, z_pol
        x = np.remainder(x, TWO_PI)
        # remainder can return exactly 2pi for tiny negative inputs
        x[x >= TWO_PI] = 0.0
        for i, (y, zy) in enumerate(found):
            if _torus_gap(x, y) <= MERGE_TOL:
                if zx < zy:
                    found[i] = (x, zx)
                break
        else:
            found.append((x, zx))

    found.sort(key=lambda item: (item[1], tuple(item[0])))
    z_best = found[0][1]
    ties = [item for item in found if item[1] <= z_best + TIE_TOL]
    x_best, _ = min(ties, key=lambda item: tuple(item[0]))
    z_x = dict((tuple(x), zx) for x, zx in found)[tuple(x_best)]

    posture = Posture((cfg.theta1, *x_best))
    rec = analyze(m, posture, k_set)
    return OptimumPosture(
        theta=posture,
        z_min=z_x,
        l_P=rec.l_P,
        alpha_opt=rec.alpha_opt,
        is_global=bool(z_best <= grid_min),
        all_local_minima=[(Posture((cfg.theta1, *x)), zx) for x, zx in found],
        grid_samples=res,
        grid_z_min=grid_min,
    )


def characteristic_length(
    m: Manipulator,
    s: PointSet2 | None = None,
    cfg: OptimizationConfig | None = None,
    permutation: Sequence[int] | None = None,
) -> float:
    """Conditioning length at the globally optimum posture."""
    return optimum_posture(m, s, cfg, permutation).l_P


def singularity_proximity(
    m: Manipulator,
    p: Posture,
    s: PointSet2 | None = None,
    permutation: Sequence[int] | None = None,
) -> float:
    """z at posture ``p``, read as a proximity-to-singularity estimate.

    The global maximum, ``sum |k|^2 / 2n`` (1 for a normalized model set), is
    reached where both projection sums vanish; unlike
    :func:`~isocond.conditioning.z_value` this does not raise there. Those
    postures need not be singular, and singular postures need not reach it
    (see the README), so treat the value as a heuristic.
    """
    if p.n != m.n:
        raise InvalidArgumentError(f"posture has {p.n} angles but the manipulator has {m.n} joints")
    k_set = _model_points(m, s, permutation)
    return float(kernels.batch_z(m.as_array(), k_set.points, p.as_array()[None, :])[0])


def random_audit(
    m: Manipulator,
    s: PointSet2 | None = None,
    samples: int = 100_000,
    seed: int = 0,
    theta1: float = 0.0,
    permutation: Sequence[int] | None = None,
) -> tuple[Posture, float]:
    """Best z among uniformly random postures (joint 1 fixed); a sanity bound."""
    k_set = _model_points(m, s, permutation)
    rng = np.random.default_rng(seed)
    th = rng.uniform(0.0, TWO_PI, size=(samples, m.n))
    th[:, 0] = theta1
    z = kernels.batch_z(m.as_array(), k_set.points, th)
    i = int(np.argmin(z))
    return Posture(tuple(th[i])), float(z[i])
