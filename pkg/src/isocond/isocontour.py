"""z maps over the (theta2, theta3) torus: grids, isocontours, useful area.

Grids are periodic in both angles. Contours are extracted with marching
squares on the torus, so a level curve crossing the 2pi seam comes out as one
polyline. A contour is *closed* when it encloses a region (zero winding around
the torus) and *open* when it wraps around, i.e. is periodic in the flat
[0, 2pi]^2 picture. With ``wrap=False`` the flat window is used instead and
curves cut by its border are open.
"""
from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import ConfigError, EmptyRegionError
from .geometry import PointSet2
from .kinematics import Manipulator
from .optimize import TWO_PI, _model_points

MIN_RESOLUTION = 8


@dataclass(frozen=True, eq=False)
class ZGrid:
    """``values[i, j]`` is z at ``(theta2_axis[i], theta3_axis[j])``."""

    resolution: int
    theta2_axis: np.ndarray
    theta3_axis: np.ndarray
    values: np.ndarray = field(repr=False)

    @property
    def step(self) -> float:
        return TWO_PI / self.resolution

    @property
    def z_min(self) -> float:
        return float(self.values.min())

    @property
    def z_max(self) -> float:
        return float(self.values.max())

    @property
    def argmin(self) -> tuple[float, float]:
        i, j = np.unravel_index(np.argmin(self.values), self.values.shape)
        return float(self.theta2_axis[i]), float(self.theta3_axis[j])

    @property
    def argmax(self) -> tuple[float, float]:
        i, j = np.unravel_index(np.argmax(self.values), self.values.shape)
        return float(self.theta2_axis[i]), float(self.theta3_axis[j])

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("theta2_rad,theta3_rad,z\n")
        for i, t2 in enumerate(self.theta2_axis):
            s2 = format(t2, ".17g")
            row = self.values[i]
            buf.write("".join(f"{s2},{t3:.17g},{z:.17g}\n" for t3, z in zip(self.theta3_axis, row)))
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ZGrid":
        lines = text.strip("\n").split("\n")
        if lines[0] != "theta2_rad,theta3_rad,z":
            raise ConfigError("unexpected grid CSV header")
        data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
        res = math.isqrt(data.shape[0])
        if res * res != data.shape[0]:
            raise ConfigError("grid CSV does not hold a square lattice")
        return cls(
            resolution=res,
            theta2_axis=data[::res, 0].copy(),
            theta3_axis=data[:res, 1].copy(),
            values=data[:, 2].reshape(res, res),
        )


@dataclass(frozen=True)
class WorkspaceMeasure:
    z_M: float
    area_fraction: float
    cell_count: int

    def to_dict(self) -> dict:
        return {"z_M": self.z_M, "area_fraction": self.area_fraction, "cell_count": self.cell_count}


@dataclass(frozen=True, eq=False)
class Contour:
    """One level curve. ``points`` are (theta2, theta3) in radians, unwrapped
    along the curve (so they may leave [0, 2pi) when the curve crosses the seam)."""

    level: float
    closed: bool
    points: np.ndarray = field(repr=False)
    winding: tuple[int, int] = (0, 0)

    def to_dict(self) -> dict:
        return {"level": self.level, "closed": self.closed, "points": self.points.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "Contour":
        return cls(level=float(data["level"]), closed=bool(data["closed"]),
                   points=np.asarray(data["points"], dtype=float).reshape(-1, 2))

    def contains(self, point: Sequence[float]) -> bool:
        """Even-odd test, trying the point's 2pi translates (closed contours only)."""
        if not self.closed:
            return False
        x, y = self.points[:, 0], self.points[:, 1]
        for dx in (0.0, -TWO_PI, TWO_PI):
            for dy in (0.0, -TWO_PI, TWO_PI):
                if _point_in_polygon(point[0] + dx, point[1] + dy, x, y):
                    return True
        return False


def _point_in_polygon(px, py, x, y) -> bool:
    x2, y2 = np.roll(x, -1), np.roll(y, -1)
    crosses = (y > py) != (y2 > py)
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = x + (py - y) * (x2 - x) / (y2 - y)
    return bool(np.count_nonzero(crosses & (px < xint)) % 2)


def evaluate_grid(
    m: Manipulator,
    s: PointSet2 | None = None,
    resolution: int = 720,
    theta1: float = 0.0,
    fixed: Sequence[float] | None = None,
    permutation: Sequence[int] | None = None,
) -> ZGrid:
    """z on the ``resolution x resolution`` lattice of (theta2, theta3) in [0, 2pi).

    For n > 3 the grid is a slice: joints 4..n are held at ``fixed`` (zeros by default).
    """
    if int(resolution) != resolution or resolution < MIN_RESOLUTION:
        raise ConfigError(f"resolution must be an integer >= {MIN_RESOLUTION}, got {resolution}")
    if m.n < 3:
        raise ConfigError("a z grid needs at least two conditioning joints (n >= 3)")
    resolution = int(resolution)
    if fixed is None:
        fixed = np.zeros(m.n - 3)
    fixed = np.asarray(fixed, dtype=float).reshape(-1)
    if fixed.size != m.n - 3:
        raise ConfigError(f"expected {m.n - 3} fixed angles for joints 4..{m.n}, got {fixed.size}")
    k_set = _model_points(m, s, permutation)
    axis = TWO_PI * np.arange(resolution) / resolution
    z = kernels.lattice_z(m.as_array(), k_set.points, theta1, axis, 2, fixed)
    values = z.reshape(resolution, resolution)
    for arr in (axis, values):
        arr.setflags(write=False)
    return ZGrid(resolution=resolution, theta2_axis=axis, theta3_axis=axis, values=values)


def workspace_area(g: ZGrid, z_M: float) -> WorkspaceMeasure:
    """Fraction of the torus where z <= z_M, by counting lattice cells."""
    if not z_M > g.z_min:
        raise EmptyRegionError(f"z_M = {z_M} does not exceed the grid minimum {g.z_min}")
    count = int(np.count_nonzero(g.values <= z_M))
    return WorkspaceMeasure(z_M=float(z_M), area_fraction=count / g.values.size, cell_count=count)


# corner offsets of a cell, counterclockwise from (i, j)
_CORNERS = ((0, 0), (1, 0), (1, 1), (0, 1))


def _cell_edges(i, j):
    # edges counterclockwise: bottom, right, top, left; ("a", i, j) joins
    # (i, j)-(i+1, j) and ("b", i, j) joins (i, j)-(i, j+1)
    return (("a", i, j), ("b", i + 1, j), ("a", i, j + 1), ("b", i, j))


def _march(V: np.ndarray, level: float, wrap: bool):
    """Segments of one level as pairs of edge keys plus the crossing point per key."""
    n0, n1 = V.shape
    ci = n0 if wrap else n0 - 1
    cj = n1 if wrap else n1 - 1
    below = V < level
    points: dict = {}
    segments = []

    def norm(key):
        kind, a, b = key
        return (kind, a % n0, b % n1) if wrap else key

    def crossing(key):
        kind, a, b = key
        a2, b2 = (a + 1, b) if kind == "a" else (a, b + 1)
        v0 = V[a % n0, b % n1]
        v1 = V[a2 % n0, b2 % n1]
        t = (level - v0) / (v1 - v0)
        return (a + t, b) if kind == "a" else (a, b + t)

    for i in range(ci):
        for j in range(cj):
            state = [below[(i + di) % n0, (j + dj) % n1] for di, dj in _CORNERS]
            if all(state) or not any(state):
                continue
            edges = _cell_edges(i, j)
            cut = [q for q in range(4) if state[q] != state[(q + 1) % 4]]
            if len(cut) == 2:
                pairs = [(cut[0], cut[1])]
            else:
                centre = 0.25 * sum(V[(i + di) % n0, (j + dj) % n1] for di, dj in _CORNERS)
                if (centre < level) == state[0]:
                    pairs = [(0, 1), (2, 3)]
                else:
                    pairs = [(3, 0), (1, 2)]
            for e0, e1 in pairs:
                k0, k1 = norm(edges[e0]), norm(edges[e1])
                for key, raw in ((k0, edges[e0]), (k1, edges[e1])):
                    if key not in points:
                        points[key] = crossing(raw)
                segments.append((k0, k1))
    return points, segments


def _trace(points: dict, segments: list):
    adj: dict = {}
    for s_idx, (a, b) in enumerate(segments):
        adj.setdefault(a, []).append(s_idx)
        adj.setdefault(b, []).append(s_idx)
    used = [False] * len(segments)
    chains = []

    def walk(start):
        chain = [start]
        node = start
        while True:
            nxt = [s for s in adj[node] if not used[s]]
            if not nxt:
                return chain
            s = nxt[0]
            used[s] = True
            a, b = segments[s]
            node = b if a == node else a
            if node == start:
                return chain
            chain.append(node)

    ends = sorted(key for key, segs in adj.items() if len(segs) == 1)
    for key in ends:
        if not all(used[s] for s in adj[key]):
            chains.append((walk(key), False))
    for key in sorted(adj):
        if not all(used[s] for s in adj[key]):
            chains.append((walk(key), True))
    return chains


def extract_isocontours(g: ZGrid, levels: Iterable[float], wrap: bool = True) -> list[Contour]:
    """Level curves of ``g`` at each of ``levels`` (marching squares)."""
    levels = [float(v) for v in levels]
    if not levels:
        raise ConfigError("no contour levels given")
    res = g.resolution
    h = g.step
    V = g.values
    if not wrap:
        V = np.pad(V, ((0, 1), (0, 1)), mode="wrap")
    out = []
    for level in levels:
        points, segments = _march(V, level, wrap)
        for chain, cyclic in _trace(points, segments):
            xy = np.array([points[key] for key in chain], dtype=float)
            winding = (0, 0)
            if wrap:
                # each step is shorter than a cell, so the minimal image unwraps it
                steps = np.diff(np.vstack([xy, xy[:1]]), axis=0)
                steps = np.remainder(steps + res / 2, res) - res / 2
                total = steps.sum(axis=0)
                winding = (int(round(total[0] / res)), int(round(total[1] / res)))
                xy = xy[0] + np.vstack([np.zeros(2), np.cumsum(steps[:-1], axis=0)])
            closed = cyclic and winding == (0, 0)
            out.append(Contour(level=level, closed=closed, points=xy * h, winding=winding))
    return out


def contours_to_json(contours: Sequence[Contour], **kwargs) -> str:
    return json.dumps([c.to_dict() for c in contours], **kwargs)


def polygon_moments(points: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
    """Area, centroid and central second moment ``int (x-c)(x-c)^T dA`` of a closed polygon."""
    x, y = points[:, 0], points[:, 1]
    x2, y2 = np.roll(x, -1), np.roll(y, -1)
    cr = x * y2 - x2 * y
    A = cr.sum() / 2
    cx = ((x + x2) * cr).sum() / (6 * A)
    cy = ((y + y2) * cr).sum() / (6 * A)
    ixx = ((x * x + x * x2 + x2 * x2) * cr).sum() / 12
    iyy = ((y * y + y * y2 + y2 * y2) * cr).sum() / 12
    ixy = ((x * y2 + 2 * x * y + 2 * x2 * y2 + x2 * y) * cr).sum() / 24
    C = np.array([[ixx - A * cx * cx, ixy - A * cx * cy], [ixy - A * cx * cy, iyy - A * cy * cy]])
    if A < 0:
        A, C = -A, -C
    return float(A), np.array([cx, cy]), C


def ellipse_axis_ratio(points: np.ndarray) -> float:
    """Major/minor axis ratio of the ellipse with the same area moments as the
    region enclosed by ``points`` (>= 1)."""
    _, _, C = polygon_moments(np.asarray(points, dtype=float))
    lo, hi = np.linalg.eigvalsh(C)
    return math.sqrt(hi / lo)


def region_axis_ratio(g: ZGrid, z_M: float, center: Sequence[float]) -> float:
    """Axis ratio of the cells with z <= z_M, measured about ``center`` on the torus.

    Cell coordinates are unwrapped to the translate nearest ``center``.
    """
    i, j = np.nonzero(g.values <= z_M)
    pts = np.column_stack([g.theta2_axis[i], g.theta3_axis[j]]) - np.asarray(center, dtype=float)
    pts = np.remainder(pts + math.pi, TWO_PI) - math.pi
    C = np.cov(pts.T)
    lo, hi = np.linalg.eigvalsh(C)
    return math.sqrt(hi / lo)
