"""Hot loops: projection sums of many postures at once.

For a posture the conditioning index only needs three scalars,

    D  = sum_j r_j . k_j            (projections onto the model points)
    N  = sum_j r_j . (E k_j)        (transverse projections)
    RR = sum_j |r_j|^2              (= n * d_rms^2)

from which ``alpha = atan2(N, D)``, ``lambda = hypot(N, D) / RR`` and
``z = (sum |k_j|^2 - (N^2 + D^2) / RR) / (2 n)``.

Every kernel exists twice: a numba version (``*_numba``) and a vectorised numpy
version (``*_numpy``). The un-suffixed names dispatch on ``_accel.USE_NUMBA``.
Outputs are written by position, so the parallel numba loops are deterministic.
"""
from __future__ import annotations

import math

import numpy as np

from . import _accel

# numpy path: postures per chunk when walking a lattice
_CHUNK = 1 << 16


def batch_sums_numpy(links, k, thetas):
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    cum = np.cumsum(thetas, axis=1)
    ux = links * np.cos(cum)
    uy = links * np.sin(cum)
    rx = np.cumsum(ux[:, ::-1], axis=1)[:, ::-1]
    ry = np.cumsum(uy[:, ::-1], axis=1)[:, ::-1]
    D = rx @ k[:, 0] + ry @ k[:, 1]
    N = ry @ k[:, 0] - rx @ k[:, 1]
    RR = np.sum(rx * rx + ry * ry, axis=1)
    return D, N, RR


def lattice_sums_numpy(links, k, theta1, axis, d, suffix):
    res = axis.shape[0]
    total = res**d
    n = links.shape[0]
    D = np.empty(total)
    N = np.empty(total)
    RR = np.empty(total)
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total))
        coords = np.unravel_index(idx, (res,) * d)
        th = np.empty((idx.size, n))
        th[:, 0] = theta1
        for q in range(d):
            th[:, 1 + q] = axis[coords[q]]
        th[:, 1 + d :] = suffix
        D[idx], N[idx], RR[idx] = batch_sums_numpy(links, k, th)
    return D, N, RR


def _make_numba_kernels():
    from numba import njit, prange

    @njit(cache=True, nogil=True)
    def posture_sums(links, k, th):
        n = links.shape[0]
        ux = np.empty(n)
        uy = np.empty(n)
        cum = 0.0
        for i in range(n):
            cum += th[i]
            ux[i] = links[i] * math.cos(cum)
            uy[i] = links[i] * math.sin(cum)
        rx = 0.0
        ry = 0.0
        D = 0.0
        N = 0.0
        RR = 0.0
        for j in range(n - 1, -1, -1):
            rx += ux[j]
            ry += uy[j]
            D += rx * k[j, 0] + ry * k[j, 1]
            N += ry * k[j, 0] - rx * k[j, 1]
            RR += rx * rx + ry * ry
        return D, N, RR

    @njit(cache=True, parallel=True, nogil=True)
    def batch_sums(links, k, thetas):
        m = thetas.shape[0]
        D = np.empty(m)
        N = np.empty(m)
        RR = np.empty(m)
        for p in prange(m):
            D[p], N[p], RR[p] = posture_sums(links, k, thetas[p])
        return D, N, RR

    @njit(cache=True, parallel=True, nogil=True)
    def lattice_sums(links, k, theta1, axis, d, suffix):
        res = axis.shape[0]
        n = links.shape[0]
        total = res**d
        D = np.empty(total)
        N = np.empty(total)
        RR = np.empty(total)
        for p in prange(total):
            th = np.empty(n)
            th[0] = theta1
            stride = 1
            for q in range(d - 1, -1, -1):
                th[1 + q] = axis[(p // stride) % res]
                stride *= res
            for q in range(suffix.shape[0]):
                th[1 + d + q] = suffix[q]
            D[p], N[p], RR[p] = posture_sums(links, k, th)
        return D, N, RR

    return batch_sums, lattice_sums


if _accel.HAVE_NUMBA:
    batch_sums_numba, lattice_sums_numba = _make_numba_kernels()
else:  # pragma: no cover
    batch_sums_numba = lattice_sums_numba = None


def _as_inputs(links, k):
    links = np.ascontiguousarray(links, dtype=float)
    k = np.ascontiguousarray(k, dtype=float)
    if k.shape != (links.shape[0], 2):
        raise ValueError(f"model points shape {k.shape} does not match {links.shape[0]} links")
    return links, k


def batch_sums(links, k, thetas, use_numba=None):
    """Projection sums ``(D, N, RR)`` for each row of ``thetas`` (shape (m, n))."""
    links, k = _as_inputs(links, k)
    thetas = np.ascontiguousarray(np.atleast_2d(thetas), dtype=float)
    if use_numba is None:
        use_numba = _accel.USE_NUMBA
    if use_numba:
        return batch_sums_numba(links, k, thetas)
    return batch_sums_numpy(links, k, thetas)


def lattice_sums(links, k, theta1, axis, d, suffix=(), use_numba=None):
    """Projection sums over the ``len(axis)**d`` lattice of joints 2..d+1.

    Joint 1 is held at ``theta1`` and joints d+2..n at ``suffix``. The result is
    flat in C order (last lattice joint varies fastest).
    """
    links, k = _as_inputs(links, k)
    axis = np.ascontiguousarray(axis, dtype=float)
    suffix = np.ascontiguousarray(suffix, dtype=float).reshape(-1)
    if 1 + d + suffix.size != links.shape[0]:
        raise ValueError("lattice dimension plus fixed joints must equal n - 1")
    if use_numba is None:
        use_numba = _accel.USE_NUMBA
    if use_numba:
        return lattice_sums_numba(links, k, float(theta1), axis, int(d), suffix)
    return lattice_sums_numpy(links, k, float(theta1), axis, int(d), suffix)


def z_from_sums(D, N, RR, k_sq_sum, n):
    """Minimum-over-(alpha, lambda) distance index from the projection sums."""
    S2 = D * D + N * N
    # rounding can push an exact zero slightly negative
    return np.maximum((k_sq_sum - S2 / RR) / (2.0 * n), 0.0)


def batch_z(links, k, thetas, use_numba=None):
    links, k = _as_inputs(links, k)
    D, N, RR = batch_sums(links, k, thetas, use_numba=use_numba)
    return z_from_sums(D, N, RR, float(np.sum(k * k)), links.shape[0])


def lattice_z(links, k, theta1, axis, d, suffix=(), use_numba=None):
    links, k = _as_inputs(links, k)
    D, N, RR = lattice_sums(links, k, theta1, axis, d, suffix, use_numba=use_numba)
    return z_from_sums(D, N, RR, float(np.sum(k * k)), links.shape[0])
