"""Independent reference computations used by the tests.

Nothing here calls the closed forms under test: z is evaluated from the
explicit trace of (Jbar - K)(Jbar - K)^T, and its minimizers are located by
nested dense scans.
"""
import math

import numpy as np

from isocond.geometry import E


# extended precision where the platform has it: near singular postures z is
# almost flat in alpha and a double-precision scan cannot resolve 1e-6 rad
XF = np.longdouble


def z_explicit(r, points, alpha, lam):
    """1/2 * 1/n * tr[(Jbar - K)(Jbar - K)^T] for arrays of alpha and lambda."""
    n = r.shape[0]
    r = np.asarray(r, dtype=XF)
    points = np.asarray(points, dtype=XF)
    alpha = np.asarray(alpha, dtype=XF)[..., None, None]
    lam = np.asarray(lam, dtype=XF)[..., None, None]
    c, s = np.cos(alpha), np.sin(alpha)
    # rows 2-3 of K~: E R(alpha) k_j, stacked as (..., 2, n)
    kx, ky = points[:, 0], points[:, 1]
    rk = np.stack([c[..., 0, :] * kx - s[..., 0, :] * ky, s[..., 0, :] * kx + c[..., 0, :] * ky], axis=-2)
    K_low = np.einsum("ab,...bn->...an", E.astype(XF), rk)
    J_low = lam * (E.astype(XF) @ r.T)
    D = J_low - K_low  # first rows are both ones and cancel
    return 0.5 / n * np.sum(D * D, axis=(-2, -1))


def scan_minimum(r, points, levels=16, samples=41):
    """Joint (alpha, lambda) minimizer of z by successively zoomed dense grids.

    The first lambda grid is quadratic in the sample index so that the small
    lambda of near-singular postures is still resolved.
    """
    bound = math.sqrt(np.sum(points * points) / np.sum(r * r))
    t = np.linspace(0.0, 1.0, samples, dtype=XF)
    A = np.linspace(-math.pi, math.pi, samples, dtype=XF)
    L = XF(1.05 * bound) * t * t
    for _ in range(levels):
        Z = z_explicit(r, points, A[:, None], L[None, :])
        i, j = np.unravel_index(np.argmin(Z), Z.shape)
        best = float(A[i]), float(L[j]), float(Z[i, j])
        da = 2 * (A[1] - A[0])
        A = np.linspace(A[i] - da, A[i] + da, samples)
        L = np.linspace(L[max(j - 2, 0)], L[min(j + 2, samples - 1)], samples)
    return best


def angle_gap(a, b):
    return abs((a - b + math.pi) % (2 * math.pi) - math.pi)
