"""Numba vs numpy timings for the z kernels.

    python benchmarks/bench_kernels.py [--resolution 720] [--batch 100000] [--repeat 5]

JIT compilation is excluded: each numba kernel is called once before timing.
"""
import argparse
import math
import time

import numpy as np

from isocond import _accel, kernels, trivial_set


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--resolution", type=int, default=720)
    ap.add_argument("--batch", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--links", type=float, nargs="+", default=[1.0, 1.0, math.sqrt(3) / 3])
    args = ap.parse_args()

    links = np.array(args.links)
    n = links.size
    k = trivial_set(n).points
    axis = 2 * np.pi * np.arange(args.resolution) / args.resolution
    d = min(n - 1, 2)
    suffix = np.zeros(n - 1 - d)
    thetas = np.random.default_rng(0).uniform(0, 2 * np.pi, (args.batch, n))

    cases = {
        f"lattice {args.resolution}^{d}": lambda u: kernels.lattice_z(links, k, 0.0, axis, d, suffix, use_numba=u),
        f"batch {args.batch}": lambda u: kernels.batch_z(links, k, thetas, use_numba=u),
    }
    print(f"n={n} links={links.tolist()} numba available={_accel.HAVE_NUMBA}")
    print(f"{'kernel':<22}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}{'max |diff|':>12}")
    for name, fn in cases.items():
        t_np, z_np = best_of(lambda: fn(False), args.repeat)
        if _accel.HAVE_NUMBA:
            fn(True)  # compile
            t_nb, z_nb = best_of(lambda: fn(True), args.repeat)
            diff = float(np.max(np.abs(z_nb - z_np)))
            print(f"{name:<22}{1e3 * t_np:>12.2f}{1e3 * t_nb:>12.2f}{t_np / t_nb:>10.1f}{diff:>12.1e}")
        else:
            print(f"{name:<22}{1e3 * t_np:>12.2f}{'-':>12}{'-':>10}{'-':>12}")


if __name__ == "__main__":
    main()
