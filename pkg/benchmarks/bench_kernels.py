"""Time the numba and numpy backends on the same inputs.

    python benchmarks/bench_kernels.py [--repeat 5]

Each kernel is warmed up once (this triggers JIT compilation on the numba
side), then timed ``--repeat`` times; the best time is reported.
"""
import argparse
import time

import numpy as np

from uavfso import _kernels
from uavfso.params import Scenario
from uavfso.quadrature import DEFAULT_QUAD


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def workloads(be):
    sc = Scenario()
    prms = [_kernels.pack(sc, h, 0.2) for h in np.linspace(60.0, 200.0, 50)]
    rtol, budget = DEFAULT_QUAD.relative_tolerance, DEFAULT_QUAD.max_subdivisions

    def quad():
        for prm in prms:
            be.integrate(_kernels.RATE_LOW, prm, 0.0, 50.0, rtol, budget)

    gen = np.random.default_rng(0)
    counts = gen.poisson(np.pi * 1e-3 * 2500, 1_000_000).astype(np.int64)
    u = gen.random(int(counts.sum()))
    radii = _kernels.numpy_backend.edge_radii(counts, u, 50.0)

    def drops():
        be.edge_radii(counts, u, 50.0)

    def sums():
        be.rate_sums(radii, prms[20])

    p_f = np.geomspace(1e5, 1e9, 15)
    rho = np.concatenate(([0.0], np.geomspace(1e-14, 0.5, 14)))
    omega = np.geomspace(1e-4, 4e-4, 15)
    c_edge = gen.uniform(1e7, 8e7, (15, 15))
    p_u = np.linspace(0.0133, 0.2, 15)

    def scan():
        be.grid_scan(p_f, rho, omega, c_edge, p_u, 5e7, 10 ** 1.5 * 1e-9, 0.2, 1000.0, 1e-9)

    return {
        "quadrature (50 edge-rate integrals)": quad,
        "edge radii (1e6 drops)": drops,
        "rate sums (1e6 drops)": sums,
        "grid scan (15^4 points)": scan,
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if _kernels.numba_backend is None:
        raise SystemExit("numba is not installed; nothing to compare")

    nb = workloads(_kernels.numba_backend)
    npy = workloads(_kernels.numpy_backend)
    print(f"{'kernel':<38}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}")
    for name in nb:
        t_nb = best_of(nb[name], args.repeat)
        t_np = best_of(npy[name], args.repeat)
        print(f"{name:<38}{t_nb * 1e3:>12.2f}{t_np * 1e3:>12.2f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
