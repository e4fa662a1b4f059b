"""Timing of the numba kernels against their numpy fallbacks.

Run with ``python3 benchmarks/bench_kernels.py``.  The end-to-end line times
one order-3 point evaluation with whichever backend ``PQKT_NUMBA`` selects.
"""

import time

import numpy as np

from pqkt import _kernels
from pqkt.catalog import preset, sample_points
from pqkt.geometry import local_geometry


def _best(fn, repeat=5, number=20):
    fn()  # warm up (triggers numba compilation)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        for _ in range(number):
            fn()
        times.append((time.perf_counter() - t0) / number)
    return min(times)


def bench_kernels(m=8, terms=60, seed=0):
    rng = np.random.default_rng(seed)
    exps = rng.integers(0, 4, size=(terms, m))
    coeffs = rng.normal(size=terms)
    x = rng.uniform(-0.5, 0.5, size=m)
    pts = rng.uniform(-0.5, 0.5, size=(500, m))
    t = rng.normal(size=(m, m, m))
    eps = np.where(np.arange(m) % 2 == 0, 1.0, -1.0)
    J = rng.normal(size=(m, m))
    cases = {
        "monomial_jets(order=3)": lambda b: _kernels.monomial_jets(exps, x, 3, backend=b),
        "poly_eval(500 pts)": lambda b: _kernels.poly_eval(exps, coeffs, pts, backend=b),
        "frame_trace3": lambda b: _kernels.frame_trace3(t, eps, J, backend=b),
    }
    rows = []
    for name, fn in cases.items():
        tn = _best(lambda: fn("numpy"))
        tb = _best(lambda: fn("numba")) if _kernels.HAVE_NUMBA else float("nan")
        rows.append((name, tn, tb))
    return rows


def bench_point(n=2):
    S = preset("conformal", n)
    p = sample_points(n, count=1)[0]
    local_geometry(S, p, 3).R  # warm up
    t0 = time.perf_counter()
    local_geometry(S, p + 1e-3, 3).R
    return time.perf_counter() - t0


if __name__ == "__main__":
    print(f"numba available: {_kernels.HAVE_NUMBA}")
    print(f"{'kernel':28s} {'numpy [s]':>12s} {'numba [s]':>12s} {'speedup':>8s}")
    for name, tn, tb in bench_kernels():
        print(f"{name:28s} {tn:12.3e} {tb:12.3e} {tn / tb:8.1f}")
    print(f"order-3 point on the conformal model (n=2): {bench_point():.3f} s")
