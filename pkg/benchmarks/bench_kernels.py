"""Time the simulator kernels: numba-compiled against the plain-Python/numpy paths.

    python benchmarks/bench_kernels.py [--steps N] [--repeat R]

Both variants are called directly, so the GARCHNET_DISABLE_NUMBA flag does not
matter here.  The first numba call (compilation) is timed separately.
"""

import argparse
import time
import timeit

import numpy as np

from garchnet import _accel
from garchnet.pathsim import (
    _garch_recursion_nb,
    _garch_recursion_py,
    _lagged_autocov_nb,
    _lagged_autocov_np,
    _lagged_autocov_py,
)


def best_of(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    z = np.random.default_rng(0).standard_normal(args.steps)
    a0, a1, b1 = 1e-4, 0.1, 0.8
    s0 = a0 / (1 - a1 - b1)
    lags = np.array([1, 2, 6, 10], dtype=np.int64)

    print(f"numba available: {_accel.HAVE_NUMBA}, steps: {args.steps}")
    if _accel.HAVE_NUMBA:
        t0 = time.perf_counter()
        _garch_recursion_nb(z[:10], a0, a1, b1, s0)
        _lagged_autocov_nb(z[:20], 0.0, lags)
        print(f"numba compile: {time.perf_counter() - t0:.2f}s")

    recursion = _garch_recursion_nb if _accel.HAVE_NUMBA else _garch_recursion_py
    x = recursion(z, a0, a1, b1, s0)
    y = x * x
    m = float(y.mean())

    rows = [("garch recursion", "python", lambda: _garch_recursion_py(z, a0, a1, b1, s0))]
    if _accel.HAVE_NUMBA:
        rows.append(("garch recursion", "numba", lambda: _garch_recursion_nb(z, a0, a1, b1, s0)))
    rows.append(("lagged autocov", "python", lambda: _lagged_autocov_py(y, m, lags)))
    rows.append(("lagged autocov", "numpy", lambda: _lagged_autocov_np(y, m, lags)))
    if _accel.HAVE_NUMBA:
        rows.append(("lagged autocov", "numba", lambda: _lagged_autocov_nb(y, m, lags)))

    # the pure-Python loops are slow; time them once
    for name, impl, fn in rows:
        t = best_of(fn, 1 if impl == "python" else args.repeat)
        print(f"{name:16s} {impl:7s} {t * 1e3:10.1f} ms")

    if _accel.HAVE_NUMBA:
        np.testing.assert_allclose(_garch_recursion_nb(z, a0, a1, b1, s0), _garch_recursion_py(z, a0, a1, b1, s0), rtol=1e-12)
        np.testing.assert_allclose(_lagged_autocov_nb(y, m, lags), _lagged_autocov_np(y, m, lags), rtol=1e-9)
        print("numba and reference paths agree")


if __name__ == "__main__":
    main()
