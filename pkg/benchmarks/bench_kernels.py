"""Compare the numba and pure-numpy back ends on the hot kernels.

Run with ``python benchmarks/bench_kernels.py [--n 256] [--repeat 5]``.
Reports the best wall time of each back end for a batch Bessel evaluation
and for assembling the single layer operator, plus the max deviation
between the two results.
"""

import argparse
import timeit

import numpy as np

from helmholtz_bie import _accel
from helmholtz_bie.geometry import Domain, build_grid, kite
from helmholtz_bie.nystrom import assemble_V


def _best(fn, repeat):
    fn()  # warm up (JIT compile)
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def bench_bessel(size, repeat):
    rng = np.random.default_rng(1)
    z = rng.uniform(1e-3, 40.0, size).astype(complex)
    t_nb = _best(lambda: _accel.bessel01_numba(z), repeat) if _accel.HAVE_NUMBA else float("nan")
    t_np = _best(lambda: _accel.bessel01_numpy(z), repeat)
    dev = 0.0
    if _accel.HAVE_NUMBA:
        a = _accel.bessel01_numba(z)
        b = _accel.bessel01_numpy(z)
        dev = max(float(np.max(np.abs(x - y))) for x, y in zip(a, b))
    return t_nb, t_np, dev


def bench_assembly(n, repeat):
    grid = build_grid(Domain((kite(),)), n)
    saved = _accel.USE_NUMBA
    try:
        _accel.USE_NUMBA = _accel.HAVE_NUMBA
        t_nb = _best(lambda: assemble_V(2.0, grid), repeat)
        v_nb = assemble_V(2.0, grid).matrix
        _accel.USE_NUMBA = False
        t_np = _best(lambda: assemble_V(2.0, grid), repeat)
        v_np = assemble_V(2.0, grid).matrix
    finally:
        _accel.USE_NUMBA = saved
    return t_nb, t_np, float(np.max(np.abs(v_nb - v_np)))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=256, help="nodes on the kite for assembly")
    ap.add_argument("--size", type=int, default=200_000, help="Bessel batch size")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"numba available: {_accel.HAVE_NUMBA}")
    rows = [
        (f"bessel01 x{args.size}",) + bench_bessel(args.size, args.repeat),
        (f"assemble_V N={args.n}",) + bench_assembly(args.n, args.repeat),
    ]
    print(f"{'kernel':<24}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>9}{'max dev':>11}")
    for name, t_nb, t_np, dev in rows:
        print(f"{name:<24}{1e3 * t_nb:>12.2f}{1e3 * t_np:>12.2f}{t_np / t_nb:>9.2f}{dev:>11.1e}")


if __name__ == "__main__":
    main()
