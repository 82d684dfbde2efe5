"""Time the numba and pure-numpy kernels against each other.

Run with ``python benchmarks/bench_kernels.py``. Both flavours are called
directly on identical inputs, so the result does not depend on
``AAHBATH_DISABLE_NUMBA``. The first numba call (compilation or cache load)
is excluded from the timings.
"""
import argparse
import time

import numpy as np

from aahbath import _kernels
from aahbath._accel import HAVE_NUMBA
from aahbath.bath import BathSpec
from aahbath.dynamics import TimeGrid, evolve, single_site_state
from aahbath.lattice import LatticeSpec, build_lattice, eigensystem


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def bench_evolve(n_sites, t_max, dt, repeat):
    spec = LatticeSpec(n_sites, 2.0, 1 / 3, -np.pi)
    es = eigensystem(build_lattice(spec))
    psi = single_site_state(n_sites, n_sites)
    grid = TimeGrid(t_max, dt)
    run = lambda b: evolve(psi, spec, BathSpec(), grid, es=es, backend=b).amps
    run("numba")  # warm-up
    t_nb, a_nb = best_of(lambda: run("numba"), repeat)
    t_np, a_np = best_of(lambda: run("numpy"), repeat)
    return t_nb, t_np, float(np.max(np.abs(a_nb - a_np)))


def bench_resolvent(n_sites, points, repeat):
    es = eigensystem(build_lattice(LatticeSpec(n_sites, 2.0, 1 / 3, -np.pi)))
    eps = np.asarray(es.energies)
    w2 = np.asarray(es.weights) ** 2
    E = np.linspace(-40.0, -3.0, points)
    _kernels.resolvent_sum_numba(E, eps, w2)
    t_nb, r_nb = best_of(lambda: _kernels.resolvent_sum_numba(E, eps, w2), repeat)
    t_np, r_np = best_of(lambda: _kernels.resolvent_sum_numpy(E, eps, w2), repeat)
    return t_nb, t_np, float(np.max(np.abs(r_nb - r_np) / np.abs(r_np)))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sites", type=int, default=99)
    ap.add_argument("--t-max", type=float, default=200.0)
    ap.add_argument("--dt", type=float, default=0.005)
    ap.add_argument("--points", type=int, default=200000, help="energies for the resolvent sum")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if not HAVE_NUMBA:
        ap.error("numba is not installed")

    print(f"{'kernel':<28}{'numba [s]':>12}{'numpy [s]':>12}{'ratio':>9}{'max diff':>12}")
    t_nb, t_np, diff = bench_evolve(args.sites, args.t_max, args.dt, args.repeat)
    label = f"evolve N={args.sites} t={args.t_max:g}"
    print(f"{label:<28}{t_nb:>12.3f}{t_np:>12.3f}{t_np / t_nb:>9.2f}{diff:>12.1e}")
    t_nb, t_np, diff = bench_resolvent(args.sites, args.points, args.repeat)
    label = f"resolvent {args.points} pts"
    print(f"{label:<28}{t_nb:>12.3f}{t_np:>12.3f}{t_np / t_nb:>9.2f}{diff:>12.1e}")


if __name__ == "__main__":
    main()
