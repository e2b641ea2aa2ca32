"""Compiled versus numpy stepping kernels.

Usage: ``python benchmarks/bench_kernels.py [--repeat N]``

Times both backends on the emission-moment loop behind the three-level
lifetime (fig6 parameters, s0 from 1e-4 to 1e-2) and on long recorded
trajectories, and checks that the two agree.
"""

import argparse
import math
import time

import numpy as np

from zenomatch import ThreeLevelParams
from zenomatch import _backend
from zenomatch.sweep import FIG6_GAMMA, FIG6_OMEGA
from zenomatch.threelevel import GROUND, STEPS_PER_PERIOD, build_hamiltonian, rk4_step_matrix


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - start)
    return min(times), result


def emission_case(s0):
    p = ThreeLevelParams.from_saturation(FIG6_OMEGA, s0, FIG6_GAMMA)
    h = build_hamiltonian(p)
    lam = h.scale
    step = 2 * math.pi / STEPS_PER_PERIOD
    M = rk4_step_matrix(-1j * h.matrix / lam, step)
    return (M, GROUND, step, p.Gamma / lam, 1e-8, 1e-7, 4_000_000_000)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    compiled, python = _backend.compiled_kernels, _backend.python_kernels
    if compiled is None:
        raise SystemExit("compiled kernels not built; run `python setup.py build_ext --inplace`")

    print(f"{'case':<46}{'compiled':>12}{'numpy':>12}{'speedup':>9}  agreement")
    for s0 in (1e-4, 1e-3, 1e-2):
        case = emission_case(s0)
        tc, a = best_of(lambda: compiled.emission_moments(*case), args.repeat)
        tp, b = best_of(lambda: python.emission_moments(*case), args.repeat)
        agree = abs(a[1] - b[1]) / abs(a[1])
        label = f"emission_moments s0={s0:g} ({a[5]:.2e} steps)"
        print(f"{label:<46}{tc * 1e3:>10.2f}ms{tp * 1e3:>10.2f}ms{tp / tc:>8.1f}x  {agree:.1e}")

    M = emission_case(1e-3)[0]
    for n_sub, n_out in ((1, 200_000), (40, 20_000), (10_000, 2_000)):
        tc, a = best_of(lambda: compiled.evolve_recorded(M, GROUND, n_sub, n_out), args.repeat)
        tp, b = best_of(lambda: python.evolve_recorded(M, GROUND, n_sub, n_out), args.repeat)
        agree = float(np.max(np.abs(a - b)))
        label = f"evolve_recorded {n_out} x {n_sub} steps"
        print(f"{label:<46}{tc * 1e3:>10.2f}ms{tp * 1e3:>10.2f}ms{tp / tc:>8.1f}x  {agree:.1e}")


if __name__ == "__main__":
    main()
