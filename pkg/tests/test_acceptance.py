"""Acceptance criteria, one test per criterion.

Each test prints a single PASS/FAIL line with the measured error and the
wall time, then asserts both the accuracy and the runtime budget.  Run with
``pytest tests/test_acceptance.py -v`` or ``python tests/test_acceptance.py``.
"""

import math
import time

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from zenomatch import (
    EffectiveParams,
    PulseScheme,
    ThreeLevelParams,
    calibrate_delta0,
    compare_models,
    excitation_probability,
    find_gamma_pair,
    gamma_at_minimum,
    geometric_series_oracle,
    lifetime_continuous,
    lifetime_quadrature_oracle,
    lifetime_three_level,
    mean_detection_time,
    newton_iterates,
    pulse_interval_approx,
    reduce_to_effective,
    solve_pulse_interval,
)
from zenomatch.continuous import tau_c
from zenomatch.matcher import light_shift_residual, pulsed_mean
from zenomatch.sweep import FIG6_GAMMA, FIG6_OMEGA, PRESETS, run_preset

SEED = 20240611


class Check:
    """Times a block and reports it as one PASS/FAIL line."""

    def __init__(self, number, title, budget):
        self.number, self.title, self.budget = number, title, budget
        self.failures = []

    def require(self, ok, message):
        if not ok:
            self.failures.append(message)

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is not None:
            return False
        if self.budget is not None and self.elapsed > self.budget:
            self.failures.append(f"runtime {self.elapsed:.2f}s > {self.budget}s")
        return False

    def report(self, detail, out=print):
        status = "PASS" if not self.failures else "FAIL"
        budget = f"{self.elapsed:.2f}s" + (f" / {self.budget}s" if self.budget else "")
        out(f"[{status}] {self.number:>2}. {self.title}: {detail} ({budget})")
        for f in self.failures:
            out(f"        {f}")
        return not self.failures


@pytest.fixture
def report(capsys):
    def emit(check, detail):
        with capsys.disabled():
            ok = check.report(detail, out=lambda s: print("\n" + s))
        assert ok, "; ".join(check.failures)
    return emit


def criterion_1():
    rng = np.random.default_rng(SEED)
    ratios = 10 ** rng.uniform(-2, 2, 1000)
    detunings = rng.uniform(0, 5, 1000)
    with Check(1, "closed-form lifetime vs quadrature, 1000 draws", 10.0) as c:
        worst = 0.0
        for g, d in zip(ratios, detunings):
            e = EffectiveParams(1.0, float(g), float(d))
            closed = lifetime_continuous(e)
            worst = max(worst, abs(lifetime_quadrature_oracle(e) - closed) / closed)
    c.require(worst < 1e-8, f"worst relative error {worst:.3e} >= 1e-8")
    return c, f"worst rel err {worst:.2e} (tol 1e-8)"


def criterion_2():
    rng = np.random.default_rng(SEED + 1)
    schemes = []
    while len(schemes) < 1000:
        s = PulseScheme(float(10 ** rng.uniform(-3, math.log10(20))),
                        float(rng.uniform(-5, 5)), float(10 ** rng.uniform(-1, 1)))
        if excitation_probability(s) > 1e-6:
            schemes.append(s)
    with Check(2, "pulsed mean vs geometric series, 1000 schemes", 5.0) as c:
        worst = 0.0
        for s in schemes:
            exact = mean_detection_time(s)
            worst = max(worst, abs(geometric_series_oracle(s) - exact) / exact)
    c.require(worst < 1e-9, f"worst relative error {worst:.3e} >= 1e-9")
    return c, f"worst rel err {worst:.2e} (tol 1e-9)"


def criterion_3():
    limits = {20.0: 1e-2, 50.0: 1.6e-3, 100.0: 4e-4}
    with Check(3, "short-interval limit delta_t -> 4/gamma", 1.0) as c:
        parts = []
        for g, tol in limits.items():
            e = EffectiveParams(1.0, g, 0.0)
            dev = abs(pulse_interval_approx(e) - 4.0 / g) / (4.0 / g)
            res = solve_pulse_interval(e, tol=1e-10).residual
            c.require(dev < tol, f"gamma/omega={g:g}: deviation {dev:.3e} >= {tol:g}")
            c.require(res < 1e-10, f"gamma/omega={g:g}: Newton residual {res:.3e} >= 1e-10")
            parts.append(f"{g:g}: {dev:.2e}/{res:.0e}")
    return c, "dev/residual " + ", ".join(parts)


def criterion_4():
    with Check(4, "third Newton iterate within 0.5%, delta=delta0=3", 1.0) as c:
        worst = 0.0
        for g in np.linspace(0.5, 20.0, 50):
            e = EffectiveParams(1.0, float(g), 3.0, 3.0)
            dt3 = newton_iterates(e, 3)[3]
            tau = lifetime_continuous(e)
            worst = max(worst, abs(pulsed_mean(e, dt3) - tau) / tau)
    c.require(worst < 5e-3, f"worst mismatch {worst:.3e} >= 5e-3")
    return c, f"worst |<t>-tau_c|/tau_c {worst:.3e} (tol 5e-3)"


def criterion_5():
    with Check(5, "lifetime minimum location", 1.0) as c:
        worst = 0.0
        for d in (0.0, 1.0, 3.0):
            star = gamma_at_minimum(1.0, d)
            res = minimize_scalar(lambda g: tau_c(1.0, g, d), bracket=(0.1 * star, star, 10 * star),
                                  tol=1e-12)
            worst = max(worst, abs(res.x - star) / star)
    c.require(worst < 1e-6, f"worst relative offset {worst:.3e} >= 1e-6")
    return c, f"worst rel offset {worst:.2e} (tol 1e-6)"


def criterion_6():
    with Check(6, "two-gamma duality at target tau_c = 3", 1.0) as c:
        pair = find_gamma_pair(1.0, 0.0, 3.0)
        err = max(abs(pair.gamma_weak - 1.0), abs(pair.gamma_strong - 2.0))
    c.require(err < 1e-9, f"pair ({pair.gamma_weak!r}, {pair.gamma_strong!r}) off by {err:.3e}")
    return c, f"pair ({pair.gamma_weak:.12f}, {pair.gamma_strong:.12f})"


def criterion_7():
    with Check(7, "three-level vs effective model, s0 in {1e-4,1e-3,1e-2}", 60.0) as c:
        parts = []
        for s0 in (1e-4, 1e-3, 1e-2):
            p = ThreeLevelParams.from_saturation(FIG6_OMEGA, s0, FIG6_GAMMA)
            tc = lifetime_continuous(reduce_to_effective(p))
            t3 = lifetime_three_level(p).tau
            rel = abs(t3 - tc) / tc
            pop = compare_models(p, np.linspace(0.0, 3.0 * tc, 301)).max_discrepancy
            c.require(rel < 1e-2, f"s0={s0:g}: lifetime mismatch {rel:.3e} >= 1e-2")
            c.require(pop < 1e-2, f"s0={s0:g}: population mismatch {pop:.3e} >= 1e-2")
            parts.append(f"{s0:g}: {rel:.1e}/{pop:.1e}")
    return c, "tau/pop " + ", ".join(parts)


def criterion_8():
    with Check(8, "short-time P2 independent of delta0", 1.0) as c:
        parts = []
        for d0 in (0.0, 1.0, 10.0):
            s = PulseScheme(1e-3 * 2.0, d0, 1.0)  # delta_t = 1e-3 tau_Z at omega = 1
            p2 = excitation_probability(s)
            rel = abs(p2 - s.delta_t**2 / 4.0) / p2
            c.require(rel < 1e-5, f"delta0/omega={d0:g}: deviation {rel:.3e} >= 1e-5")
            parts.append(f"{d0:g}: {rel:.2e}")
    return c, "rel dev " + ", ".join(parts)


def criterion_9():
    with Check(9, "light-shift calibration", 1.0) as c:
        worst_res = worst_approx = 0.0
        for Delta in (2 * math.pi * 3.18e6, -20e6):
            for s0 in np.geomspace(1e-5, 1e-1, 81):
                Omega = FIG6_GAMMA * math.sqrt(s0 / 2.0)
                exact = calibrate_delta0(Delta, Omega, FIG6_GAMMA)
                res = abs(light_shift_residual(Delta, Omega, FIG6_GAMMA, exact)) / FIG6_GAMMA
                worst_res = max(worst_res, res)
                if s0 <= 1e-2:
                    approx = calibrate_delta0(Delta, Omega, FIG6_GAMMA, mode="approx")
                    worst_approx = max(worst_approx, abs(approx - exact) / abs(exact))
    c.require(worst_res < 1e-10, f"residual {worst_res:.3e} >= 1e-10")
    c.require(worst_approx < 1e-3, f"approx vs exact {worst_approx:.3e} >= 1e-3")
    return c, f"|delta|/Gamma {worst_res:.1e}, approx rel {worst_approx:.1e}"


def criterion_10(tmp_dir):
    with Check(10, "presets are byte-identical across runs", None) as c:
        for name in PRESETS:
            blobs = []
            for k in range(2):
                path = tmp_dir / f"{name}-{k}.csv"
                with open(path, "w", newline="") as fh:
                    run_preset(name).write(fh)
                blobs.append(path.read_bytes())
            c.require(blobs[0] == blobs[1], f"{name} differs between runs")
    return c, f"{len(PRESETS)} presets"


def test_criterion_01_lifetime_closed_form(report):
    report(*criterion_1())


def test_criterion_02_pulsed_mean_series(report):
    report(*criterion_2())


def test_criterion_03_short_interval_limit(report):
    report(*criterion_3())


def test_criterion_04_three_newton_iterates(report):
    report(*criterion_4())


def test_criterion_05_minimum_location(report):
    report(*criterion_5())


def test_criterion_06_gamma_duality(report):
    report(*criterion_6())


def test_criterion_07_three_level_agreement(report):
    report(*criterion_7())


def test_criterion_08_short_time_delta0_independence(report):
    report(*criterion_8())


def test_criterion_09_calibration(report):
    report(*criterion_9())


def test_criterion_10_determinism(report, tmp_path):
    report(*criterion_10(tmp_path))


if __name__ == "__main__":
    import sys
    import tempfile
    from pathlib import Path

    passed = []
    with tempfile.TemporaryDirectory() as d:
        runs = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
                criterion_7, criterion_8, criterion_9, lambda: criterion_10(Path(d))]
        for run in runs:
            check, detail = run()
            passed.append(check.report(detail))
    print(f"{sum(passed)}/{len(passed)} criteria pass")
    sys.exit(0 if all(passed) else 1)
