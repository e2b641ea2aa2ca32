"""Pulse interval that reproduces a continuous-measurement lifetime.

Solves ``delta_t / P2(delta_t) = tau_c`` for the interval between projective
measurements, either in closed form from the short-time expansion of P2 or
exactly by Newton iteration seeded with that closed form.  Also calibrates
the bare detuning that cancels the coupling-laser light shift.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .continuous import lifetime_continuous
from .errors import InvalidParameters, NoSolution, NonConvergence, SingularStep
from .params import EffectiveParams
from .pulsed import (
    PulseScheme,
    excitation_probability,
    excitation_probability_derivative,
)
from .roots import bisect, newton_bracketed

DERIVATIVE_MODES = ("approx", "exact", "auto")


@dataclass(frozen=True)
class MatchResult:
    delta_t: float
    iterations: int
    residual: float
    tau_c: float
    mean_t: float
    method: str

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _scheme(e: EffectiveParams, delta_t: float) -> PulseScheme:
    # free evolution between pulses sees the bare detuning, not the shifted one
    return PulseScheme(delta_t, e.delta0, e.omega)


def pulsed_mean(e: EffectiveParams, delta_t: float) -> float:
    """``delta_t / P2`` without the never-detected check (returns inf)."""
    p2 = excitation_probability(_scheme(e, delta_t))
    return delta_t / p2 if p2 > 0 else math.inf


def match_residual(e: EffectiveParams, delta_t: float, tau: float | None = None) -> float:
    """Relative mismatch ``|<t> - tau_c| / tau_c`` at ``delta_t``."""
    tau = lifetime_continuous(e) if tau is None else tau
    return abs(pulsed_mean(e, delta_t) - tau) / tau


def pulse_interval_approx(e: EffectiveParams) -> float:
    """Closed-form interval ``4 gamma / (2 omega^2 + gamma^2 + 4 delta^2)``.

    Obtained by replacing P2 with its short-time limit ``(delta_t omega / 2)^2``.
    """
    return 4.0 * e.gamma / (2.0 * e.omega**2 + e.gamma**2 + 4.0 * e.delta**2)


def newton_step(e: EffectiveParams, delta_t0: float, *, derivative: str = "approx",
                tau: float | None = None) -> float:
    """One Newton update for ``delta_t = tau_c P2(delta_t)``.

    ``derivative="approx"`` uses ``P2' ~ delta_t0 omega^2 / 2``; ``"exact"``
    differentiates the closed form of P2.

    Raises
    ------
    SingularStep
        If ``1/tau_c - P2'`` vanishes.
    """
    if delta_t0 <= 0:
        raise InvalidParameters("delta_t0 must be > 0")
    tau = lifetime_continuous(e) if tau is None else tau
    s = _scheme(e, delta_t0)
    p2 = excitation_probability(s)
    if derivative == "approx":
        dp2 = delta_t0 * e.omega**2 / 2.0
    elif derivative == "exact":
        dp2 = excitation_probability_derivative(s)
    else:
        raise InvalidParameters(f"derivative must be 'approx' or 'exact', got {derivative!r}")
    denom = 1.0 / tau - dp2
    if abs(denom) <= 1e-14 * max(1.0 / tau, abs(dp2)):
        raise SingularStep(f"Newton denominator vanishes at delta_t0 = {delta_t0!r}")
    return (p2 - delta_t0 * dp2) / denom


def newton_iterates(e: EffectiveParams, n: int, *, seed: float | None = None,
                    derivative: str = "approx") -> list[float]:
    """``[seed, step 1, ..., step n]`` starting from the closed-form interval."""
    tau = lifetime_continuous(e)
    dt = pulse_interval_approx(e) if seed is None else seed
    out = [dt]
    for _ in range(n):
        dt = newton_step(e, dt, derivative=derivative, tau=tau)
        out.append(dt)
    return out


def _result(e, delta_t, iterations, tau, method):
    mean_t = pulsed_mean(e, delta_t)
    return MatchResult(delta_t, iterations, abs(mean_t - tau) / tau, tau, mean_t, method)


def solve_pulse_interval(e: EffectiveParams, tol: float = 1e-10, max_iter: int = 50, *,
                         derivative: str = "auto") -> MatchResult:
    """Exact matching interval by Newton iteration from the closed-form seed.

    Iterates until the relative residual ``|<t> - tau_c| / tau_c`` is below
    ``tol``.  In ``"auto"`` mode the approximate derivative is used until a
    step fails to halve the residual, after which the exact derivative takes
    over; this matters near the lifetime minimum, where the root is close to
    a tangency and the approximate slope converges only linearly.

    Raises
    ------
    NonConvergence
        After ``max_iter`` steps; ``best`` holds the lowest-residual iterate.
    """
    if derivative not in DERIVATIVE_MODES:
        raise InvalidParameters(f"derivative must be one of {DERIVATIVE_MODES}")
    tau = lifetime_continuous(e)
    dt = pulse_interval_approx(e)
    res = match_residual(e, dt, tau)
    best = (res, dt)
    mode = "exact" if derivative == "exact" else "approx"
    for it in range(1, max_iter + 1):
        if res < tol:
            return _result(e, dt, it - 1, tau, "newton")
        new = newton_step(e, dt, derivative=mode, tau=tau)
        if not (new > 0 and math.isfinite(new)):
            raise NonConvergence(f"Newton left the positive axis at iteration {it}", best=best[1])
        new_res = match_residual(e, new, tau)
        if derivative == "auto" and new_res > 0.5 * res:
            mode = "exact"
        dt, res = new, new_res
        best = min(best, (res, dt))
    if res < tol:
        return _result(e, dt, max_iter, tau, "newton")
    raise NonConvergence(f"no convergence to {tol:g} in {max_iter} iterations", best=best[1])


def match_approx(e: EffectiveParams) -> MatchResult:
    """Closed-form interval packaged with its residual."""
    return _result(e, pulse_interval_approx(e), 0, lifetime_continuous(e), "approx")


def pulse_interval_bisection(e: EffectiveParams, scan_points: int = 4000) -> float:
    """Smallest positive root of ``delta_t - tau_c P2(delta_t)`` by scan and bisection.

    The first period of P2 is scanned for the first negative value of the
    function (it is positive just above zero), and the sign change is then
    bisected.  Independent of the Newton machinery.
    """
    tau = lifetime_continuous(e)
    s0 = _scheme(e, 1.0)

    def g(dt):
        return dt - tau * excitation_probability(PulseScheme(dt, e.delta0, e.omega))

    grid = np.linspace(0.0, s0.period, scan_points + 1)[1:]
    values = np.array([g(x) for x in grid])
    negative = np.flatnonzero(values < 0)
    if negative.size == 0:
        raise NoSolution("delta_t - tau_c P2(delta_t) has no sign change in the first period")
    i = negative[0]
    lo = grid[i - 1] if i > 0 else grid[0] * 1e-6
    return bisect(g, lo, grid[i])


def light_shift_residual(Delta: float, Omega: float, Gamma: float, delta0: float) -> float:
    """Effective detuning ``delta`` for a given bare detuning."""
    dt = Delta + delta0
    return delta0 - dt * Omega**2 / (4.0 * dt**2 + Gamma**2)


def calibrate_delta0(Delta: float, Omega: float, Gamma: float, mode: str = "exact") -> float:
    """Bare 1-2 detuning that makes the effective detuning vanish.

    ``mode="approx"`` returns ``Delta Omega^2 / (4 Delta^2 + Gamma^2)``, which
    neglects the bare detuning inside ``Delta + delta0``.  ``mode="exact"``
    solves the cubic ``4 d (Delta + d)^2 + d Gamma^2 - (Delta + d) Omega^2 = 0``
    for the real root nearest the approximation, in units of Gamma.
    """
    if not Gamma > 0:
        raise InvalidParameters("Gamma must be > 0")
    approx = Delta * Omega**2 / (4.0 * Delta**2 + Gamma**2)
    if mode == "approx":
        return approx
    if mode != "exact":
        raise InvalidParameters(f"mode must be 'approx' or 'exact', got {mode!r}")
    if Omega == 0 or Delta == 0:
        return 0.0
    D = Delta / Gamma
    w2 = (Omega / Gamma) ** 2
    x0 = approx / Gamma

    def f(x):
        u = D + x
        return 4.0 * x * u * u + x - u * w2

    def fp(x):
        u = D + x
        return 4.0 * u * u + 8.0 * x * u + 1.0 - w2

    limit = abs(D) + math.sqrt(w2)
    r = max(abs(x0), w2, 1e-300)
    while True:
        a, b = x0 - r, x0 + r
        if (f(a) > 0) != (f(b) > 0):
            break
        if r > 4.0 * limit:
            raise NoSolution("no real root of the calibration cubic near the approximation")
        r *= 2.0
    return Gamma * newton_bracketed(f, fp, x0, a, b)
