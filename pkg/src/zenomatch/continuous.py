"""Effective two-level atom under continuous measurement.

Closed-form amplitudes, detection rate and mean detection time, an
independent quadrature check of that mean, and the weak/strong coupling
pair that realises a given lifetime.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import quadrature
from .errors import InfiniteLifetime, InvalidParameters, NoSolution
from .params import EffectiveParams
from .roots import bisect

# |t R / 2| below which the sinh(x)/x series replaces the exponential form.
_SMALL_ARG = 1.0


def _sinhc(x):
    """``sinh(x)/x`` for complex arrays, finite at ``x = 0``."""
    x = np.asarray(x, dtype=complex)
    out = np.ones_like(x)
    tiny = np.abs(x) < 1e-4
    x2 = x[tiny] ** 2
    out[tiny] = 1.0 + x2 / 6.0 + x2 * x2 / 120.0
    big = ~tiny
    out[big] = np.sinh(x[big]) / x[big]
    return out


def eigenrates(e: EffectiveParams) -> tuple[complex, complex]:
    """Eigenvalues ``-gamma0/4 +- R/2`` of the amplitude generator."""
    g4 = e.gamma0 / 4.0
    half_r = e.R / 2.0
    return -g4 + half_r, -g4 - half_r


def amplitudes(e: EffectiveParams, t):
    """Ground and excited amplitudes ``(psi1, psi2)`` at time(s) ``t``.

    The atom starts in the ground state.  For ``|tR/2| < 1`` the amplitudes
    are written with ``sinh(x)/x`` so that ``R = 0`` (critical damping) needs
    no special case; beyond that the two eigenmodes are exponentiated
    separately to avoid overflow of ``cosh`` at long times.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise InvalidParameters("t must be >= 0")
    tt = np.atleast_1d(t_arr)
    g0 = e.gamma0
    R = e.R
    x = tt * (R / 2.0)
    psi1 = np.empty(tt.shape, dtype=complex)
    psi2 = np.empty(tt.shape, dtype=complex)

    small = np.abs(x) < _SMALL_ARG
    if np.any(small):
        ts = tt[small]
        env = np.exp(-g0 * ts / 4.0)
        sc = _sinhc(x[small])
        psi1[small] = env * (np.cosh(x[small]) + (g0 * ts / 4.0) * sc)
        psi2[small] = -1j * e.omega * env * (ts / 2.0) * sc
    large = ~small
    if np.any(large):
        sp, sm = eigenrates(e)
        tl = tt[large]
        ep = np.exp(sp * tl)
        em = np.exp(sm * tl)
        psi1[large] = 0.5 * (ep + em) + (g0 / (2.0 * R)) * 0.5 * (ep - em)
        psi2[large] = -1j * e.omega * (ep - em) / (2.0 * R)

    if t_arr.ndim == 0:
        return complex(psi1[0]), complex(psi2[0])
    return psi1.reshape(t_arr.shape), psi2.reshape(t_arr.shape)


def populations(e: EffectiveParams, t):
    """``(p1, p2)`` at ``t``."""
    psi1, psi2 = amplitudes(e, t)
    return np.abs(psi1) ** 2, np.abs(psi2) ** 2


def excited_population(e: EffectiveParams, t):
    """``|psi2(t)|^2`` in real arithmetic.

    Same branch split as :func:`amplitudes`; in the two-mode branch
    ``|e^{s+ t} - e^{s- t}|^2`` is expanded into real exponentials and a cosine.
    """
    t_arr = np.asarray(t, dtype=float)
    tt = np.atleast_1d(t_arr)
    R = e.R
    out = np.empty(tt.shape)
    small = np.abs(tt * R) < 2.0 * _SMALL_ARG
    if np.any(small):
        ts = tt[small]
        out[small] = (e.omega * 0.5 * ts) ** 2 * np.exp(-0.5 * e.gamma * ts) \
            * np.abs(_sinhc(ts * (R / 2.0))) ** 2
    large = ~small
    if np.any(large):
        sp, sm = eigenrates(e)
        tl = tt[large]
        cross = np.exp((sp.real + sm.real) * tl) * np.cos((sp.imag - sm.imag) * tl)
        mod = np.exp(2.0 * sp.real * tl) + np.exp(2.0 * sm.real * tl) - 2.0 * cross
        out[large] = e.omega**2 * mod / (4.0 * abs(R) ** 2)
    if t_arr.ndim == 0:
        return float(out[0])
    return out.reshape(t_arr.shape)


def detection_rate(e: EffectiveParams, t):
    """``W(t) = gamma |psi2(t)|^2``, probability of detection per unit time."""
    return e.gamma * excited_population(e, t)


def tau_c(omega: float, gamma: float, delta: float = 0.0) -> float:
    """Mean detection time ``2/gamma + gamma/omega^2 + 4 delta^2/(gamma omega^2)``."""
    if gamma <= 0:
        raise InfiniteLifetime("gamma = 0: the atom is never detected")
    w2 = omega * omega
    return 2.0 / gamma + gamma / w2 + 4.0 * delta * delta / (gamma * w2)


def lifetime_continuous(e: EffectiveParams) -> float:
    """Closed-form average lifetime before detection under continuous measurement."""
    return tau_c(e.omega, e.gamma, e.delta)


def slowest_decay(e: EffectiveParams) -> float:
    """Decay rate of the slowest population mode, ``-2 max Re(s)``."""
    sp, sm = eigenrates(e)
    return -2.0 * max(sp.real, sm.real)


def lifetime_quadrature_oracle(e: EffectiveParams, *, rtol=1e-10, tail_rtol=1e-12,
                               max_panels=4_000_000) -> float:
    """Mean detection time from direct quadrature of ``t W(t)``.

    The integration window ``[0, T]`` is extended until the remaining-norm
    bound ``p_tot(T) (T + 1/kappa)`` drops below ``tail_rtol`` times the
    integral, with ``kappa`` the slowest modal decay rate.  Used as an
    independent check of :func:`lifetime_continuous`.
    """
    if e.gamma <= 0:
        raise InfiniteLifetime("gamma = 0: the atom is never detected")
    kappa = slowest_decay(e)
    beat = max(abs(e.R.imag), e.omega)

    def f(t):
        return t * detection_rate(e, t)

    def panels_for(a, b):
        return int(min(max(16, math.ceil((b - a) * beat / (4.0 * math.pi))), max_panels // 4))

    T = 30.0 / kappa
    total, _ = quadrature.integrate(f, 0.0, T, rtol=rtol, initial_panels=panels_for(0.0, T),
                                    max_panels=max_panels)
    step = 2.0 / kappa
    while True:
        p1, p2 = populations(e, T)
        if (p1 + p2) * (T + 1.0 / kappa) < tail_rtol * total:
            return total
        part, _ = quadrature.integrate(f, T, T + step, rtol=rtol, atol=rtol * total,
                                       initial_panels=panels_for(T, T + step),
                                       max_panels=max_panels)
        total += part
        T += step


def gamma_at_minimum(omega: float, delta: float = 0.0) -> float:
    """Effective decay rate minimising the continuous lifetime."""
    if omega <= 0:
        raise InvalidParameters("omega must be > 0")
    return omega * math.sqrt(2.0 + 4.0 * (delta / omega) ** 2)


@dataclass(frozen=True)
class GammaPair:
    """Weak- and strong-coupling decay rates sharing one continuous lifetime."""

    gamma_weak: float
    gamma_strong: float
    target_tau: float
    gamma_min: float

    @property
    def degenerate(self) -> bool:
        return self.gamma_weak == self.gamma_strong


def find_gamma_pair(omega: float, delta: float, target_tau: float, *,
                    degenerate_rtol: float = 1e-12) -> GammaPair:
    """Both solutions of ``tau_c(gamma) = target_tau``, by bisection either side of the minimum.

    Raises
    ------
    NoSolution
        If the target lies below the minimum lifetime.
    """
    g_star = gamma_at_minimum(omega, delta)
    tau_min = tau_c(omega, g_star, delta)
    if abs(target_tau - tau_min) <= degenerate_rtol * tau_min:
        return GammaPair(g_star, g_star, target_tau, g_star)
    if target_tau < tau_min:
        raise NoSolution(f"target {target_tau!r} is below the minimum lifetime {tau_min!r}")

    def f(g):
        return tau_c(omega, g, delta) - target_tau

    weak = bisect(f, 1e-12 * omega, g_star)
    hi = 2.0 * g_star
    while f(hi) < 0:
        hi *= 2.0
    strong = bisect(f, g_star, hi)
    return GammaPair(weak, strong, target_tau, g_star)


@dataclass
class ContinuousTrace:
    """Populations and detection rate sampled on a time grid."""

    times: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    p_tot: np.ndarray
    W: np.ndarray

    COLUMNS = ("t", "p1", "p2", "p_tot", "W")

    def rows(self):
        return zip(self.times, self.p1, self.p2, self.p_tot, self.W)

    def write_csv(self, fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(self.COLUMNS)
        for row in self.rows():
            writer.writerow([repr(float(v)) for v in row])


def oscillation_frequency(e: EffectiveParams) -> float:
    """Fastest angular frequency present in the populations."""
    sp, sm = eigenrates(e)
    return max(abs(sp.imag), abs(sm.imag), abs(e.R.imag))


def trace_grid(e: EffectiveParams, t_end: float, n_points: int = 2, points_per_period: int = 40):
    """Uniform grid on ``[0, t_end]`` resolving the fastest oscillation."""
    freq = oscillation_frequency(e)
    if freq > 0:
        n_points = max(n_points, math.ceil(points_per_period * t_end * freq / (2 * math.pi)) + 1)
    return np.linspace(0.0, t_end, max(n_points, 2))


def continuous_trace(e: EffectiveParams, t_end: float | None = None, n_points: int = 401,
                     times=None) -> ContinuousTrace:
    """Sample p1, p2, p_tot and W.  Default window is five lifetimes."""
    if times is None:
        if t_end is None:
            t_end = 5.0 * lifetime_continuous(e)
        times = trace_grid(e, t_end, n_points)
    times = np.asarray(times, dtype=float)
    p1, p2 = populations(e, times)
    return ContinuousTrace(times, p1, p2, p1 + p2, e.gamma * p2)
