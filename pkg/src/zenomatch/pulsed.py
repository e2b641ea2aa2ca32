"""Repeated instantaneous projective measurement of the excited state.

Between pulses the atom evolves freely under the bare detuning ``delta0``
(no coupling laser, hence no light shift).  At every multiple of ``delta_t``
the excited population is removed, so the detection index is geometric.
"""

from __future__ import annotations

import csv
import math
import sys
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameters, NeverDetected

_EPS = sys.float_info.epsilon


@dataclass(frozen=True)
class PulseScheme:
    """Projective measurement of level 2 every ``delta_t`` seconds."""

    delta_t: float
    delta0: float = 0.0
    omega: float = 1.0

    def __post_init__(self):
        if not (self.delta_t > 0 and math.isfinite(self.delta_t)):
            raise InvalidParameters("delta_t must be a finite positive number")
        if not (self.omega > 0 and math.isfinite(self.omega)):
            raise InvalidParameters("omega must be a finite positive number")
        if not math.isfinite(self.delta0):
            raise InvalidParameters("delta0 must be finite")

    @property
    def generalized_rabi(self) -> float:
        """``sqrt(omega^2 + delta0^2)``."""
        return math.hypot(self.omega, self.delta0)

    @property
    def tau_Z(self) -> float:
        return 2.0 / self.omega

    @property
    def period(self) -> float:
        """Period of P2 as a function of ``delta_t``."""
        return 2.0 * math.pi / self.generalized_rabi


def _half_phase(s: PulseScheme) -> float:
    return 0.5 * s.delta_t * s.generalized_rabi


def excitation_probability(s: PulseScheme) -> float:
    """Excited population after one free interval from the ground state.

    ``P2 = omega^2/(omega^2 + delta0^2) sin^2(delta_t sqrt(omega^2 + delta0^2)/2)``
    """
    w = s.generalized_rabi
    return (s.omega / w) ** 2 * math.sin(_half_phase(s)) ** 2


def excitation_probability_derivative(s: PulseScheme) -> float:
    """Exact ``dP2/d(delta_t)``."""
    w = s.generalized_rabi
    return s.omega**2 / (2.0 * w) * math.sin(s.delta_t * w)


def is_never_detected(s: PulseScheme) -> bool:
    """True when ``sin(phase)`` vanishes to within the rounding of its argument."""
    phase = _half_phase(s)
    return abs(math.sin(phase)) <= 4.0 * _EPS * max(1.0, phase)


def mean_detection_time(s: PulseScheme) -> float:
    """Exact mean detection time ``delta_t / P2``.

    Raises
    ------
    NeverDetected
        When ``delta_t`` is a whole number of generalized Rabi periods.
    """
    if is_never_detected(s):
        raise NeverDetected(f"P2 = 0 at delta_t = {s.delta_t!r}: the atom is never detected")
    return s.delta_t / excitation_probability(s)


def geometric_series_oracle(s: PulseScheme, tail_tol: float = 1e-12, block: int = 4096) -> float:
    """Mean detection time by direct summation of ``sum_k k dt P2 (1-P2)^(k-1)``.

    The series is summed block by block.  Within block ``j`` (pulses
    ``jB+1 .. jB+B``) the terms factor as ``q^(jB) (jB + i + 1) q^i``, so the
    two inner sums over ``i`` are accumulated term by term once and reused.
    Summation stops when the closed-form remainder falls below ``tail_tol``
    times the partial sum; the remainder itself is not added.
    """
    if is_never_detected(s):
        raise NeverDetected(f"P2 = 0 at delta_t = {s.delta_t!r}")
    p2 = excitation_probability(s)
    dt = s.delta_t
    if p2 >= 1.0:
        return dt
    q = 1.0 - p2
    log_q = math.log1p(-p2)
    i = np.arange(block, dtype=float)
    powers = np.exp(i * log_q)
    plain = math.fsum(powers)
    weighted = math.fsum((i + 1.0) * powers)
    partials = []
    running = 0.0
    j = 0
    while True:
        scale = math.exp(j * block * log_q)
        term = dt * p2 * scale * (j * block * plain + weighted)
        partials.append(term)
        running += term
        K = (j + 1) * block
        # sum_{k>K} k q^(k-1) p2 dt = dt q^K (K + 1 - K q) / (1 - q)
        tail = dt * math.exp(K * log_q) * (K + 1.0 - K * q) / p2
        if tail < tail_tol * running:
            return math.fsum(partials)
        j += 1


@dataclass(frozen=True)
class DetectionDistribution:
    """Geometric distribution of the detection pulse index ``k >= 1``."""

    P2: float
    delta_t: float

    def pmf(self, k):
        k = np.asarray(k, dtype=float)
        return self.P2 * (1.0 - self.P2) ** (k - 1.0)

    def cdf(self, k):
        k = np.asarray(k, dtype=float)
        return 1.0 - (1.0 - self.P2) ** k

    @property
    def mean_time(self) -> float:
        if self.P2 <= 0:
            raise NeverDetected("P2 = 0")
        return self.delta_t / self.P2


def detection_distribution(s: PulseScheme) -> DetectionDistribution:
    return DetectionDistribution(excitation_probability(s), s.delta_t)


def effective_pulsed_lifetime(s: PulseScheme) -> float:
    """Lifetime ``tau_Z^2 / delta_t`` of the exponential law valid for ``delta_t << tau_Z``."""
    if s.delta_t > 0.5 * s.tau_Z:
        warnings.warn(
            f"delta_t = {s.delta_t:g} exceeds tau_Z/2 = {0.5 * s.tau_Z:g}; "
            "the exponential decay law is inaccurate here",
            RuntimeWarning,
            stacklevel=2,
        )
    return s.tau_Z**2 / s.delta_t


@dataclass
class SurvivalCurve:
    k: np.ndarray
    t: np.ndarray
    p1_exact: np.ndarray
    p1_exponential: np.ndarray

    COLUMNS = ("k", "t", "p1_exact", "p1_exponential")

    def write_csv(self, fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(self.COLUMNS)
        for k, t, a, b in zip(self.k, self.t, self.p1_exact, self.p1_exponential):
            writer.writerow([int(k), repr(float(t)), repr(float(a)), repr(float(b))])


def survival_curve(s: PulseScheme, k_max: int) -> SurvivalCurve:
    """Ground-state survival after each of ``k_max`` pulses.

    ``p1_exact = (1 - P2)^k``; ``p1_exponential = exp(-t_k / tau_EP)`` for comparison.
    """
    if k_max < 1:
        raise InvalidParameters("k_max must be >= 1")
    k = np.arange(0, k_max + 1)
    t = k * s.delta_t
    p2 = excitation_probability(s)
    exact = (1.0 - p2) ** k.astype(float)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        tau_ep = effective_pulsed_lifetime(s)
    return SurvivalCurve(k, t, exact, np.exp(-t / tau_ep))
