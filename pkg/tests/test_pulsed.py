import io
import math
import warnings

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from oracles import rabi_probability_expm
from zenomatch import InvalidParameters, NeverDetected, PulseScheme
from zenomatch.pulsed import (
    detection_distribution,
    effective_pulsed_lifetime,
    excitation_probability,
    excitation_probability_derivative,
    geometric_series_oracle,
    is_never_detected,
    mean_detection_time,
    survival_curve,
)

schemes = st.builds(PulseScheme, delta_t=st.floats(1e-3, 20.0), delta0=st.floats(-10.0, 10.0),
                    omega=st.floats(0.1, 10.0))


def test_pi_pulse_frozen():
    s = PulseScheme(math.pi)
    assert excitation_probability(s) == pytest.approx(1.0, abs=1e-15)
    assert mean_detection_time(s) == pytest.approx(math.pi, rel=1e-15)


def test_half_pi_pulse_frozen():
    s = PulseScheme(math.pi / 2)
    assert excitation_probability(s) == pytest.approx(0.5, rel=1e-15)
    assert mean_detection_time(s) == pytest.approx(math.pi, rel=1e-15)


def test_detuned_maximum_frozen():
    # omega = 1, delta0 = sqrt(3): W = 2, amplitude omega^2/W^2 = 1/4
    s = PulseScheme(math.pi / 2, delta0=math.sqrt(3.0))
    assert excitation_probability(s) == pytest.approx(0.25, rel=1e-14)


@pytest.mark.parametrize("dt", [2 * math.pi, 4 * math.pi, 200 * math.pi])
def test_full_period_is_never_detected(dt):
    s = PulseScheme(dt)
    assert is_never_detected(s)
    with pytest.raises(NeverDetected):
        mean_detection_time(s)
    with pytest.raises(NeverDetected):
        geometric_series_oracle(s)


def test_near_full_period_is_detected():
    s = PulseScheme(2 * math.pi * (1 + 1e-6))
    assert not is_never_detected(s)
    assert math.isfinite(mean_detection_time(s))


@pytest.mark.parametrize("kwargs", [dict(delta_t=0.0), dict(delta_t=-1.0), dict(delta_t=1.0, omega=0.0),
                                    dict(delta_t=float("inf")), dict(delta_t=1.0, delta0=float("nan"))])
def test_scheme_validation(kwargs):
    with pytest.raises(InvalidParameters):
        PulseScheme(**kwargs)


def test_exponential_law_warns_outside_validity():
    with pytest.warns(RuntimeWarning):
        effective_pulsed_lifetime(PulseScheme(2.0))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert effective_pulsed_lifetime(PulseScheme(0.01)) == pytest.approx(400.0)


def test_survival_curve_short_interval_tracks_exponential():
    s = PulseScheme(0.01)
    curve = survival_curve(s, 2000)
    assert curve.p1_exact[0] == 1.0
    np.testing.assert_allclose(curve.p1_exact, curve.p1_exponential, rtol=1e-4)
    buf = io.StringIO()
    curve.write_csv(buf)
    assert buf.getvalue().splitlines()[0] == "k,t,p1_exact,p1_exponential"


def test_distribution_sums_to_one():
    d = detection_distribution(PulseScheme(0.7, 0.4))
    k = np.arange(1, 4000)
    assert math.fsum(d.pmf(k)) == pytest.approx(d.cdf(k[-1]), rel=1e-12)
    assert d.cdf(k[-1]) == pytest.approx(1.0, abs=1e-12)
    assert d.mean_time == pytest.approx(mean_detection_time(PulseScheme(0.7, 0.4)), rel=1e-15)


@given(s=schemes)
def test_probability_matches_matrix_exponential(s):
    ref = rabi_probability_expm(s.omega, s.delta0, s.delta_t)
    assert excitation_probability(s) == pytest.approx(ref, abs=1e-12)


@given(s=schemes)
def test_probability_within_envelope(s):
    p = excitation_probability(s)
    assert 0.0 <= p <= s.omega**2 / (s.omega**2 + s.delta0**2) * (1 + 1e-15)


@given(s=schemes)
def test_derivative_matches_central_difference(s):
    h = 1e-6 * s.delta_t
    up = excitation_probability(PulseScheme(s.delta_t + h, s.delta0, s.omega))
    down = excitation_probability(PulseScheme(s.delta_t - h, s.delta0, s.omega))
    scale = s.omega**2 / math.hypot(s.omega, s.delta0)
    assert excitation_probability_derivative(s) == pytest.approx((up - down) / (2 * h),
                                                                 abs=1e-6 * scale)


@given(s=schemes)
def test_series_sum_matches_closed_form(s):
    assume(excitation_probability(s) > 1e-4)
    assert geometric_series_oracle(s) == pytest.approx(mean_detection_time(s), rel=1e-9)


@given(omega=st.floats(0.1, 10.0), d0=st.floats(-10.0, 10.0), frac=st.floats(0.01, 0.99))
def test_probability_periodic_in_interval(omega, d0, frac):
    a = PulseScheme(frac * 2 * math.pi / math.hypot(omega, d0), d0, omega)
    b = PulseScheme(a.delta_t + a.period, d0, omega)
    assert excitation_probability(b) == pytest.approx(excitation_probability(a), abs=1e-12)


@given(frac=st.floats(1e-6, 1e-2), d0=st.floats(0.0, 10.0))
def test_short_time_law_deviation(frac, d0):
    # |P2 - (dt omega/2)^2| / P2 grows like (dt W)^2 / 12: the delta0 dependence enters
    # only at that order, through W = sqrt(omega^2 + delta0^2)
    s = PulseScheme(frac * 2.0, d0, 1.0)
    p2 = excitation_probability(s)
    rel = abs(p2 - s.delta_t**2 / 4.0) / p2
    x = s.delta_t * s.generalized_rabi
    assert rel <= x * x / 12.0 * 1.01 + 1e-12
    if x <= 0.1:
        assert rel < 1e-3
