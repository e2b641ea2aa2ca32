"""Pulsed versus continuous measurement of a driven two-level atom.

Mean detection times under continuous measurement (effective decay through
a quenched third level) and under repeated projective measurement, and the
pulse interval that makes the two agree.
"""

__version__ = "0.1.0"

from ._backend import BACKEND
from .continuous import (
    ContinuousTrace,
    GammaPair,
    amplitudes,
    continuous_trace,
    detection_rate,
    find_gamma_pair,
    gamma_at_minimum,
    lifetime_continuous,
    lifetime_quadrature_oracle,
)
from .errors import (
    InfiniteLifetime,
    InvalidParameters,
    InvalidReduction,
    NeverDetected,
    NonConvergence,
    NoSolution,
    SingularStep,
    StepBudgetExceeded,
    ZenoError,
)
from .matcher import (
    MatchResult,
    calibrate_delta0,
    newton_iterates,
    newton_step,
    pulse_interval_approx,
    pulse_interval_bisection,
    solve_pulse_interval,
)
from .params import EffectiveParams, ThreeLevelParams, complex_root_R, reduce_to_effective
from .pulsed import (
    DetectionDistribution,
    PulseScheme,
    effective_pulsed_lifetime,
    excitation_probability,
    geometric_series_oracle,
    mean_detection_time,
    survival_curve,
)
from .threelevel import (
    build_hamiltonian,
    compare_models,
    lifetime_three_level,
    propagate,
)

__all__ = [
    "BACKEND",
    "ContinuousTrace",
    "DetectionDistribution",
    "EffectiveParams",
    "GammaPair",
    "InfiniteLifetime",
    "InvalidParameters",
    "InvalidReduction",
    "MatchResult",
    "NeverDetected",
    "NoSolution",
    "NonConvergence",
    "PulseScheme",
    "SingularStep",
    "StepBudgetExceeded",
    "ThreeLevelParams",
    "ZenoError",
    "amplitudes",
    "build_hamiltonian",
    "calibrate_delta0",
    "compare_models",
    "complex_root_R",
    "continuous_trace",
    "detection_rate",
    "effective_pulsed_lifetime",
    "excitation_probability",
    "find_gamma_pair",
    "gamma_at_minimum",
    "geometric_series_oracle",
    "lifetime_continuous",
    "lifetime_quadrature_oracle",
    "lifetime_three_level",
    "mean_detection_time",
    "newton_iterates",
    "newton_step",
    "propagate",
    "pulse_interval_approx",
    "pulse_interval_bisection",
    "reduce_to_effective",
    "solve_pulse_interval",
    "survival_curve",
]
