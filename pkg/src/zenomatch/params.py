"""Physical parameter sets and the reduction from three to two levels.

All frequencies, detunings and rates are angular (rad/s).  Values quoted in
Hz must be multiplied by 2*pi before they reach this module; the CLI does
that at its boundary.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import asdict, dataclass, field

from .errors import InvalidParameters, InvalidReduction

#: Omega/Gamma below which adiabatic elimination of level 3 is considered valid.
ELIMINATION_THRESHOLD = 0.1

_THREE_LEVEL_KEYS = ("omega", "Omega", "Gamma", "Delta", "delta0")


@dataclass(frozen=True)
class ThreeLevelParams:
    """The five inputs of the driven three-level atom.

    Parameters
    ----------
    omega : float
        1-2 driving Rabi frequency.
    Omega : float
        2-3 measurement-coupling Rabi frequency.
    Gamma : float
        Decay rate of level 3.
    Delta : float
        2-3 detuning.
    delta0 : float
        1-2 detuning.
    """

    omega: float
    Omega: float = 0.0
    Gamma: float = 0.0
    Delta: float = 0.0
    delta0: float = 0.0

    def __post_init__(self):
        for name in _THREE_LEVEL_KEYS:
            value = getattr(self, name)
            if not math.isfinite(value):
                raise InvalidParameters(f"{name} must be finite, got {value!r}")
        if self.omega <= 0:
            raise InvalidParameters("omega must be > 0 (zero driving never excites the atom)")
        if self.Omega < 0 or self.Gamma < 0:
            raise InvalidParameters("Omega and Gamma must be >= 0")

    @classmethod
    def from_saturation(cls, omega, s0, Gamma, Delta=0.0, delta0=0.0):
        """Build parameters from the saturation parameter ``s0 = 2 Omega**2 / Gamma**2``."""
        if s0 < 0:
            raise InvalidParameters("s0 must be >= 0")
        return cls(omega, Gamma * math.sqrt(s0 / 2.0), Gamma, Delta, delta0)

    @property
    def delta_tilde(self) -> float:
        return self.Delta + self.delta0

    @property
    def saturation(self) -> float:
        """``s0 = 2 Omega**2 / Gamma**2`` (inf when Gamma = 0 < Omega)."""
        if self.Gamma == 0:
            return math.inf if self.Omega > 0 else 0.0
        return 2.0 * self.Omega**2 / self.Gamma**2

    @property
    def elimination_ratio(self) -> float:
        if self.Gamma == 0:
            return math.inf if self.Omega > 0 else 0.0
        return self.Omega / self.Gamma

    def elimination_valid(self, threshold: float = ELIMINATION_THRESHOLD) -> bool:
        """Advisory check that level 3 can be eliminated; never enforced."""
        return self.elimination_ratio < threshold

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, record: dict) -> "ThreeLevelParams":
        missing = [k for k in _THREE_LEVEL_KEYS if k not in record]
        if missing:
            raise InvalidParameters(f"missing keys: {', '.join(missing)}")
        return cls(**{k: float(record[k]) for k in _THREE_LEVEL_KEYS})

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ThreeLevelParams":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class EffectiveParams:
    """Effective two-level quantities after eliminating level 3.

    ``delta0`` is the bare 1-2 detuning used for free evolution between
    pulses; when not given it defaults to ``delta`` (no coupling-laser shift,
    i.e. ``delta_tilde = 0``).
    """

    omega: float
    gamma: float
    delta: float = 0.0
    delta0: float | None = None
    delta_tilde: float = 0.0
    source: ThreeLevelParams | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.delta0 is None:
            object.__setattr__(self, "delta0", self.delta)
        for name in ("omega", "gamma", "delta", "delta0", "delta_tilde"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParameters(f"{name} must be finite")
        if self.omega <= 0:
            raise InvalidParameters("omega must be > 0")
        if self.gamma < 0:
            raise InvalidParameters("gamma must be >= 0")

    @property
    def gamma0(self) -> complex:
        """Complex rate ``gamma - 2i delta``."""
        return complex(self.gamma, -2.0 * self.delta)

    @property
    def R(self) -> complex:
        return complex_root_R(self)

    @property
    def tau_Z(self) -> float:
        """Zeno time ``2/omega``."""
        return 2.0 / self.omega

    def with_gamma(self, gamma: float) -> "EffectiveParams":
        return EffectiveParams(self.omega, gamma, self.delta, self.delta0, self.delta_tilde)


def reduce_to_effective(p: ThreeLevelParams) -> EffectiveParams:
    """Adiabatically eliminate level 3.

    Returns the effective decay rate ``gamma = Gamma Omega^2 / (Gamma^2 + 4 Dt^2)``
    and the shifted detuning ``delta = delta0 - Dt Omega^2 / (4 Dt^2 + Gamma^2)``
    with ``Dt = Delta + delta0``.

    Raises
    ------
    InvalidReduction
        If ``Gamma = Delta + delta0 = 0`` while ``Omega > 0``.
    """
    dt = p.Delta + p.delta0
    denom = p.Gamma**2 + 4.0 * dt**2
    if p.Omega == 0:
        gamma, delta = 0.0, p.delta0
    elif denom == 0:
        raise InvalidReduction("Gamma = Delta + delta0 = 0 with Omega > 0: elimination undefined")
    else:
        o2 = p.Omega**2
        gamma = p.Gamma * o2 / denom
        delta = p.delta0 - dt * o2 / denom
    return EffectiveParams(p.omega, gamma, delta, p.delta0, dt, source=p)


def complex_root_R(e: EffectiveParams) -> complex:
    """Principal branch of ``sqrt(gamma0**2 - 4 omega**2) / 2``.

    The amplitudes are even in R, so either branch gives the same physics.
    """
    return cmath.sqrt(e.gamma0**2 - 4.0 * e.omega**2) / 2.0
