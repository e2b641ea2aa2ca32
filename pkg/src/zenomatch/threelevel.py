"""Numerical propagation of the full three-level atom.

The generator ``H`` (rad/s, hbar/2 prefactor already folded in) acts on
amplitudes ordered |1>, |2>, |3>.  Time is rescaled by ``Lambda = max(spectral
radius of H, Gamma)`` so that the fixed RK4 step is ``2 pi / steps_per_period``
in scaled units whatever the physical stiffness.

For a time-independent linear system the four RK4 stages reduce to a single
matrix ``I + hA + (hA)^2/2 + (hA)^3/6 + (hA)^4/24`` with ``A = -iH``; the
stepping kernels apply that matrix (see :mod:`zenomatch._kernels`).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .continuous import amplitudes
from .errors import InvalidParameters, NeverDetected, NonConvergence, StepBudgetExceeded
from .params import ThreeLevelParams, reduce_to_effective

STEPS_PER_PERIOD = 40
MAX_STEPS = 4_000_000_000
GROUND = np.array([1.0, 0.0, 0.0], dtype=complex)


def hamiltonian_matrix(omega, Omega=0.0, Gamma=0.0, Delta=0.0, delta0=0.0) -> np.ndarray:
    """Three-level generator in rad/s, no validation."""
    return np.array(
        [
            [0.0, omega / 2.0, 0.0],
            [omega / 2.0, -delta0, Omega / 2.0],
            [0.0, Omega / 2.0, -0.5j * Gamma - (Delta + delta0)],
        ],
        dtype=complex,
    )


@dataclass(frozen=True)
class Hamiltonian3:
    matrix: np.ndarray
    Gamma: float

    @property
    def scale(self) -> float:
        """``Lambda = max(max |eigenvalue|, Gamma)``, the time-rescaling rate."""
        radius = float(np.max(np.abs(np.linalg.eigvals(self.matrix))))
        return max(radius, self.Gamma)

    def anti_hermitian_part(self) -> np.ndarray:
        return (self.matrix - self.matrix.conj().T) / 2j


def build_hamiltonian(p: ThreeLevelParams) -> Hamiltonian3:
    return Hamiltonian3(hamiltonian_matrix(p.omega, p.Omega, p.Gamma, p.Delta, p.delta0), p.Gamma)


def rk4_step_matrix(A: np.ndarray, h: float) -> np.ndarray:
    """One classical RK4 step for ``psi' = A psi`` written as a matrix."""
    X = h * A
    X2 = X @ X
    X3 = X2 @ X
    return np.eye(A.shape[0]) + X + X2 / 2.0 + X3 / 6.0 + (X3 @ X) / 24.0


def rk4_stage_step(A: np.ndarray, psi: np.ndarray, h: float) -> np.ndarray:
    """Textbook four-stage RK4 step, kept as a reference for the matrix form."""
    k1 = A @ psi
    k2 = A @ (psi + 0.5 * h * k1)
    k3 = A @ (psi + 0.5 * h * k2)
    k4 = A @ (psi + h * k3)
    return psi + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.states) ** 2

    @property
    def p1(self):
        return self.populations[:, 0]

    @property
    def p2(self):
        return self.populations[:, 1]

    @property
    def p3(self):
        return self.populations[:, 2]

    @property
    def p_tot(self):
        return self.populations.sum(axis=1)

    COLUMNS = ("t", "p1", "p2", "p3", "p_tot")

    def write_csv(self, fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(self.COLUMNS)
        pops = self.populations
        for t, row, tot in zip(self.times, pops, pops.sum(axis=1)):
            writer.writerow([repr(float(v)) for v in (t, *row, tot)])


def propagate(h: Hamiltonian3, psi0, t_grid, *, steps_per_period: int = STEPS_PER_PERIOD,
              max_steps: int = MAX_STEPS) -> Trajectory:
    """Fixed-step RK4 solution of ``i dpsi/dt = H psi`` sampled on ``t_grid``.

    Each grid interval is split into the fewest equal steps not longer than
    ``2 pi / (steps_per_period Lambda)``.

    Raises
    ------
    StepBudgetExceeded
        If the grid would need more than ``max_steps`` steps in total.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    psi0 = np.asarray(psi0, dtype=complex)
    if t_grid.ndim != 1 or t_grid.size == 0 or t_grid[0] != 0 or np.any(np.diff(t_grid) <= 0):
        raise InvalidParameters("t_grid must start at 0 and increase strictly")
    if not math.isclose(float(np.vdot(psi0, psi0).real), 1.0, rel_tol=1e-9):
        raise InvalidParameters("psi0 must be normalised")
    lam = h.scale
    states = np.empty((t_grid.size, 3), dtype=complex)
    states[0] = psi0
    if t_grid.size == 1:
        return Trajectory(t_grid, states)
    if lam == 0:
        states[:] = psi0
        return Trajectory(t_grid, states)

    A = -1j * h.matrix / lam
    h_max = 2.0 * math.pi / steps_per_period
    gaps = np.diff(t_grid) * lam
    n_steps = np.ceil(gaps / h_max * (1 - 1e-12)).astype(np.int64)
    n_steps = np.maximum(n_steps, 1)
    if n_steps.sum() > max_steps:
        raise StepBudgetExceeded(
            f"{int(n_steps.sum())} RK4 steps needed (limit {max_steps}); "
            "shorten the grid or rescale the units"
        )
    uniform = np.allclose(gaps, gaps[0], rtol=1e-10, atol=0) and np.all(n_steps == n_steps[0])
    if uniform:
        M = rk4_step_matrix(A, gaps[0] / n_steps[0])
        states[:] = kernels.evolve_recorded(M, psi0, int(n_steps[0]), t_grid.size - 1)
    else:
        psi = psi0
        for i, (gap, n) in enumerate(zip(gaps, n_steps), start=1):
            M = rk4_step_matrix(A, gap / n)
            psi = kernels.evolve_recorded(M, psi, int(n), 1)[1]
            states[i] = psi
    return Trajectory(t_grid, states)


def step_halving_error(h: Hamiltonian3, psi0, t_grid, *,
                       steps_per_period: int = STEPS_PER_PERIOD) -> float:
    """Largest population change on ``t_grid`` when the RK4 step is halved."""
    a = propagate(h, psi0, t_grid, steps_per_period=steps_per_period).populations
    b = propagate(h, psi0, t_grid, steps_per_period=2 * steps_per_period).populations
    return float(np.max(np.abs(a - b)))


@dataclass(frozen=True)
class EmissionLifetime:
    """Mean emission time from level 3 with the pieces that produced it."""

    tau: float
    integrated: float
    tail: float
    emitted: float
    t_end: float
    p_end: float
    tail_rate: float
    steps: int


def lifetime_three_level(p: ThreeLevelParams, *, steps_per_period: int = STEPS_PER_PERIOD,
                         p_stop: float = 1e-8, max_steps: int = MAX_STEPS) -> EmissionLifetime:
    """Mean time of irreversible emission, ``int t Gamma p3(t) dt``.

    The trajectory is stepped until the undecayed population drops below
    ``p_stop``; the remainder is assumed to decay exponentially at the rate
    fitted over the last decade of ``p_tot`` and is added analytically.

    Raises
    ------
    NeverDetected
        If the effective decay rate vanishes (``Omega = 0`` or ``Gamma = 0``).
    NonConvergence
        If ``max_steps`` is reached before ``p_stop``.
    """
    if p.Omega == 0 or p.Gamma == 0:
        raise NeverDetected("no decay channel: Omega = 0 or Gamma = 0")
    if reduce_to_effective(p).gamma <= 0:
        raise NeverDetected("effective decay rate is zero")
    ham = build_hamiltonian(p)
    lam = ham.scale
    A = -1j * ham.matrix / lam
    step = 2.0 * math.pi / steps_per_period
    M = rk4_step_matrix(A, step)
    i0, i1, t_end, p_end, t_dec, n, _ = kernels.emission_moments(
        M, GROUND, step, p.Gamma / lam, p_stop, 10.0 * p_stop, max_steps)
    if p_end >= p_stop or t_dec < 0 or t_end <= t_dec:
        raise NonConvergence(f"population still {p_end:.3g} after {n} steps", best=i1 / lam)
    # p_tot crossed 10*p_stop at t_dec and is p_end at t_end
    k = math.log(10.0 * p_stop / p_end) / (t_end - t_dec)
    tail = p_end * (t_end + 1.0 / k)
    return EmissionLifetime(
        tau=(i1 + tail) / lam,
        integrated=i1 / lam,
        tail=tail / lam,
        emitted=i0,
        t_end=t_end / lam,
        p_end=p_end,
        tail_rate=k * lam,
        steps=int(n),
    )


def spectral_emission_moments(p: ThreeLevelParams) -> tuple[float, float]:
    """``(int Gamma p3 dt, int t Gamma p3 dt)`` from the eigen-decomposition of H.

    With ``psi3(t) = sum_k a_k exp(l_k t)`` both integrals are sums of
    ``-1/(l_k + l_j^*)`` and ``1/(l_k + l_j^*)^2``.  Requires a diagonalisable
    generator with strictly decaying modes.
    """
    A = -1j * build_hamiltonian(p).matrix
    lam, V = np.linalg.eig(A)
    c = np.linalg.solve(V, GROUND)
    a = c * V[2]
    outer = np.outer(a, a.conj())
    pair = np.add.outer(lam, lam.conj())
    if np.any(pair.real >= 0):
        raise NeverDetected("generator has a non-decaying mode")
    return (float(p.Gamma * np.real(np.sum(-outer / pair))),
            float(p.Gamma * np.real(np.sum(outer / pair**2))))


@dataclass(frozen=True)
class ModelComparison:
    max_dp1: float
    max_dp2: float
    max_p3: float

    @property
    def max_discrepancy(self) -> float:
        return max(self.max_dp1, self.max_dp2)


def compare_models(p: ThreeLevelParams, t_grid, *,
                   steps_per_period: int = STEPS_PER_PERIOD) -> ModelComparison:
    """Largest population differences between the full and effective models on ``t_grid``."""
    traj = propagate(build_hamiltonian(p), GROUND, t_grid, steps_per_period=steps_per_period)
    psi1, psi2 = amplitudes(reduce_to_effective(p), traj.times)
    return ModelComparison(
        float(np.max(np.abs(traj.p1 - np.abs(psi1) ** 2))),
        float(np.max(np.abs(traj.p2 - np.abs(psi2) ** 2))),
        float(np.max(traj.p3)),
    )
