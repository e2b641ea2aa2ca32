"""Reference computations that share no code with the package."""

import numpy as np
from scipy.linalg import expm


def two_level_generator(omega, gamma, delta):
    return np.array([[0.0, omega / 2.0], [omega / 2.0, -delta - 0.5j * gamma]])


def two_level_amplitudes_expm(omega, gamma, delta, t):
    H = two_level_generator(omega, gamma, delta)
    return expm(-1j * H * t)[:, 0]


def two_level_lifetime_spectral(omega, gamma, delta):
    """``int t gamma |psi2|^2 dt`` from eigenmodes of the 2x2 generator."""
    lam, V = np.linalg.eig(-1j * two_level_generator(omega, gamma, delta))
    a = np.linalg.solve(V, [1.0, 0.0]) * V[1]
    outer = np.outer(a, a.conj())
    pair = np.add.outer(lam, lam.conj())
    return float(gamma * np.real(np.sum(outer / pair**2)))


def rabi_probability_expm(omega, delta0, t):
    H = np.array([[0.0, omega / 2.0], [omega / 2.0, -delta0]])
    return float(abs(expm(-1j * H * t)[1, 0]) ** 2)


def three_level_state_expm(matrix, t, psi0=(1.0, 0.0, 0.0)):
    return expm(-1j * np.asarray(matrix) * t) @ np.asarray(psi0, dtype=complex)
