"""Pure-Python (numpy) versions of the compiled stepping loops.

Same signatures and stopping rules as the Cython module.  Stepping is never a
Python-level loop over single steps: a run of ``BLOCK`` steps is advanced at
once with the precomputed powers ``M, M^2, ..., M^BLOCK``, and blocks that
cross no threshold are summed through the quadratic forms of
:func:`block_forms` without visiting the intermediate states.
"""

import numpy as np

BLOCK = 16384


def _powers(M, count):
    out = np.empty((count, 3, 3), dtype=np.complex128)
    out[0] = M
    for j in range(1, count):
        out[j] = M @ out[j - 1]
    return out


def block_forms(M, block):
    """``(M^B, G0, G1)`` for a block of ``B`` steps.

    With ``r_i`` the level-3 row of ``M^i``, ``G0 = sum_i r_i^H r_i`` and
    ``G1 = sum_i i r_i^H r_i`` (``i = 1..B``), so that for a block starting in
    state ``x`` the level-3 populations satisfy ``sum_i |psi3_i|^2 = x^H G0 x``
    and ``sum_i i |psi3_i|^2 = x^H G1 x``.
    """
    P = _powers(np.asarray(M, dtype=np.complex128), block)
    r = P[:, 2, :]
    weights = np.arange(1, block + 1, dtype=float)
    G0 = r.conj().T @ r
    G1 = (r.conj().T * weights) @ r
    return P[-1].copy(), G0, G1


def evolve_recorded(M, psi0, n_sub, n_out):
    """States after ``0, n_sub, 2 n_sub, ..., n_out n_sub`` steps, shape ``(n_out + 1, 3)``."""
    M = np.asarray(M, dtype=np.complex128)
    out = np.empty((n_out + 1, 3), dtype=np.complex128)
    out[0] = np.asarray(psi0, dtype=np.complex128)
    if n_out == 0:
        return out
    Mn = np.linalg.matrix_power(M, int(n_sub))
    psi = out[0]
    for k in range(1, n_out + 1):
        psi = Mn @ psi
        out[k] = psi
    return out


def _norm2(x):
    return float(x.real @ x.real + x.imag @ x.imag)


def emission_moments(M, psi0, h, rate, p_stop, p_decade, max_steps):
    """Trapezoidal moments of the level-3 emission rate; see the compiled twin."""
    M = np.asarray(M, dtype=np.complex128)
    psi = np.asarray(psi0, dtype=np.complex128).copy()
    powers = _powers(M, BLOCK)
    MB, G0, G1 = powers[-1], *block_forms(M, BLOCK)[1:]
    half = 0.5 * h
    f_prev = rate * abs(psi[2]) ** 2
    p_tot = _norm2(psi)
    t_prev = 0.0
    i0 = i1 = 0.0
    t_dec = -1.0
    n = 0
    while n < max_steps and p_tot >= p_stop:
        if n + BLOCK <= max_steps:
            end = MB @ psi
            p_end = _norm2(end)
            if p_end >= p_stop and (t_dec >= 0 or p_end >= p_decade):
                # no threshold inside this block: sum it in closed form
                s0 = rate * float(np.vdot(psi, G0 @ psi).real)
                s1 = rate * float(np.vdot(psi, G1 @ psi).real)
                f_end = rate * abs(end[2]) ** 2
                t_end = (n + BLOCK) * h
                i0 += h * (s0 + 0.5 * (f_prev - f_end))
                i1 += h * (h * (n * s0 + s1) + 0.5 * (t_prev * f_prev - t_end * f_end))
                psi, n, f_prev, t_prev, p_tot = end, n + BLOCK, f_end, t_end, p_end
                continue
        b = int(min(BLOCK, max_steps - n))
        states = powers[:b] @ psi
        pops = np.abs(states) ** 2
        totals = pops.sum(axis=1)
        below = np.flatnonzero(totals < p_stop)
        cut = int(below[0]) + 1 if below.size else b
        pops, totals, states = pops[:cut], totals[:cut], states[:cut]
        t = (n + 1 + np.arange(cut)) * h
        f = rate * pops[:, 2]
        fp = np.concatenate(([f_prev], f[:-1]))
        tp = np.concatenate(([t_prev], t[:-1]))
        i0 += half * float(np.sum(fp + f))
        i1 += half * float(np.sum(tp * fp + t * f))
        if t_dec < 0:
            dec = np.flatnonzero(totals < p_decade)
            if dec.size:
                t_dec = float(t[dec[0]])
        psi = states[-1]
        n += cut
        f_prev, t_prev, p_tot = float(f[-1]), float(t[-1]), float(totals[-1])
    return i0, i1, n * h, p_tot, t_dec, n, psi.copy()
