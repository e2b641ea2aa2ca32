# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled stepping loops for the three-level propagator.

Both functions repeatedly apply a fixed 3x3 complex matrix; the arithmetic is
spelled out on real and imaginary parts so the loop body stays free of Python
objects and complex-division helpers.
"""

import numpy as np
cimport numpy as cnp

from zenomatch._kernels_py import block_forms

cnp.import_array()

# steps per block summed through quadratic forms in emission_moments
cdef enum:
    BLOCK = 1024


cdef inline void _apply(const double* mr, const double* mi, double* xr, double* xi) noexcept nogil:
    cdef double yr0, yr1, yr2, yi0, yi1, yi2
    yr0 = mr[0] * xr[0] - mi[0] * xi[0] + mr[1] * xr[1] - mi[1] * xi[1] + mr[2] * xr[2] - mi[2] * xi[2]
    yi0 = mr[0] * xi[0] + mi[0] * xr[0] + mr[1] * xi[1] + mi[1] * xr[1] + mr[2] * xi[2] + mi[2] * xr[2]
    yr1 = mr[3] * xr[0] - mi[3] * xi[0] + mr[4] * xr[1] - mi[4] * xi[1] + mr[5] * xr[2] - mi[5] * xi[2]
    yi1 = mr[3] * xi[0] + mi[3] * xr[0] + mr[4] * xi[1] + mi[4] * xr[1] + mr[5] * xi[2] + mi[5] * xr[2]
    yr2 = mr[6] * xr[0] - mi[6] * xi[0] + mr[7] * xr[1] - mi[7] * xi[1] + mr[8] * xr[2] - mi[8] * xi[2]
    yi2 = mr[6] * xi[0] + mi[6] * xr[0] + mr[7] * xi[1] + mi[7] * xr[1] + mr[8] * xi[2] + mi[8] * xr[2]
    xr[0] = yr0; xr[1] = yr1; xr[2] = yr2
    xi[0] = yi0; xi[1] = yi1; xi[2] = yi2


cdef inline double _qform(const double* gr, const double* gi, const double* xr,
                          const double* xi) noexcept nogil:
    """Real part of ``x^H G x``."""
    cdef double yr[3]
    cdef double yi[3]
    cdef int a
    for a in range(3):
        yr[a] = xr[a]
        yi[a] = xi[a]
    _apply(gr, gi, yr, yi)
    return xr[0] * yr[0] + xi[0] * yi[0] + xr[1] * yr[1] + xi[1] * yi[1] + xr[2] * yr[2] + xi[2] * yi[2]


cdef inline double _norm2(const double* xr, const double* xi) noexcept nogil:
    return xr[0] * xr[0] + xi[0] * xi[0] + xr[1] * xr[1] + xi[1] * xi[1] + xr[2] * xr[2] + xi[2] * xi[2]


cdef void _split(m, double* mr, double* mi):
    cdef int i, j
    for i in range(3):
        for j in range(3):
            mr[3 * i + j] = m[i, j].real
            mi[3 * i + j] = m[i, j].imag


cdef void _unpack(M, psi0, double* mr, double* mi, double* xr, double* xi):
    cdef int i, j
    m = np.asarray(M, dtype=np.complex128)
    p = np.asarray(psi0, dtype=np.complex128)
    for i in range(3):
        for j in range(3):
            mr[3 * i + j] = m[i, j].real
            mi[3 * i + j] = m[i, j].imag
        xr[i] = p[i].real
        xi[i] = p[i].imag


def evolve_recorded(M, psi0, long n_sub, long n_out):
    """States after ``0, n_sub, 2 n_sub, ..., n_out n_sub`` steps, shape ``(n_out + 1, 3)``.

    ``M^n_sub`` is formed once by repeated squaring and then applied ``n_out`` times.
    """
    cdef double mr[9]
    cdef double mi[9]
    cdef double xr[3]
    cdef double xi[3]
    cdef long k
    cdef int i
    Mn = np.linalg.matrix_power(np.asarray(M, dtype=np.complex128), n_sub)
    _unpack(Mn, psi0, mr, mi, xr, xi)
    out = np.empty((n_out + 1, 3), dtype=np.complex128)
    cdef double complex[:, ::1] ov = out
    for i in range(3):
        ov[0, i] = xr[i] + 1j * xi[i]
    with nogil:
        for k in range(1, n_out + 1):
            _apply(mr, mi, xr, xi)
            for i in range(3):
                ov[k, i].real = xr[i]
                ov[k, i].imag = xi[i]
    return out


def emission_moments(M, psi0, double h, double rate, double p_stop, double p_decade,
                     long max_steps):
    """Trapezoidal moments of the level-3 emission rate ``rate * |psi_3|^2``.

    Steps until the total population drops below ``p_stop`` or ``max_steps``
    is reached.  Returns ``(i0, i1, t_end, p_end, t_decade, n_steps, psi_end)``
    where ``i0 = int f dt``, ``i1 = int t f dt`` and ``t_decade`` is the first
    time the population fell below ``p_decade`` (``-1`` if never).

    Blocks of ``BLOCK`` steps whose end state crosses neither threshold are
    summed through the quadratic forms of ``block_forms``; the block that
    crosses a threshold is stepped one step at a time.
    """
    cdef double mr[9]
    cdef double mi[9]
    cdef double br[9]
    cdef double bi[9]
    cdef double g0r[9]
    cdef double g0i[9]
    cdef double g1r[9]
    cdef double g1i[9]
    cdef double xr[3]
    cdef double xi[3]
    cdef double zr[3]
    cdef double zi[3]
    cdef double i0 = 0.0, i1 = 0.0, t = 0.0, t_prev = 0.0
    cdef double f_prev, f, p_tot, p_end, s0, s1, f_end, t_end
    cdef double t_dec = -1.0
    cdef double half = 0.5 * h
    cdef long n = 0, lim
    cdef int a
    _unpack(M, psi0, mr, mi, xr, xi)
    MB, G0, G1 = block_forms(M, BLOCK)
    _split(MB, br, bi)
    _split(G0, g0r, g0i)
    _split(G1, g1r, g1i)
    f_prev = rate * (xr[2] * xr[2] + xi[2] * xi[2])
    p_tot = _norm2(xr, xi)
    with nogil:
        while n < max_steps and p_tot >= p_stop:
            if n + BLOCK <= max_steps:
                for a in range(3):
                    zr[a] = xr[a]
                    zi[a] = xi[a]
                _apply(br, bi, zr, zi)
                p_end = _norm2(zr, zi)
                if p_end >= p_stop and (t_dec >= 0 or p_end >= p_decade):
                    s0 = rate * _qform(g0r, g0i, xr, xi)
                    s1 = rate * _qform(g1r, g1i, xr, xi)
                    f_end = rate * (zr[2] * zr[2] + zi[2] * zi[2])
                    t_end = (n + BLOCK) * h
                    i0 += h * (s0 + 0.5 * (f_prev - f_end))
                    i1 += h * (h * (n * s0 + s1) + 0.5 * (t_prev * f_prev - t_end * f_end))
                    for a in range(3):
                        xr[a] = zr[a]
                        xi[a] = zi[a]
                    n += BLOCK
                    t = t_end
                    f_prev = f_end
                    t_prev = t_end
                    p_tot = p_end
                    continue
            lim = n + BLOCK
            if lim > max_steps:
                lim = max_steps
            while n < lim and p_tot >= p_stop:
                _apply(mr, mi, xr, xi)
                n += 1
                t = n * h
                f = rate * (xr[2] * xr[2] + xi[2] * xi[2])
                i0 += half * (f_prev + f)
                i1 += half * (t_prev * f_prev + t * f)
                f_prev = f
                t_prev = t
                p_tot = _norm2(xr, xi)
                if t_dec < 0 and p_tot < p_decade:
                    t_dec = t
    psi_end = np.array([xr[0] + 1j * xi[0], xr[1] + 1j * xi[1], xr[2] + 1j * xi[2]])
    return i0, i1, n * h, p_tot, t_dec, n, psi_end
