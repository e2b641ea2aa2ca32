"""Scalar root finders: plain bisection and Newton safeguarded by a bracket."""

from __future__ import annotations

import math

from .errors import NoSolution, NonConvergence


def bisect(f, a, b, *, xtol=0.0, rtol=4e-16, maxiter=400):
    """Root of ``f`` in ``[a, b]`` by bisection.

    ``f(a)`` and ``f(b)`` must differ in sign.  Iteration stops when the
    bracket is narrower than ``xtol + rtol*|x|`` or stops shrinking.
    """
    fa, fb = f(a), f(b)
    if fa == 0:
        return a
    if fb == 0:
        return b
    if (fa > 0) == (fb > 0):
        raise NoSolution(f"no sign change on [{a!r}, {b!r}]")
    for _ in range(maxiter):
        m = 0.5 * (a + b)
        if m <= min(a, b) or m >= max(a, b) or abs(b - a) <= xtol + rtol * abs(m):
            return m
        fm = f(m)
        if fm == 0:
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b, fb = m, fm
    return 0.5 * (a + b)


def newton_bracketed(f, fprime, x0, a, b, *, xtol=0.0, rtol=1e-15, maxiter=200):
    """Newton iteration kept inside a sign-change bracket.

    A Newton step leaving ``(a, b)`` or failing to halve the bracket is
    replaced by a bisection step.
    """
    fa, fb = f(a), f(b)
    if fa == 0:
        return a
    if fb == 0:
        return b
    if (fa > 0) == (fb > 0):
        raise NoSolution(f"no sign change on [{a!r}, {b!r}]")
    lo, hi = (a, b) if fa < 0 else (b, a)
    x = x0 if min(a, b) < x0 < max(a, b) else 0.5 * (a + b)
    width = abs(b - a)
    for _ in range(maxiter):
        fx = f(x)
        if fx == 0:
            return x
        if fx < 0:
            lo = x
        else:
            hi = x
        d = fprime(x)
        step_ok = d != 0 and math.isfinite(d)
        if step_ok:
            xn = x - fx / d
            step_ok = min(lo, hi) < xn < max(lo, hi) and abs(xn - x) < 0.5 * width
        if not step_ok:
            xn = 0.5 * (lo + hi)
        width = abs(xn - x)
        x = xn
        if width <= xtol + rtol * abs(x) or abs(hi - lo) <= xtol + rtol * abs(x):
            return x
    raise NonConvergence("bracketed Newton did not converge", best=x)
