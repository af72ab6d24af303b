"""Adaptive quadrature of piecewise-smooth integrands split at known breakpoints."""

from __future__ import annotations

import numpy as np
from scipy.integrate import quad

from ..errors import NonFiniteIntegrand

QUAD_TOL = 1e-12


def quadrature(g, a: float, b: float, tol: float = QUAD_TOL, breakpoints=()) -> float:
    """Integral of ``g`` over ``[a, b]``, integrating each smooth piece separately.

    The absolute error target ``tol`` is shared evenly between the pieces.
    """
    if b < a:
        return -quadrature(g, b, a, tol, breakpoints)
    cuts = [a] + sorted(float(x) for x in breakpoints if a < x < b) + [b]
    pieces = [(lo, hi) for lo, hi in zip(cuts[:-1], cuts[1:]) if hi > lo]
    if not pieces:
        return 0.0
    share = tol / len(pieces)
    total = 0.0
    for lo, hi in pieces:
        probe = np.array([g(x) for x in (lo, 0.5 * (lo + hi), hi)], dtype=float)
        if not np.all(np.isfinite(probe)):
            raise NonFiniteIntegrand(f"integrand is not finite on [{lo}, {hi}]")
        val, err = quad(g, lo, hi, epsabs=share, epsrel=1e-14, limit=200)
        if not np.isfinite(val):
            raise NonFiniteIntegrand(f"integral diverges on [{lo}, {hi}]")
        total += val
    return float(total)
