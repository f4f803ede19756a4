"""Adaptive quadrature wrapper that raises instead of warning."""

from __future__ import annotations

import warnings

from scipy import integrate as _integrate

from .errors import QuadratureNoConvergence


def integrate(f, a: float, b: float, points=(), epsabs: float = 1e-12, epsrel: float = 1e-12, limit: int = 500) -> float:
    """Integrate a real scalar function over [a, b] with Gauss-Kronrod (QUADPACK).

    Raises QuadratureNoConvergence when QUADPACK reports failure and the error
    estimate is not within 100x the requested tolerance.
    """
    pts = sorted(p for p in points if a < p < b) or None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", _integrate.IntegrationWarning)
        val, err, info = _integrate.quad(f, a, b, points=pts, epsabs=epsabs, epsrel=epsrel, limit=limit, full_output=1)[:3]
    if err > 100 * max(epsabs, epsrel * abs(val)):
        raise QuadratureNoConvergence(f"quadrature on [{a}, {b}] did not converge (error estimate {err:.2e})")
    return float(val)
