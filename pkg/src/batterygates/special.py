"""Airy function kernels.

Power series (in extended precision, to survive the cancellation for
negative arguments) near the origin, asymptotic expansions in the tails.
"""

from __future__ import annotations

import math

import mpmath
import numpy as np

from .errors import OutOfRange

AIRY_DOMAIN = (-15.0, 15.0)
_SERIES_POS = 8.0
_SERIES_NEG = -10.0
_DPS = 50

with mpmath.workdps(_DPS):
    _AI0 = mpmath.mpf(3) ** (mpmath.mpf(-2) / 3) / mpmath.gamma(mpmath.mpf(2) / 3)
    _DAI0 = mpmath.mpf(3) ** (mpmath.mpf(-1) / 3) / mpmath.gamma(mpmath.mpf(1) / 3)


_FLOAT_SERIES = 3.0
_AI0_F = float(_AI0)
_DAI0_F = float(_DAI0)


def _series_float(x: float) -> tuple[float, float]:
    # cancellation costs at most ~3 digits for |x| <= 3
    x3 = x**3
    t = f = 1.0
    u = g = x
    a = fp = x * x / 2
    b = gp = 1.0
    for k in range(60):
        t *= x3 / ((3 * k + 2) * (3 * k + 3))
        u *= x3 / ((3 * k + 3) * (3 * k + 4))
        b *= x3 / ((3 * k + 1) * (3 * k + 3))
        if k >= 1:
            a *= x3 / ((3 * k) * (3 * k + 2))
            fp += a
        f += t
        g += u
        gp += b
        if max(abs(t), abs(u), abs(a), abs(b)) < 1e-18:
            break
    return _AI0_F * f - _DAI0_F * g, _AI0_F * fp - _DAI0_F * gp


def _series(x: float) -> tuple[float, float]:
    with mpmath.workdps(_DPS):
        z = mpmath.mpf(x)
        z3 = z**3
        f = t = mpmath.mpf(1)
        g = u = z
        fp = a = z * z / 2
        gp = b = mpmath.mpf(1)
        eps = mpmath.mpf(10) ** (-_DPS + 5)
        k = 0
        while True:
            t = t * z3 / ((3 * k + 2) * (3 * k + 3))
            u = u * z3 / ((3 * k + 3) * (3 * k + 4))
            b = b * z3 / ((3 * k + 1) * (3 * k + 3))
            if k >= 1:
                a = a * z3 / ((3 * k) * (3 * k + 2))
                fp += a
            f += t
            g += u
            gp += b
            k += 1
            if max(abs(t), abs(u), abs(a), abs(b)) < eps and k > 2:
                break
        ai = _AI0 * f - _DAI0 * g
        dai = _AI0 * fp - _DAI0 * gp
        return float(ai), float(dai)


def _uv_coeffs(n: int) -> tuple[list[float], list[float]]:
    u = [1.0]
    v = [1.0]
    for k in range(1, n):
        uk = u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k)
        u.append(uk)
        v.append(-(6 * k + 1) / (6 * k - 1) * uk)
    return u, v


_U, _V = _uv_coeffs(40)


def _truncated_sum(coeffs, zeta: float, sign_alternating: bool, start: int = 0, step: int = 1) -> float:
    total = 0.0
    last = math.inf
    for j, k in enumerate(range(start, len(coeffs), step)):
        term = coeffs[k] / zeta**k
        if sign_alternating and j % 2:
            term = -term
        if abs(term) > last:
            break
        total += term
        last = abs(term)
        if abs(term) < 1e-17 * abs(total):
            break
    return total


def _asymptotic_pos(x: float) -> tuple[float, float]:
    zeta = 2.0 / 3.0 * x**1.5
    pref = math.exp(-zeta) / (2.0 * math.sqrt(math.pi))
    su = _truncated_sum(_U, zeta, True)
    sv = _truncated_sum(_V, zeta, True)
    return pref * x**-0.25 * su, -pref * x**0.25 * sv


def _asymptotic_neg(x: float) -> tuple[float, float]:
    z = -x
    zeta = 2.0 / 3.0 * z**1.5
    phase = zeta - math.pi / 4
    c, s = math.cos(phase), math.sin(phase)
    u_even = _truncated_sum(_U, zeta, True, 0, 2)
    u_odd = _truncated_sum(_U, zeta, True, 1, 2)
    v_even = _truncated_sum(_V, zeta, True, 0, 2)
    v_odd = _truncated_sum(_V, zeta, True, 1, 2)
    ai = (c * u_even + s * u_odd) / (math.sqrt(math.pi) * z**0.25)
    dai = z**0.25 * (s * v_even - c * v_odd) / math.sqrt(math.pi)
    return ai, dai


def airy_pair(x: float) -> tuple[float, float]:
    """Return (Ai(x), Ai'(x)) for x in [-15, 15]."""
    x = float(x)
    lo, hi = AIRY_DOMAIN
    if not lo <= x <= hi:
        raise OutOfRange(f"Airy argument {x} outside [{lo}, {hi}]")
    if x > _SERIES_POS:
        return _asymptotic_pos(x)
    if x < _SERIES_NEG:
        return _asymptotic_neg(x)
    if abs(x) <= _FLOAT_SERIES:
        return _series_float(x)
    return _series(x)


def airy_ai(x: float) -> float:
    return airy_pair(x)[0]


def airy_aip(x: float) -> float:
    return airy_pair(x)[1]


def airy_ai_array(xs) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)
    return np.array([airy_pair(v)[0] for v in xs.ravel()]).reshape(xs.shape)


def airy_aip_array(xs) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)
    return np.array([airy_pair(v)[1] for v in xs.ravel()]).reshape(xs.shape)


def airy_first_zero(tol: float = 1e-14) -> float:
    """Smallest x0 > 0 with Ai(-x0) = 0, by bisection then Newton."""
    lo, hi = 2.0, 2.5  # Ai(-2) > 0 > Ai(-2.5)
    for _ in range(30):
        mid = 0.5 * (lo + hi)
        if airy_ai(-mid) > 0:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    for _ in range(20):
        ai, dai = airy_pair(-x)
        # d/dx Ai(-x) = -Ai'(-x)
        step = ai / (-dai)
        x -= step
        if abs(step) < tol:
            break
    return x
