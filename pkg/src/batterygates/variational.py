"""Optimal battery profiles for fixed resources, their constants and resource bounds."""

from __future__ import annotations

import math
import threading
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .battery import BatteryState, ResourceReport, ShapeProfile, gaussian_profile
from .errors import NotNormalizable
from .quadrature import integrate
from .special import airy_ai, airy_ai_array, airy_aip_array, airy_first_zero, airy_pair

# reference values as published, for side-by-side reporting
REFERENCE_VALUES = {
    "airy_root": 2.338,
    "cbar": 2.033,
    "c1": 0.766,
    "c2": 0.383,
    "eta": 1.374,
    "eta_sq": 1.888,
    "eta_prime": 1.557,
}


@dataclass(frozen=True)
class ProfileConstants:
    airy_root: float
    cbar: float
    c1: float
    c2: float
    eta: float
    eta_sq: float
    eta_prime: float

    def to_json(self) -> dict:
        return asdict(self)


def _airy_decay_end(peak_sq: float) -> float:
    # first y >= 0 where Ai(y)^2 drops below 1e-16 of the peak
    y = 0.0
    while airy_ai(y) ** 2 >= 1e-16 * peak_sq:
        y += 0.25
    return y


_lock = threading.Lock()
_cache: Optional[ProfileConstants] = None


def compute_constants() -> ProfileConstants:
    """Airy-state constants by root finding and adaptive quadrature (memoized)."""
    global _cache
    with _lock:
        if _cache is None:
            _cache = _compute_constants()
        return _cache


def _compute_constants() -> ProfileConstants:
    x0 = airy_first_zero()
    peak = airy_ai(-1.0188) ** 2
    end = _airy_decay_end(peak) + x0
    brk = (x0 - 1.0188, x0)
    norm = integrate(lambda x: airy_ai(x - x0) ** 2, 0.0, end, points=brk, epsabs=1e-13)
    cbar = 1.0 / norm
    c1 = integrate(lambda x: x * airy_ai(x - x0) ** 2, 0.0, end, points=brk, epsabs=1e-13)
    c2 = integrate(lambda x: airy_pair(x - x0)[1] ** 2, 0.0, end, points=brk, epsabs=1e-13)
    eta_sq = cbar**3 * c1**2 * c2
    return ProfileConstants(
        airy_root=x0,
        cbar=cbar,
        c1=c1,
        c2=c2,
        eta=math.sqrt(eta_sq),
        eta_sq=eta_sq,
        eta_prime=cbar * c1,
    )


# optimal profiles; the profile coordinate x is the level index at delta = 1


def airy_profile(target_mean_energy: float, omega: float = 1.0) -> ShapeProfile:
    """Minimal Unitary Defect at fixed mean energy: sqrt(C k) Ai(k x - x0), k = omega eta'/<E>."""
    if not target_mean_energy > 0:
        raise ValueError("target mean energy must be positive")
    c = compute_constants()
    x0 = c.airy_root
    k = omega * c.eta_prime / target_mean_energy
    amp = math.sqrt(c.cbar * k)
    y_end = _airy_decay_end(airy_ai(-1.0188) ** 2)

    def f(x):
        return amp * airy_ai_array(k * np.asarray(x, dtype=float) - x0)

    def df(x):
        return amp * k * airy_aip_array(k * np.asarray(x, dtype=float) - x0)

    return ShapeProfile(
        f,
        df,
        "airy",
        extent=(y_end + x0) / k,
        params={"target_mean_energy": target_mean_energy, "omega": omega},
        breakpoints=((x0 - 1.0188) / k,),
    )


def hermite1_profile(target_mean_sq_energy: float, omega: float = 1.0) -> ShapeProfile:
    """Minimal Unitary Defect at fixed mean squared energy.

    First excited oscillator eigenfunction restricted to the half line,
    psi(x) = sqrt(2) a^{1/8} psi_1(a^{1/4} x) with sqrt(a) = 3 omega^2 / (2 <E^2>).
    """
    if not target_mean_sq_energy > 0:
        raise ValueError("target mean squared energy must be positive")
    sqrt_a = 3.0 * omega**2 / (2.0 * target_mean_sq_energy)
    scale = math.sqrt(sqrt_a)  # a^{1/4}
    amp = math.sqrt(2.0) * math.sqrt(scale) * math.pi**-0.25 * math.sqrt(2.0)

    def f(x):
        y = scale * np.asarray(x, dtype=float)
        return amp * y * np.exp(-0.5 * y * y)

    def df(x):
        y = scale * np.asarray(x, dtype=float)
        return amp * scale * (1 - y * y) * np.exp(-0.5 * y * y)

    return ShapeProfile(
        f,
        df,
        "hermite1",
        extent=7.0 / scale,
        params={"target_mean_sq_energy": target_mean_sq_energy, "omega": omega},
        breakpoints=(1.0 / scale,),
    )


def qfi_profile(target_qfi: float, omega: float = 1.0) -> ShapeProfile:
    """Regularized shifted Gaussian with quantum Fisher information close to ``target_qfi``.

    psi proportional to (1 - e^{-x^2}) exp(-(x - mu)^2 omega^2 / F), mu = F / omega^2,
    so |psi|^2 has variance F / (4 omega^2) away from the origin.
    """
    if not target_qfi > 0:
        raise ValueError("target QFI must be positive")
    F = float(target_qfi)
    w2 = omega**2
    mu = F / w2
    sigma = math.sqrt(F) / (2 * omega)
    end = mu + 10 * sigma

    def raw(x):
        x = np.asarray(x, dtype=float)
        return -np.expm1(-x * x) * np.exp(-((x - mu) ** 2) * w2 / F)

    def draw(x):
        x = np.asarray(x, dtype=float)
        g = np.exp(-((x - mu) ** 2) * w2 / F)
        return (2 * x * np.exp(-x * x) - np.expm1(-x * x) * (-2 * (x - mu) * w2 / F)) * g

    norm = integrate(lambda x: float(raw(x)) ** 2, 0.0, end, points=(mu,), epsabs=1e-14)
    if not norm > 0:
        raise NotNormalizable("regularized Gaussian has zero norm")
    c = 1.0 / math.sqrt(norm)
    return ShapeProfile(
        lambda x: c * raw(x),
        lambda x: c * draw(x),
        "gaussian_qfi",
        extent=end,
        params={"target_qfi": F, "omega": omega},
        breakpoints=(mu,),
    )


def coherent_profile(alpha: float) -> ShapeProfile:
    """Continuum limit of a coherent state: psi proportional to exp(-(x - alpha^2)^2 / (4 alpha^2))."""
    if alpha < 3:
        raise ValueError("use coherent_state for alpha < 3")
    return gaussian_profile(alpha**2, alpha, tag="coherent")


def coherent_state(alpha: float, omega: float = 1.0, truncation: Optional[int] = None) -> BatteryState:
    """Exact Poisson amplitudes e^{-alpha^2/2} alpha^n / sqrt(n!)."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if truncation is None:
        truncation = int(math.ceil(alpha**2 + 12 * alpha + 30))
    n = np.arange(truncation)
    logb = -0.5 * alpha**2 + n * math.log(alpha) - 0.5 * np.array([math.lgamma(k + 1) for k in n])
    return BatteryState.normalized(np.exp(logb), omega)


# resource bounds


@dataclass(frozen=True)
class ResourceBounds:
    """Minimal resources needed for a target Choi infidelity (leading order)."""

    eps_c: float
    v01_abs: float
    omega: float
    mean_energy_min: float
    mean_sq_energy_min: float
    n_levels_min: float
    qfi_min: float

    def to_json(self) -> dict:
        return asdict(self)


def resource_bounds(eps_c: float, v01_abs: float, omega: float = 1.0) -> ResourceBounds:
    if not 0 < eps_c <= 1:
        raise ValueError("eps_c must lie in (0, 1]")
    eta = compute_constants().eta
    s = v01_abs**2
    return ResourceBounds(
        eps_c=eps_c,
        v01_abs=v01_abs,
        omega=omega,
        mean_energy_min=eta * omega * v01_abs / math.sqrt(eps_c),
        mean_sq_energy_min=2.25 * omega**2 * s / eps_c,
        n_levels_min=math.pi * v01_abs / math.sqrt(eps_c),
        qfi_min=omega**2 * s / eps_c,
    )


def intrinsic_error_terms(report: ResourceReport, omega: float = 1.0) -> dict:
    """Lower bounds on eps_C / |V01|^2 implied by each resource of a state."""
    eta_sq = compute_constants().eta_sq
    inf = math.inf
    return {
        "mean_energy": eta_sq * omega**2 / report.mean_energy**2 if report.mean_energy > 0 else inf,
        "mean_sq_energy": 2.25 * omega**2 / report.mean_sq_energy if report.mean_sq_energy > 0 else inf,
        "n_levels": math.pi**2 / report.level_count**2 if report.level_count > 0 else inf,
    }


def intrinsic_error(report: ResourceReport, omega: float = 1.0) -> float:
    """max of :func:`intrinsic_error_terms`: the leading-order floor on eps_C / |V01|^2."""
    return max(intrinsic_error_terms(report, omega).values())


# predicted minimal Unitary Defect for each resource budget (profile units, delta = 1)


def predicted_min_ud(resource: str, budget: float, omega: float = 1.0) -> float:
    if resource == "mean_energy":
        return compute_constants().eta_sq * omega**2 / budget**2
    if resource == "mean_sq_energy":
        return 2.25 * omega**2 / budget
    if resource == "n_levels":
        return math.pi**2 / budget**2
    if resource == "qfi":
        return omega**2 / budget
    from .errors import UnknownResource

    raise UnknownResource(resource)
