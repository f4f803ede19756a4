"""Battery states, continuous shape profiles, resources and the Unitary Defect."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import BadWeights, NotNormalizable, TailTruncated
from .quadrature import integrate

NORM_TOL = 1e-12
TAIL_TOL = 1e-12
POPULATION_THRESHOLD = 1e-15


@dataclass(frozen=True)
class BatteryState:
    """Truncated amplitudes beta_n, n = 0..T-1, of a ladder with gap ``omega``."""

    omega: float
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).ravel()
        if amps.size < 2:
            raise ValueError("truncation must be at least 2")
        if not np.all(np.isfinite(amps)):
            raise NotNormalizable("amplitudes must be finite")
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            raise NotNormalizable(f"state norm {norm!r} differs from 1")
        if not self.omega > 0:
            raise ValueError("omega must be positive")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def truncation(self) -> int:
        return self.amplitudes.size

    @classmethod
    def normalized(cls, amplitudes, omega: float = 1.0) -> "BatteryState":
        amps = np.asarray(amplitudes, dtype=complex).ravel()
        norm = math.sqrt(float(np.sum(np.abs(amps) ** 2)))
        if norm == 0.0 or not math.isfinite(norm):
            raise NotNormalizable("cannot normalize a zero or non-finite vector")
        return cls(omega, amps / norm)

    @classmethod
    def level(cls, n: int, truncation: int, omega: float = 1.0) -> "BatteryState":
        amps = np.zeros(truncation, dtype=complex)
        amps[n] = 1.0
        return cls(omega, amps)

    def padded(self, length: int) -> np.ndarray:
        """Amplitudes zero-padded (never cut) to ``length``."""
        out = np.zeros(max(length, self.truncation), dtype=complex)
        out[: self.truncation] = self.amplitudes
        return out

    def to_json(self) -> dict:
        return {
            "omega": self.omega,
            "amps_re": self.amplitudes.real.tolist(),
            "amps_im": self.amplitudes.imag.tolist(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "BatteryState":
        re = np.asarray(obj["amps_re"], dtype=float)
        im = np.asarray(obj.get("amps_im", np.zeros_like(re)), dtype=float)
        if re.shape != im.shape:
            raise ValueError("amps_re and amps_im differ in length")
        return cls(float(obj.get("omega", 1.0)), re + 1j * im)


@dataclass(frozen=True)
class ResourceReport:
    mean_energy: float
    mean_sq_energy: float
    qfi: float
    level_count: int
    ground_population: float
    discrete_ud: float

    def to_json(self) -> dict:
        return {
            "mean_energy": self.mean_energy,
            "mean_sq_energy": self.mean_sq_energy,
            "qfi": self.qfi,
            "level_count": self.level_count,
            "ground_population": self.ground_population,
            "discrete_ud": self.discrete_ud,
        }


def discrete_ud(amplitudes) -> float:
    """sum_{n>=0} |beta_{n+1} - beta_n|^2 with beta_T = 0."""
    b = np.append(np.asarray(amplitudes, dtype=complex), 0.0)
    return float(np.sum(np.abs(np.diff(b)) ** 2))


def resource_report(state: BatteryState) -> ResourceReport:
    p = np.abs(state.amplitudes) ** 2
    n = np.arange(state.truncation, dtype=float)
    w = state.omega
    e1 = w * float(np.dot(n, p))
    e2 = w * w * float(np.dot(n * n, p))
    # variance computed around the mean to avoid cancellation
    var = w * w * float(np.dot((n - e1 / w) ** 2, p))
    return ResourceReport(
        mean_energy=e1,
        mean_sq_energy=e2,
        qfi=4.0 * var,
        level_count=int(np.count_nonzero(p > POPULATION_THRESHOLD)),
        ground_population=float(p[0]),
        discrete_ud=discrete_ud(state.amplitudes),
    )


@dataclass(frozen=True)
class ShapeProfile:
    """A normalized amplitude profile psi on [0, inf) with its derivative.

    ``eval`` and ``deriv`` must accept floats and numpy arrays. ``extent`` is a
    point beyond which |psi|^2 is below 1e-16 of its peak (the support end for
    compact profiles). ``breakpoints`` are interior points where quadrature
    should split, e.g. a bump center.
    """

    eval: Callable
    deriv: Callable
    tag: str
    extent: float
    params: dict = field(default_factory=dict)
    support_hint: Optional[tuple] = None
    breakpoints: tuple = ()
    nonvanishing_at_zero: bool = False
    validate: bool = field(default=True, compare=False)

    def __post_init__(self):
        if not self.extent > 0:
            raise ValueError("extent must be positive")
        if not self.validate:
            return
        psi0 = abs(complex(self.eval(0.0)))
        if not self.nonvanishing_at_zero and psi0 > 1e-10:
            raise ValueError(f"profile {self.tag!r} has psi(0) = {psi0:.3e}; flag nonvanishing_at_zero to allow it")
        norm = self.norm_squared()
        if abs(norm - 1.0) > 1e-8:
            raise NotNormalizable(f"profile {self.tag!r} has squared norm {norm!r}")

    def _integral(self, g, a: float = 0.0, b: Optional[float] = None, epsabs: float = 1e-12) -> float:
        b = self.extent if b is None else b
        if b <= a:
            return 0.0
        return integrate(g, a, b, points=self.breakpoints, epsabs=epsabs)

    def norm_squared(self) -> float:
        return self._integral(lambda x: abs(self.eval(x)) ** 2)

    def moment(self, k: int) -> float:
        """int x^k |psi|^2 dx, in units of the profile coordinate."""
        return self._integral(lambda x: x**k * abs(self.eval(x)) ** 2, epsabs=1e-12 * max(1.0, self.extent) ** k)

    def tail_mass(self, x: float) -> float:
        if self.support_hint is not None and x >= self.support_hint[1]:
            return 0.0
        if x >= self.extent:
            return 0.0
        return self._integral(lambda t: abs(self.eval(t)) ** 2, a=max(x, 0.0), epsabs=1e-15)

    def default_truncation(self, delta: float) -> int:
        end = self.support_hint[1] if self.support_hint is not None else self.extent
        return max(2, int(math.ceil(end / delta - 1e-9)))


def continuous_ud(profile: ShapeProfile) -> float:
    """Unitary Defect: int_0^inf |psi'(x)|^2 dx."""
    return profile._integral(lambda x: abs(profile.deriv(x)) ** 2, epsabs=1e-10)


def average_ud(ensemble) -> float:
    """sum_i p_i UD(psi_i) for an ensemble of (weight, profile) pairs."""
    weights = np.array([w for w, _ in ensemble], dtype=float)
    if weights.size == 0 or np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-12:
        raise BadWeights("weights must be nonnegative and sum to 1")
    return float(sum(w * continuous_ud(p) for w, p in ensemble))


def sample_ansatz(profile: ShapeProfile, delta: float, truncation: Optional[int] = None, omega: float = 1.0) -> BatteryState:
    """beta_n = C_delta psi(n delta), with C_delta the exact discrete normalizer."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    if truncation is None:
        truncation = profile.default_truncation(delta)
    if truncation < 2:
        raise ValueError("truncation must be at least 2")
    tail = profile.tail_mass(truncation * delta)
    if tail >= TAIL_TOL:
        raise TailTruncated(f"tail mass {tail:.3e} beyond level {truncation} exceeds {TAIL_TOL:.0e}")
    x = np.arange(truncation) * delta
    amps = np.asarray(profile.eval(x), dtype=complex)
    if profile.support_hint is not None:
        amps[x >= profile.support_hint[1]] = 0.0
    if not profile.nonvanishing_at_zero:
        amps[0] = 0.0
    if not np.any(amps):
        raise NotNormalizable("all samples vanish")
    return BatteryState.normalized(amps, omega)


# general-purpose profiles


def sine_profile(length: float = 1.0) -> ShapeProfile:
    """sqrt(2/L) sin(pi x / L) on [0, L], zero beyond."""
    L = float(length)
    k = np.pi / L
    amp = math.sqrt(2.0 / L)

    def f(x):
        x = np.asarray(x, dtype=float)
        return np.where((x >= 0) & (x <= L), amp * np.sin(k * x), 0.0)

    def df(x):
        x = np.asarray(x, dtype=float)
        return np.where((x >= 0) & (x <= L), amp * k * np.cos(k * x), 0.0)

    return ShapeProfile(f, df, "sine", extent=L, params={"length": L}, support_hint=(0.0, L))


def gaussian_profile(center: float, width: float, tag: str = "gaussian") -> ShapeProfile:
    """psi proportional to exp(-(x - c)^2 / (4 w^2)), normalized on the half line.

    |psi|^2 is a Gaussian of standard deviation ``width``.
    """
    c, w = float(center), float(width)
    mass = w * math.sqrt(math.pi / 2) * (1.0 + math.erf(c / (w * math.sqrt(2))))
    amp = 1.0 / math.sqrt(mass)

    def f(x):
        return amp * np.exp(-((np.asarray(x, dtype=float) - c) ** 2) / (4 * w * w))

    def df(x):
        x = np.asarray(x, dtype=float)
        return -(x - c) / (2 * w * w) * f(x)

    psi0 = float(f(0.0))
    return ShapeProfile(
        f,
        df,
        tag,
        extent=max(c, 0.0) + 9.0 * w,
        params={"center": c, "width": w},
        breakpoints=(c,) if c > 0 else (),
        nonvanishing_at_zero=psi0 > 1e-10,
    )


def custom_profile(f: Callable, df: Callable, extent: float, normalize: bool = True, **kwargs) -> ShapeProfile:
    """Wrap user functions as a profile, optionally rescaling to unit norm."""
    raw = ShapeProfile(f, df, "custom", extent=extent, validate=False, **kwargs)
    scale = 1.0
    if normalize:
        norm = raw.norm_squared()
        if not norm > 0:
            raise NotNormalizable("custom profile has zero norm")
        scale = 1.0 / math.sqrt(norm)
    return ShapeProfile(
        lambda x: scale * f(x), lambda x: scale * df(x), "custom", extent=extent, **kwargs
    )
