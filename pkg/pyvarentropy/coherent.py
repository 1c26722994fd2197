import logging
import math
from dataclasses import dataclass
from typing import Any, Callable, Sequence, override

import numpy as np
import pandas as pd
from scipy.optimize import brentq

from .closed_forms import power_wpve_closed
from .distributions import Distribution, Family, FloatArray
from .measures import MeasureDomainError
from .model import VarentropyError
from .quadrature import DEFAULT_REL_TOL, integrate

logger = logging.getLogger("coherent")

DISTORTION_GRID = 512
ENDPOINT_TOLERANCE = 1e-12
INVERSE_XTOL = 1e-13

ArrayFn = Callable[[Any], Any]


class DistortionError(VarentropyError):
    pass


class DistortionFunction:
    """A non-decreasing q on [0, 1] with q(0) = 0 and q(1) = 1.

    The system built from identically distributed components has CDF q(G(y)).
    Without an explicit inverse, q^-1 is found by bracketed root search.
    """

    def __init__(self, fn: ArrayFn, derivative: ArrayFn, *, name: str, inverse: ArrayFn | None = None) -> None:
        self.fn = fn
        self.derivative = derivative
        self.name = name
        self._inverse = inverse
        self._validate()

    def _validate(self) -> None:
        at_zero = float(self.fn(0.0))
        at_one = float(self.fn(1.0))
        if abs(at_zero) > ENDPOINT_TOLERANCE or abs(at_one - 1.0) > ENDPOINT_TOLERANCE:
            raise DistortionError(f"distortion '{self.name}' must map 0 to 0 and 1 to 1, "
                                  f"got q(0)={at_zero:g}, q(1)={at_one:g}")
        grid = np.linspace(0.0, 1.0, DISTORTION_GRID)
        values = np.asarray(self.fn(grid), dtype=float)
        slopes = np.asarray(self.derivative(grid), dtype=float) * np.ones_like(grid)
        if np.any(np.diff(values) < -ENDPOINT_TOLERANCE) or np.any(slopes < -ENDPOINT_TOLERANCE):
            raise DistortionError(f"distortion '{self.name}' is not non-decreasing on [0, 1]")
        if np.any((values < -ENDPOINT_TOLERANCE) | (values > 1.0 + ENDPOINT_TOLERANCE)):
            raise DistortionError(f"distortion '{self.name}' leaves [0, 1]")

    def __call__(self, u: float) -> float:
        return float(self.fn(u))

    def slope(self, u: float) -> float:
        return float(self.derivative(u))

    def inverse(self, p: float) -> float:
        if p <= 0.0:
            return 0.0
        if p >= 1.0:
            return 1.0
        if self._inverse is not None:
            return float(self._inverse(p))
        return float(brentq(lambda u: float(self.fn(u)) - p, 0.0, 1.0, xtol=INVERSE_XTOL))

    @classmethod
    def polynomial(cls, coefficients: Sequence[float], *, name: str | None = None) -> "DistortionFunction":
        """q(u) = sum c_k u**k, coefficients in increasing degree."""
        poly = np.polynomial.Polynomial(np.asarray(coefficients, dtype=float))
        slope = poly.deriv()
        label = name or "poly:" + ",".join(f"{c:g}" for c in coefficients)
        return cls(poly, slope, name=label)

    def __repr__(self) -> str:
        return f"DistortionFunction({self.name})"


SERIES = DistortionFunction(lambda u: 1.0 - (1.0 - u) ** 3, lambda u: 3.0 * (1.0 - u) ** 2,
                            inverse=lambda p: 1.0 - (1.0 - p) ** (1.0 / 3.0), name="series")
TWO_OF_THREE = DistortionFunction(lambda u: 3.0 * u ** 2 - 2.0 * u ** 3, lambda u: 6.0 * u * (1.0 - u),
                                  name="2-out-of-3")
PARALLEL = DistortionFunction(lambda u: u ** 3, lambda u: 3.0 * u ** 2,
                              inverse=lambda p: p ** (1.0 / 3.0), name="parallel")
IDENTITY = DistortionFunction(lambda u: u, lambda u: 1.0 + 0.0 * u, inverse=lambda p: p, name="identity")

BUILTIN_DISTORTIONS = {q.name: q for q in (SERIES, TWO_OF_THREE, PARALLEL, IDENTITY)}


@dataclass(frozen=True)
class CoherentSystem:
    component: Distribution
    q: DistortionFunction


class SystemDistribution(Distribution):
    """Lifetime law of a coherent system: G_T(y) = q(G(y)), g_T(y) = q'(G(y)) g(y)."""
    family = Family.SYSTEM

    def __init__(self, system: CoherentSystem) -> None:
        component = system.component
        super().__init__(lo=component.lo, hi=component.hi, params=component.params)
        self.system = system
        self.component = component
        self.q = system.q

    @override
    def _logpdf(self, y: FloatArray) -> FloatArray:
        u = np.asarray(self.component.cdf(y), dtype=float)
        slope = np.asarray(self.q.derivative(u), dtype=float)
        return np.log(slope) + np.asarray(self.component.logpdf(y), dtype=float)

    @override
    def _cdf(self, y: FloatArray) -> FloatArray:
        return np.asarray(self.q.fn(np.asarray(self.component.cdf(y), dtype=float)), dtype=float)

    @override
    def _quantile(self, p: FloatArray) -> FloatArray:
        u = np.vectorize(self.q.inverse, otypes=[float])(p)
        return np.asarray(self.component.quantile(u), dtype=float)

    @override
    def describe(self) -> str:
        return f"{self.family.value}:{self.q.name}({self.component.describe()})"


def system_distribution(s: CoherentSystem) -> Distribution:
    return SystemDistribution(s)


@dataclass(frozen=True)
class _UWindow:
    upper: float
    log_mass: float

    @property
    def mass(self) -> float:
        return math.exp(self.log_mass)


def _u_window(s: CoherentSystem, t: float) -> _UWindow:
    upper = s.component.cdf(t)
    if not upper > 0.0:
        raise MeasureDomainError(f"system past window undefined: G({t:g}) = 0")
    mass = s.q(upper)
    if not mass > 0.0:
        raise MeasureDomainError(f"system past window undefined: q(G({t:g})) = 0")
    return _UWindow(upper, math.log(mass))


def _u_expectation(s: CoherentSystem, window: _UWindow, f: Callable[[float, float], float],
                   rel_tol: float) -> float:
    """E[f(Y, l) | T <= t] with u = G(y) and l = log(g_T(y)/G_T(t))."""
    component = s.component
    mass = window.mass

    def integrand(u: float) -> float:
        slope = s.q.slope(u)
        if not slope > 0.0:
            return 0.0
        y = component.quantile(u)
        ell = math.log(slope) + component.logpdf(y) - window.log_mass
        return slope / mass * f(y, ell)

    points = [window.upper * 10.0 ** -k for k in (8, 6, 4, 2)]
    return integrate(integrand, 0.0, window.upper, rel_tol, points=points).value


def _u_variance(s: CoherentSystem, t: float, info: Callable[[float, float], float], rel_tol: float) -> float:
    window = _u_window(s, t)
    mean = _u_expectation(s, window, info, rel_tol)
    variance = _u_expectation(s, window, lambda y, ell: (info(y, ell) - mean) ** 2, rel_tol)
    return max(variance, 0.0)


def wpve_system(s: CoherentSystem, t: float, rel_tol: float = DEFAULT_REL_TOL) -> float:
    """WPVE with weight y of the system lifetime, integrated over u in (0, G(t))."""
    return _u_variance(s, t, lambda y, ell: -y * ell, rel_tol)


def pve_system(s: CoherentSystem, t: float, rel_tol: float = DEFAULT_REL_TOL) -> float:
    return _u_variance(s, t, lambda y, ell: -ell, rel_tol)


def wpse_system(s: CoherentSystem, t: float, rel_tol: float = DEFAULT_REL_TOL) -> float:
    return _u_expectation(s, _u_window(s, t), lambda y, ell: -y * ell, rel_tol)


def wpre_system(s: CoherentSystem, t: float, alpha: float, rel_tol: float = DEFAULT_REL_TOL) -> float:
    """Weighted past Renyi entropy of order alpha: log of the integral of (y g_T/G_T)**alpha dy, over 1 - alpha."""
    if alpha == 1.0 or not alpha > 0.0:
        raise MeasureDomainError(f"Renyi order must be positive and different from 1, got {alpha}")
    window = _u_window(s, t)
    component = s.component

    def integrand(u: float) -> float:
        slope = s.q.slope(u)
        y = component.quantile(u)
        if not (slope > 0.0 and y > 0.0):
            return 0.0
        lp = component.logpdf(y)
        return math.exp(alpha * (math.log(y) + math.log(slope) + lp - window.log_mass) - lp)

    points = [window.upper * 10.0 ** -k for k in (8, 6, 4, 2)]
    total = integrate(integrand, 0.0, window.upper, rel_tol, points=points).value
    return math.log(total) / (1.0 - alpha)


def wpve_parallel_power_closed(beta: float, t: float) -> float:
    """Parallel system of three Power(beta) components is Power(3*beta)."""
    return power_wpve_closed(3.0 * beta, 1.0, t)


def information_profile(s: CoherentSystem, t: float, u: FloatArray) -> tuple[FloatArray, FloatArray]:
    """Pointwise (phi, psi) on u = G(y): phi = d*(y log d)**2 and psi = y*d*log d with d = g_T(y)/G_T(t)."""
    window = _u_window(s, t)
    component = s.component
    with np.errstate(all="ignore"):
        y = np.asarray(component.quantile(u), dtype=float)
        ell = (np.log(np.asarray(s.q.derivative(u), dtype=float))
               + np.asarray(component.logpdf(y), dtype=float) - window.log_mass)
        density = np.exp(ell)
        phi = density * np.square(y * ell)
        psi = y * density * ell
    valid = (y > 0.0) & np.isfinite(ell)
    return np.where(valid, phi, 0.0), np.where(valid, psi, 0.0)


def compare_systems(component: Distribution, t: float, alpha: float,
                    systems: Sequence[DistortionFunction] = (SERIES, TWO_OF_THREE, PARALLEL),
                    rel_tol: float = DEFAULT_REL_TOL) -> pd.DataFrame:
    """One row per system with its WPVE, past VE, weighted past Renyi and weighted past Shannon entropies."""
    rows = []
    for q in systems:
        s = CoherentSystem(component, q)
        rows.append({
            "system": q.name,
            "wpve": wpve_system(s, t, rel_tol),
            "pve": pve_system(s, t, rel_tol),
            "wpre": wpre_system(s, t, alpha, rel_tol),
            "wpse": wpse_system(s, t, rel_tol),
        })
        logger.debug(f"compared system {q.name} at t={t:g}")
    return pd.DataFrame(rows, columns=["system", "wpve", "pve", "wpre", "wpse"])
