import logging
import math
from typing import Any, Callable

import numpy as np
from scipy.special import ndtr

from .distributions import Exponential, FloatArray
from .fitting import check_sample, mle_exponential
from .measures import wpdve, wpve
from .model import EstimateMethod, EstimateResult, VarentropyError
from .quadrature import DEFAULT_REL_TOL, integrate
from .weight import IDENTITY

logger = logging.getLogger("estimation")

# residual integrals stop this many bandwidths past the largest observation
TAIL_BANDWIDTHS = 10.0
MIN_PAST_MASS = 1e-12
MASS_TOLERANCE = 1e-6
SQRT_2PI = math.sqrt(2.0 * math.pi)


class EstimationError(VarentropyError):
    pass


class KernelEstimator:
    """Gaussian kernel density estimate of a positive sample.

    By default the estimate is the plain kernel sum, which leaks some mass
    below zero. With `renormalize` the density is set to zero below zero and
    rescaled by the mass the sum keeps on (0, inf).
    """

    def __init__(self, sample: FloatArray | list[float], bandwidth: float, *, renormalize: bool = False) -> None:
        self.sample = check_sample(sample)
        if not (math.isfinite(bandwidth) and bandwidth > 0.0):
            raise EstimationError(f"bandwidth must be positive, got {bandwidth}")
        self.bandwidth = float(bandwidth)
        self.renormalize = renormalize
        self.n = self.sample.size
        self.lo = 0.0
        self.hi = float(np.max(self.sample)) + TAIL_BANDWIDTHS * self.bandwidth
        # analytic mass of the kernel sum on (0, inf)
        self.positive_mass = float(np.mean(ndtr(self.sample / self.bandwidth)))
        self._scale = 1.0 / self.positive_mass if renormalize else 1.0

    def pdf(self, y: Any) -> Any:
        arr = np.asarray(y, dtype=float)
        z = (arr[..., None] - self.sample) / self.bandwidth
        values = np.exp(-0.5 * z * z).sum(axis=-1) / (self.n * self.bandwidth * SQRT_2PI) * self._scale
        if self.renormalize:
            values = np.where(arr < 0.0, 0.0, values)
        return float(values) if values.ndim == 0 else values

    def logpdf(self, y: float) -> float:
        value = self.pdf(y)
        return math.log(value) if value > 0.0 else -math.inf

    def integral(self, a: float, b: float, rel_tol: float = DEFAULT_REL_TOL) -> float:
        if not a < b:
            return 0.0
        return integrate(self.pdf, a, b, rel_tol).value

    def cdf(self, t: float, rel_tol: float = DEFAULT_REL_TOL) -> float:
        """G(t) as the integral of the estimate over (0, t)."""
        return self.integral(self.lo, min(t, self.hi), rel_tol)

    def mass(self, rel_tol: float = DEFAULT_REL_TOL) -> float:
        return self.integral(self.lo, self.hi, rel_tol)

    def __repr__(self) -> str:
        return f"KernelEstimator(n={self.n}, bandwidth={self.bandwidth:g}, renormalize={self.renormalize})"


def kde_pdf(k: KernelEstimator, y: float) -> float:
    return float(k.pdf(float(y)))


def kde_cdf(k: KernelEstimator, t: float) -> float:
    return k.cdf(t)


def kde_mass(k: KernelEstimator) -> float:
    return k.mass()


def _plug_in(pdf: Callable[[float], float], mass: float, a: float, b: float, rel_tol: float) -> float:
    """Variance of -y log(pdf(Y)/mass) under pdf/mass on (a, b)."""
    log_mass = math.log(mass)

    def info(y: float) -> tuple[float, float]:
        p = pdf(y)
        if not p > 0.0:
            return 0.0, 0.0
        return p / mass, -y * (math.log(p) - log_mass)

    def mean_integrand(y: float) -> float:
        weight, value = info(y)
        return weight * value

    mean = integrate(mean_integrand, a, b, rel_tol).value

    def variance_integrand(y: float) -> float:
        weight, value = info(y)
        return weight * (value - mean) ** 2

    return integrate(variance_integrand, a, b, rel_tol).value


def wpve_plug_in(pdf: Callable[[float], float], mass: float, lo: float, t: float,
                 rel_tol: float = DEFAULT_REL_TOL) -> float:
    """WPVE (weight y) of any density on (lo, t) given its mass there."""
    if not mass > MIN_PAST_MASS:
        raise EstimationError(f"past mass {mass:.3g} at t={t:g} is too small for a plug-in estimate")
    return _plug_in(pdf, mass, lo, t, rel_tol)


def wrve_plug_in(pdf: Callable[[float], float], mass: float, t: float, hi: float,
                 rel_tol: float = DEFAULT_REL_TOL) -> float:
    if not mass > MIN_PAST_MASS:
        raise EstimationError(f"residual mass {mass:.3g} at t={t:g} is too small for a plug-in estimate")
    return _plug_in(pdf, mass, t, hi, rel_tol)


def wpve_nonparametric(k: KernelEstimator, t: float, rel_tol: float = DEFAULT_REL_TOL) -> EstimateResult:
    if not t > k.lo:
        raise EstimationError(f"past window (0, {t:g}) is empty")
    mass = k.cdf(t, rel_tol)
    value = wpve_plug_in(k.pdf, mass, k.lo, min(t, k.hi), rel_tol)
    return EstimateResult(value=value, method=EstimateMethod.NONPARAMETRIC, t=t, auxiliary=mass)


def wpdve_nonparametric(k: KernelEstimator, t: float, rel_tol: float = DEFAULT_REL_TOL) -> EstimateResult:
    """Past plug-in plus residual plug-in; both windows stop at max(sample) + 10 bandwidths."""
    if not k.lo < t < k.hi:
        raise EstimationError(f"t={t:g} must fall inside (0, {k.hi:g})")
    past_mass = k.cdf(t, rel_tol)
    residual_mass = k.integral(t, k.hi, rel_tol)
    total = k.mass(rel_tol)
    if abs(past_mass + residual_mass - total) > MASS_TOLERANCE:
        logger.debug(f"kernel masses disagree at t={t:g}: {past_mass:.9g} + {residual_mass:.9g} != {total:.9g}")
    value = (wpve_plug_in(k.pdf, past_mass, k.lo, t, rel_tol)
             + wrve_plug_in(k.pdf, residual_mass, t, k.hi, rel_tol))
    return EstimateResult(value=value, method=EstimateMethod.NONPARAMETRIC, t=t, auxiliary=past_mass)


def wpve_parametric_exponential(sample: FloatArray | list[float], t: float,
                                rel_tol: float = DEFAULT_REL_TOL) -> EstimateResult:
    """WPVE of the exponential law at the MLE rate n / sum(y)."""
    fitted = mle_exponential(sample)
    value = wpve(fitted, IDENTITY, t, rel_tol).value
    return EstimateResult(value=value, method=EstimateMethod.PARAMETRIC, t=t, auxiliary=fitted.lam)


def wpdve_parametric_exponential(sample: FloatArray | list[float], t: float,
                                 rel_tol: float = DEFAULT_REL_TOL) -> EstimateResult:
    fitted: Exponential = mle_exponential(sample)
    value = wpdve(fitted, IDENTITY, t, rel_tol).value
    return EstimateResult(value=value, method=EstimateMethod.PARAMETRIC, t=t, auxiliary=fitted.lam)


def silverman_bandwidth(sample: FloatArray | list[float]) -> float:
    """0.9 * min(sd, IQR/1.34) * n**(-1/5)."""
    data = np.asarray(sample, dtype=float).ravel()
    if data.size < 2:
        raise EstimationError("bandwidth rule needs at least two observations")
    sd = float(np.std(data, ddof=1))
    q75, q25 = np.percentile(data, [75.0, 25.0])
    spread = min(sd, float(q75 - q25) / 1.34)
    bandwidth = 0.9 * spread * data.size ** -0.2
    if not bandwidth > 0.0:
        raise EstimationError(f"bandwidth rule gave {bandwidth:g}; the sample has no spread")
    return bandwidth
