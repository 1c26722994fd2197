import logging
import math
from dataclasses import dataclass
from typing import override

import numpy as np
from scipy.special import xlogy

from .closed_forms import power_wpve_closed
from .distributions import Distribution, DistributionError, Family, FloatArray
from .measures import MeasureDomainError
from .quadrature import DEFAULT_REL_TOL, integrate

logger = logging.getLogger("prhr")


@dataclass(frozen=True)
class PrhrModel:
    """Proportional reversed hazard rate model: G2(y) = G1(y)**a."""
    baseline: Distribution
    a: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.a) and self.a > 0.0):
            raise DistributionError(f"PRHR exponent must be positive, got {self.a}")


class PrhrDistribution(Distribution):
    family = Family.PRHR

    def __init__(self, model: PrhrModel) -> None:
        base = model.baseline
        super().__init__(lo=base.lo, hi=base.hi, params={**base.params, "exponent": model.a})
        self.model = model
        self.base = base
        self.a = model.a

    @override
    def _logpdf(self, y: FloatArray) -> FloatArray:
        g1 = np.asarray(self.base.cdf(y), dtype=float)
        return math.log(self.a) + xlogy(self.a - 1.0, g1) + np.asarray(self.base.logpdf(y), dtype=float)

    @override
    def _cdf(self, y: FloatArray) -> FloatArray:
        return np.power(np.asarray(self.base.cdf(y), dtype=float), self.a)

    @override
    def _sf(self, y: FloatArray) -> FloatArray:
        return -np.expm1(self.a * np.log(np.asarray(self.base.cdf(y), dtype=float)))

    @override
    def _quantile(self, p: FloatArray) -> FloatArray:
        return np.asarray(self.base.quantile(np.power(p, 1.0 / self.a)), dtype=float)

    @override
    def describe(self) -> str:
        return f"{self.family.value}:a={self.a:g}({self.base.describe()})"


def prhr_distribution(m: PrhrModel) -> Distribution:
    return PrhrDistribution(m)


def wpve_prhr(m: PrhrModel, t: float, rel_tol: float = DEFAULT_REL_TOL) -> float:
    """WPVE with weight y of the PRHR law, integrated in the probability domain.

    Substituting x = G2(y) turns the past window into (0, G1(t)**a), with
    y = G1^-1(x**(1/a)) and the information term

        J(x) = -y * (log a + (1 - 1/a) log x + log g1(y) - a log G1(t)).
    """
    base = m.baseline
    a = m.a
    mass_1 = base.cdf(t)
    if not mass_1 > 0.0:
        raise MeasureDomainError(f"PRHR past window undefined: G1({t:g}) = 0")
    log_mass_1 = math.log(mass_1)
    upper = math.exp(a * log_mass_1)

    def info(x: float) -> float:
        y = base.quantile(min(1.0, x ** (1.0 / a)))
        return -y * (math.log(a) + (1.0 - 1.0 / a) * math.log(x) + base.logpdf(y) - a * log_mass_1)

    points = [upper * 10.0 ** -k for k in (8, 6, 4, 2)]
    mean = integrate(info, 0.0, upper, rel_tol, points=points).value / upper
    variance = integrate(lambda x: (info(x) - mean) ** 2, 0.0, upper, rel_tol, points=points).value / upper
    return max(variance, 0.0)


def wpve_prhr_power_closed(alpha: float, beta: float, a: float, t: float) -> float:
    """Power(alpha, scale beta) baseline raised to a is Power(a*alpha, scale beta)."""
    return power_wpve_closed(a * alpha, beta, t)
