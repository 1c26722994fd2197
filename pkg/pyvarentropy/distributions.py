import logging
import math
from abc import ABC, abstractmethod
from enum import Enum
from typing import Any, TypeAlias, overload, override

import numpy as np
import numpy.typing as npt
from scipy.special import xlogy

from .model import VarentropyError

logger = logging.getLogger("distributions")

FloatArray: TypeAlias = npt.NDArray[np.float64]
Seed: TypeAlias = int | np.random.SeedSequence | None


class DistributionError(VarentropyError):
    pass


class DistributionDomainError(DistributionError):
    pass


class Family(Enum):
    UNIFORM = "uniform"
    EXPONENTIAL = "exp"
    PARETO_I = "pareto"
    WEIBULL_SQRT = "weibull"
    POWER = "power"
    LOMAX = "lomax"
    SHIFTED_EXPONENTIAL = "shiftexp"
    GUMBEL_II = "gumbel2"
    WEIBULL = "weibull2"
    PRHR = "prhr"
    SYSTEM = "system"
    TRANSFORMED = "transformed"


def _unwrap(values: FloatArray) -> Any:
    if values.ndim == 0:
        return float(values)
    return values


class Distribution(ABC):
    """A lifetime law over the support [lo, hi] (hi may be infinite).

    Subclasses implement the private hooks on points inside the support; the
    public methods take scalars or arrays, handle the outside of the support
    and return the same shape they were given.
    """
    family: Family

    def __init__(self, *, lo: float, hi: float, params: dict[str, float]) -> None:
        for name, value in params.items():
            if not math.isfinite(value):
                raise DistributionError(f"{self.family.value}: parameter {name}={value} is not finite")
        if not lo < hi:
            raise DistributionError(f"{self.family.value}: empty support [{lo}, {hi}]")
        self.params = dict(params)
        self.lo = float(lo)
        self.hi = float(hi)

    @abstractmethod
    def _logpdf(self, y: FloatArray) -> FloatArray:
        pass

    @abstractmethod
    def _cdf(self, y: FloatArray) -> FloatArray:
        pass

    @abstractmethod
    def _quantile(self, p: FloatArray) -> FloatArray:
        pass

    def _sf(self, y: FloatArray) -> FloatArray:
        return 1.0 - self._cdf(y)

    def _inside(self, y: FloatArray) -> Any:
        return (y >= self.lo) & (y <= self.hi)

    @overload
    def logpdf(self, y: float) -> float: ...
    @overload
    def logpdf(self, y: FloatArray) -> FloatArray: ...

    def logpdf(self, y: Any) -> Any:
        arr = np.asarray(y, dtype=float)
        with np.errstate(all="ignore"):
            out = np.where(self._inside(arr), self._logpdf(arr), -np.inf)
        return _unwrap(out)

    @overload
    def pdf(self, y: float) -> float: ...
    @overload
    def pdf(self, y: FloatArray) -> FloatArray: ...

    def pdf(self, y: Any) -> Any:
        return _unwrap(np.exp(np.asarray(self.logpdf(y), dtype=float)))

    @overload
    def cdf(self, y: float) -> float: ...
    @overload
    def cdf(self, y: FloatArray) -> FloatArray: ...

    def cdf(self, y: Any) -> Any:
        arr = np.asarray(y, dtype=float)
        with np.errstate(all="ignore"):
            inner = np.clip(self._cdf(np.clip(arr, self.lo, self.hi)), 0.0, 1.0)
        out = np.where(arr < self.lo, 0.0, np.where(arr >= self.hi, 1.0, inner))
        return _unwrap(out)

    @overload
    def sf(self, y: float) -> float: ...
    @overload
    def sf(self, y: FloatArray) -> FloatArray: ...

    def sf(self, y: Any) -> Any:
        arr = np.asarray(y, dtype=float)
        with np.errstate(all="ignore"):
            inner = np.clip(self._sf(np.clip(arr, self.lo, self.hi)), 0.0, 1.0)
        out = np.where(arr <= self.lo, 1.0, np.where(arr >= self.hi, 0.0, inner))
        return _unwrap(out)

    @overload
    def quantile(self, p: float) -> float: ...
    @overload
    def quantile(self, p: FloatArray) -> FloatArray: ...

    def quantile(self, p: Any) -> Any:
        arr = np.asarray(p, dtype=float)
        if np.any(np.isnan(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
            raise DistributionDomainError(f"{self.family.value}: probabilities must lie in [0, 1]")
        with np.errstate(all="ignore"):
            out = np.clip(self._quantile(arr), self.lo, self.hi)
        out = np.where(arr == 0.0, self.lo, np.where(arr == 1.0, self.hi, out))
        return _unwrap(out)

    def sample(self, n: int, seed: Seed = None) -> FloatArray:
        """Draws n values by inverse transform, so the seed fixes the whole stream."""
        if n < 1:
            raise DistributionDomainError(f"sample size must be at least 1, got {n}")
        uniforms = np.random.default_rng(seed).random(n)
        return np.asarray(self.quantile(uniforms), dtype=float)

    def describe(self) -> str:
        body = ",".join(f"{name}={value:g}" for name, value in self.params.items())
        return f"{self.family.value}:{body}"

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.describe()})"


def _require_positive(family: Family, **values: float) -> None:
    for name, value in values.items():
        if not value > 0:
            raise DistributionError(f"{family.value}: {name} must be positive, got {value}")


class Uniform(Distribution):
    family = Family.UNIFORM

    def __init__(self, a: float = 0.0, b: float = 1.0) -> None:
        super().__init__(lo=a, hi=b, params={"a": a, "b": b})
        self.a = a
        self.b = b

    @override
    def _logpdf(self, y: FloatArray) -> FloatArray:
        return np.full_like(y, -math.log(self.b - self.a))

    @override
    def _cdf(self, y: FloatArray) -> FloatArray:
        return (y - self.a) / (self.b - self.a)

    @override
    def _sf(self, y: FloatArray) -> FloatArray:
        return (self.b - y) / (self.b - self.a)

    @override
    def _quantile(self, p: FloatArray) -> FloatArray:
        return self.a + p * (self.b - self.a)


class Exponential(Distribution):
    family = Family.EXPONENTIAL

    def __init__(self, lam: float) -> None:
        super().__init__(lo=0.0, hi=math.inf, params={"lambda": lam})
        _require_positive(self.family, lam=lam)
        self.lam = lam

    @override
    def _logpdf(self, y: FloatArray) -> FloatArray:
        return math.log(self.lam) - self.lam * y

    @override
    def _cdf(self, y: FloatArray) -> FloatArray:
        return -np.expm1(-self.lam * y)

    @override
    def _sf(self, y: FloatArray) -> FloatArray:
        return np.exp(-self.lam * y)

    @override
    def _quantile(self, p: FloatArray) -> FloatArray:
        return -np.log1p(-p) / self.lam


class ShiftedExponential(Distribution):
    """X = Y + beta with Y exponential of rate lam."""
    family = Family.SHIFTED_EXPONENTIAL

    def __init__(self, beta: float, lam: float = 1.0) -> None:
        super().__init__(lo=beta, hi=math.inf, params={"beta": beta, "lambda": lam})
        _require_positive(self.family, lam=lam)
        if beta < 0:
            raise DistributionError(f"{self.family.value}: beta must be non-negative, got {beta}")
        self.beta = beta
        self.lam = lam

    @override
    def _logpdf(self, y: FloatArray) -> FloatArray:
        return math.log(self.lam) - self.lam * (y - self.beta)

    @override
    def _cdf(self, y: FloatArray) -> FloatArray:
        return -np.expm1(-self.lam * (y - self.beta))

    @override
    def _sf(self, y: FloatArray) -> FloatArray:
        return np.exp(-self.lam * (y - self.beta))

    @override
    def _quantile(self, p: FloatArray) -> FloatArray:
        return self.beta - np.log1p(-p) / self.lam


class ParetoI(Distribution):
    family = Family.PARETO_I

    def __init__(self, alpha: float) -> None:
        super().__init__(lo=1.0, hi=math.inf, params={"alpha": alpha})
        _require_positive(self.family, alpha=alpha)
        self.alpha = alpha

    @override
    def _logpdf(self, y: FloatArray) -> FloatArray:
        return math.log(self.alpha) - (self.alpha + 1.0) * np.log(y)

    @override
    def _cdf(self, y: FloatArray) -> FloatArray:
        return -np.expm1(-self.alpha * np.log(y))

    @override
    def _sf(self, y: FloatArray) -> FloatArray:
        return np.power(y, -self.alpha)

    @override
    def _quantile(self, p: FloatArray) -> FloatArray:
        return np.power(1.0 - p, -1.0 / self.alpha)


class SqrtWeibull(Distribution):
    """Weibull law written as G(y) = 1 - exp(-lam * sqrt(y)), the law of Y**2 for Y exponential."""
    family = Family.WEIBULL_SQRT

    def __init__(self, lam: float) -> None:
        super().__init__(lo=0.0, hi=math.inf, params={"lambda": lam})
        _require_positive(self.family, lam=lam)
        self.lam = lam

    @override
    def _logpdf(self, y: FloatArray) -> FloatArray:
        root = np.sqrt(y)
        return math.log(self.lam / 2.0) - self.lam * root - np.log(root)

    @override
    def _cdf(self, y: FloatArray) -> FloatArray:
        return -np.expm1(-self.lam * np.sqrt(y))

    @override
    def _sf(self, y: FloatArray) -> FloatArray:
        return np.exp(-self.lam * np.sqrt(y))

    @override
    def _quantile(self, p: FloatArray) -> FloatArray:
        return np.square(-np.log1p(-p) / self.lam)


class Power(Distribution):
    """G(y) = (y / scale) ** beta on [0, scale]."""
    family = Family.POWER

    def __init__(self, beta: float, scale: float = 1.0) -> None:
        super().__init__(lo=0.0, hi=scale, params={"beta": beta, "scale": scale})
        _require_positive(self.family, beta=beta, scale=scale)
        self.beta = beta
        self.scale = scale

    @override
    def _logpdf(self, y: FloatArray) -> FloatArray:
        return math.log(self.beta) - self.beta * math.log(self.scale) + xlogy(self.beta - 1.0, y)

    @override
    def _cdf(self, y: FloatArray) -> FloatArray:
        return np.power(y / self.scale, self.beta)

    @override
    def _quantile(self, p: FloatArray) -> FloatArray:
        return self.scale * np.power(p, 1.0 / self.beta)


class Lomax(Distribution):
    family = Family.LOMAX

    def __init__(self, delta: float, gamma: float) -> None:
        super().__init__(lo=0.0, hi=math.inf, params={"delta": delta, "gamma": gamma})
        _require_positive(self.family, delta=delta, gamma=gamma)
        self.delta = delta
        self.gamma = gamma

    @override
    def _logpdf(self, y: FloatArray) -> FloatArray:
        return math.log(self.gamma / self.delta) - (self.gamma + 1.0) * np.log1p(y / self.delta)

    @override
    def _cdf(self, y: FloatArray) -> FloatArray:
        return -np.expm1(-self.gamma * np.log1p(y / self.delta))

    @override
    def _sf(self, y: FloatArray) -> FloatArray:
        return np.exp(-self.gamma * np.log1p(y / self.delta))

    @override
    def _quantile(self, p: FloatArray) -> FloatArray:
        return self.delta * np.expm1(-np.log1p(-p) / self.gamma)


class GumbelII(Distribution):
    """Inverse-Weibull form G(y) = exp(-lam * y**(-alpha)), y > 0."""
    family = Family.GUMBEL_II

    def __init__(self, alpha: float, lam: float) -> None:
        super().__init__(lo=0.0, hi=math.inf, params={"alpha": alpha, "lambda": lam})
        _require_positive(self.family, alpha=alpha, lam=lam)
        self.alpha = alpha
        self.lam = lam

    @override
    def _logpdf(self, y: FloatArray) -> FloatArray:
        log_y = np.log(y)
        out = math.log(self.alpha * self.lam) - (self.alpha + 1.0) * log_y - self.lam * np.exp(-self.alpha * log_y)
        return np.where(y > 0.0, out, -np.inf)

    @override
    def _cdf(self, y: FloatArray) -> FloatArray:
        return np.exp(-self.lam * np.power(y, -self.alpha))

    @override
    def _sf(self, y: FloatArray) -> FloatArray:
        return -np.expm1(-self.lam * np.power(y, -self.alpha))

    @override
    def _quantile(self, p: FloatArray) -> FloatArray:
        return np.power(self.lam / -np.log(p), 1.0 / self.alpha)


class Weibull(Distribution):
    """Two-parameter Weibull with shape alpha and scale lam."""
    family = Family.WEIBULL

    def __init__(self, alpha: float, lam: float) -> None:
        super().__init__(lo=0.0, hi=math.inf, params={"alpha": alpha, "lambda": lam})
        _require_positive(self.family, alpha=alpha, lam=lam)
        self.alpha = alpha
        self.lam = lam

    @override
    def _logpdf(self, y: FloatArray) -> FloatArray:
        z = y / self.lam
        return math.log(self.alpha / self.lam) + xlogy(self.alpha - 1.0, z) - np.power(z, self.alpha)

    @override
    def _cdf(self, y: FloatArray) -> FloatArray:
        return -np.expm1(-np.power(y / self.lam, self.alpha))

    @override
    def _sf(self, y: FloatArray) -> FloatArray:
        return np.exp(-np.power(y / self.lam, self.alpha))

    @override
    def _quantile(self, p: FloatArray) -> FloatArray:
        return self.lam * np.power(-np.log1p(-p), 1.0 / self.alpha)


# CLI name -> constructor and the parameter names it accepts, in positional order
FAMILIES: dict[str, tuple[type[Distribution], tuple[str, ...], dict[str, float]]] = {
    Family.UNIFORM.value: (Uniform, ("a", "b"), {"a": 0.0, "b": 1.0}),
    Family.EXPONENTIAL.value: (Exponential, ("lambda",), {}),
    Family.PARETO_I.value: (ParetoI, ("alpha",), {}),
    Family.WEIBULL_SQRT.value: (SqrtWeibull, ("lambda",), {}),
    Family.POWER.value: (Power, ("beta", "scale"), {"scale": 1.0}),
    Family.LOMAX.value: (Lomax, ("delta", "gamma"), {}),
    Family.SHIFTED_EXPONENTIAL.value: (ShiftedExponential, ("beta", "lambda"), {"lambda": 1.0}),
    Family.GUMBEL_II.value: (GumbelII, ("alpha", "lambda"), {}),
    Family.WEIBULL.value: (Weibull, ("alpha", "lambda"), {}),
}


def make_distribution(family: str, params: dict[str, float]) -> Distribution:
    if family not in FAMILIES:
        raise DistributionError(f"unknown distribution family '{family}'")
    constructor, names, defaults = FAMILIES[family]
    unknown = set(params) - set(names)
    if unknown:
        raise DistributionError(f"{family}: unknown parameter(s) {', '.join(sorted(unknown))}")
    merged = {**defaults, **params}
    missing = [name for name in names if name not in merged]
    if missing:
        raise DistributionError(f"{family}: missing parameter(s) {', '.join(missing)}")
    return constructor(*(merged[name] for name in names))  # type: ignore[call-arg]


def pdf_at(d: Distribution, y: float) -> float:
    return d.pdf(float(y))


def cdf_at(d: Distribution, y: float) -> float:
    return d.cdf(float(y))


def quantile_at(d: Distribution, p: float) -> float:
    return d.quantile(float(p))


def sample_n(d: Distribution, n: int, seed: Seed) -> FloatArray:
    return d.sample(n, seed)
