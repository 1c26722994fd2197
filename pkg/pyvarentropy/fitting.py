import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import minimize
from scipy.special import gamma as gamma_fn
from scipy.stats import kstwobign

from .distributions import Distribution, DistributionError, Exponential, FloatArray, Family, make_distribution
from .model import VarentropyError

logger = logging.getLogger("fitting")

PARAMETER_XTOL = 1e-10
NEWTON_STEP = 1e-5
NEWTON_ITERATIONS = 50
GRADIENT_TOLERANCE = 1e-8
# exponent of the Justus approximation alpha ~ (sd/mean)**-1.086
JUSTUS_EXPONENT = -1.086


class DataError(VarentropyError):
    pass


class FitError(VarentropyError):
    pass


@dataclass(frozen=True)
class FitResult:
    family: str
    distribution: Distribution
    neg_log_likelihood: float
    aic: float
    aicc: float
    bic: float
    ks_statistic: float
    ks_p_value: float
    n: int
    k: int
    converged: bool

    def as_row(self) -> dict[str, float | str | bool]:
        row: dict[str, float | str | bool] = {"family": self.family}
        row.update(self.distribution.params)
        row.update({
            "neg_log_likelihood": self.neg_log_likelihood,
            "aic": self.aic,
            "aicc": self.aicc,
            "bic": self.bic,
            "ks_statistic": self.ks_statistic,
            "ks_p_value": self.ks_p_value,
            "converged": self.converged,
        })
        return row


def check_sample(sample: FloatArray | list[float], *, lower: float = 0.0) -> FloatArray:
    data = np.asarray(sample, dtype=float).ravel()
    if data.size == 0:
        raise DataError("sample is empty")
    if not np.all(np.isfinite(data)):
        raise DataError("sample contains non-finite values")
    if np.any(data <= lower):
        raise DataError(f"sample values must exceed {lower:g}, smallest is {float(np.min(data)):g}")
    return data


def information_criteria(neg_log_likelihood: float, k: int, n: int) -> tuple[float, float, float]:
    """AIC, AICc and BIC from the negative log-likelihood; AICc is inf when n <= k + 1."""
    aic = 2.0 * k + 2.0 * neg_log_likelihood
    denominator = n - k - 1
    aicc = aic + 2.0 * k * (k + 1) / denominator if denominator > 0 else math.inf
    bic = k * math.log(n) + 2.0 * neg_log_likelihood
    return aic, aicc, bic


def ks_test(sample: FloatArray | list[float], d: Distribution) -> tuple[float, float]:
    """One-sample Kolmogorov-Smirnov statistic with the asymptotic Kolmogorov p-value."""
    data = np.sort(np.asarray(sample, dtype=float).ravel())
    if data.size == 0:
        raise DataError("sample is empty")
    n = data.size
    cdf = np.asarray(d.cdf(data), dtype=float)
    i = np.arange(1, n + 1)
    statistic = float(np.max(np.maximum(np.abs(i / n - cdf), np.abs(cdf - (i - 1) / n))))
    p_value = float(kstwobign.sf(math.sqrt(n) * statistic))
    return min(max(statistic, 0.0), 1.0), min(max(p_value, 0.0), 1.0)


def neg_log_likelihood(d: Distribution, data: FloatArray) -> float:
    with np.errstate(all="ignore"):
        total = -float(np.sum(np.asarray(d.logpdf(data), dtype=float)))
    return total if not math.isnan(total) else math.inf


def mle_exponential(sample: FloatArray | list[float]) -> Exponential:
    data = check_sample(sample)
    return Exponential(data.size / float(np.sum(data)))


def _weibull_guess(data: FloatArray) -> tuple[float, float]:
    # (shape, scale) from the coefficient of variation
    mean = float(np.mean(data))
    sd = float(np.std(data, ddof=1)) if data.size > 1 else 0.0
    if not sd > 0.0:
        return 1.0, mean
    shape = (sd / mean) ** JUSTUS_EXPONENT
    return shape, mean / float(gamma_fn(1.0 + 1.0 / shape))


def _start(family: str, data: FloatArray) -> tuple[float, float]:
    match family:
        case Family.WEIBULL.value:
            return _weibull_guess(data)
        case Family.GUMBEL_II.value:
            # 1/Y is Weibull(alpha, scale s) with lambda = s**-alpha
            shape, scale = _weibull_guess(1.0 / data)
            return shape, scale ** -shape
    raise FitError(f"no numerical fit for family '{family}'")


def _objective(family: str, data: FloatArray) -> Callable[[FloatArray], float]:
    def nll(theta: FloatArray) -> float:
        alpha, lam = np.exp(theta)
        try:
            d = make_distribution(family, {"alpha": float(alpha), "lambda": float(lam)})
        except DistributionError:
            return math.inf
        return neg_log_likelihood(d, data)
    return nll


def _finite_differences(f: Callable[[FloatArray], float], x: FloatArray, h: float) -> tuple[FloatArray, FloatArray]:
    k = x.size
    grad = np.zeros(k)
    hess = np.zeros((k, k))
    f0 = f(x)
    basis = np.eye(k) * h
    for i in range(k):
        fp, fm = f(x + basis[i]), f(x - basis[i])
        grad[i] = (fp - fm) / (2.0 * h)
        hess[i, i] = (fp - 2.0 * f0 + fm) / (h * h)
        for j in range(i):
            fpp = f(x + basis[i] + basis[j])
            fpm = f(x + basis[i] - basis[j])
            fmp = f(x - basis[i] + basis[j])
            fmm = f(x - basis[i] - basis[j])
            hess[i, j] = hess[j, i] = (fpp - fpm - fmp + fmm) / (4.0 * h * h)
    return grad, hess


def _newton_polish(f: Callable[[FloatArray], float], x: FloatArray) -> tuple[FloatArray, bool]:
    current = f(x)
    for _ in range(NEWTON_ITERATIONS):
        grad, hess = _finite_differences(f, x, NEWTON_STEP)
        if float(np.linalg.norm(grad)) < GRADIENT_TOLERANCE * max(1.0, abs(current)):
            return x, True
        try:
            np.linalg.cholesky(hess)
        except np.linalg.LinAlgError:
            return x, False
        step = np.linalg.solve(hess, grad)
        scale = 1.0
        while scale > 1e-6:
            candidate = x - scale * step
            value = f(candidate)
            if value <= current:
                break
            scale /= 2.0
        else:
            return x, False
        x, current = candidate, value
        if float(np.linalg.norm(scale * step)) < PARAMETER_XTOL:
            return x, True
    return x, False


def _fit_two_parameter(family: str, data: FloatArray) -> tuple[Distribution, bool]:
    alpha0, lam0 = _start(family, data)
    starts = [(alpha0, lam0), (2.0 * alpha0, lam0), (alpha0 / 2.0, lam0), (alpha0, 2.0 * lam0), (alpha0, lam0 / 2.0)]
    nll = _objective(family, data)
    best_x: FloatArray | None = None
    best_value = math.inf
    for alpha, lam in starts:
        result = minimize(nll, np.log([alpha, lam]), method="Nelder-Mead",
                          options={"xatol": PARAMETER_XTOL, "fatol": 1e-12, "maxiter": 5000})
        if math.isfinite(float(result.fun)) and float(result.fun) < best_value:
            best_value = float(result.fun)
            best_x = np.asarray(result.x, dtype=float)
    if best_x is None:
        raise FitError(f"{family}: no start produced a finite likelihood")
    polished, converged = _newton_polish(nll, best_x)
    alpha, lam = np.exp(polished)
    return make_distribution(family, {"alpha": float(alpha), "lambda": float(lam)}), converged


def mle_fit(family: str, sample: FloatArray | list[float]) -> FitResult:
    """Maximum likelihood fit with the criteria and the KS test filled in.

    Exponential has a closed form; the two-parameter families are fitted in
    log-parameter space by multi-start Nelder-Mead and a Newton polish.
    Non-convergence is reported through `converged`, never hidden.
    """
    data = check_sample(sample)
    if family == Family.EXPONENTIAL.value:
        d: Distribution = mle_exponential(data)
        k, converged = 1, True
    else:
        d, converged = _fit_two_parameter(family, data)
        k = 2
    nll = neg_log_likelihood(d, data)
    aic, aicc, bic = information_criteria(nll, k, data.size)
    statistic, p_value = ks_test(data, d)
    if converged:
        logger.info(f"fitted {d.describe()}: -lnL={nll:.4f} AIC={aic:.4f}")
    else:
        logger.warning(f"fit of {family} did not converge, best {d.describe()} -lnL={nll:.4f}")
    return FitResult(family=family, distribution=d, neg_log_likelihood=nll, aic=aic, aicc=aicc, bic=bic,
                     ks_statistic=statistic, ks_p_value=p_value, n=data.size, k=k, converged=converged)
