"""Closed-form WPVE/WPDE evaluators for the worked families, weight omega(y) = y.

Each function is an independent check on the quadrature route in `measures`;
the expressions come from conditional moments of the truncated law.
"""
import logging
import math

from scipy.special import gamma as gamma_fn, gammainc

from .distributions import Exponential
from .measures import MeasureDomainError, conditional, past_window

logger = logging.getLogger("closed_forms")


def truncated_exponential_moment(lam: float, s: float, k: int) -> float:
    """E[Y**k | Y <= s] for Y exponential of rate lam."""
    if not s > 0.0:
        raise MeasureDomainError(f"truncation point must be positive, got {s}")
    mass = -math.expm1(-lam * s)
    return float(gamma_fn(k + 1) * gammainc(k + 1, lam * s) / (lam ** k * mass))


def _exponential_moments(lam: float, s: float, top: int) -> list[float]:
    return [truncated_exponential_moment(lam, s, k) for k in range(top + 1)]


def wpve_uniform_closed(a: float, b: float, t: float) -> float:
    """Past law is Uniform(a, t): W = y log(t - a), a scaled uniform variance."""
    if not a < t:
        raise MeasureDomainError(f"uniform past window needs t > a, got t={t}, a={a}")
    width = min(t, b) - a
    return math.log(width) ** 2 * width ** 2 / 12.0


def wpve_exponential_closed(lam: float, t: float) -> float:
    """W = lam*Y**2 - L*Y with L = log(lam / G(t))."""
    big_l = math.log(lam) - math.log(-math.expm1(-lam * t))
    m = _exponential_moments(lam, t, 4)
    second = lam ** 2 * m[4] - 2.0 * lam * big_l * m[3] + big_l ** 2 * m[2]
    first = lam * m[2] - big_l * m[1]
    return second - first ** 2


def _log_power_integral(s: float, j: int, t: float) -> float:
    # integral of y**(s-1) * log(y)**j over (1, t)
    ell = math.log(t)
    if s == 0.0:
        return ell ** (j + 1) / (j + 1)
    ts = t ** s
    match j:
        case 0:
            return (ts - 1.0) / s
        case 1:
            return ts * ell / s - (ts - 1.0) / s ** 2
        case 2:
            return ts * ell ** 2 / s - 2.0 * ts * ell / s ** 2 + 2.0 * (ts - 1.0) / s ** 3
    raise ValueError(f"unsupported log power {j}")


def wpve_pareto_closed(alpha: float, t: float) -> float:
    """W = (alpha+1) Y log Y - L*Y with L = log(alpha / (1 - t**-alpha))."""
    if not t > 1.0:
        raise MeasureDomainError(f"Pareto past window needs t > 1, got {t}")
    psi = alpha / (-math.expm1(-alpha * math.log(t)))
    big_l = math.log(psi)

    def moment(k: int, j: int) -> float:
        return psi * _log_power_integral(k - alpha, j, t)

    c = alpha + 1.0
    second = c ** 2 * moment(2, 2) - 2.0 * c * big_l * moment(2, 1) + big_l ** 2 * moment(2, 0)
    first = c * moment(1, 1) - big_l * moment(1, 0)
    return second - first ** 2


def wpve_shifted_exp_closed(beta: float, t: float) -> float:
    """X = Y + beta, Y ~ Exp(1): W = Y**2 + c*Y - beta*L under Exp(1) truncated at t - beta."""
    s = t - beta
    if not s > 0.0:
        raise MeasureDomainError(f"shifted exponential past window needs t > beta, got t={t}, beta={beta}")
    big_l = -math.log(-math.expm1(-s))
    c = beta - big_l
    m = _exponential_moments(1.0, s, 4)
    second = m[4] + 2.0 * c * m[3] + c ** 2 * m[2]
    first = m[2] + c * m[1]
    return second - first ** 2


def wpve_weibull_closed(lam: float, t: float) -> float:
    """WPVE of X = Y**2, Y ~ Exp(lam), split into the exponential part and gamma(y) = y**2 log(2y).

    The exponential part A = lam*y**3 - L*y**2 has gamma-function moments; the
    terms in gamma have none in closed form and are integrated under Y | Y <= sqrt(t).
    """
    s = math.sqrt(t)
    if not s > 0.0:
        raise MeasureDomainError(f"Weibull past window needs t > 0, got {t}")
    base = Exponential(lam)
    big_l = math.log(lam) - math.log(-math.expm1(-lam * s))
    m = _exponential_moments(lam, s, 6)
    mean_a = lam * m[3] - big_l * m[2]
    var_a = lam ** 2 * m[6] - 2.0 * lam * big_l * m[5] + big_l ** 2 * m[4] - mean_a ** 2

    window = past_window(base, s)

    def gamma_term(y: float) -> float:
        return y * y * math.log(2.0 * y) if y > 0.0 else 0.0

    mean_g = conditional(base, lambda y, lp: gamma_term(y), window).value
    var_g = conditional(base, lambda y, lp: (gamma_term(y) - mean_g) ** 2, window).value
    cross = conditional(base, lambda y, lp: y * y * gamma_term(y) * (big_l - lam * y), window).value
    return var_a - 2.0 * mean_a * mean_g + var_g - 2.0 * cross


def wpde_uniform_closed(beta: float, t: float) -> float:
    if not 0.0 < t < beta:
        raise MeasureDomainError(f"uniform WPDE needs 0 < t < beta, got t={t}, beta={beta}")
    return t / 2.0 * math.log(t) + (beta + t) / 2.0 * math.log(beta - t)


def wpde_exponential_closed(lam: float, t: float) -> float:
    """Past term from truncated moments; residual term -(t + 1/lam) log lam + t + 2/lam."""
    big_l = math.log(lam) - math.log(-math.expm1(-lam * t))
    m = _exponential_moments(lam, t, 2)
    past = lam * m[2] - big_l * m[1]
    residual = -(t + 1.0 / lam) * math.log(lam) + t + 2.0 / lam
    return past + residual


def power_wpve_closed(c: float, scale: float, t: float) -> float:
    """WPVE of G(y) = (y/scale)**c; the past law at t is again a power law on (0, t)."""
    if not t > 0.0:
        raise MeasureDomainError(f"power past window needs t > 0, got {t}")
    t_eff = min(t, scale)
    k = math.log(c / t_eff)
    first = -t_eff * (k * c / (c + 1.0) - (c - 1.0) * c / (c + 1.0) ** 2)
    second = t_eff ** 2 * (k ** 2 * c / (c + 2.0) - 2.0 * k * (c - 1.0) * c / (c + 2.0) ** 2
                           + 2.0 * (c - 1.0) ** 2 * c / (c + 2.0) ** 3)
    return second - first ** 2
