import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable

from .distributions import Distribution
from .model import MeasureKind, MeasureResult, VarentropyError
from .quadrature import DEFAULT_REL_TOL, IntegralResult, integrate, integrate_density
from .weight import IDENTITY, SQUARE, UNIT, WeightSpec

logger = logging.getLogger("measures")

VARIANCE_FLOOR = -1e-9


class MeasureDomainError(VarentropyError):
    pass


class ConsistencyError(VarentropyError):
    pass


class TruncationSide(Enum):
    PAST = "past"
    RESIDUAL = "residual"
    PAIRED = "paired"


@dataclass(frozen=True)
class TruncationSpec:
    t: float
    side: TruncationSide

    def check(self, d: Distribution) -> None:
        if self.side in (TruncationSide.PAST, TruncationSide.PAIRED):
            past_window(d, self.t)
        if self.side in (TruncationSide.RESIDUAL, TruncationSide.PAIRED):
            residual_window(d, self.t)


@dataclass(frozen=True)
class Window:
    """Conditioning event {lo < Y < hi} with log of its probability."""
    lo: float
    hi: float
    log_mass: float

    @property
    def mass(self) -> float:
        return math.exp(self.log_mass)


def past_window(d: Distribution, t: float) -> Window:
    if not t > d.lo:
        raise MeasureDomainError(f"past lifetime undefined: t={t:g} is at or below the support start {d.lo:g}")
    mass = d.cdf(t)
    if not mass > 0.0:
        raise MeasureDomainError(f"past lifetime undefined: G({t:g}) = 0")
    return Window(d.lo, min(t, d.hi), math.log(mass))


def residual_window(d: Distribution, t: float) -> Window:
    if not t < d.hi:
        raise MeasureDomainError(f"residual lifetime undefined: t={t:g} is at or above the support end {d.hi:g}")
    mass = d.sf(t)
    if not mass > 0.0:
        raise MeasureDomainError(f"residual lifetime undefined: survival at {t:g} is 0")
    return Window(max(t, d.lo), d.hi, math.log(mass))


def full_window(d: Distribution) -> Window:
    return Window(d.lo, d.hi, 0.0)


def conditional(d: Distribution, kernel: Callable[[float, float], float], window: Window,
                rel_tol: float = DEFAULT_REL_TOL) -> IntegralResult:
    """E[kernel(Y, log g(Y)) | window]."""
    raw = integrate_density(d, kernel, window.lo, window.hi, rel_tol)
    return raw.scaled(math.exp(-window.log_mass))


def information_moments(d: Distribution, weight: WeightSpec, window: Window,
                        rel_tol: float = DEFAULT_REL_TOL) -> tuple[IntegralResult, IntegralResult]:
    """Mean and centred variance of W = -omega(Y) log(g(Y)/mass) under the window law."""
    weight.check_positive(window.lo, window.hi)
    log_mass = window.log_mass

    def info(y: float, lp: float) -> float:
        return -weight(y) * (lp - log_mass)

    mean = conditional(d, info, window, rel_tol)
    centre = mean.value

    def centred_square(y: float, lp: float) -> float:
        deviation = info(y, lp) - centre
        return deviation * deviation

    variance = conditional(d, centred_square, window, rel_tol)
    return mean, variance


def _result(integral: IntegralResult, kind: MeasureKind) -> MeasureResult:
    return MeasureResult(integral.value, integral.abs_error_estimate, kind)


def _variance_result(integral: IntegralResult, kind: MeasureKind) -> MeasureResult:
    value = integral.value
    if value < VARIANCE_FLOOR:
        raise ConsistencyError(f"{kind.value} came out negative ({value:.3g}) beyond the numerical floor")
    return MeasureResult(max(value, 0.0), integral.abs_error_estimate, kind)


def crhr(d: Distribution, t: float) -> float:
    """Cumulative reversed hazard rate -log G(t)."""
    mass = d.cdf(t)
    if not mass > 0.0:
        raise MeasureDomainError(f"cumulative reversed hazard undefined: G({t:g}) = 0")
    return -math.log(mass)


def chr(d: Distribution, t: float) -> float:
    """Cumulative hazard -log(1 - G(t))."""
    mass = d.sf(t)
    if not mass > 0.0:
        raise MeasureDomainError(f"cumulative hazard undefined: survival at {t:g} is 0")
    return -math.log(mass)


def weighted_past_entropy(d: Distribution, weight: WeightSpec, t: float,
                          rel_tol: float = DEFAULT_REL_TOL) -> MeasureResult:
    window = past_window(d, t)
    weight.check_positive(window.lo, window.hi)
    log_mass = window.log_mass
    mean = conditional(d, lambda y, lp: -weight(y) * (lp - log_mass), window, rel_tol)
    return _result(mean, MeasureKind.WPSE)


def weighted_residual_entropy(d: Distribution, weight: WeightSpec, t: float,
                              rel_tol: float = DEFAULT_REL_TOL) -> MeasureResult:
    window = residual_window(d, t)
    weight.check_positive(window.lo, window.hi)
    log_mass = window.log_mass
    mean = conditional(d, lambda y, lp: -weight(y) * (lp - log_mass), window, rel_tol)
    return _result(mean, MeasureKind.WRSE)


def wpve(d: Distribution, weight: WeightSpec, t: float, rel_tol: float = DEFAULT_REL_TOL) -> MeasureResult:
    """Weighted past varentropy: Var[-omega(Y) log(g(Y)/G(t)) | Y <= t]."""
    _, variance = information_moments(d, weight, past_window(d, t), rel_tol)
    return _variance_result(variance, MeasureKind.WPVE)


def wrve(d: Distribution, weight: WeightSpec, t: float, rel_tol: float = DEFAULT_REL_TOL) -> MeasureResult:
    """Weighted residual varentropy: Var[-omega(Y) log(g(Y)/(1-G(t))) | Y > t]."""
    _, variance = information_moments(d, weight, residual_window(d, t), rel_tol)
    return _variance_result(variance, MeasureKind.WRVE)


def _require_paired(d: Distribution, t: float) -> None:
    mass = d.cdf(t)
    if not 0.0 < mass < 1.0:
        raise MeasureDomainError(f"paired measures need 0 < G(t) < 1, got G({t:g}) = {mass:g}")


def wpde(d: Distribution, weight: WeightSpec, t: float, rel_tol: float = DEFAULT_REL_TOL) -> MeasureResult:
    """Weighted paired dynamic entropy: past plus residual weighted entropy."""
    _require_paired(d, t)
    past = weighted_past_entropy(d, weight, t, rel_tol)
    residual = weighted_residual_entropy(d, weight, t, rel_tol)
    return MeasureResult(past.value + residual.value,
                         past.abs_error_estimate + residual.abs_error_estimate, MeasureKind.WPDE)


def wpdve(d: Distribution, weight: WeightSpec, t: float, rel_tol: float = DEFAULT_REL_TOL) -> MeasureResult:
    """Weighted paired dynamic varentropy: WPVE + WRVE from the same two sub-results."""
    _require_paired(d, t)
    past = wpve(d, weight, t, rel_tol)
    residual = wrve(d, weight, t, rel_tol)
    return MeasureResult(past.value + residual.value,
                         past.abs_error_estimate + residual.abs_error_estimate, MeasureKind.WPDVE)


def conditional_mean_past(d: Distribution, t: float, rel_tol: float = DEFAULT_REL_TOL) -> float:
    return conditional(d, lambda y, lp: y, past_window(d, t), rel_tol).value


def conditional_mean_residual(d: Distribution, t: float, rel_tol: float = DEFAULT_REL_TOL) -> float:
    return conditional(d, lambda y, lp: y, residual_window(d, t), rel_tol).value


def _conditional_variance(d: Distribution, window: Window, rel_tol: float) -> float:
    centre = conditional(d, lambda y, lp: y, window, rel_tol).value
    variance = conditional(d, lambda y, lp: (y - centre) ** 2, window, rel_tol).value
    if variance < VARIANCE_FLOOR:
        raise ConsistencyError(f"conditional variance came out negative ({variance:.3g})")
    return max(variance, 0.0)


def mean_past_lifetime(d: Distribution, t: float, rel_tol: float = DEFAULT_REL_TOL) -> float:
    """M(t) = integral of G(y)/G(t) over (0, t), the expected time since failure."""
    window = past_window(d, t)
    integral = integrate(d.cdf, window.lo, window.hi, rel_tol).value
    # G = 1 between the end of a bounded support and t
    return (integral + max(0.0, t - window.hi)) / window.mass


def variance_past_lifetime(d: Distribution, t: float, rel_tol: float = DEFAULT_REL_TOL) -> float:
    return _conditional_variance(d, past_window(d, t), rel_tol)


def mean_residual_lifetime(d: Distribution, t: float, rel_tol: float = DEFAULT_REL_TOL) -> float:
    return conditional_mean_residual(d, t, rel_tol) - t


def variance_residual_lifetime(d: Distribution, t: float, rel_tol: float = DEFAULT_REL_TOL) -> float:
    return _conditional_variance(d, residual_window(d, t), rel_tol)


def weighted_past_renyi(d: Distribution, weight: WeightSpec, t: float, alpha: float,
                        rel_tol: float = DEFAULT_REL_TOL) -> MeasureResult:
    """(1/(1-alpha)) log of the integral of (omega(y) g(y)/G(t))**alpha over the past window."""
    if alpha == 1.0:
        raise MeasureDomainError("Renyi order 1 is the Shannon case; use weighted_past_entropy")
    if not alpha > 0.0:
        raise MeasureDomainError(f"Renyi order must be positive, got {alpha}")
    window = past_window(d, t)
    weight.check_positive(window.lo, window.hi)
    log_mass = window.log_mass

    def integrand(y: float) -> float:
        lp = d.logpdf(y)
        if lp == -math.inf:
            return 0.0
        return (weight(y) * math.exp(lp - log_mass)) ** alpha

    integral = integrate(integrand, window.lo, window.hi, rel_tol)
    if not integral.value > 0.0:
        raise MeasureDomainError("Renyi integral vanished on the past window")
    value = math.log(integral.value) / (1.0 - alpha)
    error = integral.abs_error_estimate / (abs(1.0 - alpha) * integral.value)
    return MeasureResult(value, error, MeasureKind.WPRE)


def weighted_entropy(d: Distribution, weight: WeightSpec, rel_tol: float = DEFAULT_REL_TOL) -> MeasureResult:
    mean, _ = information_moments(d, weight, full_window(d), rel_tol)
    return _result(mean, MeasureKind.WSE)


def shannon_entropy(d: Distribution, rel_tol: float = DEFAULT_REL_TOL) -> MeasureResult:
    return replace(weighted_entropy(d, UNIT, rel_tol), kind=MeasureKind.SE)


def weighted_varentropy(d: Distribution, weight: WeightSpec, rel_tol: float = DEFAULT_REL_TOL) -> MeasureResult:
    _, variance = information_moments(d, weight, full_window(d), rel_tol)
    return _variance_result(variance, MeasureKind.WVE)


def varentropy(d: Distribution, rel_tol: float = DEFAULT_REL_TOL) -> MeasureResult:
    _, variance = information_moments(d, UNIT, full_window(d), rel_tol)
    return _variance_result(variance, MeasureKind.VE)


def _raw_moment_variance(d: Distribution, window: Window, rel_tol: float) -> IntegralResult:
    log_mass = window.log_mass
    first = conditional(d, lambda y, lp: -(lp - log_mass), window, rel_tol)
    second = conditional(d, lambda y, lp: (lp - log_mass) ** 2, window, rel_tol)
    return IntegralResult(second.value - first.value ** 2,
                          second.abs_error_estimate + 2.0 * abs(first.value) * first.abs_error_estimate,
                          first.evaluations + second.evaluations)


def past_varentropy(d: Distribution, t: float, rel_tol: float = DEFAULT_REL_TOL) -> MeasureResult:
    """Unweighted past varentropy from the raw second and first moments of -log(g/G(t))."""
    return _variance_result(_raw_moment_variance(d, past_window(d, t), rel_tol), MeasureKind.PVE)


def residual_varentropy(d: Distribution, t: float, rel_tol: float = DEFAULT_REL_TOL) -> MeasureResult:
    return _variance_result(_raw_moment_variance(d, residual_window(d, t), rel_tol), MeasureKind.RVE)


def wpve_decomposed(d: Distribution, t: float, rel_tol: float = DEFAULT_REL_TOL) -> float:
    """WPVE with weight y through conditional moments of psi1(y) = y log g(y).

    E[psi1^2 | Y<=t] - 2 L H(y^2) - L^2 E[Y^2 | Y<=t] - H(y)^2, where L is the
    cumulative reversed hazard and H(.) the weighted past entropies.
    """
    window = past_window(d, t)
    big_lambda = -window.log_mass
    psi_square = conditional(d, lambda y, lp: (y * lp) ** 2, window, rel_tol).value
    second_moment = conditional(d, lambda y, lp: y * y, window, rel_tol).value
    h_square = weighted_past_entropy(d, SQUARE, t, rel_tol).value
    h_identity = weighted_past_entropy(d, IDENTITY, t, rel_tol).value
    return psi_square - 2.0 * big_lambda * h_square - big_lambda ** 2 * second_moment - h_identity ** 2


def wpdve_decomposed(d: Distribution, t: float, rel_tol: float = DEFAULT_REL_TOL) -> float:
    """WPDVE with weight y: the past decomposition plus its residual mirror."""
    _require_paired(d, t)
    window = residual_window(d, t)
    big_lambda = -window.log_mass
    psi_square = conditional(d, lambda y, lp: (y * lp) ** 2, window, rel_tol).value
    second_moment = conditional(d, lambda y, lp: y * y, window, rel_tol).value
    h_square = weighted_residual_entropy(d, SQUARE, t, rel_tol).value
    h_identity = weighted_residual_entropy(d, IDENTITY, t, rel_tol).value
    residual = psi_square - 2.0 * big_lambda * h_square - big_lambda ** 2 * second_moment - h_identity ** 2
    return wpve_decomposed(d, t, rel_tol) + residual


@dataclass(frozen=True)
class MeasureRequest:
    distribution: Distribution
    weight: WeightSpec
    t: float
    kind: MeasureKind
    alpha: float = 2.0

    def evaluate(self, rel_tol: float = DEFAULT_REL_TOL) -> MeasureResult:
        return evaluate(self.kind, self.distribution, self.weight, self.t, alpha=self.alpha, rel_tol=rel_tol)


def _scalar(value: float, kind: MeasureKind) -> MeasureResult:
    return MeasureResult(value, 0.0, kind)


def evaluate(kind: MeasureKind, d: Distribution, weight: WeightSpec, t: float, *, alpha: float = 2.0,
             rel_tol: float = DEFAULT_REL_TOL) -> MeasureResult:
    """Dispatches a measure by kind; full-support kinds ignore t."""
    match kind:
        case MeasureKind.WPVE:
            return wpve(d, weight, t, rel_tol)
        case MeasureKind.WRVE:
            return wrve(d, weight, t, rel_tol)
        case MeasureKind.WPDVE:
            return wpdve(d, weight, t, rel_tol)
        case MeasureKind.WPSE:
            return weighted_past_entropy(d, weight, t, rel_tol)
        case MeasureKind.WRSE:
            return weighted_residual_entropy(d, weight, t, rel_tol)
        case MeasureKind.WPDE:
            return wpde(d, weight, t, rel_tol)
        case MeasureKind.PVE:
            return past_varentropy(d, t, rel_tol)
        case MeasureKind.RVE:
            return residual_varentropy(d, t, rel_tol)
        case MeasureKind.WPRE:
            return weighted_past_renyi(d, weight, t, alpha, rel_tol)
        case MeasureKind.SE:
            return shannon_entropy(d, rel_tol)
        case MeasureKind.WSE:
            return weighted_entropy(d, weight, rel_tol)
        case MeasureKind.VE:
            return varentropy(d, rel_tol)
        case MeasureKind.WVE:
            return weighted_varentropy(d, weight, rel_tol)
        case MeasureKind.CRHR:
            return _scalar(crhr(d, t), kind)
        case MeasureKind.CHR:
            return _scalar(chr(d, t), kind)
        case MeasureKind.MPL:
            return _scalar(mean_past_lifetime(d, t, rel_tol), kind)
        case MeasureKind.VPL:
            return _scalar(variance_past_lifetime(d, t, rel_tol), kind)
        case MeasureKind.MRL:
            return _scalar(mean_residual_lifetime(d, t, rel_tol), kind)
        case MeasureKind.VRL:
            return _scalar(variance_residual_lifetime(d, t, rel_tol), kind)
    raise ValueError(f"unsupported measure kind {kind}")
