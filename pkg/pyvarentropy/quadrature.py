import logging
import math
from dataclasses import dataclass
from typing import Callable, Protocol, Sequence

from scipy import integrate as scipy_integrate

from .model import VarentropyError

logger = logging.getLogger("quadrature")

DEFAULT_REL_TOL = 1e-10
ABS_TOL = 1e-12
SUBDIVISION_LIMIT = 2000
# unbounded laws are cut at the quantiles of order 1 - 10**-k, k = 1..TAIL_DECADES
TAIL_DECADES = 13
# results QUADPACK flags (round-off, bad integrand) are kept when the error estimate stays below this
ACCEPTED_ABS_ERROR = 1e-6


class QuadratureError(VarentropyError):
    def __init__(self, message: str, *, best_estimate: float, abs_error_estimate: float) -> None:
        super().__init__(message)
        self.best_estimate = best_estimate
        self.abs_error_estimate = abs_error_estimate


class Density(Protocol):
    """What the integration helpers need from a lifetime law."""
    lo: float
    hi: float

    def logpdf(self, y: float) -> float: ...

    def quantile(self, p: float) -> float: ...


@dataclass(frozen=True)
class IntegralResult:
    value: float
    abs_error_estimate: float
    evaluations: int

    def __add__(self, other: "IntegralResult") -> "IntegralResult":
        return IntegralResult(self.value + other.value,
                              self.abs_error_estimate + other.abs_error_estimate,
                              self.evaluations + other.evaluations)

    def scaled(self, factor: float) -> "IntegralResult":
        return IntegralResult(self.value * factor, self.abs_error_estimate * abs(factor), self.evaluations)


def _guarded(f: Callable[[float], float]) -> Callable[[float], float]:
    # 0*log(0) style limits come back as NaN; their limit is 0
    def guarded(y: float) -> float:
        value = float(f(y))
        if math.isnan(value):
            return 0.0
        return value
    return guarded


def integrate(f: Callable[[float], float], a: float, b: float, rel_tol: float = DEFAULT_REL_TOL, *,
              abs_tol: float = ABS_TOL, points: Sequence[float] | None = None) -> IntegralResult:
    """Adaptive Gauss-Kronrod integral of f over (a, b).

    An infinite upper limit is mapped onto [0, 1) with y = a + u/(1-u).

    Args:
        f: Scalar integrand.
        a: Finite lower limit.
        b: Upper limit, may be +inf.
        rel_tol: Requested relative accuracy in (0, 1e-3].
        abs_tol: Absolute accuracy floor.
        points: Optional interior break points (finite intervals only).

    Returns:
        IntegralResult with QUADPACK's error estimate and evaluation count.

    Raises:
        QuadratureError: The subdivision budget ran out, or QUADPACK flagged the
            result and its error estimate is too large to accept.
    """
    if not 0.0 < rel_tol <= 1e-3:
        raise ValueError(f"rel_tol must lie in (0, 1e-3], got {rel_tol}")
    if math.isinf(a) or math.isnan(a) or math.isnan(b):
        raise ValueError(f"invalid integration limits ({a}, {b})")
    if not a < b:
        raise ValueError(f"integration requires a < b, got ({a}, {b})")

    integrand = _guarded(f)
    if math.isinf(b):
        def mapped(u: float) -> float:
            w = 1.0 - u
            return integrand(a + u / w) / (w * w)
        mapped_points = None
        if points:
            mapped_points = [(p - a) / (1.0 + p - a) for p in points if p > a]
        return _quad(mapped, 0.0, 1.0, rel_tol, abs_tol, mapped_points, (a, b))
    inner = [p for p in points if a < p < b] if points else None
    return _quad(integrand, a, b, rel_tol, abs_tol, inner, (a, b))


def _quad(f: Callable[[float], float], a: float, b: float, rel_tol: float, abs_tol: float,
          points: list[float] | None, limits: tuple[float, float]) -> IntegralResult:
    try:
        out = scipy_integrate.quad(f, a, b, epsabs=abs_tol, epsrel=rel_tol, limit=SUBDIVISION_LIMIT,
                                   full_output=1, points=points or None)
    except ValueError as e:
        raise QuadratureError(f"invalid quadrature input on {limits}: {e}",
                              best_estimate=math.nan, abs_error_estimate=math.inf) from e
    value, abs_err, info = float(out[0]), float(out[1]), out[2]
    evaluations = max(1, int(info.get("neval", 1)))
    if len(out) > 3:
        message = str(out[3]).splitlines()[0]
        if int(info.get("last", 0)) >= SUBDIVISION_LIMIT:
            raise QuadratureError(f"subdivision budget exhausted on {limits}: {message}",
                                  best_estimate=value, abs_error_estimate=abs_err)
        if not math.isfinite(value) or abs_err > ACCEPTED_ABS_ERROR * max(1.0, abs(value)):
            raise QuadratureError(f"integral on {limits} did not converge: {message}",
                                  best_estimate=value, abs_error_estimate=abs_err)
        logger.debug(f"accepted flagged integral on {limits}: value={value:.12g} err={abs_err:.3g} ({message})")
    if not math.isfinite(value):
        raise QuadratureError(f"integral on {limits} is not finite",
                              best_estimate=value, abs_error_estimate=abs_err)
    return IntegralResult(value, abs_err, evaluations)


def tail_breaks(d: Density, lo: float, hi: float) -> list[float]:
    """Quantiles of order 1 - 10**-k strictly inside (lo, hi), ascending; none for bounded laws."""
    if math.isfinite(d.hi):
        return []
    breaks: list[float] = []
    for k in range(1, TAIL_DECADES + 1):
        y = float(d.quantile(1.0 - 10.0 ** -k))
        if math.isfinite(y) and lo < y < hi and (not breaks or y > breaks[-1]):
            breaks.append(y)
    return breaks


def integrate_density(d: Density, kernel: Callable[[float, float], float], a: float, b: float,
                      rel_tol: float = DEFAULT_REL_TOL, *, abs_tol: float = ABS_TOL) -> IntegralResult:
    """Integral of kernel(y, log g(y)) * g(y) over (a, b) intersected with the support.

    Passing the log-density to the kernel lets information integrands reuse it
    instead of evaluating the density twice. For a law with unbounded support
    the range is split at the quantiles of order 1 - 10**-k that fall inside it;
    what lies past the last split goes through the generic substitution.
    """
    lo = max(a, d.lo)
    hi = min(b, d.hi)
    if not lo < hi:
        return IntegralResult(0.0, 0.0, 1)

    def integrand(y: float) -> float:
        lp = d.logpdf(y)
        if lp == -math.inf:
            return 0.0
        return kernel(y, lp) * math.exp(lp)

    edges = [lo, *tail_breaks(d, lo, hi), hi]
    total = integrate(integrand, edges[0], edges[1], rel_tol, abs_tol=abs_tol)
    for a_k, b_k in zip(edges[1:-1], edges[2:]):
        total = total + integrate(integrand, a_k, b_k, rel_tol, abs_tol=abs_tol)
    return total


def integrate_expectation(d: Density, h: Callable[[float], float], a: float, b: float,
                          rel_tol: float = DEFAULT_REL_TOL) -> IntegralResult:
    """E[h(Y) 1{a < Y < b}] = integral of h * g over (a, b)."""
    return integrate_density(d, lambda y, lp: h(y), a, b, rel_tol)
