import logging
import math

import numpy as np

from .coherent import (
    IDENTITY as IDENTITY_DISTORTION, CoherentSystem, DistortionFunction, information_profile, wpse_system, wpve_system,
)
from .distributions import Distribution, FloatArray
from .measures import (
    Window, conditional, past_window, residual_window, weighted_past_entropy, wpdve, wpve, wrve,
)
from .model import BoundReport, PreconditionStatus, VarentropyError
from .quadrature import integrate, integrate_density
from .weight import GRID_SIZE, IDENTITY, WeightSpec, cubic_affine, window_grid

logger = logging.getLogger("bounds")

PRECONDITION_GRID = 512
RATIO_GRID = 512
DYADIC_LEVELS = 40
STEP_FRACTION = 1e-5
INNER_REL_TOL = 1e-12
INNER_ABS_TOL = 1e-15
OUTER_REL_TOL = 1e-8
POINTWISE_TOLERANCE = 1e-12


class BoundError(VarentropyError):
    pass


def _status(holds: bool) -> PreconditionStatus:
    return PreconditionStatus.HOLDS if holds else PreconditionStatus.VIOLATED


def _precondition_grid(lo: float, t: float, size: int) -> FloatArray:
    # (lo, t], right end included
    return lo + (t - lo) * np.arange(1, size + 1) / size


def ratio_grid(upper: float, size: int = RATIO_GRID) -> FloatArray:
    """Points of (0, upper] for grid sups: a uniform grid plus dyadic points toward both ends.

    The dyadic part does not depend on `size` and the uniform part of 2n
    contains the one of n, so doubling the grid only adds points.
    """
    levels = 2.0 ** -np.arange(1, DYADIC_LEVELS + 1)
    points = np.concatenate([upper * np.arange(1, size + 1) / size, upper * levels, upper * (1.0 - levels)])
    return np.unique(points[points > 0.0])


class SteinFunction:
    """Solution zeta of sigma^2 * zeta(y) * g_w(y) = integral over (lo, y) of (m - u) g_w(u) du.

    g_w is the density of Y restricted to `window` and renormalised, m and
    sigma^2 its mean and variance. The numerator is taken from whichever side
    of y carries less probability, using that the full integral vanishes.
    """

    def __init__(self, d: Distribution, window: Window, *, step_fraction: float = STEP_FRACTION) -> None:
        self.d = d
        self.window = window
        self.step_fraction = step_fraction
        self.scale = window.hi if math.isfinite(window.hi) else window.lo
        self.mean = conditional(d, lambda y, lp: y, window, INNER_REL_TOL).value
        centre = self.mean
        self.variance = conditional(d, lambda y, lp: (y - centre) ** 2, window, INNER_REL_TOL).value

    def density(self, y: float) -> float:
        return math.exp(self.d.logpdf(y) - self.window.log_mass)

    def numerator(self, y: float) -> float:
        window = self.window
        if not window.lo < y < window.hi:
            return 0.0
        centre = self.mean
        below = (self.d.cdf(y) - self.d.cdf(window.lo)) / window.mass
        if below <= 0.5:
            raw = integrate_density(self.d, lambda u, lp: centre - u, window.lo, y, INNER_REL_TOL,
                                    abs_tol=INNER_ABS_TOL).value
        else:
            raw = -integrate_density(self.d, lambda u, lp: centre - u, y, window.hi, INNER_REL_TOL,
                                     abs_tol=INNER_ABS_TOL).value
        return raw / window.mass

    def value(self, y: float) -> float:
        density = self.density(y)
        if not density > 0.0:
            return math.nan
        return self.numerator(y) / (self.variance * density)

    def derivative(self, y: float) -> float:
        h = self.step_fraction * max(abs(self.scale), abs(y))
        lo, hi = self.window.lo, self.window.hi
        if y - h <= lo:
            return (self.value(y + h) - self.value(y)) / h
        if y + h >= hi:
            return (self.value(y) - self.value(y - h)) / h
        return (self.value(y + h) - self.value(y - h)) / (2.0 * h)

    def bound(self) -> float:
        """sigma^2 * (1 + E[-zeta log g_w] + E[Y zeta'])^2 under the window law."""
        log_mass = self.window.log_mass

        def integrand(y: float, lp: float) -> float:
            return -self.value(y) * (lp - log_mass) + y * self.derivative(y)

        inner = conditional(self.d, integrand, self.window, OUTER_REL_TOL).value
        return self.variance * (1.0 + inner) ** 2


def _stein_bound(d: Distribution, window: Window, step_fraction: float) -> tuple[float, PreconditionStatus]:
    stein = SteinFunction(d, window, step_fraction=step_fraction)
    if not stein.variance > 0.0:
        return 0.0, PreconditionStatus.VIOLATED
    grid = window_grid(window.lo, window.hi, GRID_SIZE)
    # log-densities stay finite far into a tail where the density itself underflows
    if np.any(~np.isfinite(np.asarray(d.logpdf(grid), dtype=float))):
        logger.debug(f"density vanishes inside ({window.lo:g}, {window.hi:g})")
        return math.nan, PreconditionStatus.VIOLATED
    return stein.bound(), PreconditionStatus.HOLDS


def wpve_upper_theorem21(d: Distribution, alpha: float, beta: float, t: float, *,
                         grid_size: int = PRECONDITION_GRID) -> BoundReport:
    """Upper bound on WPVE (weight y) when exp(-(alpha*y + beta)) <= g(y) <= 1 on the past window.

    Then log(g)**2 <= -(alpha*y + beta) log g, so E[W**2] is at most
    H(w2) + L E[w2] + 2 L E[Y**2 log g] + L**2 E[Y**2] with w2 = alpha*y**3 + beta*y**2
    and L = -log G(t). The form without the log g term is kept in details as short_form.
    """
    if not alpha > 0.0 or beta < 0.0:
        raise BoundError(f"need alpha > 0 and beta >= 0, got alpha={alpha}, beta={beta}")
    window = past_window(d, t)
    grid = _precondition_grid(window.lo, window.hi, grid_size)
    g = np.asarray(d.pdf(grid), dtype=float)
    floor = np.exp(-(alpha * grid + beta))
    holds = bool(np.all(floor <= g * (1.0 + POINTWISE_TOLERANCE)) and np.all(g <= 1.0 + POINTWISE_TOLERANCE))
    if not holds:
        logger.debug(f"density leaves [exp(-({alpha:g}y+{beta:g})), 1] on (0, {t:g}] for {d.describe()}")

    omega2 = cubic_affine(alpha, beta)
    crhr = -window.log_mass
    entropy = weighted_past_entropy(d, omega2, t).value
    mean_omega2 = conditional(d, lambda y, lp: omega2(y), window).value
    mean_square = conditional(d, lambda y, lp: y * y, window).value
    mean_square_log = conditional(d, lambda y, lp: y * y * lp, window).value
    bound = entropy + crhr * mean_omega2 + 2.0 * crhr * mean_square_log + crhr ** 2 * mean_square
    short = entropy - 2.0 * crhr * mean_omega2 + crhr ** 2 * mean_square
    return BoundReport.upper("wpve_log_density_upper", bound=bound, exact=wpve(d, IDENTITY, t).value, t=t,
                             precondition=_status(holds),
                             details={"short_form": short, "crhr": crhr, "weighted_entropy": entropy})


def wpve_lower_theorem22(d: Distribution, t: float, *, step_fraction: float = STEP_FRACTION) -> BoundReport:
    """Stein-type lower bound on WPVE (weight y) built from the past law's zeta function."""
    window = past_window(d, t)
    bound, status = _stein_bound(d, window, step_fraction)
    return BoundReport.lower("wpve_stein_lower", bound=bound, exact=wpve(d, IDENTITY, t).value, t=t, precondition=status)


def wpdve_lower_max(d: Distribution, weight: WeightSpec, t: float) -> BoundReport:
    past = wpve(d, weight, t).value
    residual = wrve(d, weight, t).value
    return BoundReport.lower("wpdve_max", bound=max(past, residual), exact=past + residual, t=t,
                             precondition=PreconditionStatus.HOLDS, details={"wpve": past, "wrve": residual})


def _psi1_part(d: Distribution, window: Window) -> float:
    # E[psi1^2] - 2 L H(y^2) with psi1 = y log g and L the log-mass deficit of the window
    log_mass = window.log_mass
    psi_square = conditional(d, lambda y, lp: (y * lp) ** 2, window).value
    entropy = conditional(d, lambda y, lp: -y * y * (lp - log_mass), window).value
    return psi_square - 2.0 * (-log_mass) * entropy


def wpdve_upper_psi1(d: Distribution, t: float) -> BoundReport:
    """E[psi1^2 | past] + E[psi1^2 | residual] - 2 L* H(y^2; past) - 2 L H(y^2; residual)."""
    past = _psi1_part(d, past_window(d, t))
    residual = _psi1_part(d, residual_window(d, t))
    return BoundReport.upper("wpdve_psi1", bound=past + residual, exact=wpdve(d, IDENTITY, t).value, t=t,
                             precondition=PreconditionStatus.HOLDS, details={"past": past, "residual": residual})


def wpdve_lower_variance(d: Distribution, t: float, *, step_fraction: float = STEP_FRACTION) -> BoundReport:
    """max(pi, theta): the Stein-type bound on the past window and its analogue on the residual window."""
    pi_bound, pi_status = _stein_bound(d, past_window(d, t), step_fraction)
    theta_bound, theta_status = _stein_bound(d, residual_window(d, t), step_fraction)
    holds = pi_status is PreconditionStatus.HOLDS and theta_status is PreconditionStatus.HOLDS
    bound = max(pi_bound, theta_bound) if holds else math.nan
    return BoundReport.lower("wpdve_variance", bound=bound, exact=wpdve(d, IDENTITY, t).value, t=t,
                             precondition=_status(holds), details={"pi": pi_bound, "theta": theta_bound})


def _profiles(s: CoherentSystem, t: float, grid: FloatArray) -> tuple[FloatArray, FloatArray, FloatArray, FloatArray]:
    phi_sys, psi_sys = information_profile(s, t, grid)
    phi_comp, psi_comp = information_profile(CoherentSystem(s.component, IDENTITY_DISTORTION), t, grid)
    return phi_sys, psi_sys, phi_comp, psi_comp


def eta_sup(s: CoherentSystem, t: float, *, grid_size: int = RATIO_GRID) -> float:
    """Grid supremum over u in (0, G(t)] of phi_system(u) / phi_component(u); 0/0 points are skipped."""
    grid = ratio_grid(s.component.cdf(t), grid_size)
    phi_sys, _, phi_comp, _ = _profiles(s, t, grid)
    both_zero = (phi_sys == 0.0) & (phi_comp == 0.0)
    if np.any((phi_comp == 0.0) & (phi_sys > 0.0)):
        return math.inf
    keep = ~both_zero
    if not np.any(keep):
        return 1.0
    return float(np.max(phi_sys[keep] / phi_comp[keep]))


def _component_second_moment(component: Distribution, t: float) -> float:
    return wpve(component, IDENTITY, t).value + weighted_past_entropy(component, IDENTITY, t).value ** 2


def system_bound_prop62(base: Distribution, q: DistortionFunction, alpha: float, beta: float, t: float, *,
                        grid_size: int = RATIO_GRID) -> BoundReport:
    """eta times the component bound of the exp(-(alpha*y + beta)) <= g <= 1 family."""
    s = CoherentSystem(base, q)
    eta = eta_sup(s, t, grid_size=grid_size)
    component = wpve_upper_theorem21(base, alpha, beta, t)
    holds = component.counts and math.isfinite(eta)
    window = past_window(base, t)
    mean_square = conditional(base, lambda y, lp: y * y, window).value
    short = eta / window.mass * component.details["weighted_entropy"] + component.details["crhr"] ** 2 * mean_square
    return BoundReport.upper("system_component_upper", bound=eta * component.bound, exact=wpve_system(s, t), t=t,
                             precondition=_status(holds), details={"eta": eta, "short_form": short})


def system_bound_prop63(base: Distribution, q: DistortionFunction, t: float, *,
                        grid_size: int = RATIO_GRID) -> BoundReport:
    """eta * (component WPVE + component weighted past entropy squared)."""
    s = CoherentSystem(base, q)
    eta = eta_sup(s, t, grid_size=grid_size)
    second_moment = _component_second_moment(base, t)
    return BoundReport.upper("system_second_moment_upper", bound=eta * second_moment, exact=wpve_system(s, t), t=t,
                             precondition=_status(math.isfinite(eta)),
                             details={"eta": eta, "component_second_moment": second_moment})


def system_bound_prop64(base: Distribution, q: DistortionFunction, lower_density: float, t: float, *,
                        grid_size: int = PRECONDITION_GRID) -> BoundReport:
    """(1/L) times the integral of phi_system over (0, G(t)) when g >= L on the past window."""
    s = CoherentSystem(base, q)
    if not lower_density > 0.0:
        raise BoundError(f"density floor must be positive, got {lower_density}")
    window = past_window(base, t)
    grid = _precondition_grid(window.lo, window.hi, grid_size)
    holds = bool(np.all(np.asarray(base.pdf(grid), dtype=float) >= lower_density * (1.0 - POINTWISE_TOLERANCE)))

    def phi(u: float) -> float:
        return float(information_profile(s, t, np.array([u]))[0][0])

    upper = base.cdf(t)
    points = [upper * 10.0 ** -k for k in (8, 6, 4, 2)]
    total = integrate(phi, 0.0, upper, points=points).value
    return BoundReport.upper("system_density_upper", bound=total / lower_density, exact=wpve_system(s, t), t=t,
                             precondition=_status(holds), details={"phi_integral": total})


def monotonicity_check_prop61(base: Distribution, q: DistortionFunction, t: float, *,
                              grid_size: int = RATIO_GRID) -> BoundReport:
    """Orders system and component WPVE from pointwise phi/psi comparisons on the u-grid.

    phi_sys >= phi_comp and psi_sys <= psi_comp everywhere, together with a
    smaller squared mean for the system, make the component WPVE a lower bound
    for the system; the reversed conditions make it an upper bound.
    """
    s = CoherentSystem(base, q)
    grid = ratio_grid(base.cdf(t), grid_size)
    phi_sys, psi_sys, phi_comp, psi_comp = _profiles(s, t, grid)
    tol_phi = POINTWISE_TOLERANCE * max(1.0, float(np.max(np.abs(phi_comp))))
    tol_psi = POINTWISE_TOLERANCE * max(1.0, float(np.max(np.abs(psi_comp))))
    mean_sys = wpse_system(s, t)
    mean_comp = weighted_past_entropy(base, IDENTITY, t).value
    tol_mean = POINTWISE_TOLERANCE * max(1.0, mean_comp ** 2)

    system_larger = (bool(np.all(phi_sys >= phi_comp - tol_phi)) and bool(np.all(psi_sys <= psi_comp + tol_psi))
                     and mean_sys ** 2 <= mean_comp ** 2 + tol_mean)
    system_smaller = (bool(np.all(phi_sys <= phi_comp + tol_phi)) and bool(np.all(psi_sys >= psi_comp - tol_psi))
                      and mean_sys ** 2 >= mean_comp ** 2 - tol_mean)
    component = wpve(base, IDENTITY, t).value
    exact = wpve_system(s, t)
    details = {"component_wpse": mean_comp, "system_wpse": mean_sys}
    if system_larger:
        return BoundReport.lower("system_monotonicity", bound=component, exact=exact, t=t,
                                 precondition=PreconditionStatus.HOLDS, details=details)
    return BoundReport.upper("system_monotonicity", bound=component, exact=exact, t=t,
                             precondition=_status(system_smaller), details=details)
