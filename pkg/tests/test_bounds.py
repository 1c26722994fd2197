import math

import numpy as np
import pytest

from pyvarentropy.bounds import (
    BoundError, SteinFunction, eta_sup, monotonicity_check_prop61, ratio_grid, system_bound_prop62,
    system_bound_prop63, system_bound_prop64, wpdve_lower_max, wpdve_lower_variance, wpdve_upper_psi1,
    wpve_lower_theorem22, wpve_upper_theorem21,
)
from pyvarentropy.coherent import IDENTITY as IDENTITY_Q, PARALLEL, SERIES, CoherentSystem
from pyvarentropy.distributions import Exponential, Lomax, Power, Uniform, Weibull
from pyvarentropy.measures import past_window, residual_window, wpve
from pyvarentropy.model import BoundSide, PreconditionStatus
from pyvarentropy.quadrature import integrate
from pyvarentropy.weight import IDENTITY


def test_theorem21_on_exponential_floor():
    report = wpve_upper_theorem21(Exponential(0.5), 0.5, math.log(2.0), 1.0)
    assert report.side is BoundSide.UPPER
    assert report.precondition is PreconditionStatus.HOLDS
    assert report.satisfied
    assert "short_form" in report.details


def test_theorem21_precondition_violated_for_lomax():
    report = wpve_upper_theorem21(Lomax(1.0, 3.0), 2.0, 1.0, 1.0)
    assert report.precondition is PreconditionStatus.VIOLATED
    assert not report.counts


def test_theorem21_on_uniform():
    report = wpve_upper_theorem21(Uniform(0.0, 1.0), 1.0, 0.0, 0.5)
    assert report.precondition is PreconditionStatus.HOLDS
    assert report.satisfied


def test_theorem21_rejects_bad_constants():
    with pytest.raises(BoundError):
        wpve_upper_theorem21(Exponential(1.0), 0.0, 1.0, 1.0)
    with pytest.raises(BoundError):
        wpve_upper_theorem21(Exponential(1.0), 1.0, -1.0, 1.0)


def test_theorem22_on_exponential():
    report = wpve_lower_theorem22(Exponential(0.7), 1.0)
    assert report.side is BoundSide.LOWER
    assert report.precondition is PreconditionStatus.HOLDS
    assert report.satisfied


def test_theorem22_is_tight_for_uniform():
    # the information of a uniform past law is linear in y
    report = wpve_lower_theorem22(Uniform(0.0, 1.0), 0.5)
    assert report.bound == pytest.approx(report.exact, rel=1e-4)


def test_stein_function_on_uniform():
    d = Uniform(0.0, 1.0)
    stein = SteinFunction(d, past_window(d, 1.0))
    assert stein.mean == pytest.approx(0.5)
    assert stein.variance == pytest.approx(1.0 / 12.0)
    assert stein.value(0.3) == pytest.approx(6.0 * 0.3 * 0.7, rel=1e-8)
    assert stein.derivative(0.3) == pytest.approx(6.0 - 12.0 * 0.3, rel=1e-4)
    assert stein.numerator(1.5) == 0.0


def test_wpdve_variance_bound_on_exponential():
    report = wpdve_lower_variance(Exponential(1.0), 1.0)
    assert report.details["theta"] == pytest.approx(25.0, rel=1e-3)
    assert report.bound == pytest.approx(25.0, rel=1e-3)
    assert report.satisfied


def test_wpdve_max_and_psi1_bounds():
    d = Exponential(5.0)
    lower = wpdve_lower_max(d, IDENTITY, 0.1)
    assert lower.satisfied
    assert lower.bound == max(lower.details["wpve"], lower.details["wrve"])
    upper = wpdve_upper_psi1(d, 0.1)
    assert upper.satisfied
    assert upper.exact == pytest.approx(0.49772, abs=5e-5)


def test_eta_of_identity_distortion_is_one():
    s = CoherentSystem(Exponential(1.0), IDENTITY_Q)
    assert eta_sup(s, 1.0) == pytest.approx(1.0, rel=1e-12)


def test_system_bounds_on_uniform_series():
    base = Uniform(0.0, 1.0)
    for report in (system_bound_prop62(base, SERIES, 1.0, 0.0, 0.8),
                   system_bound_prop63(base, SERIES, 0.8),
                   system_bound_prop64(base, SERIES, 1.0, 0.8)):
        assert report.precondition is PreconditionStatus.HOLDS, report.name
        assert report.satisfied, report.name


def test_prop64_needs_positive_floor():
    with pytest.raises(BoundError):
        system_bound_prop64(Uniform(0.0, 1.0), SERIES, 0.0, 0.5)


def test_prop61_with_identity_distortion():
    d = Exponential(0.7)
    report = monotonicity_check_prop61(d, IDENTITY_Q, 1.0)
    assert report.precondition is PreconditionStatus.HOLDS
    assert report.satisfied
    assert report.bound == pytest.approx(wpve(d, IDENTITY, 1.0).value)


def test_ratio_grid_refines_under_doubling():
    coarse = ratio_grid(0.6, 64)
    fine = ratio_grid(0.6, 128)
    assert np.all(np.isin(coarse, fine))
    assert coarse.max() == pytest.approx(0.6)
    assert coarse.min() > 0.0


def test_residual_stein_function_of_exponential_is_linear():
    d = Exponential(1.0)
    stein = SteinFunction(d, residual_window(d, 1.0))
    assert stein.mean == pytest.approx(2.0, rel=1e-10)
    assert stein.variance == pytest.approx(1.0, rel=1e-10)
    for y in (1.5, 2.5, 6.0):
        assert stein.value(y) == pytest.approx(y - 1.0, rel=1e-8)


@pytest.mark.parametrize("d, window", [
    (Uniform(0.0, 1.0), past_window(Uniform(0.0, 1.0), 0.6)),
    (Exponential(0.7), past_window(Exponential(0.7), 1.0)),
    (Exponential(1.0), residual_window(Exponential(1.0), 1.0)),
    (Lomax(1.0, 3.0), residual_window(Lomax(1.0, 3.0), 0.5)),
])
def test_stein_function_solves_its_integral_equation(d, window):
    stein = SteinFunction(d, window)
    start = d.cdf(window.lo)
    for k in range(1, 33):
        y = d.quantile(start + k / 33.0 * window.mass)
        direct = integrate(lambda u: (stein.mean - u) * stein.density(u), window.lo, y).value
        solved = stein.variance * stein.value(y) * stein.density(y)
        assert solved == pytest.approx(direct, rel=1e-6), y


def test_parallel_power_system_second_moment_bound():
    report = system_bound_prop63(Power(0.2), PARALLEL, 0.5)
    assert report.precondition is PreconditionStatus.HOLDS
    assert report.exact == pytest.approx(0.001315, abs=1e-4)
    assert report.bound >= 0.001315
    assert report.satisfied


def test_paired_bounds_on_uniform():
    d = Uniform(0.0, 1.0)
    upper = wpdve_upper_psi1(d, 0.5)
    assert upper.precondition is PreconditionStatus.HOLDS
    assert upper.satisfied
    lower = wpdve_lower_variance(d, 0.5)
    assert lower.precondition is PreconditionStatus.HOLDS
    assert lower.bound > 0.0
    assert lower.satisfied


@pytest.mark.parametrize("d, t", [
    (Exponential(0.7), 0.5),
    (Exponential(0.7), 1.0),
    (Exponential(5.0), 0.1),
    (Uniform(0.0, 1.0), 0.3),
    (Uniform(0.0, 1.0), 0.8),
    (Lomax(1.0, 3.0), 1.0),
    (Weibull(2.5393, 1.3048), 1.2),
])
def test_bounds_hold_wherever_their_precondition_holds(d, t):
    reports = [
        wpve_upper_theorem21(d, 2.0, 1.0, t),
        wpve_lower_theorem22(d, t),
        wpdve_lower_max(d, IDENTITY, t),
        wpdve_upper_psi1(d, t),
        wpdve_lower_variance(d, t),
    ]
    for report in reports:
        if report.precondition is PreconditionStatus.HOLDS:
            assert report.satisfied, (report.name, report.bound, report.exact)
    assert reports[4].precondition is PreconditionStatus.HOLDS
    assert math.isfinite(reports[4].details["theta"])
