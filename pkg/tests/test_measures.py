import math

import pytest

from pyvarentropy.distributions import Exponential, GumbelII, Lomax, ParetoI, Uniform
from pyvarentropy.measures import (
    MeasureDomainError, MeasureRequest, TruncationSide, TruncationSpec, chr, conditional, conditional_mean_past,
    conditional_mean_residual, crhr, evaluate, mean_past_lifetime, mean_residual_lifetime, past_varentropy,
    residual_varentropy, shannon_entropy, variance_past_lifetime, variance_residual_lifetime, varentropy,
    weighted_entropy, weighted_past_entropy, weighted_past_renyi, weighted_residual_entropy, weighted_varentropy,
    past_window, wpde, wpdve, wpdve_decomposed, wpve, wpve_decomposed, wrve,
)
from pyvarentropy.model import MeasureKind
from pyvarentropy.weight import IDENTITY, UNIT, WeightError, affine


@pytest.mark.parametrize("t, expected", [
    (0.1, 0.004285),
    (0.2, 0.007901),
    (0.3, 0.009078),
    (0.4, 0.008114),
    (1.0, 0.011937),
])
def test_wpve_exponential_table(t, expected):
    assert wpve(Exponential(0.7), IDENTITY, t).value == pytest.approx(expected, abs=5e-6)


@pytest.mark.parametrize("t, expected", [
    (0.05, 0.44062),
    (0.1, 0.49772),
    (0.15, 0.55890),
    (0.2, 0.62414),
])
def test_wpdve_exponential_table(t, expected):
    assert wpdve(Exponential(5.0), IDENTITY, t).value == pytest.approx(expected, abs=5e-5)


@pytest.mark.parametrize("t", [0.25, 0.5, 0.9])
def test_wpve_uniform(t):
    expected = math.log(t) ** 2 * t ** 2 / 12.0
    assert wpve(Uniform(0.0, 1.0), IDENTITY, t).value == pytest.approx(expected, rel=1e-8)


def test_wrve_shifted_exponential_moments():
    # residual law at t=1 is 1 + Exp(1), so W = V + V**2 and Var W = 38 - 9
    assert wrve(Exponential(1.0), IDENTITY, 1.0).value == pytest.approx(29.0, rel=1e-8)


def test_wpdve_is_sum_of_parts():
    d = Lomax(1.0, 3.0)
    total = wpdve(d, IDENTITY, 1.0)
    assert total.kind is MeasureKind.WPDVE
    assert total.value == pytest.approx(wpve(d, IDENTITY, 1.0).value + wrve(d, IDENTITY, 1.0).value, rel=1e-12)


def test_wpde_uniform_is_log_t():
    assert wpde(Uniform(0.0, 1.0), IDENTITY, 0.5).value == pytest.approx(math.log(0.5), rel=1e-10)


def test_weighted_entropies_uniform():
    d = Uniform(0.0, 1.0)
    assert weighted_past_entropy(d, IDENTITY, 0.5).value == pytest.approx(0.25 * math.log(0.5), rel=1e-10)
    assert weighted_residual_entropy(d, IDENTITY, 0.5).value == pytest.approx(0.75 * math.log(0.5), rel=1e-10)


def test_full_support_measures_exponential():
    d = Exponential(1.0)
    assert shannon_entropy(d).value == pytest.approx(1.0, rel=1e-10)
    assert shannon_entropy(Exponential(2.0)).kind is MeasureKind.SE
    assert varentropy(d).value == pytest.approx(1.0, rel=1e-8)
    # W = Y**2 under Exp(1)
    assert weighted_entropy(d, IDENTITY).value == pytest.approx(2.0, rel=1e-10)
    assert weighted_varentropy(d, IDENTITY).value == pytest.approx(20.0, rel=1e-8)


def test_unweighted_dynamic_varentropy():
    assert past_varentropy(Uniform(0.0, 1.0), 0.5).value == pytest.approx(0.0, abs=1e-10)
    assert residual_varentropy(Exponential(0.3), 2.0).value == pytest.approx(1.0, rel=1e-8)


def test_hazards():
    d = Exponential(0.7)
    assert crhr(d, 1.0) == pytest.approx(-math.log(1.0 - math.exp(-0.7)))
    assert chr(d, 2.0) == pytest.approx(1.4)
    with pytest.raises(MeasureDomainError):
        crhr(d, 0.0)


def test_lifetime_moments():
    u = Uniform(0.0, 1.0)
    assert mean_past_lifetime(u, 0.6) == pytest.approx(0.3, rel=1e-10)
    assert variance_past_lifetime(u, 0.6) == pytest.approx(0.36 / 12.0, rel=1e-8)
    assert conditional_mean_past(u, 0.6) == pytest.approx(0.3, rel=1e-10)
    d = Exponential(0.5)
    assert mean_residual_lifetime(d, 3.0) == pytest.approx(2.0, rel=1e-8)
    assert variance_residual_lifetime(d, 3.0) == pytest.approx(4.0, rel=1e-8)
    assert conditional_mean_residual(d, 3.0) == pytest.approx(5.0, rel=1e-8)


def test_past_renyi_uniform_unit_weight():
    value = weighted_past_renyi(Uniform(0.0, 1.0), UNIT, 0.5, 2.0).value
    assert value == pytest.approx(math.log(0.5), rel=1e-10)


def test_past_renyi_rejects_order_one():
    with pytest.raises(MeasureDomainError):
        weighted_past_renyi(Exponential(1.0), IDENTITY, 1.0, 1.0)


@pytest.mark.parametrize("d, t", [(Exponential(0.7), 1.0), (Lomax(1.0, 3.0), 2.0), (GumbelII(3.3869, 0.7544), 1.5)])
def test_decomposition_matches_direct_variance(d, t):
    assert wpve_decomposed(d, t) == pytest.approx(wpve(d, IDENTITY, t).value, rel=1e-6)
    assert wpdve_decomposed(d, t) == pytest.approx(wpdve(d, IDENTITY, t).value, rel=1e-6)


def test_degenerate_truncation():
    with pytest.raises(MeasureDomainError, match="past lifetime undefined"):
        wpve(ParetoI(2.0), IDENTITY, 1.0)
    with pytest.raises(MeasureDomainError, match="residual lifetime undefined"):
        wrve(Uniform(0.0, 1.0), IDENTITY, 1.0)
    with pytest.raises(MeasureDomainError, match="0 < G"):
        wpdve(Uniform(0.0, 1.0), IDENTITY, 1.0)


def test_truncation_spec():
    TruncationSpec(0.5, TruncationSide.PAIRED).check(Uniform(0.0, 1.0))
    with pytest.raises(MeasureDomainError):
        TruncationSpec(1.0, TruncationSide.PAIRED).check(Uniform(0.0, 1.0))


def test_negative_weight_is_rejected():
    with pytest.raises(WeightError):
        wpve(Exponential(1.0), affine(1.0, -0.5), 1.0)


def test_evaluate_dispatches_every_kind():
    d = Exponential(0.7)
    for kind in MeasureKind:
        result = evaluate(kind, d, IDENTITY, 1.0)
        assert result.kind is kind
        assert math.isfinite(result.value)
        if kind.is_variance:
            assert result.value >= 0.0


def test_measure_request():
    request = MeasureRequest(Exponential(0.7), IDENTITY, 1.0, MeasureKind.WPVE)
    assert request.evaluate().value == pytest.approx(0.011937, abs=5e-6)


@pytest.mark.parametrize("d, weight, t", [
    (Exponential(0.7), IDENTITY, 1.0),
    (Lomax(1.0, 3.0), IDENTITY, 2.0),
    (GumbelII(3.3869, 0.7544), affine(1.0, 0.5), 1.5),
    (Uniform(0.0, 2.0), IDENTITY, 1.2),
])
def test_wpve_is_second_minus_squared_first_moment(d, weight, t):
    window = past_window(d, t)
    log_mass = window.log_mass
    first = conditional(d, lambda y, lp: -weight(y) * (lp - log_mass), window).value
    second = conditional(d, lambda y, lp: (weight(y) * (lp - log_mass)) ** 2, window).value
    assert wpve(d, weight, t).value == pytest.approx(second - first ** 2, rel=1e-8)


@pytest.mark.parametrize("d", [Exponential(0.7), Uniform(0.0, 2.0)])
def test_wpve_tends_to_weighted_varentropy(d):
    t = d.quantile(1.0 - 1e-12)
    assert wpve(d, IDENTITY, t).value == pytest.approx(weighted_varentropy(d, IDENTITY).value, rel=1e-6)


@pytest.mark.parametrize("d, t", [(Exponential(0.7), 1.0), (Lomax(1.0, 3.0), 2.0), (GumbelII(3.3869, 0.7544), 1.5)])
def test_unit_weight_gives_past_varentropy(d, t):
    assert wpve(d, UNIT, t).value == pytest.approx(past_varentropy(d, t).value, rel=1e-8)


@pytest.mark.parametrize("t", [0.25, 0.5, 1.0, 2.0])
def test_decomposition_on_exponential_grid(t):
    d = Exponential(0.7)
    assert wpve_decomposed(d, t) == pytest.approx(wpve(d, IDENTITY, t).value, rel=1e-7, abs=1e-10)


def test_mean_past_lifetime_beyond_bounded_support():
    u = Uniform(0.0, 1.0)
    assert mean_past_lifetime(u, 2.0) == pytest.approx(1.5, rel=1e-10)
    assert mean_past_lifetime(u, 1.0) == pytest.approx(0.5, rel=1e-10)
    assert mean_past_lifetime(u, 0.5) == pytest.approx(0.25, rel=1e-10)


@pytest.mark.parametrize("t", [1.5, 2.0, 5.0, 40.0])
def test_pareto_mean_residual_lifetime(t):
    # alpha = 2 makes the mean residual life equal to t
    assert mean_residual_lifetime(ParetoI(2.0), t) == pytest.approx(t, rel=1e-8)


def test_pareto_entropy():
    assert shannon_entropy(ParetoI(2.0)).value == pytest.approx(1.5 - math.log(2.0), rel=1e-8)
