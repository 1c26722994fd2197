import pytest

from pyvarentropy.distributions import DistributionError, Exponential, Power
from pyvarentropy.measures import MeasureDomainError, crhr, wpve
from pyvarentropy.prhr import PrhrModel, prhr_distribution, wpve_prhr, wpve_prhr_power_closed
from pyvarentropy.weight import IDENTITY


def test_power_baseline_closed_form():
    model = PrhrModel(Power(2.0, 2.0), 1.5)
    expected = wpve_prhr_power_closed(2.0, 2.0, 1.5, 1.0)
    assert wpve_prhr(model, 1.0) == pytest.approx(expected, rel=1e-6)
    assert wpve(prhr_distribution(model), IDENTITY, 1.0).value == pytest.approx(expected, rel=1e-6)


@pytest.mark.parametrize("base, t", [
    (Exponential(1.0), 0.5), (Exponential(1.0), 2.0), (Power(2.0, 2.0), 0.8), (Power(2.0, 2.0), 1.6),
])
@pytest.mark.parametrize("a", [0.8, 1.5, 2.0, 3.0, 5.0])
def test_quantile_route_matches_density_route(base, t, a):
    model = PrhrModel(base, a)
    direct = wpve(prhr_distribution(model), IDENTITY, t).value
    assert wpve_prhr(model, t) == pytest.approx(direct, rel=1e-7, abs=1e-12)


@pytest.mark.parametrize("base, t", [(Exponential(1.0), 0.5), (Exponential(0.7), 2.0), (Power(2.0, 2.0), 1.2)])
@pytest.mark.parametrize("a", [0.5, 2.0, 4.0])
def test_cumulative_reversed_hazard_scales_with_exponent(base, t, a):
    law = prhr_distribution(PrhrModel(base, a))
    assert crhr(law, t) == pytest.approx(a * crhr(base, t), rel=1e-10)


def test_exponential_baseline():
    model = PrhrModel(Exponential(1.0), 2.0)
    direct = wpve(prhr_distribution(model), IDENTITY, 1.0).value
    assert wpve_prhr(model, 1.0) == pytest.approx(direct, rel=1e-6)


def test_unit_exponent_is_baseline():
    model = PrhrModel(Exponential(0.7), 1.0)
    assert wpve_prhr(model, 1.0) == pytest.approx(0.011937, abs=5e-6)


def test_prhr_distribution_cdf():
    law = prhr_distribution(PrhrModel(Exponential(1.0), 3.0))
    assert law.cdf(1.0) == pytest.approx(Exponential(1.0).cdf(1.0) ** 3)
    assert law.cdf(law.quantile(0.4)) == pytest.approx(0.4)


def test_exponent_must_be_positive():
    with pytest.raises(DistributionError):
        PrhrModel(Exponential(1.0), 0.0)


def test_empty_past_window():
    with pytest.raises(MeasureDomainError):
        wpve_prhr(PrhrModel(Exponential(1.0), 2.0), 0.0)
