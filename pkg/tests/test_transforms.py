import numpy as np
import pytest

from pyvarentropy.closed_forms import power_wpve_closed
from pyvarentropy.distributions import Exponential, Lomax, ParetoI, SqrtWeibull
from pyvarentropy.measures import wpde, wpdve, wpve
from pyvarentropy.transforms import (
    Direction, MonotoneMap, TransformError, TransformedDistribution, wpde_affine, wpdve_affine, wpve_affine,
    wpve_via_transform,
)
from pyvarentropy.weight import IDENTITY


@pytest.mark.parametrize("lam, t", [
    (0.5, 1.0), (0.5, 4.0), (0.7, 0.5), (0.7, 2.0), (1.0, 0.25),
    (1.0, 2.0), (2.0, 0.5), (2.0, 1.5), (5.0, 0.1), (5.0, 0.5),
])
def test_square_of_exponential_matches_direct_quadrature(lam, t):
    direct = wpve(SqrtWeibull(lam), IDENTITY, t).value
    via = wpve_via_transform(Exponential(lam), MonotoneMap.square(), t)
    assert via == pytest.approx(direct, rel=1e-7, abs=1e-7)


def test_square_of_exponential():
    direct = wpve(SqrtWeibull(1.0), IDENTITY, 2.0).value
    assert wpve_via_transform(Exponential(1.0), MonotoneMap.square(), 2.0) == pytest.approx(direct, rel=1e-6)
    law = TransformedDistribution(Exponential(1.0), MonotoneMap.square())
    assert wpve(law, IDENTITY, 2.0).value == pytest.approx(direct, rel=1e-6)


def test_transformed_distribution_cdf():
    law = TransformedDistribution(Exponential(1.0), MonotoneMap.square())
    assert law.cdf(4.0) == pytest.approx(Exponential(1.0).cdf(2.0))
    assert law.quantile(0.5) == pytest.approx(np.log(2.0) ** 2)


def test_reciprocal_of_pareto_is_power():
    value = wpve_via_transform(ParetoI(2.0), MonotoneMap.reciprocal(), 0.5)
    assert value == pytest.approx(power_wpve_closed(2.0, 1.0, 0.5), rel=1e-6)
    law = TransformedDistribution(ParetoI(2.0), MonotoneMap.reciprocal())
    assert (law.lo, law.hi) == (0.0, 1.0)
    assert law.cdf(0.5) == pytest.approx(0.25)


def test_affine_rule_matches_transformed_law():
    law = TransformedDistribution(Exponential(1.0), MonotoneMap.affine(2.0, 1.0))
    assert wpve_affine(Exponential(1.0), 2.0, 1.0, 3.0) == pytest.approx(wpve(law, IDENTITY, 3.0).value, rel=1e-6)
    assert wpve_via_transform(Exponential(1.0), MonotoneMap.affine(2.0, 1.0), 3.0) == pytest.approx(
        wpve(law, IDENTITY, 3.0).value, rel=1e-6)


def test_affine_unit_slope_is_weighted_wpve():
    d = Lomax(1.0, 3.0)
    assert wpve_affine(d, 1.0, 0.0, 1.5) == pytest.approx(wpve(d, IDENTITY, 1.5).value, rel=1e-12)


def test_affine_paired_rules():
    law = TransformedDistribution(Exponential(0.7), MonotoneMap.affine(1.5, 0.5))
    assert wpdve_affine(Exponential(0.7), 1.5, 0.5, 2.0) == pytest.approx(wpdve(law, IDENTITY, 2.0).value, rel=1e-6)
    assert wpde_affine(Exponential(0.7), 1.5, 0.5, 2.0) == pytest.approx(wpde(law, IDENTITY, 2.0).value, rel=1e-6)


def test_affine_rules_reject_bad_coefficients():
    with pytest.raises(TransformError):
        wpve_affine(Exponential(1.0), -1.0, 0.0, 1.0)
    with pytest.raises(TransformError):
        wpde_affine(Exponential(1.0), 1.0, -0.5, 1.0)
    with pytest.raises(TransformError, match="non-zero slope"):
        MonotoneMap.affine(0.0, 1.0)


def test_validate_checks_direction_and_inverse():
    wrong_sign = MonotoneMap(lambda y: y, lambda y: -np.ones_like(np.asarray(y, dtype=float)), lambda x: x,
                             direction=Direction.INCREASING, name="y")
    with pytest.raises(TransformError, match="not increasing"):
        wrong_sign.validate(0.0, 1.0)
    bad_inverse = MonotoneMap(np.square, lambda y: 2.0 * np.asarray(y, dtype=float), lambda x: x,
                              direction=Direction.INCREASING, name="y^2")
    with pytest.raises(TransformError, match="round-trip"):
        bad_inverse.validate(0.0, 2.0)


def test_decreasing_affine_map():
    psi = MonotoneMap.affine(-1.0, 3.0)
    assert not psi.increasing
    assert psi.image(0.0, 1.0) == (2.0, 3.0)
