import numpy as np
import pytest

from pyvarentropy.dataset import wind_speed_dataset
from pyvarentropy.distributions import Exponential, GumbelII
from pyvarentropy.experiments import (
    REPORT_COLUMNS, ExperimentError, bootstrap_wpve, curve, fit_table, model_selection, replicate_seed,
    simulate_wpdve, simulate_wpve,
)
from pyvarentropy.model import EstimateMethod, MeasureKind
from pyvarentropy.weight import IDENTITY

WPVE_TRUTH = {0.1: 0.004285, 0.2: 0.007901, 0.3: 0.009078, 0.4: 0.008114, 1.0: 0.011937}
WPDVE_TRUTH = {0.05: 0.44062, 0.1: 0.49772, 0.15: 0.55890, 0.2: 0.62414}


@pytest.fixture(scope="module")
def parametric_wpve():
    return simulate_wpve(0.7, list(WPVE_TRUTH), [100, 200], 100, 42, EstimateMethod.PARAMETRIC)


def test_report_layout(parametric_wpve):
    frame = parametric_wpve.to_frame()
    assert list(frame.columns) == REPORT_COLUMNS
    assert len(frame) == 10
    assert parametric_wpve.metadata["measure"] == "wpve"
    assert parametric_wpve.metadata["bandwidth_rule"] == "none"
    assert parametric_wpve.metadata["replications"] == 100
    assert (frame["failed"] == 0).all()


def test_true_values_match_table(parametric_wpve):
    for t, expected in WPVE_TRUTH.items():
        assert parametric_wpve.row(t, 100)["true_value"] == pytest.approx(expected, abs=5e-6)


def test_mse_falls_with_sample_size(parametric_wpve):
    for t in WPVE_TRUTH:
        assert parametric_wpve.row(t, 200)["mse"] < parametric_wpve.row(t, 100)["mse"]


def test_mse_magnitude(parametric_wpve):
    assert 1e-7 <= parametric_wpve.row(1.0, 200)["mse"] <= 5e-5


def test_mse_dominates_squared_bias(parametric_wpve):
    for row in parametric_wpve.rows:
        assert row["mse"] >= row["ab"] ** 2 - 1e-12
        assert row["ab_alt"] >= row["ab"] - 1e-12


def test_simulation_is_deterministic():
    first = simulate_wpve(0.7, [0.5], [20, 40], 5, 9, EstimateMethod.PARAMETRIC)
    second = simulate_wpve(0.7, [0.5], [20, 40], 5, 9, EstimateMethod.PARAMETRIC)
    assert first.to_csv() == second.to_csv()
    other = simulate_wpve(0.7, [0.5], [20, 40], 5, 10, EstimateMethod.PARAMETRIC)
    assert other.to_csv() != first.to_csv()


def test_replicate_seed_is_order_free():
    a = np.random.default_rng(replicate_seed(42, 3)).random(4)
    b = np.random.default_rng(replicate_seed(42, 3)).random(4)
    c = np.random.default_rng(replicate_seed(42, 4)).random(4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_wpdve_simulation():
    report = simulate_wpdve(5.0, [0.05, 0.2], [100, 200], 200, 42, EstimateMethod.PARAMETRIC)
    for t in (0.05, 0.2):
        assert report.row(t, 100)["true_value"] == pytest.approx(WPDVE_TRUTH[t], abs=5e-5)
        assert report.row(t, 200)["mse"] < report.row(t, 100)["mse"]


def test_nonparametric_simulation_runs():
    report = simulate_wpve(0.7, [0.5], [50], 3, 7, EstimateMethod.NONPARAMETRIC)
    row = report.row(0.5, 50)
    assert row["succeeded"] == 3
    assert row["failed"] == 0
    assert report.metadata["bandwidth_rule"] == "silverman"
    fixed = simulate_wpve(0.7, [0.5], [50], 2, 7, EstimateMethod.NONPARAMETRIC, bandwidth=0.3)
    assert fixed.metadata["bandwidth_rule"] == "0.3"


def test_grid_validation():
    with pytest.raises(ExperimentError, match="at least 2 replicates"):
        simulate_wpve(0.7, [0.5], [10], 1, 1, EstimateMethod.PARAMETRIC)
    with pytest.raises(ExperimentError, match="t-grid"):
        simulate_wpve(0.7, [], [10], 2, 1, EstimateMethod.PARAMETRIC)
    with pytest.raises(ExperimentError, match="positive"):
        simulate_wpve(0.7, [0.0], [10], 2, 1, EstimateMethod.PARAMETRIC)
    with pytest.raises(ExperimentError, match="sample size"):
        simulate_wpve(0.7, [0.5], [1], 2, 1, EstimateMethod.PARAMETRIC)


def test_bootstrap_true_values():
    data = wind_speed_dataset().as_array()
    fitted = GumbelII(3.3869, 0.7544)
    report = bootstrap_wpve(data, fitted, 2, 0.35, [1.0, 3.0], 42)
    assert report.row(1.0, 30)["true_value"] == pytest.approx(0.12205, rel=2e-2)
    assert report.row(3.0, 30)["true_value"] == pytest.approx(3.10000, rel=2e-2)
    assert report.metadata["bandwidth_rule"] == "0.35"
    again = bootstrap_wpve(data, fitted, 2, 0.35, [1.0, 3.0], 42)
    assert again.to_csv() == report.to_csv()


def test_model_selection_on_wind():
    results = model_selection(wind_speed_dataset().as_array())
    assert [r.family for r in results][0] == "gumbel2"
    exp = next(r for r in results if r.family == "exp")
    assert exp.aic == pytest.approx(70.8191, abs=1e-3)
    table = fit_table(results)
    assert list(table["family"]) == [r.family for r in results]
    assert "aic" in table.columns


def test_model_selection_prefers_exponential_on_exponential_data():
    positions = (np.arange(1, 501) - 0.5) / 500
    sample = Exponential(1.0).quantile(positions)
    results = model_selection(sample)
    assert results[0].family == "exp"


def test_curve():
    frame = curve(Exponential(0.7), IDENTITY, MeasureKind.WPVE, [0.1, 1.0])
    assert list(frame.columns) == ["t", "value", "error_estimate"]
    assert frame["value"].iloc[1] == pytest.approx(0.011937, abs=5e-6)
    with pytest.raises(ExperimentError):
        curve(Exponential(0.7), IDENTITY, MeasureKind.WPVE, [])
