import pytest

from pyvarentropy.coherent import SERIES
from pyvarentropy.config import (
    BootstrapConfig, BoundConfig, ConfigError, QuadratureConfig, SimulationConfig, load_config_file,
    parse_bandwidth, parse_distortion, parse_distribution, parse_grid, parse_sizes, parse_weight,
)
from pyvarentropy.model import EstimateMethod, MeasureKind
from pyvarentropy.weight import IDENTITY, UNIT


def test_parse_distribution():
    assert parse_distribution("exp:lambda=0.7").lam == 0.7
    uniform = parse_distribution(" uniform:a=0, b=2 ")
    assert (uniform.lo, uniform.hi) == (0.0, 2.0)


@pytest.mark.parametrize("spec, message", [
    ("gamma:k=1", "invalid distribution"),
    ("exp:lambda", "key=value"),
    ("exp:lambda=abc", "not a number"),
    ("exp:lambda=inf", "not finite"),
    ("exp:lambda=-1", "invalid distribution"),
])
def test_parse_distribution_errors(spec, message):
    with pytest.raises(ConfigError, match=message):
        parse_distribution(spec)


def test_parse_weight():
    assert parse_weight("y") is IDENTITY
    assert parse_weight("1") is UNIT
    assert parse_weight("y2")(3.0) == 9.0
    assert parse_weight("affine:a=2,b=1")(3.0) == 7.0
    assert parse_weight("cubic:alpha=2,beta=1")(1.0) == 3.0
    with pytest.raises(ConfigError, match="exactly a and b"):
        parse_weight("affine:a=1")
    with pytest.raises(ConfigError, match="unknown weight"):
        parse_weight("log")


def test_parse_grid_range_is_inclusive_and_rounded():
    grid = parse_grid("0.1:1.0:0.1")
    assert len(grid) == 10
    assert grid[2] == 0.3
    assert grid[-1] == 1.0
    assert parse_grid("0.05:0.2:0.05") == [0.05, 0.1, 0.15, 0.2]


def test_parse_grid_lists():
    assert parse_grid("0.5") == [0.5]
    assert parse_grid("0.1, 0.2,") == [0.1, 0.2]


@pytest.mark.parametrize("spec", ["", "  ", ",", "1:0:0.1", "0:1", "0:1:0"])
def test_parse_grid_errors(spec):
    with pytest.raises(ConfigError):
        parse_grid(spec)


def test_parse_sizes():
    assert parse_sizes("100, 200") == [100, 200]
    for spec in ("a", "1", ""):
        with pytest.raises(ConfigError):
            parse_sizes(spec)


def test_parse_distortion():
    assert parse_distortion("series") is SERIES
    assert parse_distortion("poly:0,0,3,-2").name == "poly:0,0,3,-2"
    for spec in ("poly:0,3,-2", "star", "poly:"):
        with pytest.raises(ConfigError):
            parse_distortion(spec)


def test_parse_bandwidth():
    assert parse_bandwidth("Silverman") is None
    assert parse_bandwidth("0.3") == 0.3
    with pytest.raises(ConfigError):
        parse_bandwidth("-1")


def test_config_objects_validate():
    assert QuadratureConfig().rel_tol <= 1e-3
    with pytest.raises(ConfigError, match="rel-tol"):
        QuadratureConfig(rel_tol=0.1)
    with pytest.raises(ConfigError):
        SimulationConfig(lam=-1.0, ts=[0.5], ns=[10])
    with pytest.raises(ConfigError):
        SimulationConfig(lam=0.7, ts=[0.5], ns=[10], reps=1)
    with pytest.raises(ConfigError, match="wpve and wpdve"):
        SimulationConfig(lam=0.7, ts=[0.5], ns=[10], measure=MeasureKind.WPSE)
    config = SimulationConfig(lam=0.7, ts=[0.5], ns=[10], method=EstimateMethod.PARAMETRIC)
    assert config.bandwidth is None
    assert config.reps == 100
    with pytest.raises(ConfigError):
        BootstrapConfig(ts=[1.0], replicates=1)
    assert BootstrapConfig(ts=[1.0]).bandwidth == 0.35
    with pytest.raises(ConfigError):
        BoundConfig(step_fraction=0.5)
    with pytest.raises(ConfigError, match="alpha > 0"):
        BoundConfig(alpha=-1.0)
    with pytest.raises(ConfigError, match="beta >= 0"):
        BoundConfig(beta=-0.5)
    with pytest.raises(ConfigError, match="density floor"):
        BoundConfig(lower_density=0.0)
    assert BoundConfig(lower_density=0.5).lower_density == 0.5


def test_load_config_file(tmp_path):
    path = tmp_path / "run.env"
    path.write_text("T=0.5\nrel-tol=1e-9\nEMPTY\n", encoding="utf-8")
    assert load_config_file(str(path)) == {"t": "0.5", "rel_tol": "1e-9"}
    with pytest.raises(ConfigError, match="does not exist"):
        load_config_file(str(tmp_path / "missing.env"))
