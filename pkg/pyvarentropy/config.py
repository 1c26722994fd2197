import logging
import math
import os

import numpy as np
from dotenv import dotenv_values

from .bounds import PRECONDITION_GRID, RATIO_GRID, STEP_FRACTION
from .coherent import BUILTIN_DISTORTIONS, DistortionError, DistortionFunction
from .distributions import Distribution, DistributionError, make_distribution
from .model import EstimateMethod, MeasureKind, VarentropyError
from .quadrature import DEFAULT_REL_TOL
from .weight import IDENTITY, SQUARE, UNIT, WeightSpec, affine, cubic_affine

logger = logging.getLogger("config")

# significant digits kept when expanding a start:stop:step grid
GRID_DIGITS = 12


class ConfigError(VarentropyError):
    pass


class QuadratureConfig:
    def __init__(self, *, rel_tol: float = DEFAULT_REL_TOL) -> None:
        if not 0.0 < rel_tol <= 1e-3:
            raise ConfigError(f"rel-tol must lie in (0, 1e-3], got {rel_tol}")
        self.rel_tol = rel_tol


class SimulationConfig:
    def __init__(self, *,
                 lam: float,
                 ts: list[float],
                 ns: list[int],
                 reps: int = 100,
                 seed: int = 42,
                 method: EstimateMethod = EstimateMethod.NONPARAMETRIC,
                 measure: MeasureKind = MeasureKind.WPVE,
                 bandwidth: float | None = None,
                 quadrature: QuadratureConfig = QuadratureConfig()) -> None:
        if not lam > 0.0:
            raise ConfigError(f"lambda must be positive, got {lam}")
        if reps < 2:
            raise ConfigError(f"reps must be at least 2, got {reps}")
        if measure not in (MeasureKind.WPVE, MeasureKind.WPDVE):
            raise ConfigError(f"simulations cover wpve and wpdve, not {measure.value}")
        if bandwidth is not None and not bandwidth > 0.0:
            raise ConfigError(f"bandwidth must be positive, got {bandwidth}")
        self.lam = lam
        self.ts = ts
        self.ns = ns
        self.reps = reps
        self.seed = seed
        self.method = method
        self.measure = measure
        self.bandwidth = bandwidth
        self.quadrature = quadrature


class BootstrapConfig:
    def __init__(self, *,
                 ts: list[float],
                 replicates: int = 500,
                 bandwidth: float = 0.35,
                 seed: int = 42,
                 family: str = "gumbel2",
                 quadrature: QuadratureConfig = QuadratureConfig()) -> None:
        if replicates < 2:
            raise ConfigError(f"replicates must be at least 2, got {replicates}")
        if not bandwidth > 0.0:
            raise ConfigError(f"bandwidth must be positive, got {bandwidth}")
        self.ts = ts
        self.replicates = replicates
        self.bandwidth = bandwidth
        self.seed = seed
        self.family = family
        self.quadrature = quadrature


class BoundConfig:
    def __init__(self, *,
                 alpha: float = 2.0,
                 beta: float = 1.0,
                 precondition_grid: int = PRECONDITION_GRID,
                 ratio_grid: int = RATIO_GRID,
                 step_fraction: float = STEP_FRACTION,
                 lower_density: float | None = None) -> None:
        if precondition_grid < 2 or ratio_grid < 2:
            raise ConfigError("bound grids need at least 2 points")
        if not 0.0 < step_fraction < 1e-2:
            raise ConfigError(f"step fraction must lie in (0, 0.01), got {step_fraction}")
        if not alpha > 0.0 or beta < 0.0:
            raise ConfigError(f"bound constants need alpha > 0 and beta >= 0, got alpha={alpha}, beta={beta}")
        if lower_density is not None and not lower_density > 0.0:
            raise ConfigError(f"density floor must be positive, got {lower_density}")
        self.alpha = alpha
        self.beta = beta
        self.precondition_grid = precondition_grid
        self.ratio_grid = ratio_grid
        self.step_fraction = step_fraction
        self.lower_density = lower_density


def _parse_float(text: str, what: str) -> float:
    try:
        value = float(text)
    except ValueError as e:
        raise ConfigError(f"{what}: '{text}' is not a number") from e
    if not math.isfinite(value):
        raise ConfigError(f"{what}: '{text}' is not finite")
    return value


def _parse_params(body: str, what: str) -> dict[str, float]:
    params: dict[str, float] = {}
    for item in body.split(","):
        item = item.strip()
        if not item:
            continue
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"{what}: expected key=value, got '{item}'")
        params[key.strip()] = _parse_float(value.strip(), what)
    return params


def parse_distribution(spec: str) -> Distribution:
    """'family:key=value,...', e.g. 'exp:lambda=0.7' or 'uniform:a=0,b=1'."""
    family, _, body = spec.strip().partition(":")
    params = _parse_params(body, f"distribution '{spec}'")
    try:
        return make_distribution(family.strip(), params)
    except DistributionError as e:
        raise ConfigError(f"invalid distribution '{spec}': {e}") from e


def parse_weight(spec: str) -> WeightSpec:
    """'y', '1', 'y2', 'affine:a=..,b=..' or 'cubic:alpha=..,beta=..'."""
    name, _, body = spec.strip().partition(":")
    match name:
        case "y":
            return IDENTITY
        case "1":
            return UNIT
        case "y2":
            return SQUARE
        case "affine":
            params = _parse_params(body, f"weight '{spec}'")
            if set(params) != {"a", "b"}:
                raise ConfigError(f"weight '{spec}' needs exactly a and b")
            return affine(params["a"], params["b"])
        case "cubic":
            params = _parse_params(body, f"weight '{spec}'")
            if set(params) != {"alpha", "beta"}:
                raise ConfigError(f"weight '{spec}' needs exactly alpha and beta")
            return cubic_affine(params["alpha"], params["beta"])
    raise ConfigError(f"unknown weight '{spec}'")


def parse_grid(spec: str) -> list[float]:
    """'start:stop:step' (stop included), 'x,y,z' or a single value."""
    text = spec.strip()
    if not text:
        raise ConfigError("t-grid is empty")
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid '{spec}' must be start:stop:step")
        start, stop, step = (_parse_float(p, f"grid '{spec}'") for p in parts)
        if not step > 0.0 or stop < start:
            raise ConfigError(f"grid '{spec}' needs a positive step and stop >= start")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        values = np.round(start + step * np.arange(count), GRID_DIGITS)
        return [float(v) for v in values]
    values = [_parse_float(p, f"grid '{spec}'") for p in text.split(",") if p.strip()]
    if not values:
        raise ConfigError("t-grid is empty")
    return values


def parse_sizes(spec: str) -> list[int]:
    sizes = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            sizes.append(int(part))
        except ValueError as e:
            raise ConfigError(f"sample size '{part}' is not an integer") from e
    if not sizes:
        raise ConfigError("sample-size list is empty")
    if any(n < 2 for n in sizes):
        raise ConfigError("sample sizes must be at least 2")
    return sizes


def parse_distortion(spec: str) -> DistortionFunction:
    """A built-in system name or 'poly:c0,c1,...' in increasing degree."""
    text = spec.strip()
    if text in BUILTIN_DISTORTIONS:
        return BUILTIN_DISTORTIONS[text]
    name, _, body = text.partition(":")
    if name != "poly":
        raise ConfigError(f"unknown system '{spec}', expected one of {', '.join(BUILTIN_DISTORTIONS)} or poly:...")
    coefficients = [_parse_float(c, f"system '{spec}'") for c in body.split(",") if c.strip()]
    if not coefficients:
        raise ConfigError(f"system '{spec}' has no coefficients")
    try:
        return DistortionFunction.polynomial(coefficients)
    except DistortionError as e:
        raise ConfigError(f"invalid system '{spec}': {e}") from e


def parse_bandwidth(spec: str) -> float | None:
    """'silverman' selects the rule of thumb per sample."""
    if spec.strip().lower() == "silverman":
        return None
    value = _parse_float(spec, "bandwidth")
    if not value > 0.0:
        raise ConfigError(f"bandwidth must be positive, got {value}")
    return value


def load_config_file(path: str) -> dict[str, str]:
    """Flat key=value file; keys are long option names, dashes and underscores alike."""
    if not os.path.isfile(path):
        raise ConfigError(f"config file {path} does not exist")
    values = dotenv_values(path)
    config = {}
    for key, value in values.items():
        if value is None:
            logger.warning(f"config key '{key}' in {path} has no value, ignored")
            continue
        config[key.strip().lower().replace("-", "_")] = value
    logger.debug(f"loaded {len(config)} keys from {path}")
    return config
