import logging
import math
from enum import Enum
from typing import Any, Callable, override

import numpy as np

from .distributions import Distribution, Family, FloatArray
from .measures import (
    Window, conditional, conditional_mean_past, conditional_mean_residual, past_window,
    residual_window, variance_past_lifetime, variance_residual_lifetime, weighted_past_entropy,
    weighted_residual_entropy, wpde, wpve, wrve,
)
from .model import VarentropyError
from .quadrature import DEFAULT_REL_TOL
from .weight import GRID_SIZE, affine, window_grid

logger = logging.getLogger("transforms")

INVERSE_TOLERANCE = 1e-9

ArrayFn = Callable[[Any], Any]


class TransformError(VarentropyError):
    pass


class Direction(Enum):
    INCREASING = "increasing"
    DECREASING = "decreasing"


class MonotoneMap:
    """A strictly monotone map psi with caller-supplied derivative and inverse.

    All three callables must accept floats and numpy arrays.
    """

    def __init__(self, fn: ArrayFn, derivative: ArrayFn, inverse: ArrayFn, *,
                 direction: Direction, name: str) -> None:
        self.fn = fn
        self.derivative = derivative
        self.inverse = inverse
        self.direction = direction
        self.name = name

    def __call__(self, y: float) -> float:
        return float(self.fn(y))

    @property
    def increasing(self) -> bool:
        return self.direction is Direction.INCREASING

    def image(self, lo: float, hi: float) -> tuple[float, float]:
        with np.errstate(all="ignore"):
            ends = (float(self.fn(np.float64(lo))), float(self.fn(np.float64(hi))))
        return ends if self.increasing else (ends[1], ends[0])

    def validate(self, lo: float, hi: float) -> None:
        grid = window_grid(lo, hi, GRID_SIZE)
        with np.errstate(all="ignore"):
            slope = np.asarray(self.derivative(grid), dtype=float)
            back = np.asarray(self.inverse(self.fn(grid)), dtype=float)
        sign = 1.0 if self.increasing else -1.0
        bad_slope = ~(sign * slope > 0.0)
        if np.any(bad_slope):
            where = float(grid[np.argmax(bad_slope)])
            raise TransformError(f"map '{self.name}' is not {self.direction.value} at y={where:g}")
        mismatch = np.abs(back - grid) > INVERSE_TOLERANCE * np.maximum(1.0, np.abs(grid))
        if np.any(mismatch):
            where = float(grid[np.argmax(mismatch)])
            raise TransformError(f"inverse of map '{self.name}' does not round-trip at y={where:g}")

    @classmethod
    def identity(cls) -> "MonotoneMap":
        return cls(lambda y: y, lambda y: np.ones_like(np.asarray(y, dtype=float)), lambda x: x,
                   direction=Direction.INCREASING, name="y")

    @classmethod
    def affine(cls, a: float, b: float) -> "MonotoneMap":
        if a == 0.0:
            raise TransformError("affine map needs a non-zero slope")
        direction = Direction.INCREASING if a > 0.0 else Direction.DECREASING
        return cls(lambda y: a * y + b, lambda y: np.full_like(np.asarray(y, dtype=float), a),
                   lambda x: (x - b) / a, direction=direction, name=f"{a:g}*y+{b:g}")

    @classmethod
    def square(cls) -> "MonotoneMap":
        return cls(np.square, lambda y: 2.0 * np.asarray(y, dtype=float), np.sqrt,
                   direction=Direction.INCREASING, name="y^2")

    @classmethod
    def reciprocal(cls) -> "MonotoneMap":
        return cls(lambda y: np.divide(1.0, y), lambda y: -np.divide(1.0, np.square(y)),
                   lambda x: np.divide(1.0, x), direction=Direction.DECREASING, name="1/y")

    def __repr__(self) -> str:
        return f"MonotoneMap({self.name}, {self.direction.value})"


class TransformedDistribution(Distribution):
    """The law of X = psi(Y) for a monotone psi."""
    family = Family.TRANSFORMED

    def __init__(self, base: Distribution, psi: MonotoneMap) -> None:
        psi.validate(base.lo, base.hi)
        lo, hi = psi.image(base.lo, base.hi)
        super().__init__(lo=lo, hi=hi, params=base.params)
        self.base = base
        self.psi = psi

    @override
    def _logpdf(self, x: FloatArray) -> FloatArray:
        y = np.asarray(self.psi.inverse(x), dtype=float)
        slope = np.abs(np.asarray(self.psi.derivative(y), dtype=float))
        return np.asarray(self.base.logpdf(y), dtype=float) - np.log(slope)

    @override
    def _cdf(self, x: FloatArray) -> FloatArray:
        y = np.asarray(self.psi.inverse(x), dtype=float)
        return np.asarray(self.base.cdf(y) if self.psi.increasing else self.base.sf(y), dtype=float)

    @override
    def _sf(self, x: FloatArray) -> FloatArray:
        y = np.asarray(self.psi.inverse(x), dtype=float)
        return np.asarray(self.base.sf(y) if self.psi.increasing else self.base.cdf(y), dtype=float)

    @override
    def _quantile(self, p: FloatArray) -> FloatArray:
        q = p if self.psi.increasing else 1.0 - p
        return np.asarray(self.psi.fn(np.asarray(self.base.quantile(q), dtype=float)), dtype=float)

    @override
    def describe(self) -> str:
        return f"{self.family.value}:{self.psi.name}({self.base.describe()})"


def _source_window(d_y: Distribution, psi: MonotoneMap, t: float) -> tuple[float, Window]:
    s = float(psi.inverse(t))
    window = past_window(d_y, s) if psi.increasing else residual_window(d_y, s)
    psi.validate(window.lo, window.hi)
    return s, window


def wpve_via_transform(d_y: Distribution, psi: MonotoneMap, t: float,
                       rel_tol: float = DEFAULT_REL_TOL) -> float:
    """WPVE of X = psi(Y) at t from moments taken under Y.

    With s = psi^-1(t), {X <= t} is {Y <= s} for increasing psi and {Y > s} for
    decreasing psi. The information of X splits into A = -psi(Y) log(g(Y)/mass)
    and gamma = psi(Y) log|psi'(Y)|, so the result is Var A + Var gamma + 2 Cov(A, gamma).
    """
    _, window = _source_window(d_y, psi, t)
    log_mass = window.log_mass

    def part_a(y: float, lp: float) -> float:
        return -psi(y) * (lp - log_mass)

    def part_gamma(y: float) -> float:
        return psi(y) * math.log(abs(float(psi.derivative(y))))

    mean_a = conditional(d_y, part_a, window, rel_tol).value
    mean_g = conditional(d_y, lambda y, lp: part_gamma(y), window, rel_tol).value
    var_a = conditional(d_y, lambda y, lp: (part_a(y, lp) - mean_a) ** 2, window, rel_tol).value
    var_g = conditional(d_y, lambda y, lp: (part_gamma(y) - mean_g) ** 2, window, rel_tol).value
    cov = conditional(d_y, lambda y, lp: (part_a(y, lp) - mean_a) * (part_gamma(y) - mean_g),
                      window, rel_tol).value
    return var_a + var_g + 2.0 * cov


def _check_affine(a: float, b: float) -> None:
    if not a > 0.0:
        raise TransformError(f"affine rules need a > 0, got {a}")
    if b < 0.0:
        raise TransformError(f"affine rules need b >= 0, got {b}")


def wpve_affine(d_y: Distribution, a: float, b: float, t: float, rel_tol: float = DEFAULT_REL_TOL) -> float:
    """WPVE of aY + b from past measures of Y at s = (t - b)/a with weight ay + b."""
    _check_affine(a, b)
    s = (t - b) / a
    omega = affine(a, b)
    log_a = math.log(a)
    base = wpve(d_y, omega, s, rel_tol).value
    if log_a == 0.0:
        return base
    spread = a * a * variance_past_lifetime(d_y, s, rel_tol)
    cross = (weighted_past_entropy(d_y, omega.squared(), s, rel_tol).value
             - weighted_past_entropy(d_y, omega, s, rel_tol).value
             * (a * conditional_mean_past(d_y, s, rel_tol) + b))
    return base + log_a ** 2 * spread + 2.0 * log_a * cross


def wpdve_affine(d_y: Distribution, a: float, b: float, t: float, rel_tol: float = DEFAULT_REL_TOL) -> float:
    """WPDVE of aY + b: the past rule plus its mirror on {Y > s}."""
    _check_affine(a, b)
    s = (t - b) / a
    omega = affine(a, b)
    log_a = math.log(a)
    residual = wrve(d_y, omega, s, rel_tol).value
    if log_a != 0.0:
        spread = a * a * variance_residual_lifetime(d_y, s, rel_tol)
        cross = (weighted_residual_entropy(d_y, omega.squared(), s, rel_tol).value
                 - weighted_residual_entropy(d_y, omega, s, rel_tol).value
                 * (a * conditional_mean_residual(d_y, s, rel_tol) + b))
        residual += log_a ** 2 * spread + 2.0 * log_a * cross
    return wpve_affine(d_y, a, b, t, rel_tol) + residual


def wpde_affine(d_y: Distribution, a: float, b: float, t: float, rel_tol: float = DEFAULT_REL_TOL) -> float:
    """WPDE of aY + b: WPDE of Y with weight ay + b at s, shifted by log a times both conditional means."""
    _check_affine(a, b)
    s = (t - b) / a
    base = wpde(d_y, affine(a, b), s, rel_tol).value
    means = (a * conditional_mean_past(d_y, s, rel_tol) + b) + (a * conditional_mean_residual(d_y, s, rel_tol) + b)
    return base + math.log(a) * means
