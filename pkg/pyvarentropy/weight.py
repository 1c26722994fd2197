import logging
import math
from typing import Any, Callable

import numpy as np

from .model import VarentropyError

logger = logging.getLogger("weight")

GRID_SIZE = 64


class WeightError(VarentropyError):
    pass


class WeightSpec:
    """A positive weight function omega(y).

    `fn` must accept floats and numpy arrays alike. Positivity can only be
    checked against a concrete window, so measures call `check_positive` with
    the integration range before using the weight.
    """

    def __init__(self, fn: Callable[[Any], Any], *, name: str) -> None:
        self.fn = fn
        self.name = name

    def __call__(self, y: float) -> float:
        return float(self.fn(y))

    def values(self, y: np.ndarray) -> np.ndarray:
        return np.broadcast_to(np.asarray(self.fn(y), dtype=float), y.shape)

    def check_positive(self, lo: float, hi: float) -> None:
        grid = window_grid(lo, hi, GRID_SIZE)
        with np.errstate(all="ignore"):
            values = self.values(grid)
        bad = ~(np.isfinite(values) & (values > 0.0))
        if np.any(bad):
            where = float(grid[np.argmax(bad)])
            raise WeightError(f"weight '{self.name}' is not positive at y={where:g} in ({lo:g}, {hi:g})")

    def squared(self) -> "WeightSpec":
        fn = self.fn
        return WeightSpec(lambda y: np.square(fn(y)), name=f"({self.name})^2")

    def __repr__(self) -> str:
        return f"WeightSpec({self.name})"


def window_grid(lo: float, hi: float, size: int) -> np.ndarray:
    """Interior points of (lo, hi); a semi-infinite window gets a log-spaced grid."""
    if math.isinf(hi):
        return lo + np.logspace(-6.0, 6.0, size)
    return np.linspace(lo, hi, size + 2)[1:-1]


IDENTITY = WeightSpec(lambda y: y, name="y")
UNIT = WeightSpec(lambda y: np.ones_like(y, dtype=float) if isinstance(y, np.ndarray) else 1.0, name="1")
SQUARE = WeightSpec(lambda y: y * y, name="y2")


def affine(a: float, b: float) -> WeightSpec:
    return WeightSpec(lambda y: a * y + b, name=f"affine:a={a:g},b={b:g}")


def cubic_affine(alpha: float, beta: float) -> WeightSpec:
    return WeightSpec(lambda y: alpha * y ** 3 + beta * y * y, name=f"cubic:alpha={alpha:g},beta={beta:g}")
