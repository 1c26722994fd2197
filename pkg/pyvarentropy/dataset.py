import logging
from dataclasses import dataclass

import numpy as np

from .distributions import FloatArray
from .fitting import DataError

logger = logging.getLogger("dataset")

# average daily wind speeds (m/s), Elanora Heights, November 2007
WIND_SPEEDS = (
    0.5833, 0.6667, 0.6944, 0.7222, 0.7500, 0.7778, 0.8056, 0.8056, 0.8611,
    0.8889, 0.9167, 1.0000, 1.0278, 1.0278, 1.1111, 1.1111, 1.1111, 1.1667,
    1.1667, 1.1944, 1.2778, 1.2778, 1.3056, 1.3333, 1.3333, 1.3611, 1.4444,
    2.1111, 2.1389, 2.7778,
)


@dataclass(frozen=True)
class WindSpeedDataset:
    values: tuple[float, ...]

    @property
    def n(self) -> int:
        return len(self.values)

    def as_array(self) -> FloatArray:
        return np.asarray(self.values, dtype=float)


def wind_speed_dataset() -> WindSpeedDataset:
    return WindSpeedDataset(WIND_SPEEDS)


def load_sample(path: str) -> FloatArray:
    """Newline-delimited decimals; blank lines and '#' comments are skipped."""
    try:
        data = np.loadtxt(path, dtype=float, comments="#", ndmin=1)
    except (OSError, ValueError) as e:
        raise DataError(f"cannot read sample from {path}: {e}") from e
    if data.size == 0:
        raise DataError(f"sample file {path} is empty")
    logger.debug(f"loaded {data.size} observations from {path}")
    return data.ravel()
