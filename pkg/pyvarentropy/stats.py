import math
from dataclasses import dataclass, field

import numpy as np


@dataclass
class ReplicateStats:
    attempted_count: int = 0
    succeeded_count: int = 0
    failed_count: int = 0
    failures: dict[int, str] = field(default_factory=dict)

    def record_success(self) -> None:
        self.attempted_count += 1
        self.succeeded_count += 1

    def record_failure(self, replicate: int, reason: str) -> None:
        self.attempted_count += 1
        self.failed_count += 1
        self.failures[replicate] = reason

    def merge(self, other: "ReplicateStats") -> None:
        self.attempted_count += other.attempted_count
        self.succeeded_count += other.succeeded_count
        self.failed_count += other.failed_count
        self.failures.update(other.failures)


@dataclass(frozen=True)
class ErrorSummary:
    """Bias and mean squared error of replicate estimates against a true value.

    `ab` is |mean(estimate) - truth|, `ab_alt` the mean absolute error.
    """
    ab: float
    ab_alt: float
    mse: float
    mean: float


def summarize(estimates: list[float], truth: float) -> ErrorSummary:
    if not estimates:
        return ErrorSummary(ab=math.nan, ab_alt=math.nan, mse=math.nan, mean=math.nan)
    values = np.asarray(estimates, dtype=float)
    errors = values - truth
    mean = float(np.mean(values))
    return ErrorSummary(
        ab=abs(float(np.mean(errors))),
        ab_alt=float(np.mean(np.abs(errors))),
        mse=float(np.mean(errors * errors)),
        mean=mean,
    )
