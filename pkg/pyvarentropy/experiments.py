import logging
from typing import Callable, Sequence

import numpy as np
import pandas as pd

from .distributions import Distribution, Exponential, FloatArray
from .estimation import (
    KernelEstimator, silverman_bandwidth, wpdve_nonparametric, wpdve_parametric_exponential,
    wpve_nonparametric, wpve_parametric_exponential,
)
from .fitting import FitResult, check_sample, mle_fit
from .measures import evaluate, wpve
from .model import EstimateMethod, MeasureKind, VarentropyError
from .quadrature import DEFAULT_REL_TOL
from .report import ExperimentReport
from .stats import ReplicateStats, summarize
from .weight import IDENTITY, WeightSpec

logger = logging.getLogger("experiments")

SILVERMAN = "silverman"
MODEL_FAMILIES = ("gumbel2", "weibull2", "exp")
REPORT_COLUMNS = ["t", "n", "true_value", "ab", "ab_alt", "mse", "mean_estimate", "succeeded", "failed"]

Estimator = Callable[[FloatArray, float], float]


class ExperimentError(VarentropyError):
    pass


def replicate_seed(master: int, replicate: int) -> np.random.SeedSequence:
    """Seed of replicate i, independent of how many replicates run or in which order."""
    return np.random.SeedSequence(master, spawn_key=(replicate,))


def _check_grid(ts: Sequence[float], ns: Sequence[int], reps: int) -> None:
    if reps < 2:
        raise ExperimentError(f"need at least 2 replicates, got {reps}")
    if not ts:
        raise ExperimentError("t-grid is empty")
    if not ns:
        raise ExperimentError("sample-size grid is empty")
    if any(not t > 0.0 for t in ts):
        raise ExperimentError("every t must be positive")
    if any(n < 2 for n in ns):
        raise ExperimentError("every sample size must be at least 2")


def _bandwidth_rule(bandwidth: float | None) -> str:
    return SILVERMAN if bandwidth is None else f"{bandwidth:g}"


def _kernel(sample: FloatArray, bandwidth: float | None) -> KernelEstimator:
    b = silverman_bandwidth(sample) if bandwidth is None else bandwidth
    return KernelEstimator(sample, b)


def _estimator(kind: MeasureKind, method: EstimateMethod, bandwidth: float | None, rel_tol: float) -> Estimator:
    match kind, method:
        case MeasureKind.WPVE, EstimateMethod.NONPARAMETRIC:
            return lambda sample, t: wpve_nonparametric(_kernel(sample, bandwidth), t, rel_tol).value
        case MeasureKind.WPVE, EstimateMethod.PARAMETRIC:
            return lambda sample, t: wpve_parametric_exponential(sample, t, rel_tol).value
        case MeasureKind.WPDVE, EstimateMethod.NONPARAMETRIC:
            return lambda sample, t: wpdve_nonparametric(_kernel(sample, bandwidth), t, rel_tol).value
        case MeasureKind.WPDVE, EstimateMethod.PARAMETRIC:
            return lambda sample, t: wpdve_parametric_exponential(sample, t, rel_tol).value
    raise ExperimentError(f"no estimator for {kind.value} with method {method.value}")


def _run_cell(estimator: Estimator, samples: list[FloatArray], t: float, n: int,
              truth: float) -> tuple[dict[str, float | int], ReplicateStats]:
    logger.info(f"cell t={t:g} n={n}: {len(samples)} replicates")
    stats = ReplicateStats()
    estimates: list[float] = []
    for i, sample in enumerate(samples):
        try:
            estimates.append(estimator(sample, t))
        except VarentropyError as e:
            logger.warning(f"replicate {i} at t={t:g} n={n} failed: {e}")
            stats.record_failure(i, str(e))
            continue
        stats.record_success()
    summary = summarize(estimates, truth)
    logger.info(f"cell t={t:g} n={n} done: mse={summary.mse:.4g}, {stats.failed_count} failed")
    row: dict[str, float | int] = {
        "t": t,
        "n": n,
        "true_value": truth,
        "ab": summary.ab,
        "ab_alt": summary.ab_alt,
        "mse": summary.mse,
        "mean_estimate": summary.mean,
        "succeeded": stats.succeeded_count,
        "failed": stats.failed_count,
    }
    return row, stats


def _simulate(kind: MeasureKind, lam: float, ts: Sequence[float], ns: Sequence[int], reps: int, seed: int,
              method: EstimateMethod, bandwidth: float | None, rel_tol: float) -> ExperimentReport:
    _check_grid(ts, ns, reps)
    d = Exponential(lam)
    estimator = _estimator(kind, method, bandwidth, rel_tol)
    # every sample size reads a prefix of the same replicate stream
    streams = [d.sample(max(ns), replicate_seed(seed, i)) for i in range(reps)]
    total = ReplicateStats()
    rows = []
    for t in ts:
        truth = evaluate(kind, d, IDENTITY, t, rel_tol=rel_tol).value
        for n in ns:
            row, stats = _run_cell(estimator, [stream[:n] for stream in streams], t, n, truth)
            rows.append(row)
            total.merge(stats)
    logger.info(f"{kind.value} simulation finished: {total.succeeded_count}/{total.attempted_count} "
                f"replicates succeeded")
    metadata = {
        "measure": kind.value,
        "distribution": d.describe(),
        "method": method.value,
        "bandwidth_rule": _bandwidth_rule(bandwidth) if method is EstimateMethod.NONPARAMETRIC else "none",
        "replications": reps,
        "seed": seed,
    }
    return ExperimentReport(rows=rows, metadata=metadata, columns=list(REPORT_COLUMNS))


def simulate_wpve(lam: float, ts: Sequence[float], ns: Sequence[int], reps: int, seed: int,
                  method: EstimateMethod, *, bandwidth: float | None = None,
                  rel_tol: float = DEFAULT_REL_TOL) -> ExperimentReport:
    """Monte-Carlo bias and MSE of the WPVE estimators on exponential samples.

    `bandwidth=None` picks Silverman's rule per replicate for the kernel method.
    """
    return _simulate(MeasureKind.WPVE, lam, ts, ns, reps, seed, method, bandwidth, rel_tol)


def simulate_wpdve(lam: float, ts: Sequence[float], ns: Sequence[int], reps: int, seed: int,
                   method: EstimateMethod, *, bandwidth: float | None = None,
                   rel_tol: float = DEFAULT_REL_TOL) -> ExperimentReport:
    return _simulate(MeasureKind.WPDVE, lam, ts, ns, reps, seed, method, bandwidth, rel_tol)


def bootstrap_wpve(data: FloatArray | list[float], fitted: Distribution, b: int, bandwidth: float,
                   ts: Sequence[float], seed: int, rel_tol: float = DEFAULT_REL_TOL) -> ExperimentReport:
    """Kernel WPVE on resamples of the data against the WPVE of the fitted law."""
    sample = check_sample(data)
    _check_grid(ts, [sample.size], b)
    resamples = [np.random.default_rng(replicate_seed(seed, i)).choice(sample, size=sample.size, replace=True)
                 for i in range(b)]
    estimator = _estimator(MeasureKind.WPVE, EstimateMethod.NONPARAMETRIC, bandwidth, rel_tol)
    total = ReplicateStats()
    rows = []
    for t in ts:
        truth = wpve(fitted, IDENTITY, t, rel_tol).value
        row, stats = _run_cell(estimator, resamples, t, sample.size, truth)
        rows.append(row)
        total.merge(stats)
    logger.info(f"bootstrap finished: {total.succeeded_count}/{total.attempted_count} replicates succeeded")
    metadata = {
        "measure": MeasureKind.WPVE.value,
        "distribution": fitted.describe(),
        "method": EstimateMethod.NONPARAMETRIC.value,
        "bandwidth_rule": _bandwidth_rule(bandwidth),
        "replications": b,
        "seed": seed,
    }
    return ExperimentReport(rows=rows, metadata=metadata, columns=list(REPORT_COLUMNS))


def model_selection(data: FloatArray | list[float], families: Sequence[str] = MODEL_FAMILIES) -> list[FitResult]:
    results = [mle_fit(family, data) for family in families]
    return sorted(results, key=lambda r: r.aic)


def fit_table(results: list[FitResult]) -> pd.DataFrame:
    return pd.DataFrame([r.as_row() for r in results])


def curve(d: Distribution, weight: WeightSpec, kind: MeasureKind, ts: Sequence[float], *, alpha: float = 2.0,
          rel_tol: float = DEFAULT_REL_TOL) -> pd.DataFrame:
    if not ts:
        raise ExperimentError("t-grid is empty")
    rows = []
    for t in ts:
        result = evaluate(kind, d, weight, t, alpha=alpha, rel_tol=rel_tol)
        rows.append({"t": t, "value": result.value, "error_estimate": result.abs_error_estimate})
    return pd.DataFrame(rows, columns=["t", "value", "error_estimate"])
