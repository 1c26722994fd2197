import logging
import os
import sys
from typing import Any

import click
import pandas as pd
from dotenv import load_dotenv

from .bounds import (
    monotonicity_check_prop61, system_bound_prop62, system_bound_prop63, system_bound_prop64,
    wpdve_lower_max, wpdve_lower_variance, wpdve_upper_psi1, wpve_lower_theorem22, wpve_upper_theorem21,
)
from .coherent import compare_systems
from .config import (
    BootstrapConfig, BoundConfig, ConfigError, QuadratureConfig, SimulationConfig, load_config_file,
    parse_bandwidth, parse_distortion, parse_distribution, parse_grid, parse_sizes, parse_weight,
)
from .dataset import load_sample, wind_speed_dataset
from .distributions import FloatArray
from .experiments import bootstrap_wpve, curve, fit_table, model_selection, simulate_wpdve, simulate_wpve
from .fitting import mle_fit
from .model import BoundReport, EstimateMethod, MeasureKind, VarentropyError
from .report import frame_to_csv, write_text

logger = logging.getLogger("main")

LOG_LEVEL_ENV = "PYVARENTROPY_LOG_LEVEL"
# config-file keys holding several values, separated by ';'
MULTI_VALUE_KEYS = frozenset({"q"})
BOUND_COLUMNS = ["name", "side", "t", "bound", "exact", "slack", "satisfied", "precondition"]


def configure_logging(verbose: bool) -> None:
    load_dotenv()
    level = "DEBUG" if verbose else os.environ.get(LOG_LEVEL_ENV, "WARNING").upper()
    if level not in logging.getLevelNamesMapping():
        raise ConfigError(f"{LOG_LEVEL_ENV}={level} is not a logging level")
    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[
            # standard output carries the CSV
            logging.StreamHandler(sys.stderr),
        ],
        force=True,
    )


class VarentropyGroup(click.Group):
    """Maps configuration errors to usage errors and numerical failures to exit status 1."""

    def invoke(self, ctx: click.Context) -> Any:
        try:
            return super().invoke(ctx)
        except ConfigError as e:
            raise click.UsageError(str(e), ctx) from e
        except VarentropyError as e:
            click.echo(f"error: {e}", err=True)
            ctx.exit(1)


def _emit(frame: pd.DataFrame, metadata: dict[str, Any], output: str | None) -> None:
    text = frame_to_csv(frame, metadata)
    if output:
        write_text(output, text)
    else:
        click.echo(text, nl=False)


def _load_data(path: str | None) -> FloatArray:
    if path:
        return load_sample(path)
    return wind_speed_dataset().as_array()


def _default_map(values: dict[str, Any]) -> dict[str, dict[str, Any]]:
    # file keys are long option names; click looks defaults up by parameter name
    defaults: dict[str, dict[str, Any]] = {}
    for name, command in main.commands.items():
        defaults[name] = {}
        for param in command.params:
            for opt in param.opts:
                key = opt.lstrip("-").replace("-", "_")
                if opt.startswith("--") and param.name and key in values:
                    defaults[name][param.name] = values[key]
    return defaults


@click.group(cls=VarentropyGroup)
@click.option("--verbose", "-v", is_flag=True, help="Log at DEBUG level on standard error.")
@click.option("--config", "config_path", type=click.Path(dir_okay=False),
              help="Flat key=value file supplying defaults for any long option.")
@click.pass_context
def main(ctx: click.Context, verbose: bool, config_path: str | None) -> None:
    """Weighted past varentropy and related dynamic information measures."""
    configure_logging(verbose)
    if config_path:
        values: dict[str, Any] = dict(load_config_file(config_path))
        for key in MULTI_VALUE_KEYS & values.keys():
            values[key] = [part for part in values[key].split(";") if part.strip()]
        ctx.default_map = _default_map(values)


@main.command()
@click.option("--dist", required=True, help="Distribution, e.g. exp:lambda=0.7.")
@click.option("--weight", default="y", show_default=True, help="Weight: y, 1, y2, affine:a=..,b=.., cubic:alpha=..,beta=..")
@click.option("--kind", type=click.Choice([k.value for k in MeasureKind]), default=MeasureKind.WPVE.value,
              show_default=True)
@click.option("--t", "t_grid", required=True, help="start:stop:step, a comma list or a single value.")
@click.option("--alpha", type=float, default=2.0, show_default=True, help="Renyi order for wpre.")
@click.option("--rel-tol", type=float, default=QuadratureConfig().rel_tol, show_default=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False), help="CSV file; standard output by default.")
def measure(dist: str, weight: str, kind: str, t_grid: str, alpha: float, rel_tol: float,
            output: str | None) -> None:
    """Evaluate one measure over a grid of t."""
    d = parse_distribution(dist)
    w = parse_weight(weight)
    quadrature = QuadratureConfig(rel_tol=rel_tol)
    frame = curve(d, w, MeasureKind(kind), parse_grid(t_grid), alpha=alpha, rel_tol=quadrature.rel_tol)
    _emit(frame, {"distribution": d.describe(), "weight": w.name, "kind": kind}, output)


@main.command()
@click.option("--measure", "measure_kind", type=click.Choice([MeasureKind.WPVE.value, MeasureKind.WPDVE.value]),
              default=MeasureKind.WPVE.value, show_default=True)
@click.option("--lambda", "lam", type=float, default=0.7, show_default=True, help="Exponential rate.")
@click.option("--t", "t_grid", required=True)
@click.option("--ns", default="100,200", show_default=True, help="Comma list of sample sizes.")
@click.option("--reps", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=42, show_default=True)
@click.option("--method", type=click.Choice([m.value for m in EstimateMethod]),
              default=EstimateMethod.NONPARAMETRIC.value, show_default=True)
@click.option("--bandwidth", default="silverman", show_default=True, help="Kernel bandwidth or 'silverman'.")
@click.option("--rel-tol", type=float, default=QuadratureConfig().rel_tol, show_default=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False))
def simulate(measure_kind: str, lam: float, t_grid: str, ns: str, reps: int, seed: int, method: str,
             bandwidth: str, rel_tol: float, output: str | None) -> None:
    """Monte-Carlo bias and MSE of the WPVE/WPDVE estimators on exponential samples."""
    config = SimulationConfig(lam=lam, ts=parse_grid(t_grid), ns=parse_sizes(ns), reps=reps, seed=seed,
                              method=EstimateMethod(method), measure=MeasureKind(measure_kind),
                              bandwidth=parse_bandwidth(bandwidth), quadrature=QuadratureConfig(rel_tol=rel_tol))
    run = simulate_wpve if config.measure is MeasureKind.WPVE else simulate_wpdve
    report = run(config.lam, config.ts, config.ns, config.reps, config.seed, config.method,
                 bandwidth=config.bandwidth, rel_tol=config.quadrature.rel_tol)
    _emit(report.to_frame(), report.metadata, output)


@main.command()
@click.option("--data", type=click.Path(exists=True, dir_okay=False),
              help="Newline-delimited sample; the wind-speed data by default.")
@click.option("--family", type=click.Choice(["gumbel2", "weibull2", "exp"]), default="gumbel2", show_default=True,
              help="Law fitted to the data that supplies the true values.")
@click.option("--t", "t_grid", default="1.0,1.2,1.5,2.0,3.0", show_default=True)
@click.option("--replicates", "-B", type=int, default=500, show_default=True)
@click.option("--bandwidth", type=float, default=0.35, show_default=True)
@click.option("--seed", type=int, default=42, show_default=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False))
def bootstrap(data: str | None, family: str, t_grid: str, replicates: int, bandwidth: float, seed: int,
              output: str | None) -> None:
    """Bootstrap the kernel WPVE estimate against the fitted law."""
    config = BootstrapConfig(ts=parse_grid(t_grid), replicates=replicates, bandwidth=bandwidth, seed=seed,
                             family=family)
    sample = _load_data(data)
    fitted = mle_fit(config.family, sample)
    report = bootstrap_wpve(sample, fitted.distribution, config.replicates, config.bandwidth, config.ts,
                            config.seed, config.quadrature.rel_tol)
    _emit(report.to_frame(), report.metadata, output)


@main.command()
@click.option("--data", type=click.Path(exists=True, dir_okay=False))
@click.option("--families", default="gumbel2,weibull2,exp", show_default=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False))
def fit(data: str | None, families: str, output: str | None) -> None:
    """Fit the candidate laws by maximum likelihood, best AIC first."""
    names = tuple(f.strip() for f in families.split(",") if f.strip())
    if not names:
        raise ConfigError("no families to fit")
    sample = _load_data(data)
    _emit(fit_table(model_selection(sample, names)), {"n": sample.size}, output)


@main.command()
@click.option("--dist", default="power:beta=0.2", show_default=True, help="Component distribution.")
@click.option("--t", "t", type=float, default=0.5, show_default=True)
@click.option("--alpha", type=float, default=1.8, show_default=True, help="Renyi order.")
@click.option("--q", "systems", multiple=True, default=("series", "2-out-of-3", "parallel"), show_default=True,
              help="System name or poly:c0,c1,...; repeatable.")
@click.option("--output", "-o", type=click.Path(dir_okay=False))
def system(dist: str, t: float, alpha: float, systems: tuple[str, ...], output: str | None) -> None:
    """WPVE, past VE, weighted past Renyi and Shannon entropies of coherent systems."""
    component = parse_distribution(dist)
    distortions = [parse_distortion(q) for q in systems]
    frame = compare_systems(component, t, alpha, distortions)
    _emit(frame, {"component": component.describe(), "t": t, "alpha": alpha}, output)


def _bound_rows(reports: list[BoundReport]) -> pd.DataFrame:
    rows = [{
        "name": r.name,
        "side": r.side.value,
        "t": r.t,
        "bound": r.bound,
        "exact": r.exact,
        "slack": r.slack,
        "satisfied": r.satisfied,
        "precondition": r.precondition.value,
    } for r in reports]
    return pd.DataFrame(rows, columns=BOUND_COLUMNS)


@main.command("bound-check")
@click.option("--dist", required=True)
@click.option("--t", "t_grid", required=True)
@click.option("--weight", default="y", show_default=True, help="Weight of the max(WPVE, WRVE) bound.")
@click.option("--alpha", type=float, default=2.0, show_default=True, help="alpha of the exp(-(alpha*y+beta)) floor.")
@click.option("--beta", type=float, default=1.0, show_default=True)
@click.option("--q", "systems", multiple=True, help="Also check the system bounds for this distortion; repeatable.")
@click.option("--lower-density", type=float, help="Density floor L for the integral system bound.")
@click.option("--grid-size", type=int, default=BoundConfig().ratio_grid, show_default=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False))
def bound_check(dist: str, t_grid: str, weight: str, alpha: float, beta: float, systems: tuple[str, ...],
                lower_density: float | None, grid_size: int, output: str | None) -> None:
    """Evaluate every bound against the exact measure over a grid of t."""
    d = parse_distribution(dist)
    w = parse_weight(weight)
    config = BoundConfig(alpha=alpha, beta=beta, precondition_grid=grid_size, ratio_grid=grid_size,
                         lower_density=lower_density)
    distortions = [parse_distortion(q) for q in systems]
    reports: list[BoundReport] = []
    for t in parse_grid(t_grid):
        reports.append(wpve_upper_theorem21(d, config.alpha, config.beta, t, grid_size=config.precondition_grid))
        reports.append(wpve_lower_theorem22(d, t, step_fraction=config.step_fraction))
        reports.append(wpdve_lower_max(d, w, t))
        reports.append(wpdve_upper_psi1(d, t))
        reports.append(wpdve_lower_variance(d, t, step_fraction=config.step_fraction))
        for q in distortions:
            reports.append(system_bound_prop62(d, q, config.alpha, config.beta, t, grid_size=config.ratio_grid))
            reports.append(system_bound_prop63(d, q, t, grid_size=config.ratio_grid))
            if config.lower_density is not None:
                reports.append(system_bound_prop64(d, q, config.lower_density, t,
                                                   grid_size=config.precondition_grid))
            reports.append(monotonicity_check_prop61(d, q, t, grid_size=config.ratio_grid))
    failed = [r for r in reports if r.counts and not r.satisfied]
    for r in failed:
        logger.warning(f"bound {r.name} fails at t={r.t:g}: slack {r.slack:.3g}")
    _emit(_bound_rows(reports), {"distribution": d.describe(), "weight": w.name}, output)


def cli() -> None:
    main()


if __name__ == '__main__':
    cli()
