"""
Command line interface.

Every subcommand reads a score pool (--pool) or a ROC spec document
(--roc with --pi) and writes a CSV table, to stdout unless --out is given.
Usage errors exit with status 2, errors in the input data with status 1.
"""

from dataclasses import dataclass
from functools import wraps
from pathlib import Path
from typing import Dict, List, Optional
import logging
import sys

import click

from rocscale import __version__
from rocscale.bon import bo2_gain, bon_accuracy, bon_limit, bon_profile, compare_at_budget
from rocscale.config import CONFFILE, load_conf
from rocscale.fileio import (
    load_pool,
    load_roc_spec,
    output_header,
    simulation_row,
    write_bon_csv,
    write_compare_csv,
    write_points_spec,
    write_rejection_csv,
    write_simulation_csv,
    write_summary,
)
from rocscale.models import RocCurve, ScorePool
from rocscale.rejection import (
    de_emergence as build_de_emergence,
    default_grid,
    early_slope,
    limit_accuracy,
    max_finite_cost,
    point_cost,
    point_precision,
    profile,
)
from rocscale.roc import auroc, empirical_roc, is_concave, operating_point, rank_auroc, slope_at_origin
from rocscale.scenarios import all_scenarios, summarize
from rocscale.simulate import SimulationConfig, simulate_bon, simulate_rejection
from rocscale.utils import RocScaleError, file_digest, parse_int_list, parse_real_list

log = logging.getLogger("rocscale")

DEFAULT_NS = "1-1024:pow2"


def setup_logging(debug: bool) -> None:
    try:
        from systemd.journal import JournalHandler  # debdeps: python3-systemd

        handler = JournalHandler(SYSLOG_IDENTIFIER="rocscale")
    except ImportError:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s %(message)s"))
    log.handlers = [handler]
    log.setLevel(logging.DEBUG if debug else logging.INFO)


def data_errors(func):
    """Turn errors in the input data into a one-line diagnostic, exit 1"""

    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except RocScaleError as e:
            raise click.ClickException(f"{type(e).__name__}: {e}")

    return wrapper


@dataclass
class Input:
    curve: RocCurve
    pi: float
    pool: Optional[ScorePool]
    digests: Dict[str, str]


def curve_options(func):
    func = click.option(
        "--pi", type=click.FloatRange(0.0, 1.0), help="Generator accuracy, required with --roc"
    )(func)
    func = click.option(
        "--roc", "roc_path", type=click.Path(exists=True, dir_okay=False), help="ROC spec document"
    )(func)
    func = click.option(
        "--pool", "pool_path", type=click.Path(exists=True, dir_okay=False), help="Score pool CSV"
    )(func)
    return func


def sim_options(func):
    for name, helptext in (
        ("--workers", "Worker threads for the trials"),
        ("--max-draws", "Cap on draws per rejection-sampling trial"),
        ("--resamples", "Bootstrap re-samplings"),
        ("--trials", "Simulated trials"),
        ("--seed", "Seed, an unsigned 64-bit integer"),
    ):
        func = click.option(name, type=int, default=None, help=helptext)(func)
    return func


def out_option(func):
    return click.option(
        "--out", type=click.File("w", atomic=True), default="-", help="Output file, - for stdout"
    )(func)


def resolve_input(pool_path: Optional[str], roc_path: Optional[str], pi: Optional[float]) -> Input:
    if (pool_path is None) == (roc_path is None):
        raise click.UsageError("exactly one of --pool and --roc is required")
    if pool_path is not None:
        if pi is not None:
            raise click.UsageError("--pi is derived from the pool and cannot be given with --pool")
        pool = load_pool(pool_path)
        curve = empirical_roc(pool)
        return Input(curve, pool.pi, pool, {Path(pool_path).name: file_digest(pool_path)})

    if pi is None:
        raise click.UsageError("--pi is required with --roc")
    curve = load_roc_spec(roc_path)
    return Input(curve, pi, None, {Path(roc_path).name: file_digest(roc_path)})


def sim_config(ctx, seed, trials, resamples, workers, max_draws) -> SimulationConfig:
    conf = ctx.obj

    def pick(v, key):
        return conf[key] if v is None else v

    try:
        return SimulationConfig(
            trials=pick(trials, "trials"),
            seed=pick(seed, "seed"),
            max_draws=pick(max_draws, "max_draws"),
            n_resamples=pick(resamples, "resamples"),
            level=conf["level"],
            workers=pick(workers, "workers"),
        )
    except ValueError as e:
        raise click.UsageError(str(e))


def header_for(ctx, inp: Input, seed: Optional[int] = None) -> str:
    return output_header(ctx.obj["seed"] if seed is None else seed, inp.digests)


def int_list(ctx, param, value) -> List[int]:
    if value is None:
        return None
    try:
        out = parse_int_list(value)
    except ValueError as e:
        raise click.BadParameter(str(e))
    if not out or out[0] < 1:
        raise click.BadParameter("expected positive integers")
    return out


def real_list(ctx, param, value) -> List[float]:
    if value is None:
        return None
    try:
        return parse_real_list(value)
    except ValueError as e:
        raise click.BadParameter(str(e))


@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Debug logging")
@click.option(
    "--conf", default=CONFFILE, show_default=True, help="INI file overriding the defaults"
)
@click.version_option(__version__, prog_name="rocscale")
@click.pass_context
def cli(ctx, verbose, conf):
    """ROC-based analysis of rejection sampling and Best-of-N"""
    try:
        ctx.obj = load_conf(conf)
    except RocScaleError as e:
        raise click.ClickException(str(e))
    setup_logging(verbose or ctx.obj["app_env"] == "development")


@cli.command()
@curve_options
@out_option
@click.option(
    "--emit-spec", type=click.File("w", atomic=True), help="Also write the curve as a points document"
)
@click.pass_context
@data_errors
def roc(ctx, pool_path, roc_path, pi, out, emit_spec):
    """Build a ROC curve and describe it"""
    inp = resolve_input(pool_path, roc_path, pi)
    curve = inp.curve
    origin = slope_at_origin(curve)
    items = [
        ("kind", curve.kind.describe()),
        ("points", len(curve)),
        ("pi", inp.pi),
        ("auroc", auroc(curve)),
        ("concave", is_concave(curve)),
        ("t0", curve.t0),
        ("origin_slope", None if origin.separating else origin.slope),
        ("separating", origin.separating),
        ("unbounded_origin_slope", origin.unbounded),
    ]
    if inp.pool is not None:
        items.append(("rank_auroc", rank_auroc(inp.pool)))
    write_summary(out, header_for(ctx, inp), items)
    if emit_spec is not None:
        write_points_spec(curve, emit_spec, header_for(ctx, inp))
        log.info("Curve written as a points document to %s", emit_spec.name)


@cli.command("rs-curve")
@curve_options
@out_option
@click.option("--grid", type=click.IntRange(min=1), help="F grid size on top of the breakpoints")
@click.pass_context
@data_errors
def rs_curve(ctx, pool_path, roc_path, pi, out, grid):
    """Accuracy of rejection sampling against expected compute"""
    inp = resolve_input(pool_path, roc_path, pi)
    prof = profile(inp.curve, inp.pi, default_grid(grid or ctx.obj["grid"]))
    omitted = write_rejection_csv(out, header_for(ctx, inp), prof)
    if omitted:
        click.echo(f"{omitted} infinite-cost rows left out", err=True)


@cli.command("rs-limits")
@curve_options
@out_option
@click.pass_context
@data_errors
def rs_limits(ctx, pool_path, roc_path, pi, out):
    """Slope of A(C) at C = 1 and the large-compute limit"""
    inp = resolve_input(pool_path, roc_path, pi)
    curve, p = inp.curve, inp.pi
    items = [
        ("early_slope", early_slope(curve, p) if 0.0 < p < 1.0 else None),
        ("limit_accuracy", limit_accuracy(curve, p)),
        ("unbounded_origin_slope", slope_at_origin(curve).unbounded),
        ("max_finite_cost", max_finite_cost(curve, p)),
    ]
    write_summary(out, header_for(ctx, inp), items)


@cli.command("bon-curve")
@curve_options
@out_option
@click.option("--N", "Ns", default=DEFAULT_NS, show_default=True, callback=int_list,
              help='N values: "1,2,4", "1-8" or "1-1024:pow2"')
@click.option("--simulate", "do_simulate", is_flag=True, help="Add simulated accuracy (needs --pool)")
@sim_options
@click.pass_context
@data_errors
def bon_curve(ctx, pool_path, roc_path, pi, out, Ns, do_simulate, seed, trials, resamples,
              max_draws, workers):
    """Exact Best-of-N accuracy, optionally next to a simulation"""
    inp = resolve_input(pool_path, roc_path, pi)
    if do_simulate and inp.pool is None:
        raise click.UsageError("--simulate needs --pool")
    prof = bon_profile(inp.curve, inp.pi, Ns)
    sims = {}
    if do_simulate:
        cfg = sim_config(ctx, seed, trials, resamples, workers, max_draws)
        sims = {n: simulate_bon(inp.pool, n, cfg) for n in Ns}
    log.info("BoN limit for N -> inf: %.17g", prof.limit)
    write_bon_csv(out, header_for(ctx, inp, seed), prof, sims)


@cli.command()
@curve_options
@out_option
@click.pass_context
@data_errors
def bo2(ctx, pool_path, roc_path, pi, out):
    """Accuracy gain of Best-of-2 over the generator"""
    inp = resolve_input(pool_path, roc_path, pi)
    items = [
        ("auroc", auroc(inp.curve)),
        ("gain", bo2_gain(inp.curve, inp.pi)),
        ("acc_bo2", bon_accuracy(inp.curve, inp.pi, 2).acc_exact),
        ("limit", bon_limit(inp.curve, inp.pi) if inp.pi > 0 else 0.0),
    ]
    write_summary(out, header_for(ctx, inp), items)


@cli.command("de-emergence")
@curve_options
@out_option
@click.option("--budget", type=float, required=True, help="Largest observed expected compute z")
@click.option("--prefix", "out_prefix", default="de_emergence", show_default=True,
              help="Path prefix of the two extension documents")
@click.pass_context
@data_errors
def de_emergence(ctx, pool_path, roc_path, pi, out, budget, out_prefix):
    """Two curves agreeing up to budget z with opposite large-compute fates"""
    inp = resolve_input(pool_path, roc_path, pi)
    res = build_de_emergence(inp.curve, inp.pi, budget)
    paths = {}
    for name, curve in (("stagnant", res.extension_stagnant), ("perfect", res.extension_perfect)):
        path = Path(f"{out_prefix}_{name}.json")
        with click.open_file(str(path), "w", atomic=True) as f:
            write_points_spec(curve, f, header_for(ctx, inp))
        paths[name] = path
        log.info("Extension %s written to %s", name, path)
    items = [
        ("budget_z", res.budget_z),
        ("F_z", res.F_z),
        ("T_z", res.T_z),
        ("sup_A_stagnant", res.sup_A_stagnant),
        ("sup_A_perfect", res.sup_A_perfect),
        ("stagnant_path", str(paths["stagnant"])),
        ("perfect_path", str(paths["perfect"])),
    ]
    write_summary(out, header_for(ctx, inp), items)


@cli.command()
@click.option("--pool", "pool_path", type=click.Path(exists=True, dir_okay=False), required=True,
              help="Score pool CSV")
@click.option("--method", type=click.Choice(["rejection", "bon"]), required=True)
@click.option("--threshold", "thresholds", callback=real_list, help="Thresholds for rejection")
@click.option("--N", "Ns", callback=int_list, help="N values for bon")
@out_option
@sim_options
@click.pass_context
@data_errors
def simulate(ctx, pool_path, method, thresholds, Ns, out, seed, trials, resamples, max_draws,
             workers):
    """Monte-Carlo run with bootstrap intervals, next to the exact values"""
    inp = resolve_input(pool_path, None, None)
    cfg = sim_config(ctx, seed, trials, resamples, workers, max_draws)
    rows = []
    if method == "rejection":
        if not thresholds:
            raise click.UsageError("--threshold is required with --method rejection")
        for tau in thresholds:
            F, T = operating_point(inp.pool, tau)
            res = simulate_rejection(inp.pool, tau, cfg)
            rows.append(simulation_row(
                method, tau, res, point_precision(F, T, inp.pi), point_cost(F, T, inp.pi)
            ))
    else:
        if not Ns:
            raise click.UsageError("--N is required with --method bon")
        for n in Ns:
            res = simulate_bon(inp.pool, n, cfg)
            rows.append(simulation_row(method, n, res, bon_accuracy(inp.curve, inp.pi, n).acc_exact))
    write_simulation_csv(out, header_for(ctx, inp, cfg.seed), rows)


@cli.command()
@curve_options
@out_option
@click.option("--N", "Ns", default=DEFAULT_NS, show_default=True, callback=int_list,
              help="Budgets: BoN with N samples against rejection sampling with C = N")
@click.pass_context
@data_errors
def compare(ctx, pool_path, roc_path, pi, out, Ns):
    """Rejection sampling against Best-of-N at the same expected compute"""
    inp = resolve_input(pool_path, roc_path, pi)
    rows = compare_at_budget(inp.curve, inp.pi, Ns)
    ahead = sum(1 for r in rows if r.rs_ahead)
    log.info("Rejection sampling ahead at %d of %d budgets", ahead, len(rows))
    write_compare_csv(out, header_for(ctx, inp), rows)


@cli.command()
@click.option("--out-dir", type=click.Path(file_okay=False), required=True)
@click.option("--N", "Ns", default=DEFAULT_NS, show_default=True, callback=int_list)
@click.option("--grid", type=click.IntRange(min=1))
@click.pass_context
@data_errors
def scenarios(ctx, out_dir, Ns, grid):
    """Write the synthetic verifier pairs and their scaling curves"""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    f_grid = default_grid(grid or ctx.obj["grid"])
    for sc in all_scenarios():
        header = output_header(ctx.obj["seed"], {"scenario": sc.name})
        for label, curve in sc.curves:
            stem = out_dir / f"{sc.name}_{label}"
            with click.open_file(f"{stem}_rs.csv", "w", atomic=True) as f:
                write_rejection_csv(f, header, profile(curve, sc.pi, f_grid))
            with click.open_file(f"{stem}_bon.csv", "w", atomic=True) as f:
                write_bon_csv(f, header, bon_profile(curve, sc.pi, Ns))
            with click.open_file(f"{stem}.json", "w", atomic=True) as f:
                write_points_spec(curve, f, header)
        items = []
        for label, s in summarize(sc).items():
            items += [(f"{label}_early_slope", s.early_slope), (f"{label}_limit", s.limit)]
        with click.open_file(str(out_dir / f"{sc.name}_summary.csv"), "w", atomic=True) as f:
            write_summary(f, header, items)
        log.info("Scenario %s written to %s", sc.title, out_dir)


if __name__ == "__main__":
    cli()
