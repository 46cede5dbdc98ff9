import functools
import json
import sys
from pathlib import Path

import click

from core import config
from core.errors import UrnWalkError


def handle_errors(func):
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except UrnWalkError as e:
            raise click.ClickException(str(e))
    return wrapper


def _ints(text: str, size: int | None = None, name: str = "value") -> tuple:
    try:
        values = tuple(int(x) for x in text.replace(" ", "").split(",") if x)
    except ValueError:
        raise click.BadParameter(f"expected comma-separated integers, got '{text}'", param_hint=name)
    if size is not None and len(values) != size:
        raise click.BadParameter(f"expected {size} integers, got '{text}'", param_hint=name)
    return values


def _emit(data, fmt: str, header=None, rows=None) -> None:
    if fmt == "csv" and header is not None:
        click.echo(",".join(header))
        for row in rows:
            click.echo(",".join("" if v is None else str(v) for v in row))
    else:
        click.echo(json.dumps(data, indent=2, default=str))


@click.group()
@click.option("--log-level", default=None, help="Overrides URNWALK_LOG_LEVEL.")
def cli(log_level):
    """Pólya urn walk visibility toolkit."""
    config.configure_logging(log_level)


@cli.command()
@click.option("--config", "config_path", type=click.Path(), help="TOML experiment document.")
@click.option("--name", default="adhoc", show_default=True)
@click.option("--variant", type=click.Choice(["polya", "alpha_random", "friedman", "polya_3d"]), default="polya", show_default=True)
@click.option("--alpha", type=float, default=None)
@click.option("--start", default="1,1", show_default=True)
@click.option("--steps", default="1,1", show_default=True, help="r0,u0")
@click.option("--k", "k_list", default="1", show_default=True)
@click.option("--horizon", "horizons", type=int, multiple=True)
@click.option("--trials", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--workers", type=int, default=None)
@click.option("--out", type=click.Path(), default=None)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="json", show_default=True)
@handle_errors
def simulate(config_path, name, variant, alpha, start, steps, k_list, horizons, trials, seed, workers, out, fmt):
    """Run one experiment from a document or from flags."""
    from core.harness import load_spec, run
    from schemas.experiment import ConvergenceRow, ExperimentSpec

    if config.CI_MODE and seed is None:
        raise click.UsageError("--seed is mandatory when CI is set")

    overrides = {k: v for k, v in {"trials": trials, "master_seed": seed, "workers": workers}.items() if v is not None}
    if horizons:
        overrides["horizons"] = sorted(set(horizons))

    if config_path:
        spec = load_spec(config_path)
        if overrides:
            try:
                spec = ExperimentSpec.model_validate({**spec.model_dump(), **overrides})
            except ValueError as e:
                raise click.BadParameter(str(e))
    else:
        r0, u0 = _ints(steps, 2, "--steps")
        walk = {"variant": variant, "start": list(_ints(start, name="--start")), "step_right": r0, "step_up": u0}
        if alpha is not None:
            walk["alpha"] = alpha
        data = {"name": name, "walk": walk, "k_list": list(_ints(k_list, name="--k")), "trials": 200, "horizons": [10_000]}
        data.update(overrides)
        try:
            spec = ExperimentSpec.model_validate(data)
        except ValueError as e:
            raise click.BadParameter(str(e))

    result = run(spec, output_dir=out)
    rows = result.rows + result.k_rows
    fields = list(ConvergenceRow.model_fields)
    _emit(
        {"name": spec.name, "passed": result.passed, "label": result.label, "failures": result.failures,
         "convergence": [r.model_dump() for r in rows], "artifacts": result.artifacts},
        fmt,
        header=fields,
        rows=[[getattr(r, f) for f in fields] for r in rows],
    )
    if not result.passed:
        sys.exit(1)


@cli.command()
@click.option("--params", default=None, help="a0,b0,r0,u0")
@click.option("--k", type=int, default=None, help="k-visible density 1/(k^2 zeta(2)).")
@click.option("--c", type=int, default=None, help="Equal-step density.")
@click.option("--method", type=click.Choice(["euler", "mobius", "brute"]), default="euler", show_default=True)
@click.option("--depth", type=int, default=10_000, show_default=True, help="Truncation depth or grid size.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="json", show_default=True)
@handle_errors
def density(params, k, c, method, depth, fmt):
    """Print a visible-point density with its method and tail bound."""
    from core.densities import brute_force_density, delta_c, delta_c_mobius, delta_general, delta_general_mobius, k_visible_density
    from schemas.density import DensityMethod, DensityParams, DensityValue

    if sum(x is not None for x in (params, k, c)) != 1:
        raise click.UsageError("give exactly one of --params, --k, --c")
    if k is not None:
        value = DensityValue(value=k_visible_density(k), method=DensityMethod.euler_product, tail_bound=0.0)
    elif c is not None:
        value = delta_c_mobius(c, depth) if method == "mobius" else delta_c(c)
        p = DensityParams(a0=1, b0=1, r0=c, u0=c)
    else:
        try:
            p = DensityParams.parse(params)
        except ValueError as e:
            raise click.BadParameter(str(e), param_hint="--params")
        value = delta_general_mobius(p, depth) if method == "mobius" else delta_general(p)
    if method == "brute" and k is None:
        value = DensityValue(value=brute_force_density(p, depth), method=DensityMethod.brute_force, depth=depth)
    fields = list(DensityValue.model_fields)
    data = value.model_dump(mode="json")
    _emit(data, fmt, header=fields, rows=[[data[f] for f in fields]])


@cli.command()
@click.option("--horizon", "horizons", type=int, multiple=True)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@handle_errors
def expectation(horizons, fmt):
    """Closed-form E(Q_N) from (1,1) against 6/pi^2."""
    from core.estimates import expected_q_scan
    from schemas.estimates import ExpectationRow

    rows = expected_q_scan(horizons or (1_000, 10_000, 100_000, 1_000_000))
    fields = list(ExpectationRow.model_fields)
    _emit([r.model_dump() for r in rows], fmt, header=fields, rows=[[getattr(r, f) for f in fields] for r in rows])


@cli.command()
@click.option("--start", default="1,1", show_default=True)
@click.option("--step", "c", type=int, default=1, show_default=True)
@click.option("--horizon", type=int, default=10_000, show_default=True)
@click.option("--trials", type=int, default=5_000, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--workers", type=int, default=None)
@click.option("--out", type=click.Path(), default=None)
@handle_errors
def definetti(start, c, horizon, trials, seed, workers, out):
    """Limit right-step frequencies against Beta(a0/c, b0/c)."""
    from core.harness import write_csv
    from core.mixture import definetti_check
    from schemas.walk import WalkConfig

    if config.CI_MODE and seed is None:
        raise click.UsageError("--seed is mandatory when CI is set")
    seed = seed or 0
    cfg = WalkConfig(start=_ints(start, 2, "--start"), step_right=c, step_up=c)
    report = definetti_check(cfg, horizon, trials, master_seed=seed, workers=workers)

    out_dir = Path(out or config.OUTPUT_DIR)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"definetti_{cfg.start[0]}_{cfg.start[1]}_c{c}_N{horizon}.csv"
    write_csv(path, ["trial_id", "L_hat"], [[i, repr(x)] for i, x in enumerate(report.limit_frequencies)])
    click.echo(json.dumps({
        "schema_version": 1,
        "start": list(cfg.start),
        "c": c,
        "horizon": horizon,
        "trials": trials,
        "master_seed": seed,
        "beta": report.beta.model_dump(),
        "ks_statistic": report.ks_statistic,
        "p_value": report.p_value,
        "trials_csv": str(path),
    }, indent=2))


@cli.command("bound-check")
@click.option("--kind", type=click.Choice(["binomial", "residue"]), default="binomial", show_default=True)
@click.option("--n-max", type=int, default=200, show_default=True)
@click.option("--n", "ns", type=int, multiple=True, help="Residue scan sizes.")
@click.option("--d-max", type=int, default=50, show_default=True)
@handle_errors
def bound_check(kind, n_max, ns, d_max):
    """Binomial sup bound or residue-class constant as JSON."""
    from core.estimates import check_binomial_sup_bound, residue_deviation_scan

    if kind == "binomial":
        report = check_binomial_sup_bound(n_max)
    else:
        report = residue_deviation_scan(ns or (100, 1_000, 10_000), d_max)
    click.echo(json.dumps(report.model_dump(exclude={"alpha_grid", "per_n_max"}) | {"holds": report.holds}, indent=2))
    if kind == "binomial" and not report.holds:
        sys.exit(1)


@cli.command()
@click.option("--cutoff", type=int, default=None, help="Prime cutoff for T (URNWALK_T_CUTOFF).")
@handle_errors
def constants(cutoff):
    """1/zeta(2), 1/zeta(3) and the pairwise-coprime constant T."""
    from core.densities import constant_P, constant_T, euler_product_P, inv_zeta2

    p = constant_P()
    t = constant_T(cutoff)
    click.echo(json.dumps({
        "inv_zeta2": inv_zeta2(),
        "inv_zeta3": p.value,
        "inv_zeta3_tail_bound": p.tail_bound,
        "inv_zeta3_euler_product": euler_product_P(min(t.depth, 1_000_000)),
        "T": t.value,
        "T_tail_bound": t.tail_bound,
        "T_cutoff": t.depth,
    }, indent=2))


@cli.command()
@handle_errors
def selftest():
    """Quick property checks over every module."""
    from core.selftest import selftest as run_checks

    results = run_checks()
    for r in results:
        click.echo(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<26} {r.detail}")
    _record_selftest(results)
    if not all(r.passed for r in results):
        sys.exit(1)


def _record_selftest(results) -> None:
    if not config.RECORD_RUNS:
        return
    from core.audit import log_event
    from database.database import SessionLocal, init_db

    init_db()
    db = SessionLocal()
    try:
        log_event(
            db,
            action="selftest",
            status="success" if all(r.passed for r in results) else "failed",
            details={r.name: r.passed for r in results},
        )
    finally:
        db.close()


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Serve the read-only density and run-registry API."""
    import uvicorn

    uvicorn.run("main:app", host=host, port=port)


if __name__ == "__main__":
    cli()
