"""Experiment documents, target resolution and the reproducible run artifacts."""

import csv
import json
import logging
import platform
import time
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Union

import numpy as np
from pydantic import ValidationError

from core import config
from core.densities import constant_P, constant_T, delta_general, k_visible_density
from core.errors import SpecError
from core.walks import run_trials
from schemas.density import DensityParams
from schemas.experiment import SCHEMA_VERSION, ConvergenceRow, ExperimentSpec, RunResult
from schemas.walk import MonteCarloSummary, WalkVariant

logger = logging.getLogger(__name__)

PAIRWISE = "pairwise"
CONJECTURAL = "conjectural"

Targets = Dict[Union[int, str], float]


def load_spec(path: str | Path) -> ExperimentSpec:
    path = Path(path)
    if not path.is_file():
        raise SpecError(f"experiment document not found: {path}")
    try:
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as e:
        raise SpecError(f"{path}: invalid TOML: {e}")
    try:
        return ExperimentSpec.model_validate(data)
    except ValidationError as e:
        raise SpecError(f"{path}: {e}")


def resolve_targets(spec: ExperimentSpec) -> Targets:
    """Limit density per reported series; keys are k values and 'pairwise' for 3D walks."""
    walk = spec.walk
    if walk.kind.variant is WalkVariant.polya_3d:
        return {1: constant_P().value, PAIRWISE: constant_T().value}

    a0, b0 = walk.start
    params = DensityParams(a0=a0, b0=b0, r0=walk.step_right, u0=walk.step_up)
    targets: Targets = {1: delta_general(params).value}
    if spec.target is not None:
        targets[1] = spec.target
    for k in spec.k_list:
        if k == 1:
            continue
        if walk.step_right == 1 and walk.step_up == 1:
            targets[k] = k_visible_density(k)
        else:
            logger.warning("no limit density for k=%d with steps (%d,%d)", k, walk.step_right, walk.step_up)
    return targets


def _row(series: str, N: int, mean: float, var, stderr, target) -> ConvergenceRow:
    abs_err = abs(mean - target) if target is not None else None
    return ConvergenceRow(
        series=series,
        N=N,
        mean_q=mean,
        var_q=var,
        stderr=stderr,
        target=target,
        abs_err=abs_err,
        abs_err_times_N_quarter=abs_err * N ** 0.25 if abs_err is not None else None,
    )


def _convergence(spec: ExperimentSpec, summaries: Dict[int, MonteCarloSummary], targets: Targets):
    rows, k_rows = [], []
    for N in spec.horizons:
        s = summaries[N]
        rows.append(_row("q", N, s.mean_q, s.var_q, s.stderr, targets.get(1)))
        for k in s.k_list:
            if k == 1:
                continue
            k_rows.append(_row(f"q_k:{k}", N, s.mean_q_k[k], None, s.stderr_q_k[k], targets.get(k)))
        if s.mean_q_pairwise is not None:
            k_rows.append(_row("q_pairwise", N, s.mean_q_pairwise, None, s.stderr_q_pairwise, targets.get(PAIRWISE)))
    return rows, k_rows


def _thresholds(spec: ExperimentSpec, rows: List[ConvergenceRow], k_rows: List[ConvergenceRow]) -> List[str]:
    failures = []
    final_N = spec.horizons[-1]
    final = rows[-1]
    if spec.tolerance is not None and final.abs_err is not None and final.abs_err > spec.tolerance:
        failures.append(f"q at N={final_N}: |{final.mean_q:.6f} - {final.target:.6f}| > {spec.tolerance}")
    if spec.k_tolerance is not None:
        for row in k_rows:
            if row.N == final_N and row.abs_err is not None and row.abs_err > spec.k_tolerance:
                failures.append(f"{row.series} at N={final_N}: |{row.mean_q:.6f} - {row.target:.6f}| > {spec.k_tolerance}")
    return failures


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def trial_csv_header(summary: MonteCarloSummary) -> List[str]:
    header = ["trial_id", "N", "q"] + [f"q_k:{k}" for k in summary.k_list]
    header += ["right_count", "slope_angle", "radial_ratio"]
    if summary.mean_q_pairwise is not None:
        header.append("q_pairwise")
    return header


def trial_csv_rows(summary: MonteCarloSummary) -> List[List[str]]:
    out = []
    for row in summary.rows:
        line = [row.stream_id, row.horizon, row.q] + [row.q_k[k] for k in summary.k_list]
        line += [row.right_count, row.slope_angle, row.radial_ratio]
        if summary.mean_q_pairwise is not None:
            line.append(row.q_pairwise)
        out.append([_fmt(v) for v in line])
    return out


def write_csv(path: Path, header: List[str], rows: List[List]) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_convergence(path: Path, rows: List[ConvergenceRow]) -> None:
    fields = list(ConvergenceRow.model_fields)
    write_csv(path, fields, [[_fmt(getattr(r, f)) for f in fields] for r in rows])


def summary_document(result: RunResult, targets: Targets) -> dict:
    spec = result.spec
    return {
        "schema_version": SCHEMA_VERSION,
        "spec": spec.model_dump(mode="json", exclude={"output_dir", "workers"}),
        "targets": {str(k): v for k, v in targets.items()},
        "label": result.label,
        "exploratory": result.exploratory,
        "passed": result.passed,
        "failures": result.failures,
        "convergence": [r.model_dump() for r in result.rows],
        "series": [r.model_dump() for r in result.k_rows],
    }


def run(spec: ExperimentSpec, output_dir: str | Path | None = None, workers: int | None = None, record: bool | None = None) -> RunResult:
    """Runs every horizon of ``spec`` in one pass and writes its artifacts.

    ``passed`` is False only when a hard threshold fails on a non-exploratory walk.
    """
    out = Path(output_dir or spec.output_dir or config.OUTPUT_DIR) / spec.name
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise SpecError(f"cannot create output directory {out}: {e}")

    started_at = datetime.now(timezone.utc)
    started = time.perf_counter()
    workers = workers or spec.workers or config.WORKERS
    targets = resolve_targets(spec)
    if spec.exploratory:
        logger.warning("%s is exploratory; targets %s are conjectural", spec.name, targets)

    summaries = run_trials(spec.walk, spec.horizons, spec.trials, spec.k_list, spec.master_seed, workers)
    rows, k_rows = _convergence(spec, summaries, targets)
    failures = [] if spec.exploratory else _thresholds(spec, rows, k_rows)
    duration_ms = int((time.perf_counter() - started) * 1000)

    artifacts = {"convergence": str(out / "convergence.csv"), "summary": str(out / "summary.json"), "metadata": str(out / "metadata.json")}
    result = RunResult(
        spec=spec,
        rows=rows,
        k_rows=k_rows,
        passed=not failures,
        exploratory=spec.exploratory,
        label=CONJECTURAL if spec.exploratory else None,
        failures=failures,
        artifacts=artifacts,
        duration_ms=duration_ms,
    )

    try:
        write_convergence(out / "convergence.csv", rows + k_rows)
        for N, summary in summaries.items():
            path = out / f"trials_N{N}.csv"
            write_csv(path, trial_csv_header(summary), trial_csv_rows(summary))
            result.artifacts[f"trials_N{N}"] = str(path)
        document = summary_document(result, targets)
        (out / "summary.json").write_text(json.dumps(document, indent=2, sort_keys=True) + "\n")
        metadata = {
            "schema_version": SCHEMA_VERSION,
            "started_at": started_at.isoformat(),
            "finished_at": datetime.now(timezone.utc).isoformat(),
            "duration_ms": duration_ms,
            "workers": workers,
            "python": platform.python_version(),
            "numpy": np.__version__,
        }
        (out / "metadata.json").write_text(json.dumps(metadata, indent=2) + "\n")
    except OSError as e:
        raise SpecError(f"cannot write artifacts to {out}: {e}")

    if config.RECORD_RUNS if record is None else record:
        result.run_id = _record(result, document)

    final = rows[-1]
    logger.info(
        "%s finished in %d ms: mean_q=%.6f target=%s passed=%s",
        spec.name, duration_ms, final.mean_q, final.target, result.passed,
    )
    return result


def _record(result: RunResult, document: dict) -> int | None:
    from core.audit import record_run
    from database.database import SessionLocal, init_db

    init_db()
    db = SessionLocal()
    try:
        rec = record_run(db, result, summary=document)
        return rec.id if rec is not None else None
    finally:
        db.close()


