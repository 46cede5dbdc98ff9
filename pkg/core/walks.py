"""Step-exact simulation of the urn walks and their visibility statistics.

All trials of a batch advance in lock-step as numpy arrays; trial t only ever
reads its own stream, so ``simulate`` on one stream and ``monte_carlo`` over many
produce bit-identical statistics for that stream.
"""

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from itertools import chain
from typing import Dict, Iterable, List, Sequence, Tuple

import mpmath
import numpy as np

from core import config
from core.errors import ContractViolation, InvariantViolation, UnsupportedEventError
from core.rng import trial_generator
from schemas.walk import (
    EventKind,
    MonteCarloSummary,
    Position,
    RngStream,
    TrajectoryEvent,
    VisitStats,
    WalkConfig,
    WalkKind,
    WalkVariant,
)

logger = logging.getLogger(__name__)

_ENGINE_MAX = 1 << 62
_FLOAT_EXACT = 1 << 53


def step(kind: WalkKind, pos: Position, steps: Tuple[int, int], draw: float) -> Position:
    """Advance one step using a single uniform ``draw`` from the walk's stream."""
    if not 0.0 <= draw < 1.0:
        raise ContractViolation(f"draw must lie in [0, 1), got {draw}")
    coords = pos.coords

    if kind.variant is WalkVariant.polya_3d:
        if len(coords) != 3:
            raise ContractViolation("polya_3d positions have 3 coordinates")
        a, b, c = coords
        x = draw * (a + b + c)
        if x < a:
            return Position(coords=(a + 1, b, c))
        if x < a + b:
            return Position(coords=(a, b + 1, c))
        return Position(coords=(a, b, c + 1))

    if len(coords) != 2:
        raise ContractViolation(f"planar walks have 2 coordinates, got {coords}")
    a, b = coords
    r0, u0 = steps
    if kind.variant is WalkVariant.alpha_random:
        first = draw < kind.alpha
    else:
        first = draw < a / (a + b)

    if kind.variant is WalkVariant.friedman:
        return Position(coords=(a, b + u0)) if first else Position(coords=(a + r0, b))
    return Position(coords=(a + r0, b)) if first else Position(coords=(a, b + u0))


def _normalize_k(cfg: WalkConfig, k_list: Iterable[int]) -> List[int]:
    ks = sorted(set(k_list) | {1})
    if ks[0] < 1:
        raise ContractViolation(f"k values must be >= 1, got {ks}")
    if cfg.dims == 3 and ks != [1]:
        raise ContractViolation("k-visibility is defined for planar walks only")
    return ks


def _check_capacity(cfg: WalkConfig, horizon: int) -> None:
    reach = sum(cfg.start) + horizon * max(cfg.step_right, cfg.step_up)
    if reach >= _ENGINE_MAX:
        raise ContractViolation(f"positions up to {reach} exceed the 64-bit engine range")
    if reach >= _FLOAT_EXACT:
        logger.warning("positions may exceed 2**53 (%d); draw comparisons lose exactness", reach)


def _check_sums(cfg: WalkConfig, coords: np.ndarray, right: np.ndarray, done: int) -> None:
    if cfg.dims == 3:
        ok = np.all(coords.sum(axis=0) == sum(cfg.start) + done)
    else:
        a0, b0 = cfg.start
        ok = np.all(coords[0] == a0 + right * cfg.step_right) and np.all(
            coords[1] == b0 + (done - right) * cfg.step_up
        )
    if not ok:
        raise InvariantViolation(f"position sum invariant broken after {done} steps")


def _collect(cfg, stream_ids, coords, right, counts, pairwise, done) -> List[VisitStats]:
    """Per-trial statistics after ``done`` steps.

    Slope and radial ratio are both measured in step counts: the angle of
    (right, up) and its length over ``done``. For equal steps the angle equals
    that of the raw displacement.
    """
    rows = []
    for i, stream_id in enumerate(stream_ids):
        q_k = {k: int(c[i]) / done for k, c in counts.items()}
        slope = radial = q_pair = None
        if cfg.dims == 2:
            n_right = int(right[i])
            n_up = done - n_right
            slope = math.atan2(n_up, n_right)
            radial = math.hypot(n_right, n_up) / done
        else:
            q_pair = int(pairwise[i]) / done
        rows.append(VisitStats(
            horizon=done,
            q=q_k[1],
            q_k=q_k,
            right_count=int(right[i]),
            final=Position(coords=tuple(int(x) for x in coords[:, i])),
            slope_angle=slope,
            radial_ratio=radial,
            q_pairwise=q_pair,
            stream_id=stream_id,
        ))
    return rows


def _advance(
    cfg: WalkConfig,
    stream_ids: Sequence[int],
    master_seed: int,
    checkpoints: Sequence[int],
    k_list: Sequence[int],
) -> Dict[int, List[VisitStats]]:
    trials = len(stream_ids)
    pending = sorted(set(checkpoints))
    horizon = pending[-1]
    _check_capacity(cfg, horizon)

    variant = cfg.kind.variant
    r0, u0 = cfg.step_right, cfg.step_up
    gens = [trial_generator(master_seed, s) for s in stream_ids]
    coords = np.repeat(np.asarray(cfg.start, dtype=np.int64)[:, None], trials, axis=1)
    right = np.zeros(trials, dtype=np.int64)
    counts = {k: np.zeros(trials, dtype=np.int64) for k in k_list}
    pairwise = np.zeros(trials, dtype=np.int64)
    block = max(1, config.BLOCK_CELLS // trials)

    results: Dict[int, List[VisitStats]] = {}
    done = 0
    while done < horizon:
        width = min(block, pending[0] - done)
        draws = np.stack([g.random(width) for g in gens])
        path = np.empty((cfg.dims, trials, width), dtype=np.int64)

        if cfg.dims == 3:
            a, b, c = coords
            for j in range(width):
                x = draws[:, j] * (a + b + c)
                first = x < a
                second = ~first & (x < a + b)
                a += first
                b += second
                c += ~(first | second)
                right += first
                path[:, :, j] = coords
        else:
            a, b = coords
            for j in range(width):
                u = draws[:, j]
                if variant is WalkVariant.alpha_random:
                    first = u < cfg.kind.alpha
                else:
                    first = u < a / (a + b)
                if variant is WalkVariant.friedman:
                    first = ~first
                a += r0 * first
                b += u0 * ~first
                right += first
                path[:, :, j] = coords

        if cfg.dims == 3:
            g_ab = np.gcd(path[0], path[1])
            counts[1] += np.count_nonzero(np.gcd(g_ab, path[2]) == 1, axis=1)
            pairwise += np.count_nonzero(
                (g_ab == 1) & (np.gcd(path[0], path[2]) == 1) & (np.gcd(path[1], path[2]) == 1),
                axis=1,
            )
        else:
            g = np.gcd(path[0], path[1])
            for k in k_list:
                counts[k] += np.count_nonzero(g == k, axis=1)

        done += width
        if config.CHECK_INVARIANTS:
            _check_sums(cfg, coords, right, done)
        if done == pending[0]:
            results[done] = _collect(cfg, stream_ids, coords, right, counts, pairwise, done)
            pending.pop(0)
    return results


def _advance_chunk(args) -> Dict[int, List[VisitStats]]:
    return _advance(*args)


def simulate(cfg: WalkConfig, N: int, k_list: Iterable[int], rng: RngStream) -> VisitStats:
    if N < 1:
        raise ContractViolation(f"horizon N must be >= 1, got {N}")
    ks = _normalize_k(cfg, k_list)
    return _advance(cfg, [rng.stream_id], rng.master_seed, [N], ks)[N][0]


def _std(values: List[float], mean: float) -> Tuple[float | None, float | None]:
    if len(values) < 2:
        return None, None
    var = math.fsum((v - mean) ** 2 for v in values) / (len(values) - 1)
    return var, math.sqrt(var / len(values))


def summarize(cfg: WalkConfig, N: int, master_seed: int, k_list: List[int], rows: List[VisitStats]) -> MonteCarloSummary:
    rows = sorted(rows, key=lambda r: r.stream_id)
    T = len(rows)
    qs = [r.q for r in rows]
    mean_q = math.fsum(qs) / T
    var_q, stderr = _std(qs, mean_q)

    mean_q_k, stderr_q_k = {}, {}
    for k in k_list:
        values = [r.q_k[k] for r in rows]
        mean_q_k[k] = math.fsum(values) / T
        stderr_q_k[k] = _std(values, mean_q_k[k])[1]

    mean_pair = stderr_pair = None
    if cfg.dims == 3:
        values = [r.q_pairwise for r in rows]
        mean_pair = math.fsum(values) / T
        stderr_pair = _std(values, mean_pair)[1]

    return MonteCarloSummary(
        config=cfg,
        horizon=N,
        trials=T,
        master_seed=master_seed,
        k_list=k_list,
        mean_q=mean_q,
        var_q=var_q,
        stderr=stderr,
        mean_q_k=mean_q_k,
        stderr_q_k=stderr_q_k,
        mean_q_pairwise=mean_pair,
        stderr_q_pairwise=stderr_pair,
        rows=rows,
    )


def run_trials(
    cfg: WalkConfig,
    horizons: Sequence[int],
    trials: int,
    k_list: Iterable[int],
    master_seed: int,
    workers: int | None = None,
) -> Dict[int, MonteCarloSummary]:
    """Trials 0..trials-1 to the largest horizon, summarized at every horizon."""
    if trials < 1:
        raise ContractViolation(f"trials must be >= 1, got {trials}")
    if not horizons or min(horizons) < 1:
        raise ContractViolation(f"horizons must be positive, got {horizons}")
    ks = _normalize_k(cfg, k_list)
    checkpoints = sorted(set(horizons))
    workers = max(1, workers or config.WORKERS)

    started = time.perf_counter()
    ids = list(range(trials))
    size = math.ceil(trials / workers)
    chunks = [ids[i:i + size] for i in range(0, trials, size)]
    jobs = [(cfg, chunk, master_seed, checkpoints, ks) for chunk in chunks]
    if len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            parts = list(pool.map(_advance_chunk, jobs))
    else:
        parts = [_advance_chunk(jobs[0])]

    summaries = {
        N: summarize(cfg, N, master_seed, ks, list(chain.from_iterable(part[N] for part in parts)))
        for N in checkpoints
    }
    logger.info(
        "%s start=%s steps=(%d,%d) trials=%d horizons=%s in %.2fs",
        cfg.kind.variant.value, cfg.start, cfg.step_right, cfg.step_up,
        trials, checkpoints, time.perf_counter() - started,
    )
    return summaries


def monte_carlo(
    cfg: WalkConfig,
    N: int,
    trials: int,
    k_list: Iterable[int],
    master_seed: int,
    workers: int | None = None,
) -> MonteCarloSummary:
    if trials < 2:
        raise ContractViolation(f"monte_carlo needs at least 2 trials, got {trials}")
    return run_trials(cfg, [N], trials, k_list, master_seed, workers)[N]


def monte_carlo_horizons(
    cfg: WalkConfig,
    horizons: Sequence[int],
    trials: int,
    k_list: Iterable[int],
    master_seed: int,
    workers: int | None = None,
) -> Dict[int, MonteCarloSummary]:
    if trials < 2:
        raise ContractViolation(f"monte_carlo needs at least 2 trials, got {trials}")
    return run_trials(cfg, horizons, trials, k_list, master_seed, workers)


def exact_event_probability(cfg: WalkConfig, event: TrajectoryEvent) -> Fraction | mpmath.mpf:
    """Exact probability of a trajectory event of the Pólya walk.

    ``first_n_up``/``first_n_right`` need equal steps c; for c = 1 the product is a
    Fraction, for c >= 2 the gamma-ratio form is returned as a 50-digit mpf.
    ``stay_at_height_one`` needs b0 = 1 and is always a Fraction.
    """
    if cfg.kind.variant is not WalkVariant.polya:
        raise UnsupportedEventError(f"exact probabilities are available for polya walks, not {cfg.kind.variant.value}")
    a0, b0 = cfg.start
    n = event.n

    if event.kind is EventKind.stay_at_height_one:
        if b0 != 1:
            raise UnsupportedEventError(f"stay_at_height_one needs b0 = 1, got {b0}")
        r0 = cfg.step_right
        return Fraction(
            math.prod(a0 + j * r0 for j in range(n)),
            math.prod(a0 + j * r0 + 1 for j in range(n)),
        )

    if not cfg.equal_steps:
        raise UnsupportedEventError(f"{event.kind.value} is implemented for equal steps only")
    c = cfg.step_right
    kept = b0 if event.kind is EventKind.first_n_up else a0
    if c == 1:
        return Fraction(math.prod(kept + j for j in range(n)), math.prod(a0 + b0 + j for j in range(n)))
    with mpmath.workdps(50):
        x = mpmath.mpf(kept) / c
        y = mpmath.mpf(a0 + b0) / c
        return mpmath.gammaprod([x + n, y], [x, y + n])
