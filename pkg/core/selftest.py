"""Quick property checks over every module, used by the ``selftest`` command."""

import itertools
import logging
import math
from fractions import Fraction
from typing import Callable, List, Tuple

import numpy as np

from core.densities import delta_c, delta_general, delta_general_mobius, mobius_partial_sum
from core.estimates import check_binomial_sup_bound, expected_q_closed_form, residue_class_masses
from core.mixture import exchange_probability, exchange_probability_beta, position_law_exact
from core.numtheory import mertens_weighted_sum, mobius_of, table_for
from core.walks import exact_event_probability, simulate
from schemas.density import DensityParams
from schemas.experiment import CheckResult
from schemas.walk import EventKind, RngStream, TrajectoryEvent, WalkConfig

logger = logging.getLogger(__name__)


def _gauss_identity() -> Tuple[bool, str]:
    table = table_for(1000)
    bad = [n for n in range(1, 1001) if sum(table.phi(d) for d in range(1, n + 1) if n % d == 0) != n]
    return not bad, f"sum of phi over divisors differs from n at {bad[:5]}" if bad else "n <= 1000"


def _mobius_cross_check() -> Tuple[bool, str]:
    table = table_for(2000)
    bad = [n for n in range(1, 2001) if table.mu(n) != mobius_of(n)]
    return not bad, f"sieve and factorization disagree at {bad[:5]}" if bad else "n <= 2000"


def _mertens_small() -> Tuple[bool, str]:
    value = mertens_weighted_sum(4)
    return value == Fraction(8, 3), f"weighted sum at 4 is {value}"


def _density_routes() -> Tuple[bool, str]:
    p = DensityParams(a0=1, b0=1, r0=2, u0=2)
    closed = delta_general(p)
    truncated = delta_general_mobius(p, depth=20_000)
    same_c = abs(closed.value - delta_c(2).value) < 1e-15
    base = abs(mobius_partial_sum(20_000).value - 6 / math.pi ** 2) < 1e-4
    return closed.agrees_with(truncated) and same_c and base, f"closed {closed.value:.9f} truncated {truncated.value:.9f}"


def _exchange_sums() -> Tuple[bool, str]:
    for a0, b0, c in ((1, 1, 1), (2, 3, 1), (3, 1, 2)):
        total = sum(exchange_probability(a0, b0, c, bits) for bits in itertools.product((0, 1), repeat=8))
        if total != 1:
            return False, f"({a0},{b0},c={c}) sums to {total}"
        bits = [1, 0, 0, 1, 1, 0, 1, 0]
        if not math.isclose(float(exchange_probability(a0, b0, c, bits)), exchange_probability_beta(a0, b0, c, bits), rel_tol=1e-12):
            return False, f"beta form disagrees for ({a0},{b0},c={c})"
    uniform = position_law_exact(1, 1, 5) == [Fraction(1, 6)] * 6
    return uniform, "all 2^8 bit strings; uniform law from (1,1)"


def _binomial_bound() -> Tuple[bool, str]:
    report = check_binomial_sup_bound(60)
    return report.holds and report.witness is not None, f"max ratio {report.max_ratio:.6f}, witness {report.witness}"


def _residue_partition() -> Tuple[bool, str]:
    masses = residue_class_masses(200, 0.3, 7, c=3)
    return abs(float(np.sum(masses)) - 1.0) < 1e-12, f"sum {float(np.sum(masses))!r}"


def _closed_form_expectation() -> Tuple[bool, str]:
    value = expected_q_closed_form(3, exact=True)
    return value == Fraction(8, 9), f"E(Q_3) = {value}"


def _trajectory_events() -> Tuple[bool, str]:
    cfg = WalkConfig(start=(1, 1))
    up = exact_event_probability(cfg, TrajectoryEvent(kind=EventKind.first_n_up, n=7))
    stay = exact_event_probability(WalkConfig(start=(3, 1)), TrajectoryEvent(kind=EventKind.stay_at_height_one, n=10))
    return up == Fraction(1, 8) and stay == Fraction(3, 13), f"first 7 up {up}, stay {stay}"


def _determinism() -> Tuple[bool, str]:
    cfg = WalkConfig(start=(1, 1))
    stream = RngStream(master_seed=7, stream_id=3)
    first = simulate(cfg, 2000, [1, 2], stream)
    second = simulate(cfg, 2000, [1, 2], stream)
    return first == second, f"q = {first.q!r}"


CHECKS: List[Tuple[str, Callable[[], Tuple[bool, str]]]] = [
    ("gauss_identity", _gauss_identity),
    ("mobius_cross_check", _mobius_cross_check),
    ("mertens_small", _mertens_small),
    ("density_routes", _density_routes),
    ("exchange_sums", _exchange_sums),
    ("binomial_bound", _binomial_bound),
    ("residue_partition", _residue_partition),
    ("closed_form_expectation", _closed_form_expectation),
    ("trajectory_events", _trajectory_events),
    ("determinism", _determinism),
]


def selftest() -> List[CheckResult]:
    results = []
    for name, check in CHECKS:
        try:
            passed, detail = check()
        except Exception as e:
            passed, detail = False, f"{type(e).__name__}: {e}"
        if not passed:
            logger.error("selftest %s failed: %s", name, detail)
        results.append(CheckResult(name=name, passed=passed, detail=detail))
    return results
