"""Limit densities of visible points, each available by two routes.

Closed forms rewrite the infinite Euler products over primes not dividing m as
(6/π²) divided by the finite product over p | m, so only the constant T needs
to iterate over primes. Truncated Möbius sums and brute-force lattice counts
are the independent routes used to cross-check them.
"""

import logging
import math
from typing import Tuple

import numpy as np

from core import config
from core.errors import ContractViolation, SieveLimitError
from core.numtheory import ArithmeticTable, factorize, table_for
from schemas.density import DensityMethod, DensityParams, DensityValue

logger = logging.getLogger(__name__)


def _table(depth: int, table: ArithmeticTable | None) -> ArithmeticTable:
    if depth < 1:
        raise ContractViolation(f"depth must be >= 1, got {depth}")
    if table is None:
        return table_for(depth)
    if depth > table.limit:
        raise SieveLimitError(depth, table.limit)
    return table


def _prime_set(n: int) -> set[int]:
    return set(factorize(n).primes)


def _local_factor_product(m: int) -> float:
    return math.prod(1.0 - 1.0 / p ** 2 for p in _prime_set(m))


def inv_zeta2() -> float:
    return 6.0 / math.pi ** 2


def mobius_partial_sum(depth: int, table: ArithmeticTable | None = None) -> DensityValue:
    table = _table(depth, table)
    d = np.arange(1, depth + 1, dtype=np.float64)
    terms = table.mobius[1:depth + 1] / d ** 2
    return DensityValue(
        value=math.fsum(terms.tolist()),
        method=DensityMethod.mobius_truncated,
        depth=depth,
        tail_bound=1.0 / depth,
    )


def k_visible_density(k: int) -> float:
    if k < 1:
        raise ContractViolation(f"k must be >= 1, got {k}")
    return inv_zeta2() / k ** 2


def delta_c(c: int) -> DensityValue:
    if c < 1:
        raise ContractViolation(f"step c must be >= 1, got {c}")
    return DensityValue(
        value=inv_zeta2() / _local_factor_product(c),
        method=DensityMethod.euler_product,
        tail_bound=0.0,
    )


def delta_c_mobius(c: int, depth: int, table: ArithmeticTable | None = None) -> DensityValue:
    if c < 1:
        raise ContractViolation(f"step c must be >= 1, got {c}")
    table = _table(depth, table)
    d = np.arange(1, depth + 1, dtype=np.int64)
    mask = np.gcd(d, c) == 1
    df = d[mask].astype(np.float64)
    terms = table.mobius[1:depth + 1][mask] / df ** 2
    return DensityValue(
        value=math.fsum(terms.tolist()),
        method=DensityMethod.mobius_truncated,
        depth=depth,
        tail_bound=1.0 / depth,
    )


def delta_general(p: DensityParams) -> DensityValue:
    """Visible-point density of the grid (a0 + n r0, b0 + m u0) in closed form."""
    if math.gcd(p.a0, p.b0, p.r0, p.u0) > 1:
        return DensityValue(value=0.0, method=DensityMethod.euler_product, tail_bound=0.0)

    A, B, R, U = (_prime_set(x) for x in (p.a0, p.b0, p.r0, p.u0))
    H = ((R - U) & A) | ((U - R) & B)
    value = math.prod(1.0 - 1.0 / q for q in H)
    value *= inv_zeta2() / _local_factor_product(math.lcm(p.r0, p.u0))
    return DensityValue(value=value, method=DensityMethod.euler_product, tail_bound=0.0)


def delta_general_mobius(p: DensityParams, depth: int, table: ArithmeticTable | None = None) -> DensityValue:
    table = _table(depth, table)
    d = np.arange(1, depth + 1, dtype=np.int64)
    mu = table.mobius[1:depth + 1].astype(np.int64)
    g_r = np.gcd(d, p.r0)
    g_u = np.gcd(d, p.u0)
    mask = (mu != 0) & (p.a0 % g_r == 0) & (p.b0 % g_u == 0)
    df = d[mask].astype(np.float64)
    terms = mu[mask] * (g_r[mask] * g_u[mask]) / df ** 2
    return DensityValue(
        value=math.fsum(terms.tolist()),
        method=DensityMethod.mobius_truncated,
        depth=depth,
        tail_bound=p.r0 * p.u0 / depth,
    )


def brute_force_density(p: DensityParams, N: int) -> float:
    """Fraction of 0 <= n, m <= N with gcd(a0 + n r0, b0 + m u0) = 1."""
    if N < 1:
        raise ContractViolation(f"grid size N must be >= 1, got {N}")
    steps = np.arange(N + 1, dtype=np.int64)
    xs = p.a0 + p.r0 * steps
    ys = p.b0 + p.u0 * steps
    rows = max(1, config.BLOCK_CELLS // (N + 1))
    visible = 0
    for start in range(0, N + 1, rows):
        block = np.gcd(xs[start:start + rows, None], ys[None, :])
        visible += int(np.count_nonzero(block == 1))
    return visible / (N + 1) ** 2


def zeta3_series(terms: int = 10_000) -> Tuple[float, float]:
    """ζ(3) from Σ_{n<=terms} 1/n³ plus the Euler-Maclaurin tail 1/(2M²) - 1/(2M³) + 1/(4M⁴)."""
    if terms < 10:
        raise ContractViolation("zeta3_series needs at least 10 terms")
    n = np.arange(1, terms + 1, dtype=np.float64)
    head = math.fsum((1.0 / n ** 3).tolist())
    M = float(terms)
    tail = 1 / (2 * M ** 2) - 1 / (2 * M ** 3) + 1 / (4 * M ** 4)
    error = 1 / (12 * M ** 6) + 4 * np.finfo(float).eps
    return head + tail, error


def constant_P(terms: int = 10_000) -> DensityValue:
    zeta3, error = zeta3_series(terms)
    return DensityValue(
        value=1.0 / zeta3,
        method=DensityMethod.euler_product,
        depth=terms,
        tail_bound=error / (zeta3 * zeta3 - zeta3 * error),
    )


def euler_product_P(cutoff: int) -> float:
    primes = np.asarray(table_for(cutoff).primes_up_to(cutoff), dtype=np.float64)
    return math.exp(math.fsum(np.log1p(-1.0 / primes ** 3).tolist()))


def constant_T(cutoff: int | None = None) -> DensityValue:
    """Pairwise-coprime triple constant Π_p (1 - 3(1-1/p)/p² - 1/p³) over primes up to ``cutoff``.

    For p > cutoff each factor lies in [exp(-6/p²), 1] and Σ_{p>X} 1/p² < 1/X, so the
    true value lies in [T_X·exp(-6/X), T_X]; the tail bound is that interval's width.
    """
    cutoff = cutoff or config.T_CUTOFF
    primes = np.asarray(table_for(cutoff).primes_up_to(cutoff), dtype=np.float64)
    logs = np.log1p(-3.0 / primes ** 2 + 2.0 / primes ** 3)
    value = math.exp(math.fsum(logs.tolist()))
    logger.info("constant T over %d primes <= %d", primes.size, cutoff)
    return DensityValue(
        value=value,
        method=DensityMethod.euler_product,
        depth=cutoff,
        tail_bound=-value * math.expm1(-6.0 / cutoff),
    )
