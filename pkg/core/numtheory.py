"""Arithmetic functions and sieves.

Every density and expectation in the toolkit reduces to the Möbius function,
Euler's totient and divisor enumeration. Tables are built once per limit with
numpy and shared read-only; single values come from ``factorize``.
"""

import logging
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, List, Tuple

import mpmath
import numpy as np

from core import config
from core.errors import ContractViolation, SieveLimitError
from schemas.numtheory import Factorization, GrowthReport, MertensRow

logger = logging.getLogger(__name__)

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_MIN_TABLE = 1 << 16
MERTENS_DPS = 40


@dataclass(frozen=True)
class ArithmeticTable:
    limit: int
    mobius: np.ndarray
    totient: np.ndarray
    smallest_prime_factor: np.ndarray
    primes: np.ndarray = field(repr=False)

    def covers(self, n: int) -> bool:
        return 1 <= n <= self.limit

    def mu(self, n: int) -> int:
        self._check(n)
        return int(self.mobius[n])

    def phi(self, n: int) -> int:
        self._check(n)
        return int(self.totient[n])

    def primes_up_to(self, bound: int) -> List[int]:
        stop = int(np.searchsorted(self.primes, bound, side="right"))
        return self.primes[:stop].tolist()

    def _check(self, n: int) -> None:
        if n < 1:
            raise ContractViolation(f"arithmetic functions are defined for n >= 1, got {n}")
        if n > self.limit:
            raise SieveLimitError(n, self.limit)


def gcd(x: int, y: int) -> int:
    if x < 1 or y < 1:
        raise ContractViolation(f"gcd expects positive integers, got ({x}, {y})")
    return math.gcd(x, y)


def is_probable_prime(n: int) -> bool:
    # deterministic for n < 3.3e24 with these bases
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def sieve(limit: int) -> ArithmeticTable:
    if limit < 1:
        raise ContractViolation(f"sieve limit must be >= 1, got {limit}")
    if limit > config.SIEVE_MAX:
        raise SieveLimitError(limit, config.SIEVE_MAX)

    started = time.perf_counter()
    size = limit + 1
    root = math.isqrt(limit)

    spf = np.zeros(size, dtype=np.int64)
    for p in range(2, root + 1):
        if spf[p] == 0:
            multiples = spf[p * p::p]
            multiples[multiples == 0] = p

    is_prime = spf == 0
    is_prime[:2] = False
    primes = np.flatnonzero(is_prime)
    spf[is_prime] = primes
    spf[1] = 1

    totient = np.arange(size, dtype=np.int64)
    mobius = np.ones(size, dtype=np.int8)
    mobius[0] = 0
    for p in primes.tolist():
        block = slice(p, size, p)
        totient[block] -= totient[block] // p
        mobius[block] = -mobius[block]
        if p <= root:
            mobius[p * p::p * p] = 0

    for array in (mobius, totient, spf, primes):
        array.flags.writeable = False

    logger.info("sieve limit=%d primes=%d in %.2fs", limit, primes.size, time.perf_counter() - started)
    return ArithmeticTable(
        limit=limit,
        mobius=mobius,
        totient=totient,
        smallest_prime_factor=spf,
        primes=primes,
    )


@lru_cache(maxsize=8)
def _cached_sieve(limit: int) -> ArithmeticTable:
    return sieve(limit)


def table_for(n: int) -> ArithmeticTable:
    """Cached table covering ``n``; limits are powers of two capped by the configured sieve limit."""
    if n > config.SIEVE_LIMIT:
        raise SieveLimitError(n, config.SIEVE_LIMIT)
    limit = max(_MIN_TABLE, 1 << (max(n, 1) - 1).bit_length())
    return _cached_sieve(min(limit, config.SIEVE_LIMIT))


def factorize(n: int, table: ArithmeticTable | None = None) -> Factorization:
    if n < 1:
        raise ContractViolation(f"factorize expects n >= 1, got {n}")
    if n == 1:
        return Factorization(value=1, factors=[])

    counts: dict[int, int] = {}
    if table is not None and table.covers(n):
        m = n
        while m > 1:
            p = int(table.smallest_prime_factor[m])
            m //= p
            counts[p] = counts.get(p, 0) + 1
        return Factorization(value=n, factors=sorted(counts.items()))

    root = math.isqrt(n)
    if table is None or table.limit < root:
        table = table_for(root + 1)
    m = n
    for p in table.primes_up_to(root):
        if p * p > m:
            break
        while m % p == 0:
            m //= p
            counts[p] = counts.get(p, 0) + 1
    if m > 1:
        counts[m] = counts.get(m, 0) + 1
    return Factorization(value=n, factors=sorted(counts.items()))


def tau(n: int) -> int:
    return math.prod(e + 1 for _, e in factorize(n).factors)


def mobius_of(n: int) -> int:
    factors = factorize(n).factors
    if any(e > 1 for _, e in factors):
        return 0
    return -1 if len(factors) % 2 else 1


def totient_of(n: int) -> int:
    result = n
    for p, _ in factorize(n).factors:
        result -= result // p
    return result


def divisors(n: int) -> List[int]:
    result = [1]
    for p, e in factorize(n).factors:
        result = [d * p ** j for d in result for j in range(e + 1)]
    return sorted(result)


def squarefree_divisors(n: int, coprime_to: int = 1) -> List[Tuple[int, int]]:
    """Pairs (d, μ(d)) for the squarefree divisors of n, optionally restricted to gcd(d, coprime_to) = 1."""
    primes = [p for p in factorize(n).primes if coprime_to % p != 0]
    pairs = []
    for size in range(len(primes) + 1):
        sign = -1 if size % 2 else 1
        for subset in combinations(primes, size):
            pairs.append((math.prod(subset), sign))
    return sorted(pairs)


def gcd_indicator(n: int, m: int, k: int = 1) -> int:
    """δ_k(gcd(n, m)) computed as Σ μ(d) over d with kd | n and kd | m."""
    if min(n, m, k) < 1:
        raise ContractViolation("gcd_indicator expects positive arguments")
    if n % k or m % k:
        return 0
    return sum(mu for _, mu in squarefree_divisors(gcd(n // k, m // k)))


def _pairwise_sum(terms: List[Fraction]) -> Fraction:
    if not terms:
        return Fraction(0)
    while len(terms) > 1:
        merged = [terms[i] + terms[i + 1] for i in range(0, len(terms) - 1, 2)]
        if len(terms) % 2:
            merged.append(terms[-1])
        terms = merged
    return terms[0]


def mertens_weighted_sum(n: int, exact: bool = True, table: ArithmeticTable | None = None) -> Fraction | float:
    """Σ_{d<=n} μ(d)/d · floor(n/d); a Fraction when ``exact``, a correctly rounded float otherwise.

    The exact sum groups d into the O(√n) runs sharing one quotient floor(n/d).
    """
    if n < 1:
        raise ContractViolation(f"n must be >= 1, got {n}")
    if table is None:
        table = table_for(n)
    elif n > table.limit:
        raise SieveLimitError(n, table.limit)

    d = np.arange(1, n + 1, dtype=np.int64)
    mu = table.mobius[1:n + 1].astype(np.int64)
    if exact:
        blocks = []
        lo = 1
        while lo <= n:
            q = n // lo
            hi = n // q
            run = [Fraction(int(mu[i - 1]), i) for i in range(lo, hi + 1) if mu[i - 1]]
            if run:
                blocks.append(q * _pairwise_sum(run))
            lo = hi + 1
        return _pairwise_sum(blocks)
    terms = mu * (n // d) / d
    return math.fsum(terms.tolist())


def mertens_deviation_scan(limits: Iterable[int], dps: int = MERTENS_DPS) -> List[MertensRow]:
    """Deviation of the weighted Möbius sum from 6n/π², summed in ``dps``-digit arithmetic."""
    limits = sorted(limits)
    table = table_for(limits[-1])
    rows = []
    with mpmath.workdps(dps):
        for n in limits:
            support = np.flatnonzero(table.mobius[1:n + 1]) + 1
            value = mpmath.fsum(
                mpmath.mpf(int(table.mobius[d]) * (n // d)) / d for d in support.tolist()
            )
            main = 6 * mpmath.mpf(n) / mpmath.pi ** 2
            deviation = abs(value - main)
            rows.append(MertensRow(
                n=n,
                value=float(value),
                main_term=float(main),
                deviation=float(deviation),
                scaled=float(deviation / mpmath.log(n)) if n > 1 else None,
            ))
    return rows


def tau_growth_constant(limit: int, exponent: float = 0.25) -> GrowthReport:
    """Measured C = max τ(n)/n^exponent over n <= limit."""
    if limit < 1:
        raise ContractViolation(f"limit must be >= 1, got {limit}")
    counts = np.zeros(limit + 1, dtype=np.int64)
    for d in range(1, limit + 1):
        counts[d::d] += 1
    n = np.arange(1, limit + 1, dtype=np.float64)
    ratio = counts[1:] / n ** exponent
    best = int(np.argmax(ratio))
    return GrowthReport(limit=limit, exponent=exponent, constant=float(ratio[best]), argmax=best + 1)
