import math
import random
from fractions import Fraction

import numpy as np
import pytest
import sympy
from pydantic import ValidationError

from core import config
from core.errors import ContractViolation, SieveLimitError
from core.numtheory import (
    divisors,
    factorize,
    gcd,
    gcd_indicator,
    is_probable_prime,
    mertens_deviation_scan,
    mertens_weighted_sum,
    mobius_of,
    sieve,
    squarefree_divisors,
    table_for,
    tau,
    tau_growth_constant,
    totient_of,
)
from schemas.numtheory import Factorization


def test_sieve_matches_sympy():
    table = sieve(500)
    for n in range(1, 501):
        assert table.mu(n) == sympy.mobius(n)
        assert table.phi(n) == sympy.totient(n)
    assert table.primes_up_to(30) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert int(table.smallest_prime_factor[91]) == 7
    assert int(table.smallest_prime_factor[1]) == 1


def test_sieve_tables_are_read_only():
    table = sieve(100)
    with pytest.raises(ValueError):
        table.mobius[6] = 1


def test_table_lookups_outside_range():
    table = sieve(100)
    with pytest.raises(SieveLimitError):
        table.phi(101)
    with pytest.raises(ContractViolation):
        table.mu(0)


def test_table_for_respects_configured_limit():
    assert table_for(10).limit >= 10
    with pytest.raises(SieveLimitError):
        table_for(config.SIEVE_LIMIT + 1)


def test_sieve_rejects_bad_limits():
    with pytest.raises(ContractViolation):
        sieve(0)
    with pytest.raises(SieveLimitError):
        sieve(config.SIEVE_MAX + 1)


@pytest.mark.parametrize("n", [1, 2, 12, 97, 360, 1001, 65536, 600851475143, 2 ** 40 + 15])
def test_factorize_matches_sympy(n):
    assert dict(factorize(n).factors) == sympy.factorint(n)


def test_factorize_uses_given_table():
    table = sieve(1000)
    assert factorize(840, table).factors == [(2, 3), (3, 1), (5, 1), (7, 1)]


def test_is_probable_prime():
    assert is_probable_prime(2)
    assert not is_probable_prime(1)
    assert not is_probable_prime(561)  # Carmichael
    assert is_probable_prime(2 ** 61 - 1)
    assert is_probable_prime(18446744073709551557)  # largest prime below 2**64
    assert not is_probable_prime(3215031751)  # strong pseudoprime to bases 2, 3, 5, 7


def test_factorization_validation():
    Factorization(value=12, factors=[(2, 2), (3, 1)])
    with pytest.raises(ValidationError):
        Factorization(value=12, factors=[(4, 1), (3, 1)])
    with pytest.raises(ValidationError):
        Factorization(value=12, factors=[(3, 1), (2, 2)])
    with pytest.raises(ValidationError):
        Factorization(value=13, factors=[(2, 2), (3, 1)])


def test_single_value_functions():
    for n in (1, 6, 30, 49, 360, 9973):
        assert tau(n) == sympy.divisor_count(n)
        assert mobius_of(n) == sympy.mobius(n)
        assert totient_of(n) == sympy.totient(n)
    assert divisors(12) == [1, 2, 3, 4, 6, 12]


def test_squarefree_divisors():
    assert squarefree_divisors(12) == [(1, 1), (2, -1), (3, -1), (6, 1)]
    assert squarefree_divisors(12, coprime_to=2) == [(1, 1), (3, -1)]
    # φ(m)/m = Σ_{d|m} μ(d)/d
    m = 2 ** 3 * 3 * 7 ** 2
    assert sum(Fraction(mu, d) for d, mu in squarefree_divisors(m)) == Fraction(totient_of(m), m)


def test_gcd_indicator():
    for n in range(1, 40):
        for m in range(1, 40):
            for k in (1, 2, 3):
                assert gcd_indicator(n, m, k) == int(math.gcd(n, m) == k)


def test_gcd_properties():
    rng = random.Random(7)
    for _ in range(2000):
        a, b, c = (rng.randint(1, 10 ** 6) for _ in range(3))
        assert gcd(a, b) == gcd(b, a)
        assert gcd(gcd(a, b), c) == gcd(a, gcd(b, c))
        assert gcd(a, b) == gcd(a, a + b)
    with pytest.raises(ContractViolation):
        gcd(0, 5)


def test_gcd_indicator_full_grid():
    # Σ μ(d) over kd | gcd(n, m), accumulated on multiples of kd, equals [gcd(n, m) = k]
    size = 2000
    table = sieve(size)
    idx = np.arange(1, size + 1)
    g = np.gcd.outer(idx, idx)
    for k in range(1, 21):
        grid = np.zeros((size + 1, size + 1), dtype=np.int64)
        for d in range(1, size // k + 1):
            mu = table.mu(d)
            if mu:
                step = k * d
                grid[step::step, step::step] += mu
        assert np.array_equal(grid[1:, 1:], (g == k).astype(np.int64)), k
    rng = random.Random(11)
    for _ in range(3000):
        n, m, k = rng.randint(1, size), rng.randint(1, size), rng.randint(1, 20)
        assert gcd_indicator(n, m, k) == int(math.gcd(n, m) == k)


def test_gauss_totient_identity():
    limit = 100_000
    table = sieve(limit)
    acc = np.zeros(limit + 1, dtype=np.int64)
    for d in range(1, limit + 1):
        acc[d::d] += table.totient[d]
    assert np.array_equal(acc[1:], np.arange(1, limit + 1))


@pytest.mark.slow
def test_sieve_mobius_matches_factorization():
    table = table_for(10 ** 7)
    rng = random.Random(2024)
    for n in (rng.randint(1, table.limit) for _ in range(10_000)):
        assert table.mu(n) == mobius_of(n), n


@pytest.mark.slow
def test_factorized_mobius_matches_sympy_to_1e8():
    rng = random.Random(2025)
    for n in (rng.randint(1, 10 ** 8) for _ in range(10_000)):
        assert mobius_of(n) == sympy.mobius(n), n


def test_mertens_weighted_sum_small():
    assert mertens_weighted_sum(1) == 1
    assert mertens_weighted_sum(4) == Fraction(8, 3)


def test_mertens_exact_and_float_agree():
    assert float(mertens_weighted_sum(2000)) == pytest.approx(mertens_weighted_sum(2000, exact=False), abs=1e-12)


def test_mertens_exact_mode_up_to_table_limit():
    table = sieve(131_072)
    exact = mertens_weighted_sum(100_000, table=table)
    assert isinstance(exact, Fraction)
    assert float(exact) == pytest.approx(mertens_weighted_sum(100_000, exact=False, table=table), abs=1e-9)


def test_mertens_beyond_table_limit():
    with pytest.raises(SieveLimitError):
        mertens_weighted_sum(1001, table=sieve(1000))
    with pytest.raises(SieveLimitError):
        mertens_weighted_sum(config.SIEVE_LIMIT + 1)


def test_mertens_deviation_is_logarithmic():
    rows = mertens_deviation_scan([1000, 10_000, 100_000])
    assert [r.n for r in rows] == [1000, 10_000, 100_000]
    assert all(r.scaled < 3.0 for r in rows)
    assert rows[0].value == pytest.approx(float(mertens_weighted_sum(1000)), abs=1e-12)


def test_tau_growth_constant():
    report = tau_growth_constant(10_000)
    assert report.constant == pytest.approx(sympy.divisor_count(report.argmax) / report.argmax ** 0.25)
    assert all(sympy.divisor_count(n) / n ** 0.25 <= report.constant + 1e-12 for n in range(1, 2000))
