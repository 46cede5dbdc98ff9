import math
import random

import mpmath
import pytest
import sympy
from pydantic import ValidationError

from core.densities import (
    brute_force_density,
    constant_P,
    constant_T,
    delta_c,
    delta_c_mobius,
    delta_general,
    delta_general_mobius,
    euler_product_P,
    inv_zeta2,
    k_visible_density,
    mobius_partial_sum,
    zeta3_series,
)
from core.errors import ContractViolation
from core.numtheory import table_for
from schemas.density import DensityMethod, DensityParams, DensityValue

INV_ZETA2 = 6 / math.pi ** 2
T_REFERENCE = 0.28674742843447873


def params(a0, b0, r0, u0):
    return DensityParams(a0=a0, b0=b0, r0=r0, u0=u0)


def test_k_visible_density():
    assert k_visible_density(1) == pytest.approx(0.607927, abs=1e-6)
    assert k_visible_density(2) == pytest.approx(0.151982, abs=1e-6)
    with pytest.raises(ContractViolation):
        k_visible_density(0)


def test_mobius_partial_sum_within_tail():
    value = mobius_partial_sum(10_000)
    assert value.method is DensityMethod.mobius_truncated
    assert abs(value.value - INV_ZETA2) <= value.tail_bound


def test_delta_c_closed_form():
    assert delta_c(1).value == pytest.approx(INV_ZETA2)
    assert delta_c(2).value == pytest.approx(0.810569, abs=1e-6)
    # depends only on the primes dividing c
    assert delta_c(12).value == pytest.approx(delta_c(6).value)
    with pytest.raises(ContractViolation):
        delta_c(0)


@pytest.mark.parametrize("c", [1, 2, 3, 6, 10])
def test_delta_c_routes_agree(c):
    assert delta_c(c).agrees_with(delta_c_mobius(c, 20_000))


def test_delta_general_special_cases():
    assert delta_general(params(1, 1, 2, 2)).value == pytest.approx(0.810569, abs=1e-6)
    assert delta_general(params(2, 2, 2, 2)).value == 0.0
    assert delta_general(params(3, 5, 2, 2)).value == pytest.approx(delta_c(2).value)
    assert delta_general(params(7, 9, 1, 1)).value == pytest.approx(INV_ZETA2)


@pytest.mark.parametrize("p", [
    (1, 1, 2, 1),
    (2, 3, 4, 6),
    (1, 2, 3, 5),
    (4, 9, 6, 10),
    (5, 7, 1, 1),
    (3, 3, 3, 1),
])
def test_delta_general_routes_agree(p):
    closed = delta_general(params(*p))
    truncated = delta_general_mobius(params(*p), 50_000)
    assert closed.agrees_with(truncated)


@pytest.mark.parametrize("p,N,tol", [((1, 1, 1, 1), 2000, 0.005), ((1, 1, 2, 2), 1000, 0.01), ((1, 1, 2, 1), 1000, 0.01)])
def test_brute_force_density(p, N, tol):
    assert brute_force_density(params(*p), N) == pytest.approx(delta_general(params(*p)).value, abs=tol)


def test_brute_force_density_is_block_independent(monkeypatch):
    from core import config

    whole = brute_force_density(params(2, 3, 1, 2), 300)
    monkeypatch.setattr(config, "BLOCK_CELLS", 1000)
    assert brute_force_density(params(2, 3, 1, 2), 300) == whole


def test_zeta3_series_against_mpmath():
    value, error = zeta3_series(1000)
    assert abs(value - float(mpmath.zeta(3))) <= error


def test_constant_P_routes():
    p = constant_P()
    assert p.value == pytest.approx(0.8319073725807075, abs=1e-12)
    assert euler_product_P(100_000) == pytest.approx(p.value, abs=1e-9)


def test_constant_T_within_tail_bound():
    t = constant_T(100_000)
    assert t.depth == 100_000
    assert t.value >= T_REFERENCE
    assert t.value - T_REFERENCE <= t.tail_bound


def test_density_value_rejects_out_of_range():
    with pytest.raises(ValidationError):
        DensityValue(value=1.5, method=DensityMethod.euler_product)
    DensityValue(value=-0.001, method=DensityMethod.mobius_truncated, tail_bound=0.01)


def test_density_params_parse():
    assert DensityParams.parse("1, 1, 2, 2") == params(1, 1, 2, 2)
    with pytest.raises(ValueError):
        DensityParams.parse("1,1,2")
    assert inv_zeta2() == pytest.approx(INV_ZETA2)


def test_brute_force_small_grid_exact():
    # {1..4}²: (2,2), (2,4), (4,2), (4,4) and (3,3) share a factor
    assert brute_force_density(params(1, 1, 1, 1), 3) == 11 / 16


def test_delta_c_depends_on_radical_only():
    for c in range(1, 101):
        rad = math.prod(sympy.primefactors(c))
        value = delta_c(c).value
        assert value == pytest.approx(delta_c(rad).value, rel=1e-12)
        assert INV_ZETA2 - 1e-12 <= value <= 1.0


def test_equal_step_delta_factorises():
    for a0 in range(1, 31):
        for b0 in range(1, 31):
            for c in range(1, 31):
                expected = delta_c(c).value if math.gcd(a0, b0, c) == 1 else 0.0
                assert delta_general(params(a0, b0, c, c)).value == pytest.approx(expected, rel=1e-12)


def test_brute_force_error_shrinks_with_grid():
    grids = [(1, 1, 1, 1), (1, 1, 2, 2), (1, 2, 3, 5), (2, 3, 1, 2), (3, 5, 2, 2), (4, 9, 6, 10)]
    mean_errors = []
    for N in (250, 500, 1000, 2000):
        errors = [abs(brute_force_density(params(*p), N) - delta_general(params(*p)).value) for p in grids]
        mean_errors.append(sum(errors) / len(errors))
    assert mean_errors[-1] < mean_errors[0]
    assert mean_errors[2] + mean_errors[3] < mean_errors[0] + mean_errors[1]


@pytest.mark.slow
def test_random_grids_against_both_routes():
    rng = random.Random(5)
    table = table_for(10 ** 6)
    for _ in range(50):
        p = params(*(rng.randint(1, 30) for _ in range(4)))
        closed = delta_general(p)
        truncated = delta_general_mobius(p, 10 ** 6, table=table)
        assert abs(closed.value - truncated.value) <= truncated.tail_bound, p
        assert abs(brute_force_density(p, 2000) - closed.value) < 0.01, p


@pytest.mark.slow
def test_constant_T_stable_across_cutoffs():
    coarse = constant_T(10 ** 6)
    fine = constant_T(10 ** 7)
    assert abs(coarse.value - fine.value) < coarse.tail_bound
    assert abs(coarse.value - fine.value) < 1e-6
    assert abs(fine.value - T_REFERENCE) < 1e-6
