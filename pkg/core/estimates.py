"""Binomial bounds, residue-class masses, gcd-restricted sums and mean estimates."""

import logging
import math
from fractions import Fraction
from typing import Dict, Iterable, List, Sequence

import numpy as np
from scipy import special, stats

from core.errors import ContractViolation
from core.numtheory import squarefree_divisors, table_for, tau
from core.rng import generator
from schemas.estimates import BoundReport, ExpectationRow, GcdSum, IndicatorSample, ResidueMass
from schemas.walk import RngStream

logger = logging.getLogger(__name__)

EXACT_BINOMIAL_MAX = 60
EXACT_EXPECTATION_MAX = 5_000
DEFAULT_ALPHA_GRID = tuple(round(0.01 * i, 2) for i in range(1, 100))


def _check_alpha(alpha) -> None:
    if not 0 < alpha < 1:
        raise ContractViolation(f"alpha must lie in (0, 1), got {alpha}")


def _divisor_mean(m: int, coprime_to: int = 1) -> float:
    return math.fsum(mu / d for d, mu in squarefree_divisors(m, coprime_to))


def binomial_pmf(n: int, alpha, k: int, exact: bool = False) -> float | Fraction:
    """C(n,k) α^k (1-α)^(n-k) in log space, or as a Fraction for n <= 60."""
    _check_alpha(alpha)
    if not 0 <= k <= n:
        raise ContractViolation(f"k must satisfy 0 <= k <= n, got k={k}, n={n}")
    if exact:
        if n > EXACT_BINOMIAL_MAX:
            raise ContractViolation(f"exact binomial mode is limited to n <= {EXACT_BINOMIAL_MAX}")
        a = Fraction(alpha)
        return math.comb(n, k) * a ** k * (1 - a) ** (n - k)
    log_p = (
        special.gammaln(n + 1) - special.gammaln(k + 1) - special.gammaln(n - k + 1)
        + special.xlogy(k, alpha) + special.xlog1py(n - k, -alpha)
    )
    return math.exp(log_p)


def binomial_pmf_vector(n: int, alpha: float) -> np.ndarray:
    _check_alpha(alpha)
    return stats.binom.pmf(np.arange(n + 1), n, alpha)


def check_binomial_sup_bound(n_max: int, alpha_grid: Sequence[float] = DEFAULT_ALPHA_GRID) -> BoundReport:
    """Checks P(bin(n,α)=k) <= (π/2)/sqrt(2π n α(1-α)) and looks for a case beating the constant 1."""
    if n_max < 1:
        raise ContractViolation(f"n_max must be >= 1, got {n_max}")
    alphas = np.asarray(alpha_grid, dtype=np.float64)
    if alphas.size == 0 or np.any((alphas <= 0) | (alphas >= 1)):
        raise ContractViolation("alpha grid must be non-empty and inside (0, 1)")

    worst, worst_case = -1.0, (1, float(alphas[0]), 0)
    sharp, witness = -1.0, None
    per_n = {}
    for n in range(1, n_max + 1):
        k = np.arange(n + 1)[:, None]
        pmf = stats.binom.pmf(k, n, alphas[None, :])
        scale = np.sqrt(2 * np.pi * n * alphas * (1 - alphas))[None, :]
        unit = pmf * scale
        ratio = unit / (np.pi / 2)
        i, j = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
        per_n[n] = float(ratio[i, j])
        if ratio[i, j] > worst:
            worst, worst_case = float(ratio[i, j]), (n, float(alphas[j]), int(i))
        if unit[i, j] > sharp:
            sharp = float(unit[i, j])
            witness = (n, float(alphas[j]), int(i))

    report = BoundReport(
        name="binomial_sup",
        n_range=(1, n_max),
        alpha_grid=alphas.tolist(),
        max_ratio=worst,
        worst_case=worst_case,
        witness=witness if sharp > 1.0 else None,
        constant=sharp,
        per_n_max=per_n,
    )
    logger.info("binomial sup bound n<=%d: max ratio %.6f at %s", n_max, worst, worst_case)
    return report


def residue_class_masses(n: int, alpha: float, d: int, c: int = 1) -> np.ndarray:
    """Masses of the d classes l·c ≡ r (mod d), r = 0..d-1."""
    if d < 1:
        raise ContractViolation(f"modulus d must be >= 1, got {d}")
    pmf = binomial_pmf_vector(n, alpha)
    classes = (np.arange(n + 1, dtype=np.int64) * c) % d
    return np.bincount(classes, weights=pmf, minlength=d)


def residue_class_mass(n: int, alpha, d: int, r: int, c: int = 1, exact: bool = False) -> ResidueMass:
    """Binomial mass of the indices l with l·c ≡ r (mod d)."""
    if d < 1:
        raise ContractViolation(f"modulus d must be >= 1, got {d}")
    if math.gcd(c, d) != 1:
        raise ContractViolation(f"twist c={c} must be coprime to d={d}")
    _check_alpha(alpha)
    r %= d
    if exact:
        mass = sum(
            (binomial_pmf(n, alpha, l, exact=True) for l in range(n + 1) if (l * c) % d == r),
            Fraction(0),
        )
    else:
        mass = float(residue_class_masses(n, alpha, d, c)[r])
    a = float(alpha)
    return ResidueMass(
        n=n,
        alpha=a,
        d=d,
        r=r,
        mass=float(mass),
        deviation_scaled=abs(float(mass) - 1.0 / d) * math.sqrt(a * (1 - a) * n),
    )


def residue_deviation_scan(ns: Iterable[int], d_max: int, alpha_grid: Sequence[float] = DEFAULT_ALPHA_GRID) -> BoundReport:
    """Empirical constant max |mass - 1/d|·sqrt(α(1-α)n) over the grid."""
    ns = sorted(ns)
    if not ns or d_max < 1:
        raise ContractViolation("scan needs at least one n and d_max >= 1")
    best, worst_case = 0.0, (ns[0], float(alpha_grid[0]), 1)
    per_n = {}
    for n in ns:
        top = 0.0
        for alpha in alpha_grid:
            pmf = binomial_pmf_vector(n, alpha)
            l = np.arange(n + 1, dtype=np.int64)
            scale = math.sqrt(alpha * (1 - alpha) * n)
            for d in range(2, d_max + 1):
                masses = np.bincount(l % d, weights=pmf, minlength=d)
                dev = float(np.max(np.abs(masses - 1.0 / d))) * scale
                if dev > top:
                    top = dev
                if dev > best:
                    best, worst_case = dev, (n, float(alpha), d)
        per_n[n] = top
    logger.info("residue scan n=%s d<=%d: constant %.4f", ns, d_max, best)
    return BoundReport(
        name="residue_class",
        n_range=(ns[0], ns[-1]),
        alpha_grid=list(alpha_grid),
        max_ratio=best,
        worst_case=worst_case,
        constant=best,
        per_n_max=per_n,
    )


def _gcd_main_term(m: int, k: int) -> float:
    if m % k:
        return 0.0
    return _divisor_mean(m // k) / k


def gcd_restricted_sum(M: int, s: int, t: int, k: int, alpha: float) -> GcdSum:
    """Σ over l <= M with gcd(l+s, M+t) = k of the bin(M, α) mass, with its divisor-sum main term."""
    if M < 1 or k < 1:
        raise ContractViolation(f"need M >= 1 and k >= 1, got M={M}, k={k}")
    if s < 0 or t < 0:
        raise ContractViolation("shifts s and t must be >= 0")
    pmf = binomial_pmf_vector(M, alpha)
    l = np.arange(M + 1, dtype=np.int64)
    g = np.gcd(l + s, M + t)
    value = math.fsum(pmf[g == k].tolist())
    main = _gcd_main_term(M + t, k)
    error = abs(value - main)
    spread = tau((M + t) // k) if (M + t) % k == 0 else 1
    return GcdSum(
        value=value,
        main_term=main,
        error=error,
        scaled_error=error * math.sqrt(alpha * (1 - alpha) * M) / spread,
    )


def gcd_value_distribution(M: int, s: int, t: int, alpha: float) -> Dict[int, float]:
    pmf = binomial_pmf_vector(M, alpha)
    g = np.gcd(np.arange(M + 1, dtype=np.int64) + s, M + t)
    values, inverse = np.unique(g, return_inverse=True)
    masses = np.bincount(inverse, weights=pmf)
    return {int(v): float(m) for v, m in zip(values, masses)}


def expected_indicator_main_term(n: int, a0: int, b0: int) -> float:
    """Σ_{d | n+a0+b0} μ(d)/d = φ(n+a0+b0)/(n+a0+b0)."""
    if n < 1:
        raise ContractViolation(f"n must be >= 1, got {n}")
    return _divisor_mean(n + a0 + b0)


def expected_q_closed_form(N: int, exact: bool = False) -> float | Fraction:
    """E(Q_N) = (1/N) Σ_{n=1..N} φ(n+2)/(n+1) for the walk from (1, 1)."""
    if N < 1:
        raise ContractViolation(f"N must be >= 1, got {N}")
    table = table_for(N + 2)
    phi = table.totient[3:N + 3]
    if exact:
        if N > EXACT_EXPECTATION_MAX:
            raise ContractViolation(f"exact mode is limited to N <= {EXACT_EXPECTATION_MAX}")
        return sum((Fraction(int(p), n + 1) for n, p in enumerate(phi.tolist(), start=1)), Fraction(0)) / N
    n = np.arange(2, N + 2, dtype=np.float64)
    return math.fsum((phi / n).tolist()) / N


def expected_q_scan(horizons: Iterable[int]) -> List[ExpectationRow]:
    target = 6.0 / math.pi ** 2
    rows = []
    for N in sorted(horizons):
        value = expected_q_closed_form(N)
        deviation = abs(value - target)
        rows.append(ExpectationRow(
            N=N,
            value=value,
            target=target,
            deviation=deviation,
            scaled=deviation * N / math.log(N) if N > 1 else None,
        ))
    return rows


def step_c_main_term(n: int, a0: int, b0: int, c: int) -> float:
    """Σ over d | a0+b0+nc with gcd(d, c) = 1 of μ(d)/d, for starts (1+kc, 1+qc)."""
    if n < 1 or c < 1:
        raise ContractViolation(f"need n >= 1 and c >= 1, got n={n}, c={c}")
    if (a0 - 1) % c or (b0 - 1) % c or a0 < 1 or b0 < 1:
        raise ContractViolation(f"start ({a0}, {b0}) is not of the form (1+kc, 1+qc) for c={c}")
    return _divisor_mean(a0 + b0 + n * c, coprime_to=c)


def alpha_walk_indicator_sample(
    n: int,
    a0: int,
    b0: int,
    alpha: float,
    c: int = 1,
    samples: int = 100_000,
    rng: RngStream | np.random.Generator | None = None,
) -> IndicatorSample:
    """Monte Carlo of P(position after n α-steps of size c is visible)."""
    _check_alpha(alpha)
    if n < 1 or samples < 2:
        raise ContractViolation("need n >= 1 and at least 2 samples")
    if rng is None:
        rng = RngStream(master_seed=0, stream_id=0)
    gen = generator(rng) if isinstance(rng, RngStream) else rng
    right = gen.binomial(n, alpha, samples).astype(np.int64)
    visible = np.gcd(a0 + c * right, b0 + c * (n - right)) == 1
    mean = float(np.mean(visible))
    stderr = float(np.std(visible, ddof=1) / math.sqrt(samples))
    if c == 1:
        main = expected_indicator_main_term(n, a0, b0)
    elif (a0 - 1) % c == 0 and (b0 - 1) % c == 0:
        main = step_c_main_term(n, a0, b0, c)
    else:
        main = math.nan
    return IndicatorSample(n=n, samples=samples, mean=mean, stderr=stderr, main_term=main)
