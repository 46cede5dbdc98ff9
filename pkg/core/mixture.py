"""Beta laws, exchange probabilities and the de Finetti mixture checks."""

import logging
import math
from fractions import Fraction
from typing import List, Sequence

import numpy as np
from scipy import integrate, special, stats

from core.errors import ContractViolation
from core.rng import generator
from core.walks import run_trials
from schemas.mixture import BetaParams, DeFinettiReport, SlopeReport, StepRecord
from schemas.walk import RngStream, WalkConfig, WalkVariant

logger = logging.getLogger(__name__)

EXACT_LAW_MAX = 30
HALF_PI = math.pi / 2


def _is_int(x) -> bool:
    return isinstance(x, (int, np.integer)) and not isinstance(x, bool)


def _record(bits) -> StepRecord:
    return bits if isinstance(bits, StepRecord) else StepRecord(bits=list(bits))


def beta_function(a: float, b: float) -> float | Fraction:
    """Γ(a)Γ(b)/Γ(a+b); positive integers give the exact ((a+b)/(ab)) / C(a+b, a)."""
    if a <= 0 or b <= 0:
        raise ContractViolation(f"beta parameters must be positive, got ({a}, {b})")
    if _is_int(a) and _is_int(b):
        a, b = int(a), int(b)
        return Fraction(a + b, a * b) / math.comb(a + b, a)
    return math.exp(special.betaln(a, b))


def beta_density(p: BetaParams, alpha: float) -> float:
    if not 0.0 < alpha < 1.0:
        raise ContractViolation(f"alpha must lie in (0, 1), got {alpha}")
    log_f = special.xlogy(p.a - 1, alpha) + special.xlog1py(p.b - 1, -alpha) - special.betaln(p.a, p.b)
    return math.exp(log_f)


def beta_cdf(p: BetaParams, x: float) -> float:
    return float(stats.beta.cdf(x, p.a, p.b))


def beta_sample(p: BetaParams, rng: RngStream | np.random.Generator, size: int | None = None):
    """Beta(a, b) deviates as X/(X+Y) with X ~ Gamma(a), Y ~ Gamma(b)."""
    gen = generator(rng) if isinstance(rng, RngStream) else rng
    x = gen.standard_gamma(p.a, size)
    y = gen.standard_gamma(p.b, size)
    return x / (x + y)


def exchange_probability(a0: int, b0: int, c: int, bits, step_up: int | None = None) -> Fraction:
    """Exact probability that the walk's first steps follow ``bits`` (1 = right).

    With equal steps c this is Π(a0+jc)·Π(b0+jc)/Π(a0+b0+jc) and depends on the
    bits only through t_n. With ``step_up`` != c the law is the chain-rule product
    Π(a0+j r0)·Π(b0+j u0)/Π(a0+b0+j u0+(r0-u0) t_j), which is not exchangeable.
    """
    record = _record(bits)
    if min(a0, b0, c) < 1 or (step_up is not None and step_up < 1):
        raise ContractViolation("start and step sizes must be positive integers")
    r0, u0 = c, (c if step_up is None else step_up)
    n, t = record.n, record.t_n

    up = math.prod(b0 + j * u0 for j in range(n - t))
    right = math.prod(a0 + j * r0 for j in range(t))
    if r0 == u0:
        return Fraction(right * up, math.prod(a0 + b0 + j * c for j in range(n)))
    total = math.prod(a0 + b0 + j * u0 + (r0 - u0) * t_j for j, t_j in enumerate(record.running()))
    return Fraction(right * up, total)


def exchange_probability_beta(a0: int, b0: int, c: int, bits) -> float:
    record = _record(bits)
    a, b = a0 / c, b0 / c
    t, n = record.t_n, record.n
    return math.exp(special.betaln(a + t, b + n - t) - special.betaln(a, b))


def position_law_exact(a0: int, b0: int, n: int, c: int = 1) -> List[Fraction]:
    """Entry k is the probability of exactly k right steps among the first n."""
    if n < 0 or n > EXACT_LAW_MAX:
        raise ContractViolation(f"exact position law needs 0 <= n <= {EXACT_LAW_MAX}, got {n}")
    if n == 0:
        return [Fraction(1)]
    return [
        math.comb(n, k) * exchange_probability(a0, b0, c, [1] * k + [0] * (n - k))
        for k in range(n + 1)
    ]


def position_law(a0: int, b0: int, n: int, c: int = 1) -> List[float]:
    if n < 0:
        raise ContractViolation(f"n must be >= 0, got {n}")
    a, b = a0 / c, b0 / c
    k = np.arange(n + 1, dtype=np.float64)
    log_comb = special.gammaln(n + 1) - special.gammaln(k + 1) - special.gammaln(n - k + 1)
    log_p = log_comb + special.betaln(a + k, b + n - k) - special.betaln(a, b)
    return np.exp(log_p).tolist()


def _require_mixture_walk(cfg: WalkConfig) -> int:
    if cfg.kind.variant is not WalkVariant.polya:
        raise ContractViolation(f"mixture checks need a polya walk, got {cfg.kind.variant.value}")
    if not cfg.equal_steps:
        raise ContractViolation("mixture checks need equal step sizes")
    return cfg.step_right


def definetti_check(
    cfg: WalkConfig,
    n: int,
    trials: int,
    master_seed: int = 0,
    workers: int | None = None,
) -> DeFinettiReport:
    """KS distance between simulated right-step frequencies and Beta(a0/c, b0/c)."""
    c = _require_mixture_walk(cfg)
    if trials < 2:
        raise ContractViolation(f"definetti_check needs at least 2 trials, got {trials}")
    params = BetaParams.from_walk(*cfg.start, c)
    rows = run_trials(cfg, [n], trials, [1], master_seed, workers)[n].rows
    limits = [row.right_count / n for row in rows]
    result = stats.kstest(limits, stats.beta(params.a, params.b).cdf)
    logger.info("de Finetti check start=%s c=%d n=%d trials=%d ks=%.4f", cfg.start, c, n, trials, result.statistic)
    return DeFinettiReport(
        config=cfg,
        horizon=n,
        trials=trials,
        master_seed=master_seed,
        beta=params,
        ks_statistic=float(result.statistic),
        p_value=float(result.pvalue),
        limit_frequencies=limits,
    )


def slope_limit_density(a0: float, b0: float, psi: float) -> float:
    """Density of the limit polar angle for mixture parameters (a0, b0)."""
    if not 0.0 < psi < HALF_PI:
        raise ContractViolation(f"psi must lie in (0, pi/2), got {psi}")
    s, co = math.sin(psi), math.cos(psi)
    log_f = (b0 - 1) * math.log(s) + (a0 - 1) * math.log(co) - (a0 + b0) * math.log(s + co)
    return math.exp(log_f - special.betaln(a0, b0))


def _slope_cdf(a: float, b: float, psi):
    psi = np.clip(psi, 0.0, HALF_PI)
    return stats.beta.sf(1.0 / (1.0 + np.tan(psi)), a, b)


def slope_cdf(a: float, b: float, psi: float) -> float:
    if psi <= 0.0:
        return 0.0
    if psi >= HALF_PI:
        return 1.0
    return float(_slope_cdf(a, b, psi))


def slope_check(
    cfg: WalkConfig,
    n: int,
    trials: int,
    master_seed: int = 0,
    workers: int | None = None,
) -> SlopeReport:
    c = _require_mixture_walk(cfg)
    if trials < 2:
        raise ContractViolation(f"slope_check needs at least 2 trials, got {trials}")
    params = BetaParams.from_walk(*cfg.start, c)
    rows = run_trials(cfg, [n], trials, [1], master_seed, workers)[n].rows
    angles = [row.slope_angle for row in rows]
    result = stats.kstest(angles, lambda x: _slope_cdf(params.a, params.b, x))
    radial = max(
        abs(row.radial_ratio - 1.0 / (math.sin(row.slope_angle) + math.cos(row.slope_angle)))
        for row in rows
    )
    return SlopeReport(
        config=cfg,
        horizon=n,
        trials=trials,
        master_seed=master_seed,
        ks_statistic=float(result.statistic),
        p_value=float(result.pvalue),
        max_radial_deviation=radial,
        angles=angles,
    )


def inverse_moment(a: float, b: float, s: float) -> float:
    """E[(α(1-α))^-s] under Beta(a, b): B(a-s, b-s)/B(a, b), infinite unless a, b > s."""
    if a <= 0 or b <= 0:
        raise ContractViolation(f"beta parameters must be positive, got ({a}, {b})")
    if a <= s or b <= s:
        return math.inf
    return math.exp(special.betaln(a - s, b - s) - special.betaln(a, b))


def inverse_moment_truncated(a: float, b: float, s: float, eps: float) -> float:
    """The same integral over [eps, 1-eps]; grows without bound as eps -> 0 when divergent."""
    if not 0.0 < eps < 0.5:
        raise ContractViolation(f"eps must lie in (0, 1/2), got {eps}")
    p = BetaParams(a=a, b=b)

    def integrand(x: float) -> float:
        return (x * (1.0 - x)) ** (-s) * beta_density(p, x)

    value, _ = integrate.quad(integrand, eps, 1.0 - eps, points=[0.5], limit=200)
    return value


def inverse_moment_growth(a: float, b: float, s: float, eps_grid: Sequence[float] = (1e-2, 1e-4, 1e-6, 1e-8)) -> List[float]:
    return [inverse_moment_truncated(a, b, s, eps) for eps in eps_grid]
