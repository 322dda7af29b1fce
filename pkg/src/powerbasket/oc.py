"""Operating characteristics: exact by outcome enumeration, or simulated.

The exact engine iterates the full product space of response counts and
accumulates probability-weighted rejection indicators with exact (fsum)
summation, so results are independent of chunking and worker count.  The
simulated engine draws binomial outcomes by CDF inversion from a Philox
counter-based generator, which makes every run bit-reproducible from its
seed: uniforms are the row-major draws of numpy's ``Philox(key=seed)``
stream, and replicate j of basket k consumes uniform (j, k).

Per-design tail probabilities are computed once per outcome and reused
across thresholds and scenarios; pairwise weights are read from lookup
tables built with the scalar weight functions, so a table-driven result
is bit-identical to recomputing every weight.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy import special as _sci_special
from scipy import stats as _sci_stats

from . import bma as _bma
from .weights import (
    BmaDesign,
    DesignSpec,
    MmlDesign,
    TrialConfig,
    _solve_mml_cached,
    cpp_pairwise_weight,
    global_jsd_weight,
    jsd_pairwise_weight,
    mml_weights,
)

__all__ = [
    "Scenario",
    "OCStandardErrors",
    "OCResult",
    "CapacityError",
    "ecd",
    "exact_oc",
    "simulate_oc",
    "draw_responses",
]

#: largest outcome space the exact engine will enumerate
CAPACITY_LIMIT = 10_000_000

# fixed decomposition constants; changing them changes float merge order,
# so they are deliberately not parameters
_EXACT_CHUNK = 1 << 19
_SIM_BLOCK = 2048
_CACHE_ROW_LIMIT = 2_000_000


class CapacityError(RuntimeError):
    """Outcome space too large for exact enumeration."""


@dataclass(frozen=True)
class Scenario:
    """True per-basket response rates under one data-generating setting."""

    name: str
    true_rates: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.true_rates:
            raise ValueError("a scenario needs at least one rate")
        if any(not 0.0 < p < 1.0 for p in self.true_rates):
            raise ValueError("true rates must lie in (0, 1)")

    @classmethod
    def global_null(cls, config: TrialConfig) -> "Scenario":
        return cls("Global Null", (config.null_rate,) * config.k_baskets)

    def active_baskets(self, p0: float) -> tuple[bool, ...]:
        """True where the treatment actually works (rate above p0)."""
        return tuple(p > p0 for p in self.true_rates)


@dataclass(frozen=True)
class OCStandardErrors:
    rejection_rates: tuple[float, ...]
    fwer: float | None
    ecd: float
    mean_posterior_means: tuple[float, ...]


@dataclass(frozen=True)
class OCResult:
    """Operating characteristics of one design under one scenario.

    ``fwer`` is None when no basket is truly null (there is no familywise
    error to make).  ``ecd`` always equals the rejection-rate combination
    sum_k [active_k ? rate_k : 1 - rate_k].
    """

    rejection_rates: tuple[float, ...]
    fwer: float | None
    ecd: float
    mean_posterior_means: tuple[float, ...]
    method: str
    n_sims: int | None = None
    mc_se: OCStandardErrors | None = None


def ecd(rejection_rates: Sequence[float], scenario: Scenario, p0: float) -> float:
    """Expected number of correct decisions.

    Rejecting a truly active basket and retaining a truly inactive one
    both count as correct.
    """
    if len(rejection_rates) != len(scenario.true_rates):
        raise ValueError("rejection_rates length must match the scenario")
    active = scenario.active_baskets(p0)
    return math.fsum(
        rate if act else 1.0 - rate for rate, act in zip(rejection_rates, active)
    )


def _check_scenario(config: TrialConfig, scenario: Scenario) -> None:
    if len(scenario.true_rates) != config.k_baskets:
        raise ValueError(
            f"scenario {scenario.name!r} has {len(scenario.true_rates)} rates, "
            f"trial has {config.k_baskets} baskets"
        )


# ---------------------------------------------------------------------------
# outcome space and probabilities


def binomial_pmf_table(n: int, p: float) -> np.ndarray:
    """pmf of Binomial(n, p) on 0..n."""
    return _sci_stats.binom.pmf(np.arange(n + 1), n, p)


@lru_cache(maxsize=64)
def _pmf_tables(sample_sizes: tuple[int, ...], rates: tuple[float, ...]) -> tuple[np.ndarray, ...]:
    out = tuple(binomial_pmf_table(n, p) for n, p in zip(sample_sizes, rates))
    for arr in out:
        arr.flags.writeable = False
    return out


def _outcome_block(sample_sizes: tuple[int, ...], start: int, stop: int) -> np.ndarray:
    """Rows [start, stop) of the lexicographic outcome space, shape (m, K)."""
    dims = tuple(n + 1 for n in sample_sizes)
    idx = np.unravel_index(np.arange(start, stop), dims)
    return np.column_stack(idx)


@lru_cache(maxsize=8)
def _full_outcomes(sample_sizes: tuple[int, ...]) -> np.ndarray:
    n_outcomes = math.prod(n + 1 for n in sample_sizes)
    arr = _outcome_block(sample_sizes, 0, n_outcomes)
    arr.flags.writeable = False
    return arr


def _joint_probs(config: TrialConfig, scenario: Scenario, outcomes: np.ndarray) -> np.ndarray:
    tables = _pmf_tables(config.sample_sizes, scenario.true_rates)
    probs = tables[0][outcomes[:, 0]].copy()
    for k in range(1, config.k_baskets):
        probs *= tables[k][outcomes[:, k]]
    return probs


# ---------------------------------------------------------------------------
# per-design tails and posterior means

_PARAM_KIND = {"fujikawa": "jsd", "jsd-global": "jsd", "cpp": "cpp", "cpp-global": "cpp", "cpp-nex": "cpp"}


def _pairwise_params(spec: DesignSpec) -> tuple[str, tuple[float, ...]]:
    kind = _PARAM_KIND[spec.family]
    if kind == "jsd":
        return kind, (spec.epsilon, spec.tau)
    return kind, (spec.a, spec.b)


@lru_cache(maxsize=256)
def _pair_table(
    kind: str,
    params: tuple[float, ...],
    n_k: int,
    prior_k: tuple[float, float],
    n_i: int,
    prior_i: tuple[float, float],
) -> np.ndarray:
    """Lookup table of pairwise weights over all (r_k, r_i).

    Entries are produced by the scalar weight functions, so table-driven
    evaluation is bit-identical to direct recomputation.
    """
    from .numerics import BetaShape

    table = np.empty((n_k + 1, n_i + 1))
    if kind == "jsd":
        epsilon, tau = params
        for rk in range(n_k + 1):
            shape_k = BetaShape(prior_k[0] + rk, prior_k[1] + n_k - rk)
            for ri in range(n_i + 1):
                shape_i = BetaShape(prior_i[0] + ri, prior_i[1] + n_i - ri)
                table[rk, ri] = jsd_pairwise_weight(shape_k, shape_i, epsilon, tau)
    else:
        a, b = params
        for rk in range(n_k + 1):
            for ri in range(n_i + 1):
                table[rk, ri] = cpp_pairwise_weight(rk, n_k, ri, n_i, a, b)
    table.flags.writeable = False
    return table


def _pair_tables(config: TrialConfig, spec: DesignSpec) -> dict[tuple[int, int], np.ndarray]:
    kind, params = _pairwise_params(spec)
    tables: dict[tuple[int, int], np.ndarray] = {}
    for k in range(config.k_baskets):
        for i in range(config.k_baskets):
            if i == k:
                continue
            tables[(k, i)] = _pair_table(
                kind,
                params,
                config.sample_sizes[k],
                (config.priors[k].alpha, config.priors[k].beta),
                config.sample_sizes[i],
                (config.priors[i].alpha, config.priors[i].beta),
            )
    return tables


def _is_homogeneous(config: TrialConfig) -> bool:
    return len(set(config.sample_sizes)) == 1 and len(set(config.priors)) == 1


def _global_factor(config: TrialConfig, spec: DesignSpec, outcomes: np.ndarray) -> np.ndarray | float | None:
    """Per-outcome multiplier applied to off-diagonal sharing, or None."""
    if spec.family == "cpp-nex":
        return spec.omega_star
    if spec.family == "cpp-global":
        n = np.asarray(config.sample_sizes, dtype=float)
        rates = np.sort(outcomes / n, axis=1)
        d = np.diff(rates, axis=1)
        target = 1.0 / (config.k_baskets - 1)
        inner = np.sum((d - target) ** 2, axis=1)
        pre = 1.0 - np.sum(d, axis=1) * 10.0 ** (-inner)
        np.clip(pre, 0.0, 1.0, out=pre)
        return pre**spec.epsilon_star
    if spec.family == "jsd-global":
        key_rows = np.sort(outcomes, axis=1) if _is_homogeneous(config) else outcomes
        uniq, inverse = np.unique(key_rows, axis=0, return_inverse=True)
        vals = np.array(
            [global_jsd_weight(config, row, spec.epsilon_star) for row in uniq]
        )
        return vals[inverse]
    return None


# Every non-BMA posterior accumulates in one canonical term order: the own
# basket's contribution first, then the borrowed baskets (sorted by count
# when the trial is homogeneous, ascending basket index otherwise).  The
# vectorized, pattern-deduplicated, and scratch-reference paths all share
# this order, so their floating-point results agree bitwise.


def _basket_patterns(outcomes: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Deduplicated (own count, sorted other counts) patterns.

    In a homogeneous trial, basket k's posterior depends on the outcome
    only through this pattern, which collapses the K * m tail and mean
    evaluations to one per distinct pattern.  Returns the unique pattern
    rows (U, K) and per-basket index maps (K, m) into them.
    """
    m, kk = outcomes.shape
    stacked = np.empty((kk, m, kk), dtype=np.int64)
    for k in range(kk):
        stacked[k, :, 0] = outcomes[:, k]
        rest = np.delete(outcomes, k, axis=1)
        rest.sort(axis=1)
        stacked[k, :, 1:] = rest
    base = n + 1
    powers = base ** np.arange(kk - 1, -1, -1, dtype=np.int64)
    keys = stacked.reshape(kk * m, kk) @ powers
    uniq_keys, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
    patterns = stacked.reshape(kk * m, kk)[first]
    return patterns, inverse.reshape(kk, m)


@lru_cache(maxsize=4)
def _cached_basket_patterns(config: TrialConfig) -> tuple[np.ndarray, np.ndarray]:
    outcomes = _full_outcomes(config.sample_sizes)
    patterns, inverse = _basket_patterns(outcomes, config.sample_sizes[0])
    patterns.flags.writeable = False
    inverse.flags.writeable = False
    return patterns, inverse


def _pattern_shape_arrays(
    config: TrialConfig, spec: DesignSpec, patterns: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Posterior (alpha, beta) per pattern row for a homogeneous trial."""
    n = config.sample_sizes[0]
    prior = config.priors[0]
    own = patterns[:, 0]
    others = patterns[:, 1:]
    u = patterns.shape[0]

    if isinstance(spec, MmlDesign):
        alphas = np.empty(u)
        betas = np.empty(u)
        prior_pair = (prior.alpha, prior.beta)
        for idx in range(u):
            r_k = int(own[idx])
            rest = [int(x) for x in others[idx]]
            sol = _solve_mml_cached(r_k, n, prior_pair, tuple((o, n) for o in rest))
            alpha = prior.alpha + r_k
            beta = prior.beta + (n - r_k)
            for w_j, o_j in zip(sol, rest):
                alpha += w_j * o_j
                beta += w_j * (n - o_j)
            alphas[idx] = alpha
            betas[idx] = beta
        return alphas, betas

    table = _pair_tables(config, spec)[(0, 1)]
    g = _global_factor(config, spec, patterns)
    if spec.shares_prior:
        alpha = (prior.alpha + own).astype(float)
        beta = (prior.beta + (n - own)).astype(float)
        for j in range(others.shape[1]):
            w = table[own, others[:, j]]
            if g is not None:
                w = w * g
            alpha = alpha + w * (prior.alpha + others[:, j])
            beta = beta + w * (prior.beta + (n - others[:, j]))
    else:
        alpha = prior.alpha + own.astype(float)
        beta = prior.beta + (n - own).astype(float)
        for j in range(others.shape[1]):
            w = table[own, others[:, j]]
            if g is not None:
                w = w * g
            alpha = alpha + w * others[:, j]
            beta = beta + w * (n - others[:, j])
    return alpha, beta


def _posterior_arrays(
    config: TrialConfig, spec: DesignSpec, outcomes: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Posterior (alpha, beta) per outcome row and basket, shape (m, K).

    General path for heterogeneous trials; homogeneous trials go through
    the deduplicated pattern route instead.
    """
    m, kk = outcomes.shape
    if isinstance(spec, MmlDesign):
        alphas = np.empty((m, kk))
        betas = np.empty((m, kk))
        for j in range(m):
            row = tuple(int(x) for x in outcomes[j])
            for k in range(kk):
                w = mml_weights(config, row, k)
                alpha = config.priors[k].alpha + w[k] * row[k]
                beta = config.priors[k].beta + w[k] * (config.sample_sizes[k] - row[k])
                for i in range(kk):
                    if i == k:
                        continue
                    alpha += w[i] * row[i]
                    beta += w[i] * (config.sample_sizes[i] - row[i])
                alphas[j, k] = alpha
                betas[j, k] = beta
        return alphas, betas

    tables = _pair_tables(config, spec)
    g = _global_factor(config, spec, outcomes)
    alphas = np.empty((m, kk))
    betas = np.empty((m, kk))
    for k in range(kk):
        prior = config.priors[k]
        n_k = config.sample_sizes[k]
        if spec.shares_prior:
            alpha = (prior.alpha + outcomes[:, k]).astype(float)
            beta = (prior.beta + (n_k - outcomes[:, k])).astype(float)
        else:
            alpha = prior.alpha + outcomes[:, k].astype(float)
            beta = prior.beta + (n_k - outcomes[:, k]).astype(float)
        for i in range(kk):
            if i == k:
                continue
            n_i = config.sample_sizes[i]
            w = tables[(k, i)][outcomes[:, k], outcomes[:, i]]
            if g is not None:
                w = w * g
            if spec.shares_prior:
                alpha = alpha + w * (prior.alpha + outcomes[:, i])
                beta = beta + w * (prior.beta + (n_i - outcomes[:, i]))
            else:
                alpha = alpha + w * outcomes[:, i]
                beta = beta + w * (n_i - outcomes[:, i])
        alphas[:, k] = alpha
        betas[:, k] = beta
    return alphas, betas


def _bma_tails_means(
    config: TrialConfig, spec: BmaDesign, outcomes: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    prior = config.priors[0]
    if any(p != prior for p in config.priors):
        raise ValueError("BMA pools cluster data under one prior; per-basket priors must be equal")
    models = _bma.enumerate_partitions(config.k_baskets)
    m, kk = outcomes.shape
    p0 = config.null_rate
    log_prior_beta = _sci_special.betaln(prior.alpha, prior.beta)

    cluster_sums = []
    log_w = np.empty((len(models), m))
    for j, model in enumerate(models):
        log_ml = np.full(m, model.d_clusters * spec.psi)
        sums = []
        for members in model.clusters():
            r_c = outcomes[:, members].sum(axis=1)
            n_c = sum(config.sample_sizes[i] for i in members)
            a_c = prior.alpha + r_c
            b_c = prior.beta + (n_c - r_c)
            sums.append((a_c, b_c))
            log_ml += _sci_special.betaln(a_c, b_c) - log_prior_beta
        cluster_sums.append(sums)
        log_w[j] = log_ml
    log_w -= _sci_special.logsumexp(log_w, axis=0)

    tails = np.zeros((m, kk))
    means = np.zeros((m, kk))
    for j, model in enumerate(models):
        w_j = np.exp(log_w[j])
        for label, members in enumerate(model.clusters()):
            a_c, b_c = cluster_sums[j][label]
            tail_c = _sci_special.betaincc(a_c, b_c, p0)
            mean_c = a_c / (a_c + b_c)
            for k in members:
                tails[:, k] += w_j * tail_c
                means[:, k] += w_j * mean_c
    return tails, means


def _tails_means(
    config: TrialConfig, spec: DesignSpec, outcomes: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Posterior tail P(p_k > p0) and posterior mean per outcome and basket."""
    if isinstance(spec, BmaDesign):
        return _bma_tails_means(config, spec, outcomes)
    if _is_homogeneous(config):
        full = _full_outcomes(config.sample_sizes)
        if outcomes is full:
            patterns, inverse = _cached_basket_patterns(config)
        else:
            patterns, inverse = _basket_patterns(outcomes, config.sample_sizes[0])
        a_u, b_u = _pattern_shape_arrays(config, spec, patterns)
        tails_u = _sci_special.betaincc(a_u, b_u, config.null_rate)
        means_u = a_u / (a_u + b_u)
        tails = np.empty(outcomes.shape, dtype=float)
        means = np.empty(outcomes.shape, dtype=float)
        for k in range(config.k_baskets):
            tails[:, k] = tails_u[inverse[k]]
            means[:, k] = means_u[inverse[k]]
        return tails, means
    alphas, betas = _posterior_arrays(config, spec, outcomes)
    tails = _sci_special.betaincc(alphas, betas, config.null_rate)
    means = alphas / (alphas + betas)
    return tails, means


@lru_cache(maxsize=8)
def _cached_exact_tables(config: TrialConfig, spec: DesignSpec) -> tuple[np.ndarray, np.ndarray]:
    outcomes = _full_outcomes(config.sample_sizes)
    tails, means = _tails_means(config, spec, outcomes)
    tails.flags.writeable = False
    means.flags.writeable = False
    return tails, means


def _rejected(tails: np.ndarray, lambda_: float, rule: str) -> np.ndarray:
    return tails >= lambda_ if rule == "geq" else tails > lambda_


def _fsum(values: np.ndarray) -> float:
    return math.fsum(values.tolist())


# ---------------------------------------------------------------------------
# exact engine


def _exact_chunk_partial(
    config: TrialConfig,
    spec: DesignSpec,
    scenario: Scenario,
    lambda_: float,
    start: int,
    stop: int,
    tables: tuple[np.ndarray, np.ndarray] | None,
) -> tuple[float, list[float], float, list[float]]:
    """(prob sum, rate terms, fwer terms, posterior-mean terms) of one chunk."""
    outcomes = _outcome_block(config.sample_sizes, start, stop)
    probs = _joint_probs(config, scenario, outcomes)
    if tables is None:
        tails, means = _tails_means(config, spec, outcomes)
    else:
        tails, means = tables[0][start:stop], tables[1][start:stop]
    rejected = _rejected(tails, lambda_, spec.decision_rule)
    null_idx = [k for k, act in enumerate(scenario.active_baskets(config.null_rate)) if not act]
    rates = [_fsum(probs[rejected[:, k]]) for k in range(config.k_baskets)]
    fwer = _fsum(probs[rejected[:, null_idx].any(axis=1)]) if null_idx else 0.0
    mpms = [_fsum(probs * means[:, k]) for k in range(config.k_baskets)]
    return _fsum(probs), rates, fwer, mpms


def _exact_chunk_worker(args) -> tuple[float, list[float], float, list[float]]:
    return _exact_chunk_partial(*args, tables=None)


def exact_oc(
    config: TrialConfig,
    spec: DesignSpec,
    scenario: Scenario,
    lambda_: float,
    *,
    allow_slow_families: bool = False,
    n_workers: int = 1,
) -> OCResult:
    """Exact operating characteristics by full outcome enumeration.

    Iterates every response vector, weighting per-outcome decisions by
    the product-binomial outcome probability.  Designs whose per-outcome
    tails need quadrature or optimization (jsd-global, mml) are refused
    unless ``allow_slow_families`` is set; use :func:`simulate_oc` for
    routine work with those.
    """
    _check_scenario(config, scenario)
    if not 0.0 < lambda_ < 1.0:
        raise ValueError(f"lambda must lie in (0, 1), got {lambda_}")
    n_outcomes = math.prod(n + 1 for n in config.sample_sizes)
    if n_outcomes > CAPACITY_LIMIT:
        raise CapacityError(
            f"outcome space has {n_outcomes} points (limit {CAPACITY_LIMIT}); "
            "use simulate_oc instead"
        )
    if spec.slow_exact and not allow_slow_families:
        raise ValueError(
            f"exact enumeration of {spec.family!r} is expensive; pass "
            "allow_slow_families=True to opt in, or use simulate_oc"
        )

    bounds = list(range(0, n_outcomes, _EXACT_CHUNK)) + [n_outcomes]
    spans = list(zip(bounds[:-1], bounds[1:]))
    if n_workers > 1 and len(spans) > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            partials = list(
                pool.map(
                    _exact_chunk_worker,
                    [(config, spec, scenario, lambda_, a, b) for a, b in spans],
                )
            )
    else:
        tables = _cached_exact_tables(config, spec) if n_outcomes <= _CACHE_ROW_LIMIT else None
        partials = [
            _exact_chunk_partial(config, spec, scenario, lambda_, a, b, tables)
            for a, b in spans
        ]

    total_prob = math.fsum(p[0] for p in partials)
    if abs(total_prob - 1.0) > 1e-10:
        raise ArithmeticError(f"outcome probabilities sum to {total_prob!r}, expected 1")
    kk = config.k_baskets
    rates = tuple(math.fsum(p[1][k] for p in partials) for k in range(kk))
    active = scenario.active_baskets(config.null_rate)
    fwer = math.fsum(p[2] for p in partials) if not all(active) else None
    mpms = tuple(math.fsum(p[3][k] for p in partials) for k in range(kk))
    return OCResult(
        rejection_rates=rates,
        fwer=fwer,
        ecd=ecd(rates, scenario, config.null_rate),
        mean_posterior_means=mpms,
        method="exact",
    )


def _fast_exact_rates(
    config: TrialConfig, spec: DesignSpec, scenario: Scenario, lambda_: float
) -> tuple[float, ...]:
    """Rejection rates from cached tails with vector dot products.

    Same semantics as :func:`exact_oc` but pairwise-summed (accurate to
    ~1e-13); used by the tuning grid search where per-combination exact
    fsum accumulation would dominate runtime.
    """
    outcomes = _full_outcomes(config.sample_sizes)
    probs = _joint_probs(config, scenario, outcomes)
    tails, _ = _cached_exact_tables(config, spec)
    rejected = _rejected(tails, lambda_, spec.decision_rule)
    return tuple(float(v) for v in probs @ rejected)


# ---------------------------------------------------------------------------
# simulation engine


@lru_cache(maxsize=64)
def _cdf_tables(sample_sizes: tuple[int, ...], rates: tuple[float, ...]) -> tuple[np.ndarray, ...]:
    out = tuple(np.cumsum(t) for t in _pmf_tables(sample_sizes, rates))
    for arr in out:
        arr.flags.writeable = False
    return out


def draw_responses(
    config: TrialConfig, scenario: Scenario, n_sims: int, seed: int
) -> np.ndarray:
    """Seeded response-count draws, shape (n_sims, K).

    Replicate j of basket k inverts the binomial CDF at the (j, k) entry
    of the row-major uniform stream of ``numpy.random.Philox(key=seed)``.
    The stream depends only on (seed, n_sims, K), never on the design, so
    every design sees identical datasets.
    """
    _check_scenario(config, scenario)
    if n_sims < 1:
        raise ValueError("n_sims must be at least 1")
    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    u = rng.random((n_sims, config.k_baskets))
    cdfs = _cdf_tables(config.sample_sizes, scenario.true_rates)
    draws = np.empty((n_sims, config.k_baskets), dtype=np.int64)
    for k in range(config.k_baskets):
        draws[:, k] = np.searchsorted(cdfs[k], u[:, k], side="right")
        np.clip(draws[:, k], 0, config.sample_sizes[k], out=draws[:, k])
    draws.flags.writeable = False
    return draws


@lru_cache(maxsize=32)
def _cached_draws(config: TrialConfig, scenario_rates: tuple[float, ...], n_sims: int, seed: int) -> np.ndarray:
    return draw_responses(config, Scenario("draws", scenario_rates), n_sims, seed)


@dataclass(frozen=True)
class _SimBlockStats:
    n: int
    reject_counts: tuple[int, ...]
    fwer_count: int
    correct_sum: int
    correct_sumsq: int
    mean_sums: tuple[float, ...]
    mean_sumsqs: tuple[float, ...]


def _sim_block_stats(
    config: TrialConfig,
    spec: DesignSpec,
    scenario: Scenario,
    lambda_: float,
    block: np.ndarray,
) -> _SimBlockStats:
    tails, means = _tails_means(config, spec, block)
    rejected = _rejected(tails, lambda_, spec.decision_rule)
    active = np.asarray(scenario.active_baskets(config.null_rate))
    null_idx = np.flatnonzero(~active)
    correct = (rejected == active).sum(axis=1)
    return _SimBlockStats(
        n=block.shape[0],
        reject_counts=tuple(int(c) for c in rejected.sum(axis=0)),
        fwer_count=int(rejected[:, null_idx].any(axis=1).sum()) if null_idx.size else 0,
        correct_sum=int(correct.sum()),
        correct_sumsq=int((correct**2).sum()),
        mean_sums=tuple(float(v) for v in means.sum(axis=0)),
        mean_sumsqs=tuple(float(v) for v in (means**2).sum(axis=0)),
    )


def _sim_block_worker(args) -> _SimBlockStats:
    return _sim_block_stats(*args)


def simulate_oc(
    config: TrialConfig,
    spec: DesignSpec,
    scenario: Scenario,
    lambda_: float,
    n_sims: int,
    seed: int,
    *,
    n_workers: int = 1,
) -> OCResult:
    """Monte Carlo operating characteristics from a seeded dataset stream.

    Identical seeds give bit-identical results regardless of worker
    count: replicates are processed in fixed blocks and block partials
    are merged in block order.
    """
    _check_scenario(config, scenario)
    if not 0.0 < lambda_ < 1.0:
        raise ValueError(f"lambda must lie in (0, 1), got {lambda_}")
    draws = _cached_draws(config, scenario.true_rates, n_sims, seed)
    blocks = [draws[a : a + _SIM_BLOCK] for a in range(0, n_sims, _SIM_BLOCK)]
    if n_workers > 1 and len(blocks) > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            stats = list(
                pool.map(
                    _sim_block_worker,
                    [(config, spec, scenario, lambda_, b) for b in blocks],
                )
            )
    else:
        stats = [_sim_block_stats(config, spec, scenario, lambda_, b) for b in blocks]

    kk = config.k_baskets
    n = float(n_sims)
    rates = tuple(sum(s.reject_counts[k] for s in stats) / n for k in range(kk))
    active = scenario.active_baskets(config.null_rate)
    any_null = not all(active)
    fwer = sum(s.fwer_count for s in stats) / n if any_null else None
    mpms = tuple(math.fsum(s.mean_sums[k] for s in stats) / n for k in range(kk))
    ecd_value = ecd(rates, scenario, config.null_rate)

    def _binom_se(p: float) -> float:
        return math.sqrt(p * (1.0 - p) / n)

    def _sample_se(total: float, total_sq: float) -> float:
        if n_sims < 2:
            return float("nan")
        var = max((total_sq - total * total / n) / (n - 1.0), 0.0)
        return math.sqrt(var / n)

    correct_sum = sum(s.correct_sum for s in stats)
    correct_sumsq = sum(s.correct_sumsq for s in stats)
    se = OCStandardErrors(
        rejection_rates=tuple(_binom_se(p) for p in rates),
        fwer=_binom_se(fwer) if fwer is not None else None,
        ecd=_sample_se(float(correct_sum), float(correct_sumsq)),
        mean_posterior_means=tuple(
            _sample_se(
                math.fsum(s.mean_sums[k] for s in stats),
                math.fsum(s.mean_sumsqs[k] for s in stats),
            )
            for k in range(kk)
        ),
    )
    return OCResult(
        rejection_rates=rates,
        fwer=fwer,
        ecd=ecd_value,
        mean_posterior_means=mpms,
        method="simulated",
        n_sims=n_sims,
        mc_se=se,
    )


# ---------------------------------------------------------------------------
# calibration support (used by powerbasket.calibrate)


def _null_tail_stat_exact(
    config: TrialConfig, spec: DesignSpec
) -> tuple[np.ndarray, np.ndarray]:
    """(ascending max-tail statistic, matching outcome probabilities)."""
    n_outcomes = math.prod(n + 1 for n in config.sample_sizes)
    if n_outcomes > CAPACITY_LIMIT:
        raise CapacityError(
            f"outcome space has {n_outcomes} points (limit {CAPACITY_LIMIT})"
        )
    outcomes = _full_outcomes(config.sample_sizes)
    probs = _joint_probs(config, Scenario.global_null(config), outcomes)
    tails, _ = _cached_exact_tables(config, spec)
    stat = tails.max(axis=1)
    order = np.argsort(stat, kind="stable")
    return stat[order], probs[order]


def _null_tail_stat_simulated(
    config: TrialConfig, spec: DesignSpec, n_sims: int, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    scenario = Scenario.global_null(config)
    draws = _cached_draws(config, scenario.true_rates, n_sims, seed)
    tails, _ = _tails_means(config, spec, draws)
    stat = np.sort(tails.max(axis=1), kind="stable")
    return stat, np.full(stat.size, 1.0 / n_sims)
