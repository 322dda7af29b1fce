"""Unmemoized reference engine for exact operating characteristics.

Every pairwise weight is recomputed from scratch for every outcome (no
tables, no caches, no pattern deduplication); posterior shapes, tails,
and decisions go through the scalar code path; accumulation uses exact
(fsum) summation over outcomes.  Terms follow the engine's canonical
order (own basket first, then borrowed baskets sorted by count in a
homogeneous trial, ascending basket index otherwise), and the engine
builds its lookup tables with the same scalar weight functions, so the
two must agree bit for bit.
"""

import itertools
import math

from powerbasket.numerics import BetaShape, beta_tail
from powerbasket.oc import Scenario, binomial_pmf_table
from powerbasket.weights import (
    CppDesign,
    FujikawaDesign,
    TrialConfig,
    cpp_pairwise_weight,
    jsd_pairwise_weight,
)


def _pair_weight(config: TrialConfig, spec, r_k: int, k: int, r_i: int, i: int) -> float:
    if isinstance(spec, FujikawaDesign):
        return jsd_pairwise_weight(
            config.individual_posterior(k, r_k),
            config.individual_posterior(i, r_i),
            spec.epsilon,
            spec.tau,
        )
    if isinstance(spec, CppDesign) and type(spec) is CppDesign:
        return cpp_pairwise_weight(
            r_k, config.sample_sizes[k], r_i, config.sample_sizes[i], spec.a, spec.b
        )
    raise ValueError(f"naive reference supports cpp and fujikawa, not {spec}")


def naive_exact_rejection_rates(
    config: TrialConfig, spec, scenario: Scenario, lambda_: float
) -> tuple[float, ...]:
    kk = config.k_baskets
    homogeneous = len(set(config.sample_sizes)) == 1 and len(set(config.priors)) == 1
    pmfs = [binomial_pmf_table(n, p) for n, p in zip(config.sample_sizes, scenario.true_rates)]
    terms: list[list[float]] = [[] for _ in range(kk)]
    for r in itertools.product(*(range(n + 1) for n in config.sample_sizes)):
        prob = float(pmfs[0][r[0]])
        for k in range(1, kk):
            prob = prob * float(pmfs[k][r[k]])
        for k in range(kk):
            prior = config.priors[k]
            n_k = config.sample_sizes[k]
            others = [i for i in range(kk) if i != k]
            if homogeneous:
                others.sort(key=lambda i: r[i])
            if spec.shares_prior:
                alpha = float(prior.alpha + r[k])
                beta = float(prior.beta + (n_k - r[k]))
                for i in others:
                    w = _pair_weight(config, spec, r[k], k, r[i], i)
                    alpha = alpha + w * (prior.alpha + r[i])
                    beta = beta + w * (prior.beta + (config.sample_sizes[i] - r[i]))
            else:
                alpha = prior.alpha + float(r[k])
                beta = prior.beta + float(n_k - r[k])
                for i in others:
                    w = _pair_weight(config, spec, r[k], k, r[i], i)
                    alpha = alpha + w * r[i]
                    beta = beta + w * (config.sample_sizes[i] - r[i])
            tail = beta_tail(config.null_rate, BetaShape(alpha, beta))
            if tail >= lambda_:
                terms[k].append(prob)
    return tuple(math.fsum(t) for t in terms)
