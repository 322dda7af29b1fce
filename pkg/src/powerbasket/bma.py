"""Bayesian model averaging over basket partitions.

Every way of clustering the K baskets into groups with a common response
rate is one model.  Within a model, each cluster pools its data under a
single beta-binomial; the model prior is proportional to exp(D * psi)
where D is the cluster count.  Marginal likelihoods are available in
closed form, so posterior model probabilities and basket-level tail
probabilities need no sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import logsumexp

from .numerics import BetaShape, beta_tail, log_beta_fn
from .weights import ResponseVector, TrialConfig

__all__ = [
    "PartitionModel",
    "BmaPosterior",
    "enumerate_partitions",
    "bma_posterior",
    "bma_basket_tail",
    "bma_basket_mean",
]


@dataclass(frozen=True)
class PartitionModel:
    """One cluster structure: canonical restricted-growth labels."""

    cluster_of: tuple[int, ...]
    d_clusters: int

    def __post_init__(self) -> None:
        seen: list[int] = []
        for label in self.cluster_of:
            if label == len(seen):
                seen.append(label)
            elif not 0 <= label < len(seen):
                raise ValueError(f"labels not in canonical form: {self.cluster_of}")
        if len(seen) != self.d_clusters:
            raise ValueError("d_clusters does not match the number of distinct labels")

    def clusters(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.d_clusters)]
        for basket, label in enumerate(self.cluster_of):
            out[label].append(basket)
        return out


def enumerate_partitions(k: int) -> list[PartitionModel]:
    """All set partitions of K baskets in canonical restricted-growth order."""
    if not 2 <= k <= 8:
        raise ValueError(f"partition enumeration supports 2 <= K <= 8, got {k}")
    out: list[PartitionModel] = []
    labels = [0] * k

    def rec(i: int, used: int) -> None:
        if i == k:
            out.append(PartitionModel(tuple(labels), used))
            return
        for label in range(used + 1):
            labels[i] = label
            rec(i + 1, max(used, label + 1))

    rec(1, 1)
    return out


@dataclass(frozen=True)
class BmaPosterior:
    """Posterior model probabilities plus per-model pooled cluster shapes."""

    models: tuple[PartitionModel, ...]
    model_log_weights: tuple[float, ...]
    cluster_shapes: tuple[tuple[BetaShape, ...], ...]

    def basket_shape(self, model_idx: int, k: int) -> BetaShape:
        model = self.models[model_idx]
        return self.cluster_shapes[model_idx][model.cluster_of[k]]


def bma_posterior(config: TrialConfig, r: ResponseVector, psi: float) -> BmaPosterior:
    """Closed-form model posterior over all partitions of the baskets.

    Model prior: exp(D_j * psi) up to normalization.  Model marginal
    likelihood: product over clusters of B(s1 + R_c, s2 + N_c - R_c) /
    B(s1, s2) on the pooled cluster data; binomial coefficients are
    constant across models and omitted.  Normalized by log-sum-exp.
    """
    counts = config.validate_responses(r)
    prior = config.priors[0]
    if any(p != prior for p in config.priors):
        raise ValueError("BMA pools cluster data under one prior; per-basket priors must be equal")
    models = tuple(enumerate_partitions(config.k_baskets))
    log_prior_beta = log_beta_fn(prior.alpha, prior.beta)

    raw: list[float] = []
    shapes_per_model: list[tuple[BetaShape, ...]] = []
    for model in models:
        log_ml = 0.0
        shapes: list[BetaShape] = []
        for members in model.clusters():
            r_c = sum(counts[i] for i in members)
            n_c = sum(config.sample_sizes[i] for i in members)
            shape = BetaShape(prior.alpha + r_c, prior.beta + n_c - r_c)
            shapes.append(shape)
            log_ml += log_beta_fn(shape.alpha, shape.beta) - log_prior_beta
        raw.append(model.d_clusters * psi + log_ml)
        shapes_per_model.append(tuple(shapes))

    norm = float(logsumexp(raw))
    log_weights = tuple(v - norm for v in raw)
    return BmaPosterior(models, log_weights, tuple(shapes_per_model))


def bma_basket_tail(bp: BmaPosterior, k: int, p0: float) -> float:
    """P(p_k > p0): mixture of cluster tails over the model posterior."""
    return math.fsum(
        math.exp(lw) * beta_tail(p0, bp.basket_shape(j, k))
        for j, lw in enumerate(bp.model_log_weights)
    )


def bma_basket_mean(bp: BmaPosterior, k: int) -> float:
    """Posterior mean of p_k: the same mixture over cluster means."""
    return math.fsum(
        math.exp(lw) * bp.basket_shape(j, k).mean
        for j, lw in enumerate(bp.model_log_weights)
    )
