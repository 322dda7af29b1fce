"""Posterior distributions and efficacy decisions given a weight matrix.

Two sum conventions are exposed.  The power-prior form keeps the prior
out of the weighted sums (borrowed baskets contribute data only); the
prior-sharing form used by Fujikawa's design puts the prior parameters
inside the sums, so borrowing also multiplies the prior.  They coincide
exactly when all off-diagonal weights are 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import BetaShape, beta_tail
from .weights import BmaDesign, DesignSpec, ResponseVector, TrialConfig, effective_weight_matrix

__all__ = [
    "PosteriorParams",
    "power_prior_posterior",
    "fujikawa_posterior",
    "design_posterior",
    "decide",
    "posterior_means",
]


@dataclass(frozen=True)
class PosteriorParams:
    """Per-basket beta shapes after information sharing."""

    shapes: tuple[BetaShape, ...]

    def __len__(self) -> int:
        return len(self.shapes)


def _check_weight_matrix(config: TrialConfig, w: np.ndarray) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    k = config.k_baskets
    if w.shape != (k, k):
        raise ValueError(f"weight matrix must be {k}x{k}, got {w.shape}")
    if np.any(np.abs(np.diagonal(w) - 1.0) > 1e-12):
        raise ValueError("weight matrix diagonal must be 1")
    if np.any(w < 0.0) or np.any(w > 1.0):
        raise ValueError("weights must lie in [0, 1]")
    return w


def power_prior_posterior(
    config: TrialConfig, r: ResponseVector, w: np.ndarray
) -> PosteriorParams:
    """Beta(s1 + sum_i w_ki r_i, s2 + sum_i w_ki (n_i - r_i)) per basket."""
    counts = config.validate_responses(r)
    w = _check_weight_matrix(config, w)
    shapes = []
    for k in range(config.k_baskets):
        alpha = config.priors[k].alpha
        beta = config.priors[k].beta
        for i in range(config.k_baskets):
            alpha += w[k, i] * counts[i]
            beta += w[k, i] * (config.sample_sizes[i] - counts[i])
        shapes.append(BetaShape(alpha, beta))
    return PosteriorParams(tuple(shapes))


def fujikawa_posterior(
    config: TrialConfig, r: ResponseVector, w: np.ndarray
) -> PosteriorParams:
    """Beta(sum_i w_ki (s1 + r_i), sum_i w_ki (s2 + n_i - r_i)) per basket.

    The prior parameters sit inside the weighted sums, so prior
    information is shared along with the data.
    """
    counts = config.validate_responses(r)
    w = _check_weight_matrix(config, w)
    shapes = []
    for k in range(config.k_baskets):
        s1 = config.priors[k].alpha
        s2 = config.priors[k].beta
        alpha = 0.0
        beta = 0.0
        for i in range(config.k_baskets):
            alpha += w[k, i] * (s1 + counts[i])
            beta += w[k, i] * (s2 + config.sample_sizes[i] - counts[i])
        shapes.append(BetaShape(alpha, beta))
    return PosteriorParams(tuple(shapes))


def design_posterior(config: TrialConfig, r: ResponseVector, spec: DesignSpec) -> PosteriorParams:
    """Posterior under a design's weights and its sum convention."""
    if isinstance(spec, BmaDesign):
        raise ValueError("BMA has no weight-matrix posterior; see powerbasket.bma")
    w = effective_weight_matrix(config, r, spec)
    if spec.shares_prior:
        return fujikawa_posterior(config, r, w)
    return power_prior_posterior(config, r, w)


def decide(
    post: PosteriorParams, p0: float, lambda_: float, rule: str = "geq"
) -> tuple[bool, ...]:
    """Efficacy decisions: tail >= lambda under "geq", strict under "gt"."""
    if not 0.0 < lambda_ < 1.0:
        raise ValueError(f"lambda must lie in (0, 1), got {lambda_}")
    if rule not in ("geq", "gt"):
        raise ValueError(f"rule must be 'geq' or 'gt', got {rule!r}")
    tails = [beta_tail(p0, s) for s in post.shapes]
    if rule == "geq":
        return tuple(t >= lambda_ for t in tails)
    return tuple(t > lambda_ for t in tails)


def posterior_means(post: PosteriorParams) -> tuple[float, ...]:
    """alpha / (alpha + beta) per basket."""
    return tuple(s.mean for s in post.shapes)
