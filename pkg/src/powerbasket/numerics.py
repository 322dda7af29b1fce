"""Beta-distribution special functions and quadrature.

Everything in this module is pure and stateless: log-beta, regularized
incomplete-beta tails, the beta-binomial log pmf, adaptive quadrature on
(0, 1), and Kullback-Leibler divergences of a beta density against a beta
mixture.  These are the primitives every posterior and sharing-weight
computation is built on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from scipy import integrate as _sci_integrate
from scipy import special as _sci_special

__all__ = [
    "BetaShape",
    "QuadratureError",
    "DEFAULT_QUAD_TOL",
    "log_beta_fn",
    "beta_tail",
    "beta_log_pdf",
    "log_beta_binomial_pmf",
    "integrate",
    "kld_beta_to_mixture",
]

# Densities below this floor are treated as exact zeros inside divergence
# integrands (the x*log(x) -> 0 limit); avoids NaN from 0 * -inf.
_DENSITY_FLOOR = 1e-300
_LOG_DENSITY_FLOOR = math.log(_DENSITY_FLOOR)

#: Default absolute tolerance for divergence quadrature.  Sharing weights
#: only need a handful of significant digits; posteriors use closed forms.
DEFAULT_QUAD_TOL = 1e-8


class QuadratureError(ArithmeticError):
    """Quadrature did not converge; ``estimate`` holds the best value."""

    def __init__(self, message: str, estimate: float):
        super().__init__(message)
        self.estimate = estimate


@dataclass(frozen=True)
class BetaShape:
    """Shape pair (alpha, beta) of a beta distribution, both > 0."""

    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be positive and finite, got {self.alpha}")
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise ValueError(f"beta must be positive and finite, got {self.beta}")

    @property
    def mean(self) -> float:
        return self.alpha / (self.alpha + self.beta)


def log_beta_fn(a: float, b: float) -> float:
    """ln B(a, b) = ln Gamma(a) + ln Gamma(b) - ln Gamma(a + b)."""
    if a <= 0 or b <= 0:
        raise ValueError(f"log_beta_fn requires positive arguments, got ({a}, {b})")
    return float(_sci_special.betaln(a, b))


def beta_tail(p0: float, shape: BetaShape) -> float:
    """P(X > p0) for X ~ Beta(shape), i.e. 1 - I_p0(alpha, beta)."""
    if not 0.0 < p0 < 1.0:
        raise ValueError(f"p0 must lie in (0, 1), got {p0}")
    return float(_sci_special.betaincc(shape.alpha, shape.beta, p0))


def beta_log_pdf(x: float, shape: BetaShape) -> float:
    """Log density of Beta(shape) at x in the open interval (0, 1)."""
    if not 0.0 < x < 1.0:
        raise ValueError(f"x must lie in (0, 1), got {x}")
    a, b = shape.alpha, shape.beta
    return (a - 1.0) * math.log(x) + (b - 1.0) * math.log1p(-x) - log_beta_fn(a, b)


def log_beta_binomial_pmf(r: int, n: int, shape: BetaShape) -> float:
    """Log pmf of the beta-binomial: ln[C(n,r) B(r+a, n-r+b) / B(a, b)]."""
    if r < 0 or n < 0 or r > n:
        raise ValueError(f"need 0 <= r <= n, got r={r}, n={n}")
    a, b = shape.alpha, shape.beta
    log_comb = (
        _sci_special.gammaln(n + 1)
        - _sci_special.gammaln(r + 1)
        - _sci_special.gammaln(n - r + 1)
    )
    return float(log_comb + _sci_special.betaln(r + a, n - r + b) - _sci_special.betaln(a, b))


def integrate(f: Callable[[float], float], tol: float = DEFAULT_QUAD_TOL) -> float:
    """Integrate f over (0, 1) to absolute tolerance ``tol``.

    Uses adaptive Gauss-Kronrod subdivision with an open rule (endpoints
    are never evaluated, so integrands may diverge at 0 and 1).  The
    result is deterministic.  Raises :class:`QuadratureError` carrying the
    best estimate if the tolerance cannot be certified.
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    out = _sci_integrate.quad(f, 0.0, 1.0, epsabs=tol, epsrel=tol, limit=200, full_output=True)
    value, abserr = out[0], out[1]
    if len(out) > 3:
        raise QuadratureError(f"quadrature did not converge: {out[3]}", estimate=value)
    if abserr > max(tol, abs(value) * tol):
        raise QuadratureError(
            f"quadrature error estimate {abserr:.3e} exceeds tolerance {tol:.3e}",
            estimate=value,
        )
    return float(value)


def kld_beta_to_mixture(
    p: BetaShape,
    components: Sequence[BetaShape],
    mix_weights: Sequence[float],
    log_base: float,
    tol: float = DEFAULT_QUAD_TOL,
) -> float:
    """KLD(P || sum_j w_j Q_j) in logs of base ``log_base``.

    The integrand is clamped to 0 where the density of ``p`` underflows,
    implementing the x log x -> 0 limit at the tails.  Nonnegative up to
    quadrature tolerance.
    """
    if len(components) != len(mix_weights):
        raise ValueError("components and mix_weights must have equal length")
    if abs(math.fsum(mix_weights) - 1.0) > 1e-12:
        raise ValueError("mix_weights must sum to 1 within 1e-12")
    if any(w < 0 for w in mix_weights):
        raise ValueError("mix_weights must be nonnegative")
    if not log_base > 1.0:
        raise ValueError(f"log_base must exceed 1, got {log_base}")

    log_wts = [math.log(w) if w > 0 else -math.inf for w in mix_weights]
    inv_log_base = 1.0 / math.log(log_base)

    def integrand(x: float) -> float:
        lp = beta_log_pdf(x, p)
        if lp < _LOG_DENSITY_FLOOR:
            return 0.0
        lmix = _logsumexp(
            [lw + beta_log_pdf(x, c) for lw, c in zip(log_wts, components) if lw > -math.inf]
        )
        return math.exp(lp) * (lp - lmix) * inv_log_base

    return integrate(integrand, tol)


def _logsumexp(values: Sequence[float]) -> float:
    m = max(values)
    if m == -math.inf:
        return -math.inf
    return m + math.log(math.fsum(math.exp(v - m) for v in values))
