"""Sharing-weight computation for every design family.

A trial couples K baskets through a K x K weight matrix: entry (k, i) is
the fraction of basket i's data counted toward basket k's posterior.  The
families differ only in how those weights are derived:

* ``fujikawa``   - pairwise Jensen-Shannon similarity of the individual
                   posteriors, powered by epsilon and cut off at tau.
* ``cpp``        - logistic function of the scaled absolute rate
                   difference (the two-sample KS statistic for binary data).
* ``cpp-global`` - cpp weights discounted by a cheap global heterogeneity
                   function of the ordered response-rate gaps.
* ``cpp-nex``    - cpp weights discounted by a fixed global factor.
* ``jsd-global`` - Fujikawa weights discounted by the generalized (base-K)
                   Jensen-Shannon divergence of all K posteriors.
* ``mml``        - per-basket weights maximizing the beta-binomial
                   marginal likelihood of the basket's own data over the
                   box [0, 1]^(K-1).
* ``bma``        - no weight matrix; model averaging over basket
                   partitions (see :mod:`powerbasket.bma`).

Pairwise weights take only (n + 1)^2 distinct values per basket pair, so
raw divergences are memoized by posterior shape; global weights are
memoized by the multiset of per-basket outcomes.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, fields
from functools import lru_cache
from typing import Callable, ClassVar, Sequence

import numpy as np

from .numerics import BetaShape, kld_beta_to_mixture

__all__ = [
    "TrialConfig",
    "ResponseVector",
    "DesignSpec",
    "FujikawaDesign",
    "CppDesign",
    "CppGlobalDesign",
    "CppNexDesign",
    "JsdGlobalDesign",
    "MmlDesign",
    "BmaDesign",
    "DESIGN_FAMILIES",
    "OptimizationError",
    "jsd_pairwise_weight",
    "cpp_pairwise_weight",
    "pairwise_weight_matrix",
    "global_jsd_weight",
    "heterogeneity_h",
    "mml_weights",
    "effective_weight_matrix",
]

#: Response counts, one entry per basket.
ResponseVector = Sequence[int]


@dataclass(frozen=True)
class TrialConfig:
    """Static trial layout: basket count, sample sizes, null rate, priors."""

    k_baskets: int
    sample_sizes: tuple[int, ...]
    null_rate: float
    priors: tuple[BetaShape, ...]

    def __post_init__(self) -> None:
        if self.k_baskets < 2:
            raise ValueError("a basket trial needs at least 2 baskets")
        if len(self.sample_sizes) != self.k_baskets:
            raise ValueError("sample_sizes length must equal k_baskets")
        if len(self.priors) != self.k_baskets:
            raise ValueError("priors length must equal k_baskets")
        if any(n < 1 for n in self.sample_sizes):
            raise ValueError("sample sizes must be positive")
        if not 0.0 < self.null_rate < 1.0:
            raise ValueError(f"null_rate must lie in (0, 1), got {self.null_rate}")

    @classmethod
    def homogeneous(
        cls, k_baskets: int, n: int, null_rate: float, prior: BetaShape = BetaShape(1.0, 1.0)
    ) -> "TrialConfig":
        """Equal sample sizes and a common prior in every basket."""
        return cls(k_baskets, (n,) * k_baskets, null_rate, (prior,) * k_baskets)

    def validate_responses(self, r: ResponseVector) -> tuple[int, ...]:
        counts = tuple(int(x) for x in r)
        if len(counts) != self.k_baskets:
            raise ValueError("response vector length must equal k_baskets")
        for k, (rk, nk) in enumerate(zip(counts, self.sample_sizes)):
            if not 0 <= rk <= nk:
                raise ValueError(f"basket {k}: need 0 <= r <= {nk}, got {rk}")
        return counts

    def individual_posterior(self, k: int, r_k: int) -> BetaShape:
        """Posterior of basket k from its own data alone."""
        prior = self.priors[k]
        return BetaShape(prior.alpha + r_k, prior.beta + self.sample_sizes[k] - r_k)


@dataclass(frozen=True)
class DesignSpec:
    """Base class of the design-family tagged union.

    ``decision_rule`` is the boundary convention of the efficacy decision
    (posterior tail >= lambda versus > lambda) and ``shares_prior`` says
    whether prior parameters sit inside the weighted posterior sums.
    """

    family: ClassVar[str] = ""
    decision_rule: ClassVar[str] = "geq"
    shares_prior: ClassVar[bool] = False
    #: families whose exact enumeration is disproportionately expensive and
    #: therefore opt-in (quadrature or optimization per outcome)
    slow_exact: ClassVar[bool] = False

    def params(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def __str__(self) -> str:
        inner = ", ".join(f"{k}={v:g}" for k, v in self.params().items())
        return f"{self.family}({inner})"


@dataclass(frozen=True)
class FujikawaDesign(DesignSpec):
    """Pairwise JSD weights; priors are shared along with the data."""

    epsilon: float
    tau: float
    family: ClassVar[str] = "fujikawa"
    shares_prior: ClassVar[bool] = True

    def __post_init__(self) -> None:
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError("tau must lie in [0, 1]")


@dataclass(frozen=True)
class CppDesign(DesignSpec):
    """Calibrated power prior: logistic weights in the scaled KS statistic."""

    a: float
    b: float
    family: ClassVar[str] = "cpp"

    def __post_init__(self) -> None:
        if not self.b > 0:
            raise ValueError("b must be positive")
        if not math.isfinite(self.a):
            raise ValueError("a must be finite")


@dataclass(frozen=True)
class CppGlobalDesign(CppDesign):
    """CPP weights times the global heterogeneity discount h."""

    epsilon_star: float = 1.0
    family: ClassVar[str] = "cpp-global"

    def __post_init__(self) -> None:
        super().__post_init__()
        if not self.epsilon_star > 0:
            raise ValueError("epsilon_star must be positive")


@dataclass(frozen=True)
class CppNexDesign(CppDesign):
    """CPP weights times a fixed global discount omega_star."""

    omega_star: float = 1.0
    family: ClassVar[str] = "cpp-nex"

    def __post_init__(self) -> None:
        super().__post_init__()
        if not 0.0 < self.omega_star <= 1.0:
            raise ValueError("omega_star must lie in (0, 1]")


@dataclass(frozen=True)
class JsdGlobalDesign(DesignSpec):
    """Fujikawa pairwise weights times the generalized-JSD global discount."""

    epsilon: float
    tau: float
    epsilon_star: float
    family: ClassVar[str] = "jsd-global"
    slow_exact: ClassVar[bool] = True

    def __post_init__(self) -> None:
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError("tau must lie in [0, 1]")
        if not self.epsilon_star > 0:
            raise ValueError("epsilon_star must be positive")


@dataclass(frozen=True)
class MmlDesign(DesignSpec):
    """Weights maximize each basket's beta-binomial marginal likelihood."""

    family: ClassVar[str] = "mml"
    slow_exact: ClassVar[bool] = True


@dataclass(frozen=True)
class BmaDesign(DesignSpec):
    """Bayesian model averaging over basket partitions; no weight matrix."""

    psi: float
    family: ClassVar[str] = "bma"
    decision_rule: ClassVar[str] = "gt"

    def __post_init__(self) -> None:
        if not math.isfinite(self.psi):
            raise ValueError("psi must be finite")


DESIGN_FAMILIES: dict[str, type[DesignSpec]] = {
    cls.family: cls
    for cls in (
        FujikawaDesign,
        CppDesign,
        CppGlobalDesign,
        CppNexDesign,
        JsdGlobalDesign,
        MmlDesign,
        BmaDesign,
    )
}

_PAIRWISE_FAMILIES = {"fujikawa", "cpp", "cpp-global", "cpp-nex", "jsd-global"}


class OptimizationError(ArithmeticError):
    """Weight optimization failed to converge; ``best`` holds the iterate."""

    def __init__(self, message: str, best: np.ndarray, value: float):
        super().__init__(message)
        self.best = best
        self.value = value


# ---------------------------------------------------------------------------
# pairwise weights


def _jsd_base2(shape_k: BetaShape, shape_i: BetaShape) -> float:
    """Base-2 Jensen-Shannon divergence between two beta distributions."""
    if shape_k == shape_i:
        return 0.0
    comps = [shape_k, shape_i]
    wts = [0.5, 0.5]
    return 0.5 * kld_beta_to_mixture(shape_k, comps, wts, 2.0) + 0.5 * kld_beta_to_mixture(
        shape_i, comps, wts, 2.0
    )


@lru_cache(maxsize=65536)
def _jsd_base2_cached(a1: float, b1: float, a2: float, b2: float) -> float:
    if (a1, b1) > (a2, b2):
        a1, b1, a2, b2 = a2, b2, a1, b1
    return _jsd_base2(BetaShape(a1, b1), BetaShape(a2, b2))


def jsd_pairwise_weight(
    shape_k: BetaShape, shape_i: BetaShape, epsilon: float, tau: float
) -> float:
    """(1 - JSD)^epsilon if that exceeds tau, else 0; JSD uses base-2 logs."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if not 0.0 <= tau <= 1.0:
        raise ValueError("tau must lie in [0, 1]")
    w = (1.0 - _jsd_base2(shape_k, shape_i)) ** epsilon
    return w if w > tau else 0.0


def cpp_pairwise_weight(r_k: int, n_k: int, r_i: int, n_i: int, a: float, b: float) -> float:
    """Logistic weight 1 / (1 + e^a S^b) of the scaled rate difference.

    S = max(n_k, n_i)^(1/4) |r_k/n_k - r_i/n_i|.  Written without the
    log(S) form so S = 0 (equal rates, any sample sizes) gives exactly 1.
    """
    if not (0 <= r_k <= n_k and 0 <= r_i <= n_i):
        raise ValueError("need 0 <= r <= n in both baskets")
    if not b > 0:
        raise ValueError("b must be positive")
    s_ks = abs(r_k / n_k - r_i / n_i)
    s = max(n_k, n_i) ** 0.25 * s_ks
    return 1.0 / (1.0 + math.exp(a) * s**b)


def pairwise_weight_matrix(
    config: TrialConfig, r: ResponseVector, spec: DesignSpec
) -> np.ndarray:
    """Symmetric matrix of pairwise sharing weights with unit diagonal."""
    if spec.family not in _PAIRWISE_FAMILIES:
        raise ValueError(f"design family {spec.family!r} has no pairwise weights")
    counts = config.validate_responses(r)
    k = config.k_baskets
    w = np.eye(k)
    for a_idx in range(k):
        for b_idx in range(a_idx + 1, k):
            w[a_idx, b_idx] = w[b_idx, a_idx] = _pairwise_entry(config, counts, spec, a_idx, b_idx)
    return w


def _pairwise_entry(
    config: TrialConfig, counts: tuple[int, ...], spec: DesignSpec, k: int, i: int
) -> float:
    if isinstance(spec, (FujikawaDesign, JsdGlobalDesign)):
        return jsd_pairwise_weight(
            config.individual_posterior(k, counts[k]),
            config.individual_posterior(i, counts[i]),
            spec.epsilon,
            spec.tau,
        )
    if isinstance(spec, CppDesign):
        return cpp_pairwise_weight(
            counts[k],
            config.sample_sizes[k],
            counts[i],
            config.sample_sizes[i],
            spec.a,
            spec.b,
        )
    raise ValueError(f"design family {spec.family!r} has no pairwise weights")


# ---------------------------------------------------------------------------
# global weights


def _generalized_jsd(shapes: tuple[BetaShape, ...]) -> float:
    """Generalized JSD of K distributions in base-K logs, in [0, 1]."""
    k = len(shapes)
    wts = [1.0 / k] * k
    total = math.fsum(
        kld_beta_to_mixture(s, shapes, wts, float(k)) for s in shapes
    )
    return total / k


@lru_cache(maxsize=65536)
def _generalized_jsd_cached(shape_key: tuple[tuple[float, float], ...]) -> float:
    # key is the sorted multiset of shape pairs; the JSD is permutation invariant
    return _generalized_jsd(tuple(BetaShape(a, b) for a, b in shape_key))


def _posterior_shape_key(config: TrialConfig, counts: tuple[int, ...]) -> tuple:
    shapes = [config.individual_posterior(k, counts[k]) for k in range(config.k_baskets)]
    return tuple(sorted((s.alpha, s.beta) for s in shapes))


def global_jsd_weight(config: TrialConfig, r: ResponseVector, epsilon_star: float) -> float:
    """(1 - generalized JSD of all K individual posteriors)^epsilon_star."""
    if not epsilon_star > 0:
        raise ValueError("epsilon_star must be positive")
    counts = config.validate_responses(r)
    jsd = _generalized_jsd_cached(_posterior_shape_key(config, counts))
    # base-K logs bound the divergence by 1; quadrature noise may poke past it
    jsd = min(max(jsd, 0.0), 1.0)
    return (1.0 - jsd) ** epsilon_star


def heterogeneity_gaps(config: TrialConfig, r: ResponseVector) -> np.ndarray:
    """Gaps of the sorted response rates, the input of :func:`heterogeneity_h`."""
    counts = config.validate_responses(r)
    rates = sorted(rk / nk for rk, nk in zip(counts, config.sample_sizes))
    return np.diff(np.asarray(rates))


def heterogeneity_h(config: TrialConfig, r: ResponseVector, epsilon_star: float) -> float:
    """Global heterogeneity discount from ordered response-rate gaps.

    With d the K-1 gaps of the sorted rates, the pre-power value is
    1 - sum_i d_i * 10^(-sum_j (d_j - 1/(K-1))^2), which is 1 at equal
    rates and 0 for rates equidistant from 0 to 1.  Clamped to [0, 1]
    before raising to epsilon_star.
    """
    if not epsilon_star > 0:
        raise ValueError("epsilon_star must be positive")
    d = heterogeneity_gaps(config, r)
    target = 1.0 / (config.k_baskets - 1)
    inner = float(np.sum((d - target) ** 2))
    pre = 1.0 - float(np.sum(d)) * 10.0 ** (-inner)
    pre = min(max(pre, 0.0), 1.0)
    return pre**epsilon_star


# ---------------------------------------------------------------------------
# maximum-marginal-likelihood weights


def _mml_log_likelihood(
    r_k: int, n_k: int, prior: BetaShape, others: Sequence[tuple[int, int]]
) -> Callable[[Sequence[float]], float]:
    """Log marginal likelihood of basket k's data as a function of the
    borrowing weights on the other baskets."""
    # math.lgamma instead of scipy scalar calls: this sits inside the
    # optimizer's innermost loop
    lgamma = math.lgamma
    borrow = tuple((float(ro), float(no - ro)) for ro, no in others)
    s1, s2 = prior.alpha, prior.beta
    rk, fk = float(r_k), float(n_k - r_k)
    log_comb = lgamma(n_k + 1) - lgamma(r_k + 1) - lgamma(n_k - r_k + 1)

    def loglik(w: Sequence[float]) -> float:
        u = s1
        v = s2
        for wi, (ri, fi) in zip(w, borrow):
            u += wi * ri
            v += wi * fi
        return (
            log_comb
            + lgamma(rk + u)
            + lgamma(fk + v)
            - lgamma(rk + u + fk + v)
            - (lgamma(u) + lgamma(v) - lgamma(u + v))
        )

    return loglik


def _golden_max_1d(f: Callable[[float], float], lo: float, hi: float, xtol: float) -> tuple[float, float]:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xtol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = (a + b) / 2.0
    return x, f(x)


def _coordinate_polish(
    obj: Callable[[Sequence[float]], float], x: list[float], value: float, sweeps: int = 3
) -> tuple[list[float], float]:
    # fixes the along-boundary stalls of a projected simplex search
    for _ in range(sweeps):
        improved = False
        for j in range(len(x)):
            def slice_obj(t: float, j: int = j) -> float:
                xt = list(x)
                xt[j] = t
                return obj(xt)

            xj, vj = _golden_max_1d(slice_obj, 0.0, 1.0, 3e-7)
            if vj > value:
                x[j] = xj
                value = vj
                improved = True
        if not improved:
            break
    return x, value


def _clip01(x: Sequence[float]) -> list[float]:
    return [0.0 if t < 0.0 else (1.0 if t > 1.0 else t) for t in x]


def _nelder_mead_box(
    obj: Callable[[Sequence[float]], float],
    x0: Sequence[float],
    xatol: float = 1e-6,
    fatol: float = 1e-10,
    max_iter: int | None = None,
) -> tuple[list[float], float, bool]:
    """Projected Nelder-Mead maximization over [0, 1]^dim.

    Trial points are clipped into the box before evaluation.  All pivot
    rules are deterministic.  Returns (best point, best value, converged).
    """
    dim = len(x0)
    if max_iter is None:
        max_iter = 250 * dim
    delta = 0.25

    simplex: list[list[float]] = [list(x0)]
    for j in range(dim):
        pt = list(x0)
        pt[j] = pt[j] + delta if pt[j] + delta <= 1.0 else pt[j] - delta
        simplex.append(pt)
    values = [obj(p) for p in simplex]

    converged = False
    for _ in range(max_iter):
        order = sorted(range(dim + 1), key=lambda i: (-values[i], i))
        simplex = [simplex[i] for i in order]
        values = [values[i] for i in order]
        spread = values[0] - values[-1]
        diam = max(
            abs(simplex[i][j] - simplex[0][j]) for i in range(1, dim + 1) for j in range(dim)
        )
        if spread <= fatol and diam <= xatol:
            converged = True
            break

        centroid = [sum(p[j] for p in simplex[:-1]) / dim for j in range(dim)]
        worst = simplex[-1]
        refl = _clip01([centroid[j] + (centroid[j] - worst[j]) for j in range(dim)])
        f_refl = obj(refl)
        if f_refl > values[0]:
            expa = _clip01([centroid[j] + 2.0 * (centroid[j] - worst[j]) for j in range(dim)])
            f_expa = obj(expa)
            if f_expa > f_refl:
                simplex[-1], values[-1] = expa, f_expa
            else:
                simplex[-1], values[-1] = refl, f_refl
        elif f_refl > values[-2]:
            simplex[-1], values[-1] = refl, f_refl
        else:
            if f_refl > values[-1]:
                cont = _clip01([centroid[j] + 0.5 * (refl[j] - centroid[j]) for j in range(dim)])
            else:
                cont = _clip01([centroid[j] + 0.5 * (worst[j] - centroid[j]) for j in range(dim)])
            f_cont = obj(cont)
            if f_cont > min(f_refl, values[-1]):
                simplex[-1], values[-1] = cont, f_cont
            else:
                best_pt = simplex[0]
                for i in range(1, dim + 1):
                    simplex[i] = [
                        best_pt[j] + 0.5 * (simplex[i][j] - best_pt[j]) for j in range(dim)
                    ]
                    values[i] = obj(simplex[i])
    best = max(range(dim + 1), key=lambda i: (values[i], -i))
    return list(simplex[best]), values[best], converged


def maximize_over_box(
    obj: Callable[[Sequence[float]], float], dim: int
) -> tuple[np.ndarray, float]:
    """Deterministic derivative-free maximization over [0, 1]^dim.

    Projected Nelder-Mead started from every box vertex plus the
    centroid, each followed by coordinate-wise golden-section refinement
    (simplex searches can stall while sliding along a box face).  The
    best final value wins; ties go to the iterate with the smallest L2
    norm.  No randomness anywhere, so results are reproducible.
    """
    starts: list[list[float]] = [list(v) for v in itertools.product((0.0, 1.0), repeat=dim)]
    starts.append([0.5] * dim)

    best: tuple[float, float, list[float]] | None = None
    converged = False
    for x0 in starts:
        x, value, ok = _nelder_mead_box(obj, x0)
        converged = converged or ok
        x, value = _coordinate_polish(obj, x, value)
        norm = math.hypot(*x)
        if best is None or value > best[0] + 1e-12 or (abs(value - best[0]) <= 1e-12 and norm < best[1]):
            best = (value, norm, x)
    assert best is not None
    if not converged:
        raise OptimizationError(
            "no start converged", best=np.array(best[2]), value=best[0]
        )
    return np.array(best[2]), best[0]


def _solve_mml(
    r_k: int, n_k: int, prior: tuple[float, float], others: tuple[tuple[int, int], ...]
) -> tuple[float, ...]:
    loglik = _mml_log_likelihood(r_k, n_k, BetaShape(*prior), others)
    w, _ = maximize_over_box(loglik, len(others))
    return tuple(float(x) for x in w)


@lru_cache(maxsize=1 << 20)
def _solve_mml_cached(
    r_k: int, n_k: int, prior: tuple[float, float], others_sorted: tuple[tuple[int, int], ...]
) -> tuple[float, ...]:
    # the likelihood only sees sum(w*r) and sum(w*(n-r)), so baskets with
    # equal (r, n) are interchangeable and the key can be sorted
    return _solve_mml(r_k, n_k, prior, others_sorted)


def mml_weights(config: TrialConfig, r: ResponseVector, k: int) -> np.ndarray:
    """Borrowing weights for basket k maximizing its marginal likelihood.

    Returns the full K-vector with the own-basket entry fixed at 1.
    Deterministic: fixed multistart, no randomness.
    """
    counts = config.validate_responses(r)
    if not 0 <= k < config.k_baskets:
        raise ValueError(f"basket index {k} out of range")
    others = [
        (counts[i], config.sample_sizes[i]) for i in range(config.k_baskets) if i != k
    ]
    order = sorted(range(len(others)), key=lambda j: others[j])
    prior = config.priors[k]
    solution = _solve_mml_cached(
        counts[k],
        config.sample_sizes[k],
        (prior.alpha, prior.beta),
        tuple(others[j] for j in order),
    )
    w = np.empty(config.k_baskets)
    w[k] = 1.0
    other_idx = [i for i in range(config.k_baskets) if i != k]
    for pos, j in enumerate(order):
        w[other_idx[j]] = solution[pos]
    return w


# ---------------------------------------------------------------------------
# dispatch


def effective_weight_matrix(
    config: TrialConfig, r: ResponseVector, spec: DesignSpec
) -> np.ndarray:
    """Weight matrix actually used by the posterior, per design family.

    Global factors (heterogeneity h, generalized JSD, fixed omega_star)
    scale off-diagonal sharing only; the diagonal stays 1 because a basket
    never down-weights its own data.
    """
    if isinstance(spec, BmaDesign):
        raise ValueError("the BMA design has no weight matrix")
    counts = config.validate_responses(r)
    if isinstance(spec, MmlDesign):
        k = config.k_baskets
        w = np.empty((k, k))
        for row in range(k):
            w[row] = mml_weights(config, counts, row)
        return w
    w = pairwise_weight_matrix(config, counts, spec)
    factor = 1.0
    if isinstance(spec, CppNexDesign):
        factor = spec.omega_star
    elif isinstance(spec, CppGlobalDesign):
        factor = heterogeneity_h(config, counts, spec.epsilon_star)
    elif isinstance(spec, JsdGlobalDesign):
        factor = global_jsd_weight(config, counts, spec.epsilon_star)
    if factor != 1.0:
        off = ~np.eye(config.k_baskets, dtype=bool)
        w[off] *= factor
    return w
