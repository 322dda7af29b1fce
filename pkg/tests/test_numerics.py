"""Special-function tests against independent high-precision oracles.

The oracle side never touches scipy: mpmath provides arbitrary-precision
gamma/incomplete-beta values and quadrature, and the frozen constants
below were produced by exactly these oracle functions.
"""

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from powerbasket.numerics import (
    BetaShape,
    QuadratureError,
    beta_log_pdf,
    beta_tail,
    integrate,
    kld_beta_to_mixture,
    log_beta_binomial_pmf,
    log_beta_fn,
)

mp.mp.dps = 40


# oracle implementations (independent of the scipy-backed code under test)

def oracle_log_beta(a, b):
    return float(mp.log(mp.beta(a, b)))


def oracle_tail(p0, a, b):
    return float(mp.betainc(a, b, p0, 1, regularized=True))


def oracle_log_pdf(x, a, b):
    x = mp.mpf(x)
    return float((a - 1) * mp.log(x) + (b - 1) * mp.log(1 - x) - mp.log(mp.beta(a, b)))


def oracle_log_bb_pmf(r, n, a, b):
    integrand = lambda x: mp.binomial(n, r) * x ** (r + a - 1) * (1 - x) ** (n - r + b - 1) / mp.beta(a, b)
    return float(mp.log(mp.quad(integrand, [0, 1])))


shapes = st.floats(min_value=0.05, max_value=200.0, allow_nan=False)


class TestLogBetaFn:
    def test_uniform_is_zero(self):
        assert log_beta_fn(1.0, 1.0) == 0.0

    def test_small_integer_value(self):
        # B(2, 3) = 1/12
        assert log_beta_fn(2.0, 3.0) == pytest.approx(math.log(1.0 / 12.0), rel=1e-14)

    def test_frozen_oracle_value(self):
        frozen = -15.17131375232587744  # oracle_log_beta(11, 11)
        assert oracle_log_beta(11, 11) == pytest.approx(frozen, rel=1e-15)
        assert log_beta_fn(11.0, 11.0) == pytest.approx(frozen, rel=1e-12)

    @pytest.mark.parametrize("a,b", [(0.001, 5.0), (123.4, 0.5), (1e6, 1e6), (7.0, 1e5)])
    def test_matches_oracle_over_range(self, a, b):
        assert log_beta_fn(a, b) == pytest.approx(oracle_log_beta(a, b), rel=1e-12)

    @pytest.mark.parametrize("a,b", [(0.0, 1.0), (-1.0, 2.0), (1.0, 0.0)])
    def test_domain_errors(self, a, b):
        with pytest.raises(ValueError):
            log_beta_fn(a, b)


class TestBetaTail:
    def test_uniform_tail(self):
        assert beta_tail(0.15, BetaShape(1.0, 1.0)) == pytest.approx(0.85, abs=1e-15)

    @pytest.mark.parametrize("a", [0.3, 1.0, 4.5, 30.0])
    def test_symmetric_shape_at_half(self, a):
        assert beta_tail(0.5, BetaShape(a, a)) == pytest.approx(0.5, abs=1e-13)

    def test_frozen_oracle_value(self):
        frozen = 0.9999299048655795  # oracle_tail(0.15, 11, 11)
        assert oracle_tail(0.15, 11, 11) == pytest.approx(frozen, abs=1e-15)
        assert beta_tail(0.15, BetaShape(11.0, 11.0)) == pytest.approx(frozen, abs=1e-12)

    @given(
        p0=st.floats(min_value=0.01, max_value=0.99),
        a=shapes,
        b=shapes,
    )
    def test_matches_oracle(self, p0, a, b):
        assert beta_tail(p0, BetaShape(a, b)) == pytest.approx(oracle_tail(p0, a, b), abs=1e-12)

    def test_complement_of_quadrature(self):
        # tail + quadrature of the density over (0, p0) = 1
        shape = BetaShape(3.2, 7.8)
        lower = float(mp.quad(lambda x: mp.exp(mp.mpf(beta_log_pdf(float(x), shape))), [0, 0.15]))
        # quadrature of our own log pdf, integrated by the oracle integrator
        assert beta_tail(0.15, shape) + lower == pytest.approx(1.0, abs=1e-10)

    def test_strictly_decreasing_in_p0(self):
        shape = BetaShape(4.0, 9.0)
        grid = np.linspace(0.02, 0.98, 49)
        tails = [beta_tail(p, shape) for p in grid]
        assert all(x > y for x, y in zip(tails, tails[1:]))

    def test_strictly_increasing_in_alpha(self):
        tails = [beta_tail(0.3, BetaShape(a, 5.0)) for a in np.linspace(0.5, 30.0, 60)]
        assert all(x < y for x, y in zip(tails, tails[1:]))

    @pytest.mark.parametrize("p0", [0.0, 1.0, -0.1, 1.5])
    def test_domain_errors(self, p0):
        with pytest.raises(ValueError):
            beta_tail(p0, BetaShape(2.0, 2.0))


class TestBetaLogPdf:
    def test_uniform_density(self):
        assert beta_log_pdf(0.3, BetaShape(1.0, 1.0)) == 0.0

    def test_small_value(self):
        # Beta(2,2) density at 1/2 is 6 * 0.25
        assert beta_log_pdf(0.5, BetaShape(2.0, 2.0)) == pytest.approx(math.log(1.5), rel=1e-14)

    def test_frozen_oracle_value(self):
        frozen = 0.971691954757964  # oracle_log_pdf(0.2, 3, 7)
        assert oracle_log_pdf(0.2, 3, 7) == pytest.approx(frozen, rel=1e-14)
        assert beta_log_pdf(0.2, BetaShape(3.0, 7.0)) == pytest.approx(frozen, rel=1e-12)

    @pytest.mark.parametrize("x", [0.0, 1.0, -0.5, 2.0])
    def test_open_interval(self, x):
        with pytest.raises(ValueError):
            beta_log_pdf(x, BetaShape(2.0, 2.0))


class TestLogBetaBinomialPmf:
    def test_empty_sample(self):
        assert log_beta_binomial_pmf(0, 0, BetaShape(2.3, 4.5)) == pytest.approx(0.0, abs=1e-14)

    @pytest.mark.parametrize("r", range(0, 8))
    def test_uniform_prior_is_flat(self, r):
        # Beta(1,1) prior makes each count equally likely
        assert log_beta_binomial_pmf(r, 7, BetaShape(1.0, 1.0)) == pytest.approx(
            math.log(1.0 / 8.0), rel=1e-13
        )

    def test_frozen_oracle_value(self):
        frozen = -2.5376572151735292  # oracle_log_bb_pmf(7, 20, 2, 3)
        assert oracle_log_bb_pmf(7, 20, 2, 3) == pytest.approx(frozen, rel=1e-14)
        assert log_beta_binomial_pmf(7, 20, BetaShape(2.0, 3.0)) == pytest.approx(frozen, rel=1e-12)

    @given(n=st.integers(min_value=0, max_value=60), a=shapes, b=shapes)
    def test_normalization(self, n, a, b):
        shape = BetaShape(a, b)
        total = math.fsum(math.exp(log_beta_binomial_pmf(r, n, shape)) for r in range(n + 1))
        assert total == pytest.approx(1.0, abs=1e-10)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            log_beta_binomial_pmf(5, 4, BetaShape(1.0, 1.0))


class TestIntegrate:
    def test_constant(self):
        assert integrate(lambda x: 1.0, 1e-10) == pytest.approx(1.0, abs=1e-10)

    def test_polynomial(self):
        assert integrate(lambda x: x * x, 1e-10) == pytest.approx(1.0 / 3.0, abs=1e-10)

    def test_density_normalization(self):
        shape = BetaShape(3.0, 5.0)
        assert integrate(lambda x: math.exp(beta_log_pdf(x, shape)), 1e-10) == pytest.approx(
            1.0, abs=1e-10
        )

    def test_endpoint_divergent_density(self):
        # shapes below 1 diverge at both endpoints; the open rule handles it
        shape = BetaShape(0.4, 0.7)
        assert integrate(lambda x: math.exp(beta_log_pdf(x, shape))) == pytest.approx(
            1.0, abs=1e-7
        )

    def test_deterministic(self):
        f = lambda x: math.sin(13.0 * x) ** 2 + x
        assert integrate(f) == integrate(f)

    def test_invalid_tolerance(self):
        with pytest.raises(ValueError):
            integrate(lambda x: 1.0, 0.0)

    def test_nonconvergence_carries_estimate(self):
        # rapidly oscillating integrand at an unreachable tolerance
        f = lambda x: math.sin(1.0 / (x + 1e-12))
        with pytest.raises(QuadratureError) as err:
            integrate(f, 1e-14)
        assert math.isfinite(err.value.estimate)


def trapezoid_kld(p, comps, wts, base, n=2_000_001):
    """Independent fine-grid oracle for divergence integrals."""
    x = np.linspace(0.0, 1.0, n + 1)[1:-1]
    def pdf(s):
        return np.exp(
            (s.alpha - 1) * np.log(x)
            + (s.beta - 1) * np.log1p(-x)
            - (math.lgamma(s.alpha) + math.lgamma(s.beta) - math.lgamma(s.alpha + s.beta))
        )
    fp = pdf(p)
    mix = sum(w * pdf(c) for w, c in zip(wts, comps))
    integrand = np.where(fp > 1e-300, fp * (np.log(fp) - np.log(mix)), 0.0) / math.log(base)
    return float(np.trapezoid(integrand, x))


class TestKldBetaToMixture:
    def test_identical_is_zero(self):
        p = BetaShape(4.0, 6.0)
        assert kld_beta_to_mixture(p, [p], [1.0], 2.0) == pytest.approx(0.0, abs=1e-8)

    def test_frozen_trapezoid_value(self):
        frozen = 0.571194868526  # trapezoid_kld(B(11,11), [B(11,11), B(16,6)], [.5,.5], 2)
        comps = [BetaShape(11.0, 11.0), BetaShape(16.0, 6.0)]
        assert trapezoid_kld(BetaShape(11.0, 11.0), comps, [0.5, 0.5], 2.0) == pytest.approx(
            frozen, abs=1e-9
        )
        assert kld_beta_to_mixture(BetaShape(11.0, 11.0), comps, [0.5, 0.5], 2.0) == pytest.approx(
            frozen, abs=1e-7
        )

    def test_component_reordering_invariance(self):
        p = BetaShape(5.0, 9.0)
        comps = [BetaShape(2.0, 2.0), BetaShape(8.0, 3.0), BetaShape(5.0, 9.0)]
        wts = [0.2, 0.5, 0.3]
        forward = kld_beta_to_mixture(p, comps, wts, 2.0)
        backward = kld_beta_to_mixture(p, comps[::-1], wts[::-1], 2.0)
        assert forward == pytest.approx(backward, abs=1e-10)

    @given(
        a1=st.floats(min_value=0.5, max_value=40.0),
        b1=st.floats(min_value=0.5, max_value=40.0),
        a2=st.floats(min_value=0.5, max_value=40.0),
        b2=st.floats(min_value=0.5, max_value=40.0),
    )
    def test_nonnegative(self, a1, b1, a2, b2):
        p = BetaShape(a1, b1)
        comps = [p, BetaShape(a2, b2)]
        val = kld_beta_to_mixture(p, comps, [0.5, 0.5], 2.0)
        assert val >= -1e-8

    def test_weights_must_sum_to_one(self):
        p = BetaShape(2.0, 2.0)
        with pytest.raises(ValueError):
            kld_beta_to_mixture(p, [p, p], [0.5, 0.6], 2.0)

    def test_log_base_must_exceed_one(self):
        p = BetaShape(2.0, 2.0)
        with pytest.raises(ValueError):
            kld_beta_to_mixture(p, [p], [1.0], 1.0)


class TestBetaShape:
    @pytest.mark.parametrize("a,b", [(0.0, 1.0), (1.0, -2.0), (math.inf, 1.0), (math.nan, 1.0)])
    def test_rejects_invalid(self, a, b):
        with pytest.raises(ValueError):
            BetaShape(a, b)

    def test_mean(self):
        assert BetaShape(9.0, 23.0).mean == pytest.approx(0.28125, abs=1e-15)
