"""Posterior-update and decision tests: hand arithmetic, sum-convention
identities, boundary semantics, and equivariance."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from powerbasket.numerics import BetaShape, beta_tail
from powerbasket.posterior import (
    PosteriorParams,
    decide,
    design_posterior,
    fujikawa_posterior,
    posterior_means,
    power_prior_posterior,
)
from powerbasket.weights import (
    CppDesign,
    FujikawaDesign,
    BmaDesign,
    TrialConfig,
)


def cfg2(n=20):
    return TrialConfig.homogeneous(2, n, 0.15)


def matrix(off, k=2):
    w = np.full((k, k), off, dtype=float)
    np.fill_diagonal(w, 1.0)
    return w


class TestPowerPriorPosterior:
    def test_identity_matrix_no_sharing(self):
        post = power_prior_posterior(cfg2(), (4, 8), np.eye(2))
        assert post.shapes[0] == BetaShape(5.0, 17.0)
        assert post.shapes[1] == BetaShape(9.0, 13.0)

    def test_all_ones_full_pooling(self):
        post = power_prior_posterior(cfg2(), (4, 8), matrix(1.0))
        assert post.shapes[0] == BetaShape(1.0 + 12.0, 1.0 + 28.0)
        assert post.shapes[1] == post.shapes[0]

    def test_hand_arithmetic_half_weight(self):
        post = power_prior_posterior(cfg2(), (4, 8), matrix(0.5))
        # basket 1: Beta(1 + 4 + 4, 1 + 16 + 6) = Beta(9, 23)
        assert post.shapes[0] == BetaShape(9.0, 23.0)

    def test_requires_unit_diagonal(self):
        w = matrix(0.5)
        w[0, 0] = 0.9
        with pytest.raises(ValueError):
            power_prior_posterior(cfg2(), (4, 8), w)


class TestFujikawaPosterior:
    def test_identity_matrix_matches_power_prior(self):
        r = (4, 8)
        a = power_prior_posterior(cfg2(), r, np.eye(2))
        b = fujikawa_posterior(cfg2(), r, np.eye(2))
        assert a == b

    def test_all_ones_shares_priors(self):
        cfg = TrialConfig.homogeneous(3, 20, 0.15)
        post = fujikawa_posterior(cfg, (2, 5, 9), matrix(1.0, 3))
        assert post.shapes[0] == BetaShape(3.0 + 16.0, 3.0 + 44.0)

    def test_hand_arithmetic_half_weight(self):
        post = fujikawa_posterior(cfg2(), (4, 8), matrix(0.5))
        # basket 1: alpha = 1*(1+4) + 0.5*(1+8) = 9.5; beta = 1*(1+16) + 0.5*(1+12) = 23.5
        assert post.shapes[0] == BetaShape(9.5, 23.5)

    @given(
        off=st.floats(min_value=0.0, max_value=1.0),
        r1=st.integers(min_value=0, max_value=20),
        r2=st.integers(min_value=0, max_value=20),
    )
    def test_prior_shift_identity(self, off, r1, r2):
        # fujikawa - power_prior = (sum of off-diagonal weights) * prior, per shape
        cfg = cfg2()
        w = matrix(off)
        pp = power_prior_posterior(cfg, (r1, r2), w)
        fu = fujikawa_posterior(cfg, (r1, r2), w)
        for k in range(2):
            assert fu.shapes[k].alpha - pp.shapes[k].alpha == pytest.approx(
                off * cfg.priors[k].alpha, abs=1e-12
            )
            assert fu.shapes[k].beta - pp.shapes[k].beta == pytest.approx(
                off * cfg.priors[k].beta, abs=1e-12
            )


class TestMonotonePooling:
    def test_upweighting_higher_rate_raises_mean(self):
        cfg = cfg2()
        means = []
        for off in np.linspace(0.0, 1.0, 11):
            post = power_prior_posterior(cfg, (4, 16), matrix(off))
            means.append(posterior_means(post)[0])
        assert all(x < y for x, y in zip(means, means[1:]))


class TestDecide:
    def test_uniform_below_threshold(self):
        post = PosteriorParams((BetaShape(1.0, 1.0),))
        assert decide(post, 0.15, 0.9) == (False,)

    def test_boundary_geq_vs_gt(self):
        shape = BetaShape(9.0, 13.0)
        lam = beta_tail(0.15, shape)
        post = PosteriorParams((shape,))
        assert decide(post, 0.15, lam, "geq") == (True,)
        assert decide(post, 0.15, lam, "gt") == (False,)

    def test_oracle_tail_decision(self):
        # oracle tail(0.15; Beta(9,13)) = 0.9979822560382803
        post = PosteriorParams((BetaShape(9.0, 13.0),))
        assert decide(post, 0.15, 0.95) == (True,)
        assert decide(post, 0.15, 0.9979822560382803 + 1e-12) == (False,)

    def test_monotone_in_lambda(self):
        post = PosteriorParams((BetaShape(9.0, 23.0), BetaShape(9.0, 13.0)))
        previous = None
        for lam in np.linspace(0.05, 0.999, 40):
            current = decide(post, 0.15, float(lam))
            if previous is not None:
                # raising lambda never converts a non-rejection into a rejection
                assert all(not c or p for p, c in zip(previous, current))
            previous = current

    def test_validation(self):
        post = PosteriorParams((BetaShape(1.0, 1.0),))
        with pytest.raises(ValueError):
            decide(post, 0.15, 1.0)
        with pytest.raises(ValueError):
            decide(post, 0.15, 0.5, "ge")


class TestPosteriorMeans:
    def test_values(self):
        post = PosteriorParams((BetaShape(1.0, 1.0), BetaShape(9.0, 23.0)))
        assert posterior_means(post) == pytest.approx((0.5, 0.28125), abs=1e-15)


class TestDesignPosterior:
    def test_family_dispatch(self):
        cfg = cfg2()
        r = (4, 8)
        fu = design_posterior(cfg, r, FujikawaDesign(1.0, 0.0))
        pp = design_posterior(cfg, r, CppDesign(1.0, 1.0))
        # prior sharing inflates the shape totals relative to the power prior
        assert fu.shapes[0].alpha > pp.shapes[0].alpha or fu.shapes[0].beta > pp.shapes[0].beta

    def test_bma_rejected(self):
        with pytest.raises(ValueError):
            design_posterior(cfg2(), (4, 8), BmaDesign(0.0))

    def test_permutation_equivariance(self):
        cfg = TrialConfig.homogeneous(4, 20, 0.15)
        r = (2, 9, 14, 5)
        spec = CppDesign(2.0, 1.5)
        post = design_posterior(cfg, r, spec)
        perm = [3, 1, 0, 2]
        post_perm = design_posterior(cfg, tuple(r[p] for p in perm), spec)
        for new_idx, old_idx in enumerate(perm):
            assert post_perm.shapes[new_idx].alpha == pytest.approx(
                post.shapes[old_idx].alpha, abs=1e-12
            )
            assert post_perm.shapes[new_idx].beta == pytest.approx(
                post.shapes[old_idx].beta, abs=1e-12
            )
        lam = 0.9
        d = decide(post, cfg.null_rate, lam)
        d_perm = decide(post_perm, cfg.null_rate, lam)
        assert d_perm == tuple(d[p] for p in perm)
