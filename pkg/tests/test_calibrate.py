"""Threshold calibration and grid-search tests.

The independence reduction is the key oracle here: a Fujikawa design with
tau = 1 shares nothing (every off-diagonal weight is cut to zero), so the
trial decomposes into independent single-basket binomial tests whose
calibration can be computed directly from the binomial distribution.
"""

import math

import numpy as np
import pytest
from scipy import stats

from powerbasket.calibrate import (
    CalibrationError,
    ExactEngine,
    SimulationEngine,
    TuningGrid,
    calibrate_lambda,
    grid_search,
)
from powerbasket.numerics import BetaShape, beta_tail
from powerbasket.oc import Scenario, exact_oc
from powerbasket.weights import CppDesign, FujikawaDesign, TrialConfig

INDEPENDENT = FujikawaDesign(epsilon=1.0, tau=1.0)  # tau = 1 cuts all sharing


def independence_oracle(k, n, p0, alpha, resolution=1e-6):
    """Direct binomial calibration of K independent basket tests."""
    tails = [beta_tail(p0, BetaShape(1.0 + r, 1.0 + n - r)) for r in range(n + 1)]
    # smallest count threshold protecting the familywise level
    feasible = []
    for c in range(n + 2):
        per_basket = 1.0 - stats.binom.cdf(c - 1, n, p0)  # P(R >= c)
        fwer = 1.0 - (1.0 - per_basket) ** k
        feasible.append((c, fwer))
    c_star = next(c for c, f in feasible if f <= alpha)
    # lambda must exceed the tail of c_star - 1 so that rejection needs c_star
    lower = 0.5 if c_star == 0 else tails[c_star - 1]
    if lower < 0.5:
        return 0.5, feasible[0][1]
    g = (math.floor(lower / resolution) + 1) * resolution
    while g <= lower:
        g += resolution
    return g, dict(feasible)[c_star]


class TestIndependenceReduction:
    @pytest.mark.parametrize("k,n", [(2, 10), (4, 15)])
    def test_matches_direct_binomial_oracle(self, k, n):
        cfg = TrialConfig.homogeneous(k, n, 0.2)
        cal = calibrate_lambda(cfg, INDEPENDENT, 0.05, ExactEngine())
        lam_oracle, fwer_oracle = independence_oracle(k, n, 0.2, 0.05)
        assert cal.lambda_ == pytest.approx(lam_oracle, abs=1e-12)
        assert cal.achieved_fwer == pytest.approx(fwer_oracle, abs=1e-12)

    def test_independent_design_shares_nothing(self):
        from powerbasket.weights import effective_weight_matrix

        cfg = TrialConfig.homogeneous(3, 8, 0.2)
        w = effective_weight_matrix(cfg, (4, 4, 4), INDEPENDENT)
        assert np.array_equal(w, np.eye(3))


class TestCalibrateLambda:
    def test_alpha_one_returns_lower_bound(self):
        cfg = TrialConfig.homogeneous(2, 10, 0.2)
        cal = calibrate_lambda(cfg, CppDesign(1.0, 1.0), 1.0, ExactEngine())
        assert cal.lambda_ == 0.5
        assert cal.achieved_fwer <= 1.0

    def test_achieved_respects_target(self):
        cfg = TrialConfig.homogeneous(3, 12, 0.15)
        for alpha in (0.01, 0.05, 0.2):
            cal = calibrate_lambda(cfg, CppDesign(2.0, 1.5), alpha, ExactEngine())
            assert cal.achieved_fwer <= alpha + 1e-12
            assert cal.method == "exact"

    def test_monotone_in_alpha(self):
        cfg = TrialConfig.homogeneous(2, 12, 0.2)
        spec = FujikawaDesign(1.0, 0.0)
        lambdas = [
            calibrate_lambda(cfg, spec, a, ExactEngine()).lambda_
            for a in (0.01, 0.02, 0.05, 0.1, 0.25, 0.5)
        ]
        assert all(x >= y for x, y in zip(lambdas, lambdas[1:]))

    def test_tightness_at_default_resolution(self):
        cfg = TrialConfig.homogeneous(2, 12, 0.2)
        spec = CppDesign(1.0, 1.0)
        cal = calibrate_lambda(cfg, spec, 0.05, ExactEngine())
        from powerbasket.calibrate import _fwer_fn
        from powerbasket.oc import _null_tail_stat_exact

        stat, probs = _null_tail_stat_exact(cfg, spec)
        _, fwer_exact = _fwer_fn(stat, probs, spec.decision_rule)
        assert fwer_exact(cal.lambda_) <= 0.05
        assert cal.lambda_ == 0.5 or fwer_exact(cal.lambda_ - 1e-5) > 0.05

    def test_resolution_grid_placement(self):
        cfg = TrialConfig.homogeneous(2, 12, 0.2)
        spec = CppDesign(1.0, 1.0)
        fine = calibrate_lambda(cfg, spec, 0.05, ExactEngine())
        coarse = calibrate_lambda(cfg, spec, 0.05, ExactEngine(), resolution=1e-3)
        assert coarse.lambda_ >= fine.lambda_
        assert coarse.lambda_ == pytest.approx(round(coarse.lambda_, 3), abs=1e-12)
        assert coarse.achieved_fwer <= 0.05

    def test_infeasible_raises(self):
        # a full-response outcome has posterior tail 1.0 under either rule's
        # float comparison, so no lambda below 1 can push FWER under 1e-18
        cfg = TrialConfig.homogeneous(2, 20, 0.15)
        with pytest.raises(CalibrationError):
            calibrate_lambda(cfg, INDEPENDENT, 1e-18, ExactEngine())

    def test_simulated_calibration(self):
        cfg = TrialConfig.homogeneous(2, 10, 0.2)
        engine = SimulationEngine(n_sims=4000, seed=11)
        cal = calibrate_lambda(cfg, CppDesign(1.0, 1.0), 0.05, engine)
        assert cal.method == "simulated"
        assert cal.achieved_fwer <= 0.05
        # deterministic given the seed
        again = calibrate_lambda(cfg, CppDesign(1.0, 1.0), 0.05, engine)
        assert cal == again

    def test_slow_family_needs_opt_in(self):
        from powerbasket.weights import MmlDesign

        cfg = TrialConfig.homogeneous(2, 5, 0.2)
        with pytest.raises(ValueError, match="allow_slow_families"):
            calibrate_lambda(cfg, MmlDesign(), 0.05, ExactEngine())
        cal = calibrate_lambda(cfg, MmlDesign(), 0.05, ExactEngine(allow_slow_families=True))
        assert cal.achieved_fwer <= 0.05


class TestGridSearch:
    def grid(self, axes):
        return TuningGrid.from_dict("cpp", axes)

    def scenarios(self):
        return (
            Scenario("null", (0.2, 0.2)),
            Scenario("alt", (0.5, 0.5)),
            Scenario("mixed", (0.2, 0.5)),
        )

    def test_single_point_grid(self):
        cfg = TrialConfig.homogeneous(2, 10, 0.2)
        grid = self.grid({"a": [2.0], "b": [1.5]})
        report = grid_search(cfg, grid, self.scenarios(), 0.05, ExactEngine())
        assert len(report.records) == 1
        assert report.winner.params == (("a", 2.0), ("b", 1.5))

    def test_winner_maximizes_mean_ecd(self):
        cfg = TrialConfig.homogeneous(2, 10, 0.2)
        grid = self.grid({"a": [0.5, 1.5, 2.5], "b": [0.5, 1.5]})
        report = grid_search(cfg, grid, self.scenarios(), 0.05, ExactEngine())
        assert len(report.records) == 6
        best = max(r.mean_ecd for r in report.records if r.error is None)
        assert report.winner.mean_ecd == best
        # tie-break: first combination in axis order wins
        first_best = next(r for r in report.records if r.mean_ecd == best)
        assert report.winner is first_best

    def test_deterministic(self):
        cfg = TrialConfig.homogeneous(2, 8, 0.2)
        grid = self.grid({"a": [1.0, 2.0], "b": [1.0]})
        r1 = grid_search(cfg, grid, self.scenarios(), 0.05, ExactEngine())
        r2 = grid_search(cfg, grid, self.scenarios(), 0.05, ExactEngine())
        assert r1 == r2

    def test_mean_ecd_recomputable_from_oc(self):
        cfg = TrialConfig.homogeneous(2, 10, 0.2)
        grid = self.grid({"a": [1.0, 2.0], "b": [1.0, 2.0]})
        report = grid_search(cfg, grid, self.scenarios(), 0.05, ExactEngine())
        spec = report.winner_spec()
        ecds = [
            exact_oc(cfg, spec, s, report.winner.lambda_).ecd for s in self.scenarios()
        ]
        assert report.winner.mean_ecd == pytest.approx(
            math.fsum(ecds) / len(ecds), abs=1e-9
        )
        assert report.winner.scenario_ecds == pytest.approx(tuple(ecds), abs=1e-9)

    def test_all_infeasible_raises(self):
        cfg = TrialConfig.homogeneous(2, 20, 0.15)
        grid = TuningGrid.from_dict("fujikawa", {"epsilon": [1.0], "tau": [1.0]})
        with pytest.raises(CalibrationError):
            grid_search(cfg, grid, self.scenarios()[:1], 1e-18, ExactEngine())

    def test_empty_scenarios_rejected(self):
        cfg = TrialConfig.homogeneous(2, 10, 0.2)
        with pytest.raises(ValueError):
            grid_search(cfg, self.grid({"a": [1.0], "b": [1.0]}), (), 0.05, ExactEngine())

    def test_mml_empty_axes_single_combination(self):
        grid = TuningGrid.from_dict("mml", {})
        assert grid.size == 1
        assert list(grid.combinations()) == [()]

    def test_unknown_family_rejected(self):
        with pytest.raises(ValueError):
            TuningGrid.from_dict("bhm", {"phi": [1.0]})
