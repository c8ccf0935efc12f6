from __future__ import annotations

import logging
import math

import numpy as np
import pytest

from hypershadow import mc
from hypershadow.asymptotics import HALF_NORMAL_RATIO_VARIANCE, LimitLaw, MomentSet
from hypershadow.capgeom import disjoint_union_fraction
from hypershadow.errors import DomainError
from hypershadow.randgeom import UNIFORM_SQRT3, RandomStream, sample_std_normal

SIGMA = math.sqrt(HALF_NORMAL_RATIO_VARIANCE)


class TestWilson:
    def test_contains_point_estimate(self):
        for hits in (0, 1, 17, 500, 999, 1000):
            lo, hi = mc.wilson_interval(hits, 1000)
            assert 0.0 <= lo <= hits / 1000 <= hi <= 1.0

    def test_known_value(self):
        # Wilson 95% interval for 50/100
        lo, hi = mc.wilson_interval(50, 100)
        assert lo == pytest.approx(0.40383, abs=1e-5)
        assert hi == pytest.approx(0.59617, abs=1e-5)

    def test_level_domain(self):
        with pytest.raises(DomainError):
            mc.wilson_interval(1, 10, 1.0)

    def test_coverage(self):
        p = disjoint_union_fraction(3, 1.0)
        covered = 0
        for seed in range(200):
            est = mc.estimate_alpha(3, 1.0, 2000, seed=seed)
            covered += est.ci_low <= p <= est.ci_high
        assert covered >= 180


class TestEstimateAlpha:
    def test_zero_radius(self):
        est = mc.estimate_alpha(5, 0.0, 10_000)
        assert (est.hits, est.p_hat) == (0, 0.0)

    def test_plane_fully_blocked(self):
        est = mc.estimate_alpha(2, 1.0, 100_000)
        assert est.hits == est.trials and est.p_hat == 1.0

    def test_fields(self):
        est = mc.estimate_alpha(4, 0.8, 12_345, seed=9, ci_level=0.9)
        assert est.trials == 12_345 and est.seed == 9 and est.ci_level == 0.9
        assert 0 <= est.hits <= est.trials
        assert est.p_hat == est.hits / est.trials
        assert est.ci_low <= est.p_hat <= est.ci_high
        assert est.standard_error == pytest.approx(math.sqrt(est.p_hat * (1 - est.p_hat) / est.trials))

    @pytest.mark.parametrize(
        "kwargs",
        [dict(n=4, r=-1.0, trials=10), dict(n=4, r=2.5, trials=10), dict(n=4, r=1.0, trials=0),
         dict(n=1, r=0.5, trials=10), dict(n=4, r=1.0, trials=10, ci_level=0.0),
         dict(n=4, r=1.0, trials=10, workers=0)],
    )
    def test_domain(self, kwargs):
        with pytest.raises(DomainError):
            mc.estimate_alpha(**kwargs)

    def test_deterministic(self):
        assert mc.estimate_alpha(6, 1.0, 50_000, seed=4) == mc.estimate_alpha(6, 1.0, 50_000, seed=4)
        assert mc.estimate_alpha(6, 1.0, 50_000, seed=4) != mc.estimate_alpha(6, 1.0, 50_000, seed=5)

    @pytest.mark.parametrize("n", [3, 50, 1000])
    def test_worker_independence(self, n):
        trials = 3 * mc.block_size(n) + 17
        ref = mc.estimate_alpha(n, math.sqrt(0.36 * n), trials, workers=1)
        for workers in (2, 8):
            assert mc.estimate_alpha(n, math.sqrt(0.36 * n), trials, workers=workers) == ref

    def test_monotone_in_radius(self):
        n = 12
        hits = [mc.estimate_alpha(n, r, 20_000, seed=3).hits for r in np.linspace(0, math.sqrt(n), 40)]
        assert all(b >= a for a, b in zip(hits, hits[1:]))
        assert hits[0] == 0 and hits[-1] == 20_000

    @pytest.mark.parametrize("n", range(3, 9))
    @pytest.mark.parametrize("r", [0.25, 0.5, 1.0])
    def test_disjoint_regime_oracle(self, n, r):
        est = mc.estimate_alpha(n, r, 200_000)
        exact = disjoint_union_fraction(n, r)
        se = math.sqrt(exact * (1 - exact) / est.trials)
        assert abs(est.p_hat - exact) <= 4 * se

    def test_regimes_at_400(self):
        n = 400
        assert mc.estimate_alpha(n, math.sqrt(0.2 * n), 100_000).p_hat < 0.01
        assert mc.estimate_alpha(n, math.sqrt(0.55 * n), 100_000).p_hat > 0.99


class TestLimitStatistics:
    def test_single_coordinate_wiring(self):
        s = mc.sample_limit_statistic("ratio_centered", 1, 50)
        assert np.allclose(s.values, 1 - 2 / math.pi, rtol=0, atol=1e-15)

    def test_cos_theta_range(self):
        s = mc.sample_limit_statistic("cos_theta", 30, 20_000)
        assert s.values.min() >= 0.0 and s.values.max() <= 1.0
        assert len(s) == 20_000

    def test_shared_pass_matches_single(self):
        both = mc.sample_limit_statistics(("cos_theta", "distance_centered"), 40, 5000, seed=2)
        alone = mc.sample_limit_statistic("distance_centered", 40, 5000, seed=2)
        assert np.array_equal(both["distance_centered"].values, alone.values)

    def test_worker_independence(self):
        ref = mc.sample_limit_statistic("ratio_centered", 300, 10_000, workers=1).values
        for workers in (2, 8):
            assert np.array_equal(mc.sample_limit_statistic("ratio_centered", 300, 10_000, workers=workers).values, ref)

    def test_domain(self):
        with pytest.raises(DomainError):
            mc.sample_limit_statistic("angle", 10, 100)
        with pytest.raises(DomainError):
            mc.sample_limit_statistic("cos_theta", 10, 1)

    def test_ratio_mean_within_clt_band_of_zero(self, limit_samples_2000):
        # stated band 4 sigma / sqrt(trials) around 0; ignores the O(1/sqrt(n)) bias
        values = limit_samples_2000["ratio_centered"].values
        assert abs(values.mean()) <= 4 * SIGMA / math.sqrt(values.size)

    def test_ratio_mean_matches_finite_n_bias(self, limit_samples_2000):
        # E[s^2/(n t)] = mu^2 + (1 - mu^2)/n + O(n^-2) for half-normal coordinates
        values = limit_samples_2000["ratio_centered"].values
        bias = (1 - 2 / math.pi) / math.sqrt(2000)
        assert abs(values.mean() - bias) <= 4 * SIGMA / math.sqrt(values.size)

    def test_uniform_coordinates(self):
        s = mc.sample_limit_statistic("ratio_centered", 2000, 20_000, coords=UNIFORM_SQRT3)
        m = MomentSet(math.sqrt(3) / 2, 1.0, 3 * math.sqrt(3) / 4, 9 / 5)
        law = mc.law_for("ratio_centered", 2000, m)
        assert law.variance == pytest.approx(0.075, abs=1e-14)
        assert abs(s.values.var(ddof=1) / 0.075 - 1) <= 0.10


class TestChecks:
    def test_constant_sample(self, caplog):
        sample = mc.StatisticSample("cos_theta", 5, np.full(10, 0.3))
        with caplog.at_level(logging.WARNING):
            rep = mc.moment_check(sample, LimitLaw(0.3, 0.0), tol_mean=0.0, tol_var=0.05)
        assert rep.mean_ok and rep.var_ok is None and rep.passed
        assert "skipped" in rep.note
        assert any("skipped" in r.message for r in caplog.records)

    def test_empty_rejected(self):
        with pytest.raises(DomainError):
            mc.moment_check(mc.StatisticSample("cos_theta", 5, np.array([])), LimitLaw(0, 1), 0.1, 0.1)

    def test_ratio_moments(self, limit_samples_2000):
        rep = mc.moment_check(limit_samples_2000["ratio_centered"], mc.law_for("ratio_centered", 2000), 0.01, 0.05)
        assert rep.law_variance == pytest.approx(0.1147707, abs=1e-7)
        assert rep.passed, rep

    def test_distance_moments(self, limit_samples_2000):
        law = mc.law_for("distance_centered", 2000)
        assert law.variance == pytest.approx(0.0789605, abs=1e-7)
        rep = mc.moment_check(limit_samples_2000["distance_centered"], law, 0.01, 0.08)
        assert rep.passed, rep

    def test_cos_theta_law(self, limit_samples_2000):
        law = mc.law_for("cos_theta", 2000)
        assert law.mean == pytest.approx(math.sqrt(2 / math.pi))
        assert law.variance * 2000 == pytest.approx((math.pi - 3) / math.pi, rel=1e-12)
        rep = mc.moment_check(limit_samples_2000["cos_theta"], law, 0.01 / math.sqrt(2000), 0.08)
        assert rep.passed, rep

    def test_normal_self_consistency(self):
        sample = mc.StatisticSample("ratio_centered", 1, sample_std_normal(100_000, RandomStream(17)))
        rep = mc.quantile_check(sample, LimitLaw(0.0, 1.0), [0.01, 0.1, 0.5, 0.9, 0.99], 0.05)
        assert rep.passed, rep.gaps

    def test_ratio_quantiles(self, limit_samples_2000):
        sample = limit_samples_2000["ratio_centered"]
        law = mc.law_for("ratio_centered", 2000)
        median = mc.quantile_check(sample, law, [0.5], 0.01)
        assert median.passed, median.gaps
        upper = mc.quantile_check(sample, law, [0.975], 0.02)
        assert upper.expected[0] == pytest.approx(1.959964 * math.sqrt(0.1147707), abs=1e-6)
        assert upper.expected[0] == pytest.approx(0.664, abs=1e-3)
        assert upper.passed, upper.gaps

    def test_quantile_preconditions(self):
        small = mc.StatisticSample("cos_theta", 5, np.zeros(999))
        with pytest.raises(DomainError):
            mc.quantile_check(small, LimitLaw(0, 1), [0.5], 0.1)
        big = mc.StatisticSample("cos_theta", 5, np.zeros(1000))
        for bad in ([0.0], [1.0], [], [0.5, 1.2]):
            with pytest.raises(DomainError):
                mc.quantile_check(big, LimitLaw(0, 1), bad, 0.1)


class TestConvergenceTable:
    def test_rows(self):
        rows = mc.alpha_convergence_table([400], [-6.0, 0.0, 1.0], 100_000)
        by_z = {row.z: row for row in rows}
        assert by_z[-6.0].estimate.p_hat < 1e-3
        assert abs(by_z[0.0].estimate.p_hat - 0.5) <= 0.03
        assert abs(by_z[1.0].estimate.p_hat - 0.8413) <= 0.05
        assert by_z[1.0].predicted == pytest.approx(0.8413447, abs=1e-7)
        assert all(row.n == 400 for row in rows)

    def test_errors_propagate(self):
        with pytest.raises(DomainError):
            mc.alpha_convergence_table([4], [50.0], 100)
