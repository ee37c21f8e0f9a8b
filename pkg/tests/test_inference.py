"""Test-layer contracts: worked statistics, decision consistency, algebraic
identities across tests, and degenerate-input errors."""

import numpy as np
import pytest

from cauchypred import (
    DegenerateGroupsError,
    DegenerateVarianceError,
    DomainError,
    GroupStatistics,
    RegressionSample,
    SignDegeneracyError,
    bonferroni_joint,
    grouped_hybrid_test,
    group_gammas,
    hybrid_test,
    hybrid_test_intercept,
    ols_fit,
    omega_hat_sq,
    sign_conv,
    t_q_test,
    wald_joint,
)
from cauchypred.estimators import diff_cauchy
from cauchypred.inference import _p_value, ReferenceDistribution


def groups(values):
    v = np.asarray(values, float)
    return GroupStatistics(q=len(v), gammas=v, block_size=1, dropped=0)


def sample(y, x, lev=None):
    return RegressionSample(
        y=np.asarray(y, float),
        x_lag=np.asarray(x, float),
        x_level=None if lev is None else np.asarray(lev, float),
    )


def random_walk_sample(seed, T, with_levels=False):
    gen = np.random.default_rng(seed)
    lev = np.concatenate([[0.0], np.cumsum(gen.standard_normal(T))])
    y = gen.standard_normal(T)
    return sample(y, lev[:-1], lev=lev if with_levels else None)


class TestTqTest:
    def test_hand_statistic(self):
        out = t_q_test(groups([1.0, 2.0, 3.0, 4.0]), alpha=0.05)
        # mean 2.5, sd sqrt(5/3); sqrt(4) * 2.5 / 1.29099 = 3.8730
        assert out.statistic == pytest.approx(3.8730, abs=5e-5)
        assert out.ref_dist.df == 3

    def test_identical_groups_degenerate(self):
        with pytest.raises(DegenerateGroupsError):
            t_q_test(groups([2.0, 2.0, 2.0, 2.0]), alpha=0.05)

    def test_antisymmetry(self):
        g = [0.3, -1.2, 0.8, 2.0, -0.5]
        a = t_q_test(groups(g), 0.05).statistic
        b = t_q_test(groups([-v for v in g]), 0.05).statistic
        assert a == pytest.approx(-b, abs=1e-12)

    def test_location_shift_identity(self):
        g = np.array([0.3, -1.2, 0.8, 2.0, -0.5])
        c = 0.7
        base = t_q_test(groups(g), 0.05)
        shifted = t_q_test(groups(g + c), 0.05)
        q = len(g)
        sd = g.std(ddof=1)
        assert shifted.statistic == pytest.approx(
            np.sqrt(q) * (g.mean() + c) / sd, abs=1e-10
        )
        assert sd == pytest.approx((g + c).std(ddof=1), abs=1e-12)
        assert base.ref_dist == shifted.ref_dist

    def test_large_alpha_flagged_not_rejected(self):
        out = t_q_test(groups([1.0, 2.0, 3.0]), alpha=0.9)
        assert out.warning is not None

    def test_decision_consistency(self):
        for sided in ("two", "right", "left"):
            out = t_q_test(groups([1.0, 2.0, 3.0, 4.0]), alpha=0.05, sided=sided)
            assert out.reject == (out.p_value <= out.alpha)

    def test_two_sided_p_is_twice_min_tail(self):
        ref = ReferenceDistribution("student_t", df=6)
        for stat in (-2.4, -0.1, 0.0, 1.7):
            left = _p_value(stat, ref, "left")
            right = _p_value(stat, ref, "right")
            assert _p_value(stat, ref, "two") == pytest.approx(2 * min(left, right), abs=1e-12)


class TestHybridTest:
    def test_hand_example(self):
        out = hybrid_test(sample([1.0, 1.0], [1.0, -1.0]), alpha=0.05)
        # slope 0, residual variance 1, numerator 0
        assert out.statistic == pytest.approx(0.0, abs=1e-12)
        assert out.p_value == pytest.approx(1.0, abs=1e-12)
        assert out.ref_dist.family == "std_normal"

    def test_perfect_fit_degenerate(self):
        with pytest.raises(DegenerateVarianceError):
            hybrid_test(sample([1.0, 1.0], [1.0, 1.0]), alpha=0.05)

    def test_raw_y_variance_variant(self):
        s = random_walk_sample(1, 50)
        default = hybrid_test(s, 0.05)
        raw = hybrid_test(s, 0.05, variance="raw_y")
        w2 = float(np.mean(s.y**2))
        _, res = ols_fit(s, intercept=False)
        assert raw.statistic == pytest.approx(
            default.statistic * np.sqrt(omega_hat_sq(res) / w2), rel=1e-10
        )

    def test_positive_x_rescale_invariance(self):
        s = random_walk_sample(2, 80)
        base = hybrid_test(s, 0.05).statistic
        for c in (0.25, 3.0, 1e4):
            scaled = hybrid_test(sample(s.y, c * s.x_lag), 0.05).statistic
            assert scaled == pytest.approx(base, rel=1e-10)

    def test_unknown_variance_mode(self):
        with pytest.raises(DomainError):
            hybrid_test(random_walk_sample(3, 20), 0.05, variance="sandwich")


class TestHybridIntercept:
    def test_hand_worked_value(self):
        # 4-point series: differenced numerator 2 over 2 pairs, demeaned OLS
        # residual variance computed by hand below
        y = np.array([0.0, 5.0, 1.0, 4.0])
        lev = np.array([1.0, 2.0, -1.0, 3.0, 0.5])
        s = sample(y, lev[:-1], lev=lev)
        fit = diff_cauchy(s, "even")
        bh, res = ols_fit(s, intercept=True)
        w2 = omega_hat_sq(res)
        expected = np.sign(fit.denom) * fit.gamma / np.sqrt(2 * w2)
        # direct recomputation from raw series
        yd = y - y.mean()
        xd = lev[:-1] - lev[:-1].mean()
        bhat = np.sum(xd * yd) / np.sum(xd * xd)
        uu = yd - bhat * xd
        direct = -1.0 * (2.0 / np.sqrt(2.0)) / np.sqrt(2 * np.mean(uu * uu))
        assert expected == pytest.approx(direct, rel=1e-12)
        out = hybrid_test_intercept(s, "even", alpha=0.05)
        assert out.statistic == pytest.approx(direct, rel=1e-12)

    def test_pure_intercept_noise_free_degenerate(self):
        lev = np.array([1.0, -2.0, 3.0, -1.0, 2.0, 1.5, -0.5])
        y = np.full(6, 2.5)
        with pytest.raises(DegenerateVarianceError):
            hybrid_test_intercept(sample(y, lev[:-1], lev=lev), "even", 0.05)

    def test_intercept_immunity(self):
        # adding a constant to the response leaves the statistic unchanged
        s = random_walk_sample(4, 100, with_levels=True)
        base = hybrid_test_intercept(s, "odd", 0.05).statistic
        shifted = sample(s.y + 11.0, s.x_lag, lev=s.x_level)
        assert hybrid_test_intercept(shifted, "odd", 0.05).statistic == pytest.approx(
            base, rel=1e-10
        )


class TestGroupedHybrid:
    def test_scale_invariance_under_common_divisor(self):
        s = random_walk_sample(5, 200, with_levels=True)
        base = grouped_hybrid_test(s, "odd", 8, 0.05).statistic
        scaled = sample(3.7 * s.y, s.x_lag, lev=s.x_level)
        assert grouped_hybrid_test(scaled, "odd", 8, 0.05).statistic == pytest.approx(
            base, rel=1e-12
        )

    def test_all_equal_numerators_degenerate(self):
        # constant positive differences with a constant-sign instrument
        T = 16
        lev = np.arange(T + 1, dtype=float) + 1.0
        y = np.arange(T, dtype=float)
        with pytest.raises(DegenerateGroupsError):
            grouped_hybrid_test(sample(y, lev[:-1], lev=lev), "even", 4, 0.05)

    def test_matches_manual_partition(self):
        s = random_walk_sample(6, 150, with_levels=True)
        out = grouped_hybrid_test(s, "even", 5, 0.05)
        assert out.ref_dist.df == 4
        assert out.reject == (out.p_value <= 0.05)


class TestJointTests:
    def test_bonferroni_rule(self):
        # engineered marginals: strong first predictor, weak second
        gen = np.random.default_rng(12)
        T = 400
        x1 = np.cumsum(gen.standard_normal(T))
        x2 = np.cumsum(gen.standard_normal(T))
        y = 0.8 * x1 + gen.standard_normal(T) * 3.0
        s1 = sample(y, x1)
        s2 = sample(y, x2)
        joint = bonferroni_joint([s1, s2], alpha=0.05)
        p = [o.p_value for o in joint.per_predictor]
        assert joint.joint_reject == (min(p) <= 0.025)

    def test_bonferroni_k1_equals_hybrid(self):
        s = random_walk_sample(13, 120)
        joint = bonferroni_joint([s], alpha=0.05)
        single = hybrid_test(s, alpha=0.05)
        assert joint.joint_reject == single.reject
        assert joint.per_predictor[0].p_value == pytest.approx(single.p_value, abs=1e-15)

    def test_bonferroni_requires_shared_response(self):
        s1 = random_walk_sample(14, 50)
        s2 = random_walk_sample(15, 50)
        with pytest.raises(DomainError):
            bonferroni_joint([s1, s2], alpha=0.05)

    def test_wald_equals_tau_squared_at_k1(self):
        s = random_walk_sample(16, 300)
        tau = hybrid_test(s, 0.05).statistic
        joint = wald_joint(s, 0.05)
        assert joint.wald_stat == pytest.approx(tau**2, abs=1e-10)

    def test_wald_identical_signs_singular(self):
        gen = np.random.default_rng(17)
        x1 = np.abs(gen.standard_normal(100)) + 0.1
        X = np.column_stack([x1, 2 * x1])  # identical sign columns
        y = gen.standard_normal(100)
        with pytest.raises(SignDegeneracyError, match="identical sign"):
            wald_joint(RegressionSample(y=y, x_lag=X), 0.05)

    def test_wald_nonnegative_and_right_tailed(self):
        gen = np.random.default_rng(18)
        X = np.cumsum(gen.standard_normal((250, 2)), axis=0)
        y = gen.standard_normal(250)
        joint = wald_joint(RegressionSample(y=y, x_lag=X), 0.05)
        assert joint.wald_stat >= 0.0
        assert joint.per_predictor[0].sided == "right"
        assert joint.per_predictor[0].ref_dist.df == 2


class TestNullDistributionChecks:
    """Monte Carlo checks of the null references (all seeded)."""

    def test_hybrid_null_is_standard_normal(self):
        from scipy import stats as scipy_stats

        from cauchypred import RngStream

        n_reps, T = 5000, 2000
        values = np.empty(n_reps)
        for rep in range(n_reps):
            gen = RngStream(314, rep).generator()
            x = np.cumsum(gen.standard_normal(T))  # independent of the errors
            y = 1.7 * gen.standard_normal(T)
            values[rep] = hybrid_test(sample(y, x), 0.05).statistic
        assert scipy_stats.kstest(values, "norm").statistic < 0.025

    def test_wald_k2_null_size(self):
        from cauchypred import RngStream, recursive_demean

        n_reps, T = 2000, 2000
        rejections = 0
        for rep in range(n_reps):
            gen = RngStream(2718, rep).generator()
            walks = np.cumsum(gen.standard_normal((T, 2)), axis=0)
            # recursive recentering guarantees sign variation per predictor
            X = np.column_stack([recursive_demean(walks[:, 0]), recursive_demean(walks[:, 1])])
            y = gen.standard_normal(T)
            joint = wald_joint(RegressionSample(y=y, x_lag=X), 0.05)
            rejections += joint.joint_reject
        rate = rejections / n_reps
        assert rate == pytest.approx(0.05, abs=0.015)

    def test_intercept_only_response_centers_at_zero(self):
        from cauchypred import RngStream

        n_reps, T = 400, 200
        stats = np.empty(n_reps)
        for rep in range(n_reps):
            gen = RngStream(99, rep).generator()
            lev = np.concatenate([[0.0], np.cumsum(gen.standard_normal(T))])
            y = 3.0 + gen.standard_normal(T)  # pure intercept plus noise
            s = sample(y, lev[:-1], lev=lev)
            stats[rep] = hybrid_test_intercept(s, "even", 0.05).statistic
        assert abs(stats.mean()) < 3.0 / np.sqrt(n_reps) * 3
        assert np.mean(np.abs(stats) > 1.959964) == pytest.approx(0.05, abs=0.03)


def test_decision_consistency_across_tests():
    s = random_walk_sample(19, 240, with_levels=True)
    outcomes = [
        t_q_test(group_gammas(s, 8), 0.05, "two"),
        hybrid_test(s, 0.05, "right"),
        hybrid_test_intercept(s, "even", 0.05, "left"),
        grouped_hybrid_test(s, "odd", 8, 0.05, "two"),
    ]
    for out in outcomes:
        assert out.reject == (out.p_value <= out.alpha)
        assert 0.0 <= out.p_value <= 1.0


def test_signs_enter_only_through_instrument():
    # flipping predictor signs flips the full-sample statistic
    s = random_walk_sample(20, 90)
    a = hybrid_test(s, 0.05).statistic
    flipped = sample(s.y, -s.x_lag)
    b = hybrid_test(flipped, 0.05).statistic
    signs_equal = np.array_equal(sign_conv(-s.x_lag), -sign_conv(s.x_lag))
    if signs_equal:  # true unless some entry is exactly zero
        assert a == pytest.approx(-b, rel=1e-10)
