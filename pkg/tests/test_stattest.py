import itertools
import math

import numpy as np
import pytest

from evospec import specialfn
from evospec.estimator import SpectralEstimate, build_grid, default_tapers, estimate_grid
from evospec.simulate import model_catalog, simulate
from evospec.stattest import (LogSpectraTable, anova_decomposition, column_ranks,
                              friedman_statistic, log_table, mc_study, psr_test,
                              rs_test)
from tests.conftest import brute_force_friedman, brute_force_ranks


def _estimate(values, K=5):
    values = np.asarray(values, dtype=float)
    grid = build_grid(512, K)
    # adapt the grid shape to the requested table without re-deriving blocks
    if values.shape != (grid.I, grid.J):
        pytest.skip("helper only supports the default 9x4 grid")
    return SpectralEstimate(grid=grid, values=values, K=K)


def _table(w, sigma2=1.0, K=5):
    return LogSpectraTable(W=np.asarray(w, dtype=float), K=K, sigma2=sigma2)


class TestLogTable:
    def test_constant_matrix(self):
        est = _estimate(np.full((9, 4), 3.0))
        table = log_table(est)
        expected = math.log(3.0) - specialfn.digamma(5) + math.log(5)
        assert np.allclose(table.W, expected, atol=1e-14)

    def test_sigma2_is_trigamma_k(self):
        est = _estimate(np.full((9, 4), 1.0))
        table = log_table(est)
        # pi^2/6 - 1 - 1/4 - 1/9 - 1/16, derived via the recurrence from trigamma(1)
        assert table.sigma2 == pytest.approx(0.2213229557371154, abs=1e-10)

    def test_doubling_shifts_by_log_two(self):
        base = np.abs(np.random.default_rng(0).standard_normal((9, 4))) + 0.1
        t1 = log_table(_estimate(base))
        t2 = log_table(_estimate(2.0 * base))
        assert np.allclose(t2.W - t1.W, math.log(2.0), atol=1e-12)

    def test_zero_estimate_rejected(self):
        values = np.full((9, 4), 1.0)
        values[2, 1] = 0.0
        with pytest.raises(ValueError, match="non-positive spectral estimate"):
            log_table(_estimate(values))

    def test_small_k_warns(self):
        grid = build_grid(512, 4)
        est = SpectralEstimate(grid=grid, values=np.full((grid.I, grid.J), 1.0), K=4)
        with pytest.warns(UserWarning, match="K >= 5"):
            log_table(est)


class TestPsr:
    def test_all_equal_table_is_stationary(self):
        table = _table(np.full((5, 4), 2.5), sigma2=0.2)
        for alpha in (0.01, 0.05, 0.5):
            report = psr_test(table, alpha)
            assert report.decision == "stationary"
            assert report.S_T == report.S_F == report.S_IR == 0.0
            assert report.um_flag

    def test_hand_computed_two_by_two(self):
        report = psr_test(_table([[0.0, 0.0], [1.0, 1.0]]), alpha=0.05)
        assert report.S_T == pytest.approx(1.0, abs=1e-15)
        assert report.S_F == pytest.approx(0.0, abs=1e-15)
        assert report.S_IR == pytest.approx(0.0, abs=1e-15)
        assert report.df_T == 1 and report.df_F == 1 and report.df_IR == 1

    def test_between_frequencies_never_gates(self):
        # huge column effect only: S_F large, S_T = S_IR = 0
        w = np.tile([0.0, 50.0, 100.0], (4, 1))
        report = psr_test(_table(w), alpha=0.05)
        assert report.S_F > 1000
        assert report.decision == "stationary"
        assert report.um_flag

    def test_interaction_gates_first(self):
        w = np.array([[0.0, 10.0], [10.0, 0.0], [0.0, 10.0]])
        report = psr_test(_table(w), alpha=0.05)
        assert report.decision == "non-stationary"
        assert not report.um_flag

    def test_between_times_gates_second(self):
        w = np.array([[0.0, 0.0], [5.0, 5.0], [10.0, 10.0]])
        report = psr_test(_table(w), alpha=0.05)
        assert report.S_IR == pytest.approx(0.0, abs=1e-12)
        assert report.decision == "non-stationary"
        assert report.um_flag

    def test_thresholds_come_from_chi2(self):
        report = psr_test(_table(np.zeros((9, 4))), alpha=0.05)
        assert report.threshold_T == pytest.approx(specialfn.chi2_quantile(0.95, 8))
        assert report.threshold_IR == pytest.approx(specialfn.chi2_quantile(0.95, 24))

    def test_degenerate_table_rejected(self):
        with pytest.raises(ValueError, match="degenerate"):
            psr_test(_table(np.zeros((1, 4))))
        with pytest.raises(ValueError, match="degenerate"):
            psr_test(_table(np.zeros((4, 1))))


def test_anova_decomposition_identity():
    rng = np.random.default_rng(123)
    for _ in range(1000):
        w = rng.standard_normal((9, 4))
        s_t, s_f, s_ir = anova_decomposition(w)
        total = float(((w - w.mean()) ** 2).sum())
        assert abs(total - (s_t + s_f + s_ir)) <= 1e-10


def test_constant_shift_invariance():
    rng = np.random.default_rng(5)
    w = rng.standard_normal((9, 4))
    r1 = psr_test(_table(w))
    r2 = psr_test(_table(w + 17.3))
    assert r1.S_T == pytest.approx(r2.S_T, abs=1e-9)
    assert r1.S_F == pytest.approx(r2.S_F, abs=1e-9)
    assert r1.S_IR == pytest.approx(r2.S_IR, abs=1e-9)
    assert friedman_statistic(w) == friedman_statistic(w + 17.3)


class TestRs:
    def test_identical_rows_full_ties(self):
        table = _table(np.tile([1.0, 2.0, 3.0, 4.0], (5, 1)))
        ranks = column_ranks(table.W)
        assert np.allclose(ranks, 3.0)  # (I+1)/2 for I = 5
        report = rs_test(table)
        assert report.t_R == 0.0
        assert report.decision == "stationary"

    def test_three_by_three_increasing_columns(self):
        w = np.array([[1.0, 4.0, 7.0], [2.0, 5.0, 8.0], [3.0, 6.0, 9.0]])
        report = rs_test(_table(w))
        assert report.t_R == pytest.approx(6.0, abs=1e-12)
        assert report.df == 2

    def test_matches_brute_force_on_random_tables(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            w = rng.integers(1, 4, size=(4, 4)).astype(float)
            assert friedman_statistic(w) == pytest.approx(brute_force_friedman(w), abs=1e-12)

    def test_matches_brute_force_exhaustive_two_by_two(self):
        for cells in itertools.product((1.0, 2.0), repeat=4):
            w = np.array(cells).reshape(2, 2)
            assert friedman_statistic(w) == brute_force_friedman(w)

    def test_column_ranks_match_brute_force_all_tie_patterns(self):
        for col in itertools.product((1.0, 2.0, 3.0), repeat=4):
            got = column_ranks(np.array(col).reshape(-1, 1))[:, 0]
            assert np.array_equal(got, brute_force_ranks(col))

    def test_monotone_transform_invariance_within_columns(self):
        rng = np.random.default_rng(11)
        w = rng.standard_normal((9, 4))
        transformed = np.column_stack([np.exp(w[:, j]) if j % 2 else w[:, j] ** 3
                                       for j in range(4)])
        assert friedman_statistic(w) == friedman_statistic(transformed)

    def test_degenerate_table_rejected(self):
        with pytest.raises(ValueError, match="degenerate"):
            rs_test(_table(np.zeros((1, 3))))


def test_pipeline_scale_invariance():
    grid = build_grid(512, 5)
    ts = default_tapers(grid.N, 5)
    x = simulate(model_catalog("b"), 512, seed=21)
    t1 = log_table(estimate_grid(x, grid, ts))
    t2 = log_table(estimate_grid(2.5 * x.values, grid, ts))
    p1, p2 = psr_test(t1), psr_test(t2)
    assert p1.S_T == pytest.approx(p2.S_T, rel=1e-9)
    assert p1.S_IR == pytest.approx(p2.S_IR, rel=1e-9)
    assert rs_test(t1).t_R == rs_test(t2).t_R


def test_rejection_monotone_in_alpha():
    rng = np.random.default_rng(13)
    w = rng.standard_normal((9, 4)) * 0.8
    table = _table(w, sigma2=0.2213229557371154)
    alphas = np.linspace(0.01, 0.6, 30)
    for test in (psr_test, rs_test):
        rejected = [test(table, float(a)).decision == "non-stationary" for a in alphas]
        # once rejected at a small alpha, stays rejected at larger alpha
        first = rejected.index(True) if True in rejected else len(rejected)
        assert all(rejected[first:])


class TestMcStudy:
    def test_single_replicate_rate_is_zero_or_one(self):
        summary = mc_study("a", M=1, T=512, seed=3)
        for rate in summary.empirical_rate.values():
            assert rate in (0.0, 1.0)

    def test_deterministic_given_seed(self):
        a = mc_study("a", M=10, T=512, seed=5)
        b = mc_study("a", M=10, T=512, seed=5)
        assert a.rejections == b.rejections

    def test_summary_structure(self):
        s = mc_study("d", M=20, T=512, seed=1)
        assert s.M == 20 and s.model == "d" and s.excluded == 0
        for key in ("psr", "rs"):
            lo, hi = s.interval95[key]
            assert 0.0 <= lo <= s.empirical_rate[key] <= hi <= 1.0

    def test_exclusions_abort_above_one_percent(self, monkeypatch):
        import evospec.stattest as st

        def boom(*args, **kwargs):
            raise ValueError("forced failure")

        monkeypatch.setattr(st, "estimate_grid", boom)
        with pytest.raises(RuntimeError, match="more than 1%"):
            mc_study("a", M=100, T=512, seed=0)

    def test_rejects_bad_m(self):
        with pytest.raises(ValueError, match="M must be >= 1"):
            mc_study("a", M=0, T=512)
