import numpy as np
import pytest
from scipy.stats import kstest, norm

from assocemp.diagnostics import exact_gaussian_copula
from assocemp.empirical import custom_grid, dyadic_grid, empirical_process_matrix
from assocemp.errors import NotPSDError, TruncationError, UnderpoweredError
from assocemp.limit import (
    LimitCovariance,
    energy_statistic,
    fdd_distance,
    limit_covariance_matrix,
    read_covariance_csv,
    sample_limit_process,
    truncation_tails,
    write_covariance_csv,
)
from assocemp.sequence_gen import build_gaussian_linear_model, sample_paths, uniform01, uniform_pair_covariance


class TestLimitCovariance:
    def test_iid_is_brownian_bridge(self, iid):
        g = dyadic_grid(4)
        cov = limit_covariance_matrix(iid, g)
        x = g.points
        np.testing.assert_array_equal(cov.matrix, np.minimum.outer(x, x) - np.outer(x, x))
        assert cov.matrix[8, 8] == 0.25

    def test_diagonal_series_oracle(self, power3):
        cov = limit_covariance_matrix(power3, custom_grid([0.5]), tail_tol=1e-6)
        rho = power3.rho(np.arange(1, power3.j_max + 1))
        full = 0.25 + 2 * np.sum(np.arcsin(rho) / (2 * np.pi))
        assert abs(cov.matrix[0, 0] - full) <= cov.tail_bound
        assert cov.tail_bound <= 1e-6

    def test_edges_zero_and_symmetric(self, power3):
        cov = limit_covariance_matrix(power3, dyadic_grid(3), tail_tol=1e-4)
        M = cov.matrix
        np.testing.assert_array_equal(M, M.T)
        assert np.all(M[0] == 0) and np.all(M[-1] == 0)
        assert np.all(np.diag(M) >= 0)

    def test_truncation_increment_bound(self, power3):
        g = custom_grid([0.2, 0.5, 0.7])
        K = 40
        a = limit_covariance_matrix(power3, g, K_max=K, tail_tol=1.0).matrix
        b = limit_covariance_matrix(power3, g, K_max=K + 1, tail_tol=1.0).matrix
        c = uniform_pair_covariance(power3.rho(K + 1))
        # both lags +-(K+1) enter, each bounded by 4 cov
        assert np.max(np.abs(b - a)) <= 8 * c

    def test_truncation_error(self, power3):
        with pytest.raises(TruncationError):
            limit_covariance_matrix(power3, custom_grid([0.5]), K_max=3, tail_tol=1e-6)

    def test_tails(self, power3):
        t = truncation_tails(power3)
        assert t[-1] == 0.0 and np.all(np.diff(t) <= 0)
        assert t[0] == pytest.approx(8 * np.sum(uniform_pair_covariance(power3.rho(np.arange(1, 4097)))))

    def test_matches_direct_sum(self, ar_half):
        x, y = 0.3, 0.8
        cov = limit_covariance_matrix(ar_half, custom_grid([x, y]), tail_tol=1e-12)
        direct = min(x, y) - x * y + 2 * sum(exact_gaussian_copula(x, y, 0.5**k) - x * y for k in range(1, 60))
        assert cov.matrix[0, 1] == pytest.approx(direct, abs=1e-12)


class TestSampler:
    def test_scalar(self, power3):
        cov = limit_covariance_matrix(power3, custom_grid([0.4]), tail_tol=1e-5)
        s = sample_limit_process(cov, 10**4, seed=1).values[:, 0]
        var = cov.matrix[0, 0]
        # SE of a normal sample variance
        assert abs(s.var(ddof=1) - var) < 3 * var * np.sqrt(2 / (10**4 - 1))

    def test_bridge_marginals(self, iid):
        g = dyadic_grid(6)
        s = sample_limit_process(limit_covariance_matrix(iid, g), 10**4, seed=2).values
        crit = 1.63 / np.sqrt(10**4)
        for j in range(1, 64, 7):
            x = g.points[j]
            assert kstest(s[:, j], norm(scale=np.sqrt(x * (1 - x))).cdf).statistic < crit

    def test_zero_matrix(self):
        cov = LimitCovariance(custom_grid([0.2, 0.4]), np.zeros((2, 2)), 0, 0.0)
        assert np.all(sample_limit_process(cov, 20, seed=0).values == 0.0)

    def test_empirical_covariance(self):
        rng = np.random.default_rng(0)
        A = rng.normal(size=(4, 4))
        S = A @ A.T
        R = 10**4
        draws = sample_limit_process(S, R, seed=3).values
        emp = np.cov(draws.T)
        se = np.sqrt((S**2 + np.outer(np.diag(S), np.diag(S))) / R)
        assert np.all(np.abs(emp - S) < 5 * se)

    def test_jitter_repair(self):
        v = np.array([1.0, 2.0, 3.0])
        S = np.outer(v, v) - 1e-13 * np.eye(3)
        ens = sample_limit_process(S, 10, seed=0)
        assert ens.jitter > 0

    def test_not_psd(self):
        with pytest.raises(NotPSDError):
            sample_limit_process(np.array([[1.0, 2.0], [2.0, 1.0]]), 10, seed=0)

    def test_deterministic(self, iid):
        cov = limit_covariance_matrix(iid, dyadic_grid(3))
        a = sample_limit_process(cov, 50, seed=9).values
        b = sample_limit_process(cov, 80, seed=9).values
        assert a.tobytes() == b[:50].tobytes()


class TestFdd:
    def test_energy_zero_for_identical(self):
        x = np.random.default_rng(0).normal(size=(30, 2))
        assert energy_statistic(x, x) == pytest.approx(0.0, abs=1e-12)

    def test_null_calibration(self):
        rejects = 0
        for seed in range(100):
            x = np.random.default_rng(seed).normal(size=(120, 3))
            rep = fdd_distance(x[:60], x[60:], permutations=99, seed=seed)
            rejects += rep.pvalue <= 0.05
        # binomial(100, 0.05): 99.9% upper quantile is 13
        assert rejects <= 13

    def test_power_against_shift(self):
        rng = np.random.default_rng(1)
        rep = fdd_distance(rng.normal(size=(500, 5)), rng.normal(0.5, 1, size=(500, 5)), permutations=199)
        assert rep.pvalue < 0.01
        assert rep.ks_max > 0.1

    def test_underpowered(self):
        with pytest.raises(UnderpoweredError):
            fdd_distance(np.zeros((20, 2)), np.zeros((80, 2)))

    def test_default_coordinates(self):
        x = np.random.default_rng(2).normal(size=(60, 17))
        rep = fdd_distance(x, x[::-1], permutations=19)
        assert len(rep.coordinates) == 5 and 0 not in rep.coordinates and 16 not in rep.coordinates

    def test_record(self):
        x = np.random.default_rng(3).normal(size=(60, 2))
        assert fdd_distance(x, x, permutations=9).to_record().startswith("check=fdd_distance pvalue=")

    def test_donsker_small(self, iid):
        g = custom_grid([0.1, 0.3, 0.5, 0.7, 0.9])
        G = empirical_process_matrix(sample_paths(iid, uniform01(), 1024, 300, seed=4), g)
        bridge = sample_limit_process(limit_covariance_matrix(iid, g), 300, seed=5).values
        assert fdd_distance(G, bridge, permutations=199, seed=6).pvalue > 0.01


def test_covariance_csv_roundtrip(tmp_path, power3):
    cov = limit_covariance_matrix(power3, custom_grid([0.25, 0.5, 0.75]), tail_tol=1e-4)
    path = tmp_path / "gamma.csv"
    write_covariance_csv(cov, path)
    pts, M = read_covariance_csv(path)
    np.testing.assert_array_equal(pts, cov.grid.points)
    np.testing.assert_array_equal(M, cov.matrix)
