import math

import pytest
import scipy.stats

from qruns.dist import RunSpec, pmf_full
from qruns.infer import (
    THETA_DOMAIN,
    ConfidenceInterval,
    Sample,
    chi2_quantile_1df,
    fit_sample,
    log_likelihood,
    mle,
    lr_interval,
    read_sample_file,
    write_sample_file,
)
from qruns.qcalculus import ModelParams
from qruns.sim import SeededRng, sample_run_counts


def make_sample(n, k, q, theta0, size, seed=11):
    spec = RunSpec(n, k)
    counts = sample_run_counts(size, spec, ModelParams(theta0, q), SeededRng(seed))
    return Sample(spec, q, tuple(int(c) for c in counts))


class TestSample:
    def test_valid(self):
        s = Sample(RunSpec(7, 2), 0.8, (0, 1, 2, 1, 0))
        assert s.grouped() == {0: 2, 1: 2, 2: 1}

    def test_rejects_out_of_support(self):
        with pytest.raises(ValueError):
            Sample(RunSpec(7, 2), 0.8, (3,))  # support_max is 2
        with pytest.raises(ValueError):
            Sample(RunSpec(7, 2), 0.8, (-1,))
        with pytest.raises(ValueError):
            Sample(RunSpec(7, 2), 0.8, (0.5,))

    def test_rejects_bad_q(self):
        with pytest.raises(ValueError):
            Sample(RunSpec(7, 2), 0.0, (0,))
        with pytest.raises(ValueError):
            Sample(RunSpec(7, 2), 1.5, (0,))


class TestLogLikelihood:
    def test_matches_direct_sum(self):
        s = Sample(RunSpec(9, 2), 0.7, (0, 1, 1, 2, 0, 0, 1))
        for theta in (0.2, 0.5, 0.9):
            vec = pmf_full(RunSpec(9, 2), ModelParams(theta, 0.7)).probs
            direct = math.fsum(math.log(vec[c]) for c in s.counts)
            assert log_likelihood(theta, s) == pytest.approx(direct, abs=1e-12)

    def test_impossible_outcome_gives_neg_inf(self):
        # theta=0 makes any nonzero count impossible; domain floor is near it
        s = Sample(RunSpec(6, 2), 0.9, (1,))
        lo = THETA_DOMAIN[0]
        assert log_likelihood(lo, s) < -30

    def test_continuity(self):
        s = make_sample(10, 2, 0.8, 0.55, 30)
        h = 1e-7
        at = 0.5
        left = log_likelihood(at - h, s)
        mid = log_likelihood(at, s)
        right = log_likelihood(at + h, s)
        assert abs(left - mid) < 1e-4 and abs(right - mid) < 1e-4


class TestChi2Quantile:
    def test_reference_value(self):
        assert chi2_quantile_1df(0.95) == pytest.approx(3.841458820694124, abs=1e-3)

    @pytest.mark.parametrize("p", [0.80, 0.90, 0.95, 0.99])
    def test_matches_scipy(self, p):
        assert chi2_quantile_1df(p) == pytest.approx(
            scipy.stats.chi2.ppf(p, df=1), abs=1e-8
        )

    def test_rejects_bad_level(self):
        with pytest.raises(ValueError):
            chi2_quantile_1df(0.0)
        with pytest.raises(ValueError):
            chi2_quantile_1df(1.0)


class TestMle:
    def test_matches_dense_grid(self):
        s = make_sample(12, 2, 0.8, 0.6, 200, seed=5)
        theta_hat = mle(s)
        grid = [i / 2000 for i in range(1, 2000)]
        best = max(grid, key=lambda t: log_likelihood(t, s))
        assert abs(theta_hat - best) < 1e-3
        assert log_likelihood(theta_hat, s) >= log_likelihood(best, s) - 1e-9

    def test_all_zero_sample_hits_lower_edge(self):
        s = Sample(RunSpec(8, 3), 0.9, (0,) * 50)
        res = fit_sample(s)
        assert res.mle_at_edge
        assert res.theta_hat == pytest.approx(THETA_DOMAIN[0], abs=1e-12)

    def test_saturated_sample_hits_upper_edge(self):
        # counts forced to 1 by an all-success sequence of length n=k
        s = Sample(RunSpec(3, 3), 0.9, (1,) * 40)
        res = fit_sample(s)
        assert res.mle_at_edge
        assert res.theta_hat == pytest.approx(THETA_DOMAIN[1], abs=1e-12)

    def test_interior_fit_not_flagged(self):
        s = make_sample(15, 3, 0.8, 0.5, 100, seed=7)
        res = fit_sample(s)
        assert not res.mle_at_edge
        assert 0.3 < res.theta_hat < 0.7

    def test_high_theta_mode_can_win(self):
        # the count of exact-k runs is not monotone in theta, so a sample
        # dominated by zeros may be best explained by long runs; the fitter
        # must find that global mode, not stall on the low-theta one
        s = make_sample(10, 2, 0.8, 0.5, 100, seed=7)
        res = fit_sample(s)
        assert not res.mle_at_edge
        grid_best = max(
            (i / 2000 for i in range(1, 2000)), key=lambda t: log_likelihood(t, s)
        )
        assert abs(res.theta_hat - grid_best) < 1e-3


class TestInterval:
    def test_mle_inside_and_nesting(self):
        s = make_sample(11, 3, 0.6, 0.45, 80, seed=13)
        theta_hat = mle(s)
        i90 = lr_interval(s, alpha=0.10, theta_hat=theta_hat)
        i95 = lr_interval(s, alpha=0.05, theta_hat=theta_hat)
        i99 = lr_interval(s, alpha=0.01, theta_hat=theta_hat)
        for ci in (i90, i95, i99):
            assert ci.covers(theta_hat)
        assert i99.lower <= i95.lower <= i90.lower
        assert i90.upper <= i95.upper <= i99.upper

    def test_endpoints_solve_deficit(self):
        s = make_sample(10, 2, 0.8, 0.5, 60, seed=3)
        theta_hat = mle(s)
        peak = log_likelihood(theta_hat, s)
        crit = chi2_quantile_1df(0.95)
        ci = lr_interval(s, alpha=0.05, theta_hat=theta_hat)
        for edge in (ci.lower, ci.upper):
            deficit = 2.0 * (peak - log_likelihood(edge, s))
            assert deficit == pytest.approx(crit, abs=1e-4)

    def test_boundary_flag_on_one_sided_case(self):
        s = Sample(RunSpec(8, 3), 0.9, (0,) * 50)
        res = fit_sample(s)
        assert res.interval.lower_at_edge
        assert res.interval.lower == pytest.approx(THETA_DOMAIN[0], abs=1e-12)

    def test_width_shrinks_with_more_data(self):
        small = make_sample(12, 2, 0.8, 0.5, 40, seed=21)
        spec = small.spec
        big_counts = sample_run_counts(
            400, spec, ModelParams(0.5, 0.8), SeededRng(21)
        )
        big = Sample(spec, 0.8, tuple(int(c) for c in big_counts))
        wide = fit_sample(small).interval.width
        narrow = fit_sample(big).interval.width
        assert narrow < wide

    def test_rejects_bad_alpha(self):
        s = make_sample(8, 2, 0.9, 0.5, 10)
        with pytest.raises(ValueError):
            lr_interval(s, alpha=0.0)
        with pytest.raises(ValueError):
            lr_interval(s, alpha=1.0)


class TestEstimatorQuality:
    # consistency check in a well-identified design. k=2 keeps the support
    # populated; k=3 designs concentrate counts on {0, 1} where a far-theta
    # rival pmf sits within ~0.003 nats and rare mode flips keep signed bias
    # and even rmse from falling monotonically at these N.
    @pytest.mark.parametrize("theta0", [0.3, 0.5, 0.7])
    def test_rmse_falls_with_sample_size(self, theta0):
        spec = RunSpec(15, 2)
        params = ModelParams(theta0, 0.8)
        m = 200

        def rmse(size):
            sq = []
            for rep in range(m):
                counts = sample_run_counts(
                    size, spec, params, SeededRng(909, (int(theta0 * 100), rep))
                )
                s = Sample(spec, 0.8, tuple(int(c) for c in counts))
                sq.append((mle(s) - theta0) ** 2)
            return math.sqrt(math.fsum(sq) / m)

        assert rmse(1000) < rmse(100)


class TestFileIO:
    def test_round_trip(self, tmp_path):
        s = Sample(RunSpec(9, 2), 0.75, (0, 1, 2, 0, 1, 1))
        p = tmp_path / "sample.txt"
        write_sample_file(p, s)
        back = read_sample_file(p)
        assert back == s

    def test_malformed_header(self, tmp_path):
        p = tmp_path / "bad.txt"
        p.write_text("9 2\n0\n1\n")
        with pytest.raises(ValueError):
            read_sample_file(p)

    def test_malformed_count(self, tmp_path):
        p = tmp_path / "bad.txt"
        p.write_text("9 2 0.75\n0\nzebra\n")
        with pytest.raises(ValueError):
            read_sample_file(p)

    def test_blank_lines_ignored(self, tmp_path):
        p = tmp_path / "sparse.txt"
        p.write_text("9 2 0.75\n\n1\n\n0\n\n")
        s = read_sample_file(p)
        assert s.counts == (1, 0)

    def test_empty_counts_rejected(self, tmp_path):
        p = tmp_path / "empty.txt"
        p.write_text("9 2 0.75\n")
        with pytest.raises(ValueError):
            read_sample_file(p)


def test_confidence_interval_helpers():
    ci = ConfidenceInterval(0.2, 0.6, 0.95, lower_at_edge=True)
    assert ci.boundary_flags == (True, False)
    assert ci.width == pytest.approx(0.4)
    assert ci.covers(0.2) and ci.covers(0.6) and not ci.covers(0.61)
