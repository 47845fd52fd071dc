import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from qruns.dist import RunSpec
from qruns.estimator import ExactRunMLE, as_count_array
from qruns.infer import Sample, fit_sample
from qruns.qcalculus import ModelParams
from qruns.sim import SeededRng, sample_run_counts


def draw_counts(n=12, k=2, q=0.8, theta=0.55, size=80, seed=19):
    spec = RunSpec(n, k)
    return sample_run_counts(size, spec, ModelParams(theta, q), SeededRng(seed))


class TestAsCountArray:
    SPEC = RunSpec(9, 2)  # support 0..3

    def test_accepts_list_and_column(self):
        assert as_count_array([0, 1, 2], self.SPEC) == (0, 1, 2)
        col = np.array([[1], [0], [3]])
        assert as_count_array(col, self.SPEC) == (1, 0, 3)

    def test_accepts_integral_floats(self):
        assert as_count_array(np.array([1.0, 2.0]), self.SPEC) == (1, 2)

    def test_rejects_fractional(self):
        with pytest.raises(ValueError):
            as_count_array([0.5], self.SPEC)

    def test_rejects_out_of_support(self):
        with pytest.raises(ValueError):
            as_count_array([4], self.SPEC)
        with pytest.raises(ValueError):
            as_count_array([-1], self.SPEC)

    def test_rejects_shapes(self):
        with pytest.raises(ValueError):
            as_count_array(np.zeros((2, 2)), self.SPEC)
        with pytest.raises(ValueError):
            as_count_array([], self.SPEC)

    def test_rejects_non_numeric(self):
        with pytest.raises(ValueError):
            as_count_array(["a", "b"], self.SPEC)


class TestEstimator:
    def test_get_params_round_trip(self):
        est = ExactRunMLE(n=15, k=3, q=0.7, alpha=0.1)
        params = est.get_params()
        assert params == {"n": 15, "k": 3, "q": 0.7, "alpha": 0.1}
        twin = ExactRunMLE().set_params(**params)
        assert twin.get_params() == params

    def test_clone_keeps_params_drops_state(self):
        est = ExactRunMLE(n=12, k=2, q=0.8)
        est.fit(draw_counts())
        fresh = clone(est)
        assert fresh.get_params() == est.get_params()
        assert not hasattr(fresh, "theta_")

    def test_fit_attributes_match_fit_sample(self):
        counts = draw_counts()
        est = ExactRunMLE(n=12, k=2, q=0.8, alpha=0.05).fit(counts)
        ref = fit_sample(
            Sample(RunSpec(12, 2), 0.8, tuple(int(c) for c in counts)), 0.05
        )
        assert est.theta_ == ref.theta_hat
        assert est.ci_lower_ == ref.interval.lower
        assert est.ci_upper_ == ref.interval.upper
        assert est.log_likelihood_ == ref.log_likelihood
        assert est.interval_ == ref.interval
        assert est.n_features_in_ == 1
        assert isinstance(est.boundary_, bool)

    def test_fit_accepts_column_vector(self):
        counts = draw_counts().reshape(-1, 1)
        est = ExactRunMLE(n=12, k=2, q=0.8).fit(counts)
        assert 0.0 < est.theta_ < 1.0

    def test_score_is_mean_loglik(self):
        counts = draw_counts()
        est = ExactRunMLE(n=12, k=2, q=0.8).fit(counts)
        assert est.score(counts) == pytest.approx(
            est.log_likelihood_ / len(counts), abs=1e-12
        )

    def test_run_pmf_normalized(self):
        est = ExactRunMLE(n=12, k=2, q=0.8).fit(draw_counts())
        vec = est.run_pmf()
        assert len(vec) == RunSpec(12, 2).support_max + 1
        assert sum(vec) == pytest.approx(1.0, abs=1e-9)

    def test_sample_deterministic(self):
        est = ExactRunMLE(n=12, k=2, q=0.8).fit(draw_counts())
        a = est.sample(25, random_state=4)
        b = est.sample(25, random_state=4)
        c = est.sample(25, random_state=5)
        assert (a == b).all()
        assert a.shape == (25,)
        assert not (a == c).all()

    def test_unfitted_raises(self):
        est = ExactRunMLE()
        for call in (
            lambda: est.score([0, 1]),
            lambda: est.run_pmf(),
            lambda: est.sample(3),
        ):
            with pytest.raises(NotFittedError):
                call()

    def test_bad_alpha_rejected_at_fit(self):
        with pytest.raises(ValueError):
            ExactRunMLE(n=9, k=2, alpha=1.5).fit([0, 1])

    def test_bad_counts_rejected_at_fit(self):
        with pytest.raises(ValueError):
            ExactRunMLE(n=9, k=2, q=0.8).fit([99])

    def test_boundary_flag_on_degenerate_sample(self):
        est = ExactRunMLE(n=8, k=3, q=0.9).fit([0] * 40)
        assert est.boundary_

    def test_recovers_in_easy_setting(self):
        counts = draw_counts(n=15, k=3, q=0.8, theta=0.5, size=400, seed=31)
        est = ExactRunMLE(n=15, k=3, q=0.8).fit(counts)
        assert abs(est.theta_ - 0.5) < 0.1
