"""Scikit-learn style front end for the likelihood machinery.

ExactRunMLE follows the density-estimator conventions (fit on observed
counts, score as mean log-likelihood, sample new counts) so it plugs into
sklearn tooling like clone and parameter search. The heavy lifting stays in
`infer`; this module is the adapter plus input validation.
"""

from __future__ import annotations

import numbers

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .dist import RunSpec, pmf_full
from .infer import Sample, fit_sample, log_likelihood
from .qcalculus import ModelParams
from .sim import SeededRng, sample_run_counts

__all__ = ["ExactRunMLE", "as_count_array"]


def as_count_array(X, spec: RunSpec) -> tuple[int, ...]:
    """Coerce X to a tuple of counts: 1-D or single-column, integral, in support.

    Raises ValueError on anything else; this is the shared input gate for
    the estimator API.
    """
    arr = np.asarray(X)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-D array of counts (or one column), got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError("empty sample")
    if not np.issubdtype(arr.dtype, np.number) or np.issubdtype(arr.dtype, np.complexfloating):
        raise ValueError(f"counts must be numeric, got dtype {arr.dtype}")
    rounded = np.rint(arr).astype(np.int64)
    if not np.all(rounded == arr):
        raise ValueError("counts must be integers")
    top = spec.support_max
    if rounded.min() < 0 or rounded.max() > top:
        raise ValueError(f"counts must lie in 0..{top} for n={spec.n}, k={spec.k}")
    return tuple(int(c) for c in rounded)


class ExactRunMLE(BaseEstimator):
    """Maximum-likelihood estimator of theta from exact-run counts.

    Parameters
    ----------
    n, k : sequence design (n trials, runs of length exactly k).
    q : known decay rate of the success probability, in (0, 1].
    alpha : miscoverage level of the likelihood-ratio interval.

    After fit: theta_, ci_lower_, ci_upper_, interval_, log_likelihood_,
    boundary_ (True when the MLE or an interval endpoint sits on the domain
    edge).
    """

    def __init__(self, n: int = 10, k: int = 2, q: float = 1.0, alpha: float = 0.05):
        self.n = n
        self.k = k
        self.q = q
        self.alpha = alpha

    def _spec(self) -> RunSpec:
        return RunSpec(self.n, self.k)

    def _as_sample(self, X) -> Sample:
        spec = self._spec()
        return Sample(spec=spec, q=self.q, counts=as_count_array(X, spec))

    def fit(self, X, y=None):
        """Fit theta by maximum likelihood; y is ignored (density estimator)."""
        if not isinstance(self.alpha, numbers.Real) or not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        sample = self._as_sample(X)
        res = fit_sample(sample, self.alpha)
        self.theta_ = res.theta_hat
        self.interval_ = res.interval
        self.ci_lower_ = res.interval.lower
        self.ci_upper_ = res.interval.upper
        self.log_likelihood_ = res.log_likelihood
        self.boundary_ = bool(
            res.mle_at_edge or res.interval.lower_at_edge or res.interval.upper_at_edge
        )
        self.n_features_in_ = 1
        return self

    def _check_fitted(self) -> None:
        if not hasattr(self, "theta_"):
            raise NotFittedError("this ExactRunMLE instance is not fitted yet; call fit first")

    def score(self, X, y=None) -> float:
        """Mean log-likelihood of X under the fitted theta."""
        self._check_fitted()
        sample = self._as_sample(X)
        return log_likelihood(self.theta_, sample) / len(sample.counts)

    def run_pmf(self):
        """Fitted pmf over the support, as a plain list."""
        self._check_fitted()
        return list(pmf_full(self._spec(), ModelParams(self.theta_, self.q)).probs)

    def sample(self, n_samples: int = 1, random_state: int = 0) -> np.ndarray:
        """Draw run counts from the fitted model (deterministic per random_state)."""
        self._check_fitted()
        rng = SeededRng(int(random_state))
        return sample_run_counts(
            n_samples, self._spec(), ModelParams(self.theta_, self.q), rng
        )
