"""Exact-length success runs under geometrically decaying success probability.

The model: trial j succeeds with probability theta * q**z where z is the
number of failures seen so far (q = 1 recovers i.i.d. Bernoulli trials).
The quantity of interest is the number of maximal success runs of length
exactly k among n trials. This package computes its distribution three
independent ways, its moments, closed-form mean and variance, simulates it,
fits theta by maximum likelihood, and cross-checks everything against a
brute-force enumeration oracle.
"""

__version__ = "0.1.0"

from .dist import (
    ExactPmfTable,
    NormalizationError,
    Pmf,
    RunSpec,
    pmf_classical,
    pmf_corollary,
    pmf_exact,
    pmf_full,
    pmf_recursive,
    survival,
)
from .estimator import ExactRunMLE
from .infer import ConfidenceInterval, FitResult, Sample, fit_sample, log_likelihood, lr_interval, mle
from .meanvar import indicator_mean, indicator_product_mean, mean_closed, variance_closed
from .moments import (
    MomentSet,
    central_moments_and_shape,
    factorial_moments,
    mgf,
    pgf,
    pmf_from_binomial_moments,
    raw_moments,
    survival_from_binomial_moments,
)
from .oracle import EnumerationResult, enumerate_runs
from .qcalculus import ModelParams, q_binomial_coefficient, q_binomial_pmf, q_number, q_shifted_factorial
from .sim import SeededRng, count_exact_runs, generate_sequence, generate_sequences, sample_run_counts

__all__ = [
    "ConfidenceInterval",
    "EnumerationResult",
    "ExactPmfTable",
    "ExactRunMLE",
    "FitResult",
    "ModelParams",
    "MomentSet",
    "NormalizationError",
    "Pmf",
    "RunSpec",
    "Sample",
    "SeededRng",
    "central_moments_and_shape",
    "count_exact_runs",
    "enumerate_runs",
    "factorial_moments",
    "fit_sample",
    "generate_sequence",
    "generate_sequences",
    "indicator_mean",
    "indicator_product_mean",
    "log_likelihood",
    "lr_interval",
    "mean_closed",
    "mgf",
    "mle",
    "pgf",
    "pmf_classical",
    "pmf_corollary",
    "pmf_exact",
    "pmf_from_binomial_moments",
    "pmf_full",
    "pmf_recursive",
    "q_binomial_coefficient",
    "q_binomial_pmf",
    "q_number",
    "q_shifted_factorial",
    "raw_moments",
    "sample_run_counts",
    "survival",
    "survival_from_binomial_moments",
    "variance_closed",
]
