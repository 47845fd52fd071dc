"""Distribution of the number of success runs of length exactly k.

A run counts only if it is maximal: a block of exactly k consecutive
successes fenced by failures (or by the sequence ends). Three independent
computations of the pmf live here:

  * pmf_exact      - sum over failure counts of the q-weighted composition kernel
  * pmf_recursive  - recursion on n conditioning on the first failure position
  * pmf_corollary  - short recursion mixing shifted (theta, theta*q) subproblems

plus the classical q = 1 closed form. They share no code beyond the basic
q-series helpers, which is what makes their agreement a meaningful check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .compositions import CompositionWeights, composition_count
from .qcalculus import ModelParams

__all__ = [
    "ExactPmfTable",
    "NormalizationError",
    "Pmf",
    "RunSpec",
    "pmf_classical",
    "pmf_corollary",
    "pmf_exact",
    "pmf_full",
    "pmf_recursive",
    "support_max",
    "survival",
]


@dataclass(frozen=True)
class RunSpec:
    """Trial count n and run length k."""

    n: int
    k: int

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or isinstance(self.n, bool) or self.n < 0:
            raise ValueError(f"n must be a nonnegative integer, got {self.n!r}")
        if not isinstance(self.k, int) or isinstance(self.k, bool) or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k!r}")

    @property
    def support_max(self) -> int:
        # k-run plus its fencing failure need k+1 slots; the final run can
        # lean on the sequence end, hence the +1 in the numerator
        return (self.n + 1) // (self.k + 1)


def support_max(n: int, k: int) -> int:
    """Largest possible count of exact k-runs in n trials."""
    return RunSpec(n, k).support_max


class NormalizationError(ArithmeticError):
    """A computed pmf failed its sanity checks (mass not 1, or a negative entry)."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class Pmf:
    """Full probability vector over the support 0..support_max."""

    spec: RunSpec
    params: ModelParams
    method: str
    probs: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.probs)

    def prob(self, x: int) -> float:
        if 0 <= x < len(self.probs):
            return self.probs[x]
        return 0.0

    def cdf(self, x: int) -> float:
        if x < 0:
            return 0.0
        return min(math.fsum(self.probs[: x + 1]), 1.0)

    def survival(self, x: int) -> float:
        """P(count >= x)."""
        if x <= 0:
            return 1.0
        if x >= len(self.probs):
            return 0.0
        return math.fsum(self.probs[x:])

    def mean(self) -> float:
        return math.fsum(x * p for x, p in enumerate(self.probs))

    def variance(self) -> float:
        m = self.mean()
        return math.fsum((x - m) ** 2 * p for x, p in enumerate(self.probs))


# ---------------------------------------------------------------------------
# exact scheme: composition kernel summed over the number of failures


def _exact_prob(spec: RunSpec, params: ModelParams, x: int, weights: CompositionWeights) -> float:
    # P(X = x) = sum_i theta**(n-i) * prod_{j<i}(1 - theta q**j) * W(i+1, n-i, x)
    # where i is the number of failures; i = 0 is the all-success sequence
    n = spec.n
    theta, q = params.theta, params.q
    terms = []
    prefix = 1.0  # prod_{j=1}^{i} (1 - theta * q**(j-1)), built incrementally
    for i in range(n - x * spec.k + 1):
        if i > 0:
            prefix *= 1.0 - theta * q ** (i - 1)
        w = weights.value(i + 1, n - i, x)
        if w != 0.0:
            terms.append(theta ** (n - i) * prefix * w)
    return math.fsum(terms)


def pmf_exact(spec: RunSpec, params: ModelParams, x: int) -> float:
    """Exact-run pmf at x via the composition-kernel sum."""
    if x < 0 or x > spec.support_max:
        return 0.0
    return _exact_prob(spec, params, x, CompositionWeights(spec.k, params.q))


class ExactPmfTable:
    """Reusable exact-pmf evaluator for fixed (n, k, q).

    The composition kernel does not involve theta, so the expensive part is
    shared across every theta a caller probes. One table makes a dense
    likelihood grid or an optimizer loop cost O(n * support) per theta.
    """

    def __init__(self, spec: RunSpec, q: float):
        self.spec = spec
        self.q = float(q)
        weights = CompositionWeights(spec.k, q)
        self._weights = [
            [weights.value(i + 1, spec.n - i, x) for i in range(spec.n - x * spec.k + 1)]
            for x in range(spec.support_max + 1)
        ]

    def vector(self, theta: float) -> list[float]:
        """Pmf over the full support at this theta (same arithmetic as pmf_exact)."""
        n, q = self.spec.n, self.q
        prefix = [1.0] * (n + 1)
        acc = 1.0
        for i in range(1, n + 1):
            acc *= 1.0 - theta * q ** (i - 1)
            prefix[i] = acc
        out = []
        for row in self._weights:
            terms = [
                theta ** (n - i) * prefix[i] * w
                for i, w in enumerate(row)
                if w != 0.0
            ]
            out.append(math.fsum(terms))
        return out


# ---------------------------------------------------------------------------
# recursive scheme: condition on the position of the first failure


def _recursive_pmf_fn(spec: RunSpec, params: ModelParams):
    k = spec.k
    theta0, q = params.theta, params.q
    memo: dict[tuple[int, int, int], float] = {}

    def f(x: int, n: int, m: int) -> float:
        # m = failures consumed so far; the active success rate is theta0*q**m
        if x < 0 or n < 0:
            return 0.0
        if n < k:
            return 1.0 if x == 0 else 0.0
        if x > (n + 1) // (k + 1):
            return 0.0
        if q == 1.0:
            m = 0
        key = (x, n, m)
        hit = memo.get(key)
        if hit is not None:
            return hit
        th = theta0 * q**m
        fail = 1.0 - th
        total = 0.0
        tp = 1.0  # th**(i-1)
        for i in range(1, n + 1):
            # first failure at trial i: i-1 leading successes; a leading block
            # of exactly k (i = k+1) completes a run and is handled separately
            if i != k + 1:
                total += tp * fail * f(x, n - i, m + 1)
            tp *= th
        total += th**k * fail * f(x - 1, n - k - 1, m + 1)
        if x == 1 and n == k:
            total += th**k
        if x == 0 and n > k:
            total += th**n
        memo[key] = total
        return total

    return f


def pmf_recursive(spec: RunSpec, params: ModelParams, x: int) -> float:
    """Exact-run pmf at x via the first-failure recursion."""
    return _recursive_pmf_fn(spec, params)(x, spec.n, 0)


# ---------------------------------------------------------------------------
# corollary scheme: short recursion with explicit small-n anchors


def _corollary_pmf_fn(spec: RunSpec, params: ModelParams):
    k = spec.k
    theta0, q = params.theta, params.q
    qk = q**k  # the anchor factor (1 + q**k) always uses the undecayed q
    memo: dict[tuple[int, int, int], float] = {}

    def f(x: int, n: int, m: int) -> float:
        if x < 0 or n < 0:
            return 0.0
        if n < k:
            return 1.0 if x == 0 else 0.0
        if x > (n + 1) // (k + 1):
            return 0.0
        if q == 1.0:
            m = 0
        th = theta0 * q**m
        if n == k:
            return th**k if x == 1 else 1.0 - th**k
        if n == k + 1:
            w = th**k * (1.0 - th) * (1.0 + qk)
            return w if x == 1 else 1.0 - w
        key = (x, n, m)
        hit = memo.get(key)
        if hit is not None:
            return hit
        thk = th**k
        total = th * f(x, n - 1, m) + (1.0 - th) * (
            f(x, n - 1, m + 1)
            + thk * (f(x - 1, n - k - 1, m + 1) - f(x, n - k - 1, m + 1))
            + th * thk * (f(x, n - k - 2, m + 1) - f(x - 1, n - k - 2, m + 1))
        )
        memo[key] = total
        return total

    return f


def pmf_corollary(spec: RunSpec, params: ModelParams, x: int) -> float:
    """Exact-run pmf at x via the anchored short recursion."""
    return _corollary_pmf_fn(spec, params)(x, spec.n, 0)


# ---------------------------------------------------------------------------
# classical limit


def pmf_classical(spec: RunSpec, theta: float, x: int) -> float:
    """q = 1 pmf in closed form: plain composition counts, Bernoulli trials."""
    if math.isnan(theta) or not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta must lie in [0, 1], got {theta!r}")
    if x < 0 or x > spec.support_max:
        return 0.0
    n, k = spec.n, spec.k
    terms = []
    for i in range(n - x * k + 1):
        c = composition_count(i + 1, n - i, x, k)
        if c:
            terms.append(theta ** (n - i) * (1.0 - theta) ** i * c)
    return math.fsum(terms)


# ---------------------------------------------------------------------------
# full-vector API


_TOL_NEGATIVE = 1e-12
_TOL_MASS = 1e-6


def pmf_full(spec: RunSpec, params: ModelParams, method: str = "exact") -> Pmf:
    """Whole pmf over 0..support_max, checked for mass 1 and nonnegativity.

    Raises NormalizationError when the vector misses unit mass by more than
    1e-6 or dips below -1e-12; tiny negative roundoff is clamped to 0.
    """
    if method == "exact":
        table = ExactPmfTable(spec, params.q)
        raw = table.vector(params.theta)
    elif method == "recursive":
        f = _recursive_pmf_fn(spec, params)
        raw = [f(x, spec.n, 0) for x in range(spec.support_max + 1)]
    elif method == "corollary":
        f = _corollary_pmf_fn(spec, params)
        raw = [f(x, spec.n, 0) for x in range(spec.support_max + 1)]
    elif method == "classical":
        if params.q != 1.0:
            raise ValueError("classical method requires q = 1")
        raw = [pmf_classical(spec, params.theta, x) for x in range(spec.support_max + 1)]
    else:
        raise ValueError(f"unknown method {method!r}")

    probs = []
    for x, p in enumerate(raw):
        if p < -_TOL_NEGATIVE:
            raise NormalizationError(
                f"negative probability {p!r} at x={x} (method={method})", residual=p
            )
        probs.append(max(p, 0.0))
    residual = math.fsum(probs) - 1.0
    if abs(residual) > _TOL_MASS:
        raise NormalizationError(
            f"pmf mass off by {residual!r} (method={method}, n={spec.n}, k={spec.k})",
            residual=residual,
        )
    return Pmf(spec=spec, params=params, method=method, probs=tuple(probs))


def survival(spec: RunSpec, params: ModelParams, x: int) -> float:
    """P(count >= x) from the exact pmf; 1 for x <= 0, 0 beyond the support."""
    return pmf_full(spec, params, "exact").survival(x)
