"""Ground truth by exhaustive enumeration of all 2**n outcome sequences.

This module is the referee for everything else, so it recomputes the
sequence probabilities, the maximal-run counting, and the window indicators
from first principles instead of importing the formula modules. Agreement
between a formula and this enumerator is then actual evidence, not a
tautology. Cost is Theta(2**n * n); requests beyond n = 20 are refused.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .dist import RunSpec
from .qcalculus import ModelParams

__all__ = ["EnumerationResult", "MAX_ENUMERATION_N", "enumerate_runs"]

MAX_ENUMERATION_N = 20


@dataclass(frozen=True)
class EnumerationResult:
    """Everything the enumeration can certify for one (spec, params) pair."""

    spec: RunSpec
    params: ModelParams
    pmf: tuple[float, ...]
    indicator_means: tuple[float, ...]  # start position j = 1..n-k+1, index j-1
    indicator_products: dict[tuple[int, int], float]  # keys (i, j) with i < j
    total_probability: float

    def mean(self) -> float:
        return math.fsum(x * p for x, p in enumerate(self.pmf))

    def variance(self) -> float:
        m = self.mean()
        return math.fsum((x - m) ** 2 * p for x, p in enumerate(self.pmf))


def enumerate_runs(spec: RunSpec, params: ModelParams) -> EnumerationResult:
    """Walk every 0/1 sequence of length n and accumulate exact quantities."""
    n, k = spec.n, spec.k
    if n > MAX_ENUMERATION_N:
        raise ValueError(
            f"enumeration over 2**{n} sequences refused; n must be <= {MAX_ENUMERATION_N}"
        )
    theta, q = params.theta, params.q
    succ = [theta * q**z for z in range(n + 1)]

    support = (n + 1) // (k + 1)
    pmf = [0.0] * (support + 1)
    n_windows = max(n - k + 1, 0)
    means = [0.0] * n_windows
    products = {
        (i, j): 0.0 for i in range(1, n_windows + 1) for j in range(i + 1, n_windows + 1)
    }
    total = 0.0

    for mask in range(1 << n):
        bits = [(mask >> t) & 1 for t in range(n)]

        prob = 1.0
        zeros = 0
        for b in bits:
            if b:
                prob *= succ[zeros]
            else:
                prob *= 1.0 - succ[zeros]
                zeros += 1

        # maximal-block run count: blocks of exactly k consecutive ones
        runs = 0
        length = 0
        for b in bits:
            if b:
                length += 1
            else:
                if length == k:
                    runs += 1
                length = 0
        if length == k:
            runs += 1

        # window indicators: ones on trials j..j+k-1, zeros (or an edge) around
        hits = []
        for j in range(1, n_windows + 1):
            if not all(bits[j - 1 : j - 1 + k]):
                continue
            if j > 1 and bits[j - 2]:
                continue
            if j + k - 1 < n and bits[j + k - 1]:
                continue
            hits.append(j)
        assert runs == len(hits), "internal run/indicator mismatch"

        pmf[runs] += prob
        total += prob
        for a, j1 in enumerate(hits):
            means[j1 - 1] += prob
            for j2 in hits[a + 1 :]:
                products[(j1, j2)] += prob

    return EnumerationResult(
        spec=spec,
        params=params,
        pmf=tuple(pmf),
        indicator_means=tuple(means),
        indicator_products=products,
        total_probability=total,
    )
