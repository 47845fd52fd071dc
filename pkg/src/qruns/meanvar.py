"""Closed-form mean and variance via window indicators.

Window j (1 <= j <= n-k+1) covers trials j..j+k-1; its indicator fires when
those k trials succeed and both neighbors fail (sequence edges count as
failures). The run count is the sum of the indicators, so the mean is the
sum of indicator means and the second moment needs the pairwise products,
which vanish unless the windows are separated by at least one failure slot
(j - i >= k+1).

Every value here is an explicit finite sum over the failure counts adjacent
to the windows, weighted by success-count probabilities of the surrounding
stretches. No recursion is involved, which makes this module an independent
route to the low moments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .dist import RunSpec
from .qcalculus import ModelParams, q_binomial_pmf

__all__ = [
    "IndicatorTable",
    "indicator_mean",
    "indicator_product_mean",
    "indicator_table",
    "mean_closed",
    "variance_closed",
]


def _check_window(j: int, spec: RunSpec) -> None:
    last = spec.n - spec.k + 1
    if last < 1:
        raise ValueError(f"no length-{spec.k} window fits in {spec.n} trials")
    if not 1 <= j <= last:
        raise ValueError(f"window start must lie in 1..{last}, got {j}")


def indicator_mean(j: int, spec: RunSpec, params: ModelParams) -> float:
    """P(window j holds a maximal k-run)."""
    _check_window(j, spec)
    n, k = spec.n, spec.k
    theta, q = params.theta, params.q
    if n == k:
        # the window is the whole sequence; both fences are edges
        return theta**k
    if j == 1:
        return theta**k * (1.0 - theta)
    if j == n - k + 1:
        # i failures precede the run; the trailing edge needs no failure
        terms = [
            q ** (i * k)
            * (1.0 - theta * q ** (i - 1))
            * q_binomial_pmf(n - k - i, n - k - 1, params)
            for i in range(1, n - k + 1)
        ]
        return theta**k * math.fsum(terms)
    # interior window: i-1 failures among the first j-2 trials, a failure at
    # trial j-1, the run, then the closing failure at trial j+k
    terms = [
        q ** ((i - 1) * k)
        * (1.0 - theta * q ** (i - 2))
        * (1.0 - theta * q ** (i - 1))
        * q_binomial_pmf(j - i, j - 2, params)
        for i in range(2, j + 1)
    ]
    return theta**k * math.fsum(terms)


def indicator_product_mean(i: int, j: int, spec: RunSpec, params: ModelParams) -> float:
    """P(windows i and j both hold maximal k-runs), for i < j.

    Zero when the windows overlap or touch (j - i <= k). Otherwise a sum
    over alpha (total failures up to the end of window i, forced >= 1 unless
    i = 1) and beta (same through window j), with the stretch between the
    two runs contributing a success-count probability at the decayed rate.
    """
    n, k = spec.n, spec.k
    last = n - k + 1
    _check_window(i, spec)
    _check_window(j, spec)
    if not i < j:
        raise ValueError(f"need i < j, got i={i}, j={j}")
    if j - i <= k:
        return 0.0
    theta, q = params.theta, params.q
    trailing = j == last  # no trial exists after the second run
    terms = []
    alphas = (1,) if i == 1 else range(2, i + 1)
    for a in alphas:
        if i == 1:
            lead = 1.0
        else:
            lead = (1.0 - theta * q ** (a - 2)) * q_binomial_pmf(i - a, i - 2, params)
        w1 = lead * (theta * q ** (a - 1)) ** k * (1.0 - theta * q ** (a - 1))
        if w1 == 0.0:
            continue
        if j == i + k + 1:
            # runs separated by the single shared fencing failure
            closing = 1.0 if trailing else 1.0 - theta * q**a
            terms.append(w1 * (theta * q**a) ** k * closing)
            continue
        stretch = j - 2 - i - k  # trials strictly between the two fences
        decayed = params.decayed(a)
        for b in range(a + 2, a + j - i - k + 1):
            mid = q_binomial_pmf(j - i - k - b + a, stretch, decayed)
            closing = 1.0 if trailing else 1.0 - theta * q ** (b - 1)
            terms.append(
                w1
                * mid
                * (1.0 - theta * q ** (b - 2))
                * (theta * q ** (b - 1)) ** k
                * closing
            )
    return math.fsum(terms)


@dataclass(frozen=True)
class IndicatorTable:
    """All indicator means and pairwise product means for one model."""

    spec: RunSpec
    params: ModelParams
    means: tuple[float, ...]  # window j at index j-1
    products: dict[tuple[int, int], float]  # (i, j) with j - i >= k+1


def indicator_table(spec: RunSpec, params: ModelParams) -> IndicatorTable:
    last = spec.n - spec.k + 1
    means = tuple(indicator_mean(j, spec, params) for j in range(1, last + 1))
    products = {
        (i, j): indicator_product_mean(i, j, spec, params)
        for i in range(1, last + 1)
        for j in range(i + spec.k + 1, last + 1)
    }
    return IndicatorTable(spec=spec, params=params, means=means, products=products)


def mean_closed(spec: RunSpec, params: ModelParams) -> float:
    """E[run count] as the sum of window indicator means; 0 when n < k."""
    if spec.n < spec.k:
        return 0.0
    last = spec.n - spec.k + 1
    return math.fsum(indicator_mean(j, spec, params) for j in range(1, last + 1))


def variance_closed(spec: RunSpec, params: ModelParams) -> float:
    """Var[run count] from the indicator table; 0 when n < k."""
    if spec.n < spec.k:
        return 0.0
    table = indicator_table(spec, params)
    mean = math.fsum(table.means)
    second = math.fsum(table.means) + 2.0 * math.fsum(table.products.values())
    return second - mean * mean
