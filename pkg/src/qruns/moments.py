"""Generating functions and moments of the exact-run count.

The pgf, factorial moments, and raw moments each satisfy a recursion in n
that mixes the current parameters with their failure-decayed version
(theta -> theta*q). Central moments and the shape factors come from the raw
moments, and two inversion formulas recover the pmf and the survival
function from the factorial (binomial) moments, giving yet another route to
the distribution that crosses-checks the direct schemes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .dist import RunSpec
from .qcalculus import ModelParams

__all__ = [
    "MomentSet",
    "central_moments_and_shape",
    "factorial_moments",
    "mgf",
    "pgf",
    "pmf_from_binomial_moments",
    "raw_moments",
    "survival_from_binomial_moments",
]

_DEGENERATE_VARIANCE = 1e-12


def _gf_value(t: float, spec: RunSpec, params: ModelParams) -> float:
    """E[t**X] by the anchored recursion on n (shared by pgf and mgf)."""
    k = spec.k
    theta0, q = params.theta, params.q
    qk = q**k  # anchors always use the undecayed q here
    memo: dict[tuple[int, int], float] = {}

    def phi(n: int, m: int) -> float:
        if n < k:
            return 1.0
        if q == 1.0:
            m = 0
        th = theta0 * q**m
        if n == k:
            return 1.0 + th**k * (t - 1.0)
        if n == k + 1:
            return 1.0 + th**k * (1.0 - th) * (1.0 + qk) * (t - 1.0)
        key = (n, m)
        hit = memo.get(key)
        if hit is not None:
            return hit
        val = th * phi(n - 1, m) + (1.0 - th) * (
            phi(n - 1, m + 1)
            + th**k * (t - 1.0) * phi(n - k - 1, m + 1)
            + th ** (k + 1) * (1.0 - t) * phi(n - k - 2, m + 1)
        )
        memo[key] = val
        return val

    return phi(spec.n, 0)


def pgf(t: float, spec: RunSpec, params: ModelParams) -> float:
    """Probability generating function E[t**X]."""
    return _gf_value(t, spec, params)


def mgf(t: float, spec: RunSpec, params: ModelParams) -> float:
    """Moment generating function E[e**(tX)], the same recursion probed at e**t."""
    return _gf_value(math.exp(t), spec, params)


def factorial_moments(spec: RunSpec, params: ModelParams, order: int) -> list[float]:
    """E[X(X-1)...(X-r+1)] for r = 0..order (entry 0 is always 1)."""
    if order < 0:
        raise ValueError(f"order must be nonnegative, got {order}")
    k = spec.k
    theta0, q = params.theta, params.q
    qk = q**k
    memo: dict[tuple[int, int, int], float] = {}

    def rho(r: int, n: int, m: int) -> float:
        if r == 0:
            return 1.0
        if n < k:
            return 0.0
        if q == 1.0:
            m = 0
        th = theta0 * q**m
        if n == k:
            return th**k if r == 1 else 0.0
        if n == k + 1:
            return th**k * (1.0 - th) * (1.0 + qk) if r == 1 else 0.0
        key = (r, n, m)
        hit = memo.get(key)
        if hit is not None:
            return hit
        val = th * rho(r, n - 1, m) + (1.0 - th) * (
            rho(r, n - 1, m + 1)
            + th**k * r * rho(r - 1, n - k - 1, m + 1)
            - th ** (k + 1) * r * rho(r - 1, n - k - 2, m + 1)
        )
        memo[key] = val
        return val

    return [rho(r, spec.n, 0) for r in range(order + 1)]


def raw_moments(spec: RunSpec, params: ModelParams, order: int) -> list[float]:
    """E[X**r] for r = 0..order via the binomial-sum recursion."""
    if order < 0:
        raise ValueError(f"order must be nonnegative, got {order}")
    k = spec.k
    theta0, q = params.theta, params.q
    qk = q**k
    memo: dict[tuple[int, int, int], float] = {}

    def nu(r: int, n: int, m: int) -> float:
        if r == 0:
            return 1.0
        if n < k:
            return 0.0
        if q == 1.0:
            m = 0
        th = theta0 * q**m
        # X is 0/1-valued at these anchors, so every positive power agrees
        if n == k:
            return th**k
        if n == k + 1:
            return th**k * (1.0 - th) * (1.0 + qk)
        key = (r, n, m)
        hit = memo.get(key)
        if hit is not None:
            return hit
        inner_a = math.fsum(math.comb(r, i) * nu(i, n - k - 1, m + 1) for i in range(r))
        inner_b = math.fsum(math.comb(r, i) * nu(i, n - k - 2, m + 1) for i in range(r))
        val = th * nu(r, n - 1, m) + (1.0 - th) * (
            nu(r, n - 1, m + 1) + th**k * inner_a - th ** (k + 1) * inner_b
        )
        memo[key] = val
        return val

    return [nu(r, spec.n, 0) for r in range(order + 1)]


@dataclass(frozen=True)
class MomentSet:
    """Moments up to a given order plus the shape factors.

    skewness and excess-free kurtosis are None when the variance is
    numerically zero (degenerate distribution) or the order is too low to
    form them (3 for skewness, 4 for kurtosis).
    """

    spec: RunSpec
    params: ModelParams
    order: int
    raw: tuple[float, ...]
    central: tuple[float, ...]
    skewness: float | None
    kurtosis: float | None

    @property
    def mean(self) -> float:
        return self.raw[1]

    @property
    def variance(self) -> float:
        return self.central[2]

    @property
    def degenerate(self) -> bool:
        return self.central[2] <= _DEGENERATE_VARIANCE


def central_moments_and_shape(spec: RunSpec, params: ModelParams, order: int = 4) -> MomentSet:
    """Central moments through `order` (>= 2) and the shape factors.

    xi_r = sum_{j=0}^{r-2} (-1)**j C(r,j) nu_{r-j} nu_1**j + (-1)**(r-1) (r-1) nu_1**r.
    """
    if order < 2:
        raise ValueError(f"order must be >= 2 for shape factors, got {order}")
    nu = raw_moments(spec, params, order)
    mean = nu[1]
    central = [1.0, 0.0]
    for r in range(2, order + 1):
        head = math.fsum(
            (-1) ** j * math.comb(r, j) * nu[r - j] * mean**j for j in range(r - 1)
        )
        central.append(head + (-1) ** (r - 1) * (r - 1) * mean**r)
    var = central[2]
    skewness = None
    kurtosis = None
    if var > _DEGENERATE_VARIANCE:
        if order >= 3:
            skewness = central[3] / var**1.5
        if order >= 4:
            kurtosis = central[4] / var**2
    return MomentSet(
        spec=spec,
        params=params,
        order=order,
        raw=tuple(nu),
        central=tuple(central),
        skewness=skewness,
        kurtosis=kurtosis,
    )


def pmf_from_binomial_moments(spec: RunSpec, params: ModelParams, x: int) -> float:
    """Invert the factorial moments into P(X = x).

    P(X = x) = (1/x!) sum_{r>=x} (-1)**(r-x) rho_r / (r-x)!, truncated at the
    support maximum where every higher factorial moment vanishes exactly.
    """
    top = spec.support_max
    if x < 0 or x > top:
        return 0.0
    rho = factorial_moments(spec, params, top)
    total = math.fsum(
        (-1) ** (r - x) * rho[r] / (math.factorial(r - x)) for r in range(x, top + 1)
    )
    return total / math.factorial(x)


def survival_from_binomial_moments(spec: RunSpec, params: ModelParams, x: int) -> float:
    """Invert the factorial moments into P(X >= x); 1 at x <= 0."""
    if x <= 0:
        return 1.0
    top = spec.support_max
    if x > top:
        return 0.0
    rho = factorial_moments(spec, params, top)
    return math.fsum(
        (-1) ** (x + i) * math.comb(i - 1, x - 1) * rho[i] / math.factorial(i)
        for i in range(x, top + 1)
    )
