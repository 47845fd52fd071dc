"""q-series primitives underpinning the run-count distribution.

Everything here works in plain float64. The classical limit q = 1 is a
first-class citizen: each function short-circuits to the familiar
binomial/combinatorial value instead of evaluating 0/0 expressions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "ModelParams",
    "q_binomial_coefficient",
    "q_binomial_pmf",
    "q_number",
    "q_shifted_factorial",
    "validate_q",
]


def validate_q(q: float) -> float:
    # geometric decay rate of the success probability; q = 1 means no decay
    if not isinstance(q, (int, float)) or isinstance(q, bool):
        raise ValueError(f"q must be a real number, got {q!r}")
    if math.isnan(q) or not 0.0 < q <= 1.0:
        raise ValueError(f"q must lie in (0, 1], got {q!r}")
    return float(q)


@dataclass(frozen=True)
class ModelParams:
    """Trial model (theta, q).

    A trial that has already seen z failures succeeds with probability
    theta * q**z, so successes get rarer as failures accumulate (q < 1)
    or the trials are plain Bernoulli(theta) (q = 1).
    """

    theta: float
    q: float = 1.0

    def __post_init__(self) -> None:
        if not isinstance(self.theta, (int, float)) or isinstance(self.theta, bool):
            raise ValueError(f"theta must be a real number, got {self.theta!r}")
        if math.isnan(self.theta) or not 0.0 <= self.theta <= 1.0:
            raise ValueError(f"theta must lie in [0, 1], got {self.theta!r}")
        validate_q(self.q)
        object.__setattr__(self, "theta", float(self.theta))
        object.__setattr__(self, "q", float(self.q))

    def decayed(self, steps: int) -> "ModelParams":
        """Parameters after `steps` additional failures: theta -> theta * q**steps."""
        if steps == 0 or self.q == 1.0:
            return self
        return ModelParams(self.theta * self.q**steps, self.q)


def q_number(z: int, q: float) -> float:
    """The q-analogue [z]_q = (1 - q**z) / (1 - q), which is plain z at q = 1."""
    if z < 0:
        raise ValueError(f"z must be nonnegative, got {z}")
    validate_q(q)
    if q == 1.0:
        return float(z)
    return (1.0 - q**z) / (1.0 - q)


def q_shifted_factorial(a: float, q: float, n: int) -> float:
    """(a; q)_n = prod_{j=0}^{n-1} (1 - a * q**j), with the empty product at n = 0."""
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    validate_q(q)
    out = 1.0
    for j in range(n):
        out *= 1.0 - a * q**j
    return out


def q_binomial_coefficient(n: int, m: int, q: float) -> float:
    """Gaussian binomial coefficient, zero outside 0 <= m <= n.

    Evaluated as the running product of ratios (1 - q**(n-m+i)) / (1 - q**i)
    rather than via q-factorials, so intermediate values stay bounded.
    """
    validate_q(q)
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    if m < 0 or m > n:
        return 0.0
    m = min(m, n - m)
    if q == 1.0:
        return float(math.comb(n, m))
    out = 1.0
    for i in range(1, m + 1):
        out *= (1.0 - q ** (n - m + i)) / (1.0 - q**i)
    return out


def q_binomial_pmf(r: int, n: int, params: ModelParams) -> float:
    """P(r successes in n trials) under the decaying-success model.

    Equals [n r]_q * theta**r * prod_{i=1}^{n-r} (1 - theta * q**(i-1)).
    Returns 0.0 outside 0 <= r <= n. At q = 1 this is the binomial pmf.
    """
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    if r < 0 or r > n:
        return 0.0
    theta, q = params.theta, params.q
    out = q_binomial_coefficient(n, r, q) * theta**r
    for i in range(1, n - r + 1):
        out *= 1.0 - theta * q ** (i - 1)
    return out
