"""Shared brute-force helpers for the test suite.

These are deliberately written in the most obvious way possible (generate
and filter) so they can serve as referees for the production code.
"""

from __future__ import annotations

import math
from itertools import product


def compositions(total: int, parts: int):
    """All tuples of `parts` nonnegative ints summing to `total`."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def kernel_by_enumeration(r: int, s: int, t: int, k: int, q: float) -> float:
    """Direct sum of q**(sum_i (i-1)*y_i) over compositions with t parts equal k."""
    out = 0.0
    for c in compositions(s, r):
        if sum(1 for y in c if y == k) == t:
            out += q ** sum(i * y for i, y in enumerate(c))
    return out


def falling_factorial(x: int, r: int) -> float:
    out = 1.0
    for i in range(r):
        out *= x - i
    return out


def pmf_moment(pmf, power: int) -> float:
    return math.fsum(x**power * p for x, p in enumerate(pmf))


def pmf_factorial_moment(pmf, r: int) -> float:
    return math.fsum(falling_factorial(x, r) * p for x, p in enumerate(pmf))


def small_grid():
    """The reduced cross-checking grid used by several unit tests."""
    for n, k in product(range(1, 11), (1, 2, 3)):
        for theta in (0.3, 0.7):
            for q in (0.5, 0.9):
                yield n, k, theta, q
