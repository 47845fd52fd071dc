"""q-weighted composition counts: the combinatorial kernel of the exact pmf.

A composition of s into r nonnegative parts (y_1, ..., y_r) carries weight
q**(0*y_1 + 1*y_2 + ... + (r-1)*y_r). The kernel value is the total weight of
the compositions having exactly t parts equal to k. At q = 1 this reduces to
a plain count with a closed inclusion-exclusion form, implemented separately
as `composition_count` so the two routes can check each other.
"""

from __future__ import annotations

import math

from .qcalculus import validate_q

__all__ = [
    "CompositionWeights",
    "composition_count",
    "count_compositions_avoiding",
    "weighted_compositions",
]


class CompositionWeights:
    """Memoized kernel evaluator for one (k, q) pair.

    Peeling off the last part j of a composition multiplies the weight by
    q**(j*(r-1)) and reduces the target sum; a part equal to k consumes one
    of the t required hits. Values are cached by (r, s, t), so a session is
    cheap to reuse across the many (r, s, t) triples one pmf needs.
    """

    def __init__(self, k: int, q: float):
        if k < 1:
            raise ValueError(f"k must be a positive integer, got {k}")
        self.k = int(k)
        self.q = validate_q(q)
        self._memo: dict[tuple[int, int, int], float] = {}

    def value(self, r: int, s: int, t: int) -> float:
        """Total weight over compositions of s into r parts with t parts equal k."""
        k = self.k
        if r < 1 or s < 0 or t < 0 or t > r or s < t * k:
            return 0.0
        if r == 1:
            # single part: it is k (needs t == 1) or it is not (needs t == 0)
            if s == k:
                return 1.0 if t == 1 else 0.0
            return 1.0 if t == 0 else 0.0
        key = (r, s, t)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        qstep = self.q ** (r - 1)
        weight = 1.0
        total = 0.0
        for j in range(s + 1):
            if j == k:
                total += weight * self.value(r - 1, s - k, t - 1)
            else:
                total += weight * self.value(r - 1, s - j, t)
            weight *= qstep
        self._memo[key] = total
        return total


def weighted_compositions(r: int, s: int, t: int, k: int, q: float) -> float:
    """One-shot kernel value; build a CompositionWeights session to share work."""
    return CompositionWeights(k, q).value(r, s, t)


def _choose(m: int, j: int) -> int:
    # C(m, 0) = 1 down to m = -1 (the inclusion-exclusion boundary term
    # needs C(-1, 0) = 1); everything else out of range is 0
    if j == 0:
        return 1 if m >= -1 else 0
    if j < 0 or m < 0 or j > m:
        return 0
    return math.comb(m, j)


def count_compositions_avoiding(total: int, cells: int, part: int) -> int:
    """Compositions of `total` into `cells` nonnegative parts, none equal `part`.

    Inclusion-exclusion over the cells forced to hold `part`: the j-th term
    counts compositions of total - j*part into cells parts with j cells
    pinned, shifted so the pinned cells cannot land on `part` again.
    """
    if part < 1:
        raise ValueError(f"part must be a positive integer, got {part}")
    if total < 0 or cells < 0:
        return 0
    out = 0
    for j in range(total // part + 1):
        term = _choose(cells, j) * _choose(total - (part + 1) * j + cells - 1, total - j * part)
        out += -term if j % 2 else term
    return out


def composition_count(r: int, s: int, t: int, k: int) -> int:
    """Classical (q = 1) kernel: the plain number of qualifying compositions.

    Choose which t of the r parts equal k, then fill the remaining r - t
    parts with s - t*k avoiding the value k.
    """
    if k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    if r < 1 or s < 0 or t < 0 or t > r or s < t * k:
        return 0
    return _choose(r, t) * count_compositions_avoiding(s - t * k, r - t, k)
