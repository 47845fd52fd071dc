"""Sequence simulation and run counting.

Randomness is counter-based (Philox) so simulations are reproducible
bit-for-bit across platforms and across process boundaries. A draw of N
sequences of length n consumes one uniform per trial, laid out row-major:
draw i uses exactly the variates [i*n, (i+1)*n) of its stream. That gives
the prefix property: the first N' draws of a size-N batch match a size-N'
batch from the same stream, for any N >= N'.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .dist import RunSpec
from .qcalculus import ModelParams

__all__ = [
    "SeededRng",
    "count_exact_runs",
    "generate_sequence",
    "generate_sequences",
    "sample_run_counts",
    "sequence_to_string",
]


@dataclass(frozen=True)
class SeededRng:
    """Deterministic RNG handle: (seed, stream path) -> Philox generator.

    Distinct stream paths give statistically independent substreams of the
    same seed, which is how parallel workers stay both uncorrelated and
    schedule-independent.
    """

    seed: int
    stream: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or self.seed < 0:
            raise ValueError(f"seed must be a nonnegative integer, got {self.seed!r}")
        object.__setattr__(self, "stream", tuple(int(s) for s in self.stream))

    def child(self, *indices: int) -> "SeededRng":
        return SeededRng(self.seed, self.stream + indices)

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=self.stream)
        return np.random.Generator(np.random.Philox(ss))


def _draw_bits(num: int, n: int, params: ModelParams, gen: np.random.Generator) -> np.ndarray:
    """num sequences of n trials each; row i consumes uniforms block i."""
    u = gen.random((num, n))
    bits = np.empty((num, n), dtype=np.uint8)
    decay = params.q ** np.arange(n + 1, dtype=np.float64)
    zeros = np.zeros(num, dtype=np.int64)
    for j in range(n):
        succ = u[:, j] < params.theta * decay[zeros]
        bits[:, j] = succ
        zeros += ~succ
    return bits


def generate_sequences(num_draws: int, n: int, params: ModelParams, rng: SeededRng) -> np.ndarray:
    """num_draws independent 0/1 sequences of length n, one per row.

    Row i is the same for every num_draws >= i+1 (prefix property), and
    counting runs over row i reproduces sample_run_counts entry i exactly.
    """
    if num_draws < 1:
        raise ValueError(f"num_draws must be positive, got {num_draws}")
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    return _draw_bits(num_draws, n, params, rng.generator())


def generate_sequence(n: int, params: ModelParams, rng: SeededRng) -> np.ndarray:
    """One 0/1 sequence of length n under the decaying-success model."""
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    return _draw_bits(1, n, params, rng.generator())[0]


def count_exact_runs(seq: Sequence[int] | str | Iterable[int], k: int) -> int:
    """Number of maximal blocks of exactly k consecutive ones.

    Accepts a 0/1 string or any iterable of 0/1 values. The sequence edges
    fence runs the same way failures do.
    """
    if k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    count = 0
    length = 0
    for item in seq:
        if isinstance(item, str):
            if item not in ("0", "1"):
                raise ValueError(f"sequence entries must be 0 or 1, got {item!r}")
            b = item == "1"
        else:
            v = int(item)
            if v not in (0, 1):
                raise ValueError(f"sequence entries must be 0 or 1, got {item!r}")
            b = v == 1
        if b:
            length += 1
        else:
            if length == k:
                count += 1
            length = 0
    if length == k:
        count += 1
    return count


def _count_runs_batch(bits: np.ndarray, k: int) -> np.ndarray:
    """Vectorized maximal-run counting over a (num, n) 0/1 matrix."""
    num, n = bits.shape
    counts = np.zeros(num, dtype=np.int64)
    if n < k:
        return counts
    padded = np.zeros((num, n + 2), dtype=np.int8)
    padded[:, 1 : n + 1] = bits
    csum = np.cumsum(padded, axis=1)
    for start in range(n - k + 1):
        # window = padded columns start+1 .. start+k, fenced at start and start+k+1
        block = csum[:, start + k] - csum[:, start]
        hit = (block == k) & (padded[:, start] == 0) & (padded[:, start + k + 1] == 0)
        counts += hit
    return counts


def sample_run_counts(
    num_draws: int, spec: RunSpec, params: ModelParams, rng: SeededRng
) -> np.ndarray:
    """Exact-run counts of num_draws independent sequences (prefix-stable)."""
    if num_draws < 1:
        raise ValueError(f"num_draws must be positive, got {num_draws}")
    bits = _draw_bits(num_draws, spec.n, params, rng.generator())
    return _count_runs_batch(bits, spec.k)


def sequence_to_string(seq: Iterable[int]) -> str:
    return "".join("1" if int(b) else "0" for b in seq)
