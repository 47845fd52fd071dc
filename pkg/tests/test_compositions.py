import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import compositions, kernel_by_enumeration
from qruns.compositions import (
    CompositionWeights,
    composition_count,
    count_compositions_avoiding,
    weighted_compositions,
)


def test_single_part_base_cases():
    w = CompositionWeights(2, 0.5)
    assert w.value(1, 2, 1) == 1.0  # the single part is exactly k
    assert w.value(1, 2, 0) == 0.0
    assert w.value(1, 3, 0) == 1.0  # the single part misses k
    assert w.value(1, 3, 1) == 0.0


def test_frozen_enumeration_values():
    # frozen from the direct composition enumeration
    assert weighted_compositions(3, 4, 1, 2, 1.0) == pytest.approx(3.0, abs=1e-12)
    assert weighted_compositions(3, 4, 1, 2, 0.5) == pytest.approx(0.21875, abs=1e-12)
    assert weighted_compositions(4, 6, 2, 2, 0.8) == pytest.approx(0.8391963443200005, abs=1e-12)
    assert weighted_compositions(5, 9, 1, 3, 0.5) == pytest.approx(0.2786231745267287, abs=1e-12)
    # two parts summing to 2 with both equal 1, and with exactly one equal 1
    assert weighted_compositions(2, 2, 2, 1, 1.0) == 1.0
    assert weighted_compositions(2, 2, 1, 1, 1.0) == 0.0


def test_domain_zeros():
    w = CompositionWeights(2, 0.5)
    assert w.value(2, 1, 2) == 0.0  # s < t*k
    assert w.value(2, 5, 3) == 0.0  # t > r
    assert w.value(3, -1, 0) == 0.0
    assert w.value(3, 4, -1) == 0.0
    assert w.value(0, 0, 0) == 0.0


def test_enumeration_agreement_full_grid():
    """Every (r, s, t, k, q) cell within the declared ranges matches brute force."""
    for q in (0.5, 0.8, 1.0):
        sessions = {k: CompositionWeights(k, q) for k in (1, 2, 3, 4)}
        for r in range(1, 7):
            for s in range(0, 13):
                # accumulate the enumeration once per (r, s): weight by
                # exponent, bucket by (k, t)
                buckets: dict[tuple[int, int], float] = {}
                for c in compositions(s, r):
                    w = q ** sum(i * y for i, y in enumerate(c))
                    for k in (1, 2, 3, 4):
                        t = sum(1 for y in c if y == k)
                        key = (k, t)
                        buckets[key] = buckets.get(key, 0.0) + w
                for k in (1, 2, 3, 4):
                    for t in range(r + 1):
                        expect = buckets.get((k, t), 0.0)
                        got = sessions[k].value(r, s, t)
                        assert got == pytest.approx(expect, abs=1e-10), (r, s, t, k, q)


def test_classical_matches_weighted_at_q_one():
    for k in (1, 2, 3, 4):
        w = CompositionWeights(k, 1.0)
        for r in range(1, 7):
            for s in range(0, 13):
                for t in range(r + 1):
                    assert composition_count(r, s, t, k) == pytest.approx(
                        w.value(r, s, t), abs=1e-9
                    ), (r, s, t, k)


def test_classical_count_examples():
    assert composition_count(1, 2, 1, 2) == 1
    assert composition_count(2, 2, 1, 1) == 0  # (1,1) has two ones, (0,2)/(2,0) have none
    assert composition_count(2, 2, 2, 1) == 1
    assert composition_count(3, 4, 1, 2) == 3


def test_avoiding_count_brute_force():
    for total in range(0, 10):
        for cells in range(0, 5):
            for part in (1, 2, 3):
                expect = sum(
                    1 for c in compositions(total, cells) if part not in c
                )
                assert count_compositions_avoiding(total, cells, part) == expect, (
                    total,
                    cells,
                    part,
                )


def test_repeat_queries_bit_identical():
    w = CompositionWeights(2, 0.7)
    first = w.value(5, 9, 2)
    assert w.value(5, 9, 2) == first
    fresh = CompositionWeights(2, 0.7).value(5, 9, 2)
    assert fresh == first


def test_invalid_construction():
    with pytest.raises(ValueError):
        CompositionWeights(0, 0.5)
    with pytest.raises(ValueError):
        CompositionWeights(2, 0.0)
    with pytest.raises(ValueError):
        composition_count(2, 2, 1, 0)


@given(
    r=st.integers(min_value=1, max_value=5),
    s=st.integers(min_value=0, max_value=10),
    t=st.integers(min_value=0, max_value=5),
    k=st.integers(min_value=1, max_value=3),
)
@settings(max_examples=60, deadline=None)
def test_kernel_matches_enumeration_property(r, s, t, k):
    got = weighted_compositions(r, s, t, k, 0.6)
    expect = kernel_by_enumeration(r, s, t, k, 0.6)
    assert got == pytest.approx(expect, abs=1e-10)
