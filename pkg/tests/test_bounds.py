from itertools import product
from math import comb

import pytest
from hypothesis import given, strategies as st

from l1cwc.bounds import (
    B,
    BoundResult,
    DEFICIENT_W4_D6,
    GDDType,
    OPEN_RANGES_W4_D6,
    U,
    Unsupported,
    count_weight_vectors,
    d_quads_pairs,
    d_quads_triples,
    d_triples_pairs,
    gdd4_exists,
    gdd4_status,
    known_value,
    trivial_value,
    upper_bound,
    z_cap,
)
from l1cwc.core import CodeParams, UNBOUNDED
from l1cwc.designs import brute_force_packing_number


def brute_count(n, q, w):
    top = w if q == UNBOUNDED else q - 1
    return sum(1 for v in product(range(top + 1), repeat=n) if sum(v) == w)


@pytest.mark.parametrize("n", range(1, 6))
@pytest.mark.parametrize("q", [2, 3, 4, UNBOUNDED])
@pytest.mark.parametrize("w", range(0, 6))
def test_count_weight_vectors_matches_enumeration(n, q, w):
    assert count_weight_vectors(n, q, w) == brute_count(n, q, w)


def test_count_examples():
    assert count_weight_vectors(3, 2, 2) == 3
    assert count_weight_vectors(7, 3, 0) == 1
    assert count_weight_vectors(2, 3, 2) == 3


def test_packing_number_examples():
    assert (d_triples_pairs(7), d_triples_pairs(5), d_triples_pairs(3)) == (7, 2, 1)
    assert (d_quads_pairs(8), d_quads_pairs(13), d_quads_pairs(4)) == (2, 13, 1)
    assert (d_quads_triples(6), d_quads_triples(4)) == (3, 1)


def test_d_quads_triples_eight_from_oracle():
    assert d_quads_triples(8) == brute_force_packing_number(8, 4, 3) == 14


@pytest.mark.parametrize("n", range(4, 11))
def test_d_quads_pairs_matches_oracle(n):
    assert d_quads_pairs(n) == brute_force_packing_number(n, 4, 2)


def test_U_B_and_z_cap():
    assert U(12) == 17 and U(6) == 5
    assert [z_cap(n) for n in (12, 26, 20)] == [0, 1, 4]
    for n in range(3, 101):
        assert B(n, 3) + n == (n * n + 3 * n) // 6


def test_trivial_values():
    assert trivial_value(CodeParams(6, 3, 4, 8)) == BoundResult.exact(3, "disjoint supports")
    assert trivial_value(CodeParams(5, UNBOUNDED, 2, 6)).value == 1
    assert trivial_value(CodeParams(3, 2, 2, 2)).value == 3
    assert trivial_value(CodeParams(2, 2, 3, 8)).value == 0  # no binary word of weight 3 at length 2
    assert trivial_value(CodeParams(12, 3, 4, 6)) is None


def test_upper_bound_dispatch():
    ub = upper_bound(CodeParams(9, 3, 3, 4))
    assert (ub.kind, ub.value) == ("upper", 18)
    assert upper_bound(CodeParams(12, 3, 4, 6)).value == 17
    for n in (21, 41, 61):
        assert upper_bound(CodeParams(n, 3, 5, 8)).value == B(n, 5) + n
    with pytest.raises(Unsupported):
        upper_bound(CodeParams(10, 4, 5, 6))


def test_known_values():
    kv = known_value(CodeParams(12, 3, 4, 6))
    assert (kv.kind, kv.value) == ("exact", 16)
    kv = known_value(CodeParams(14, 3, 4, 6))
    assert (kv.kind, kv.lo, kv.hi) == ("range", 21, 22)
    kv = known_value(CodeParams(7, UNBOUNDED, 3, 4))
    assert (kv.kind, kv.value) == ("exact", d_triples_pairs(7) + 7) == ("exact", 14)
    assert len(OPEN_RANGES_W4_D6) == 22
    for n in DEFICIENT_W4_D6:
        assert known_value(CodeParams(n, 3, 4, 6)).value == U(n) - 1


def test_known_value_never_raises():
    kv = known_value(CodeParams(10, 4, 5, 6))
    assert kv.kind == "range" and kv.hi == count_weight_vectors(10, 4, 5)


def test_describe_and_dict():
    kv = known_value(CodeParams(12, 3, 4, 6))
    assert kv.describe().startswith("Exact 16 (")
    assert kv.as_dict()["value"] == 16


def test_gdd4_examples():
    assert gdd4_exists(GDDType(2, 6, 5)) is False
    assert gdd4_exists(GDDType(36, 4, 0))
    assert gdd4_exists(GDDType(6, 7, 0))
    st_ = gdd4_status(GDDType(6, 13, 27))
    assert st_.status == "open" and not st_.exists


@given(st.integers(1, 200))
def test_bounds_are_consistent(n):
    # known value lies under the upper bound for every supported ternary family
    for w, d in ((3, 4), (4, 4), (4, 6)):
        p = CodeParams(n, 3, w, d)
        assert known_value(p).hi <= upper_bound(p).value
    # packing numbers and U grow with n, and never beat plain pair/triple counting
    assert d_triples_pairs(n) <= d_triples_pairs(n + 1)
    assert d_quads_triples(n) <= d_quads_triples(n + 1)
    assert U(n) <= U(n + 1)
    if n >= 4:
        assert 6 * d_quads_pairs(n) <= comb(n, 2)
        assert 4 * d_quads_triples(n) <= comb(n, 3)
    assert 3 * d_triples_pairs(n) <= comb(n, 2)
