from itertools import combinations

import pytest

from l1cwc import construct as C
from l1cwc import designs
from l1cwc.bounds import U, d_quads_pairs, d_triples_pairs
from l1cwc.core import Code, CodeParams, l1_distance, type_census, verify_code
from l1cwc.develop import develop, load_table


def valid(code: Code) -> bool:
    rep = verify_code(code)
    return rep.ok and rep.min_distance >= code.params.d


@pytest.mark.parametrize("n, size", [(7, 14), (3, 4), (2, 2)])
def test_z_w3_d4_examples(n, size):
    code = C.build_z_w3_d4(n)
    assert len(code) == size and valid(code)


def test_z_w4_d4_examples():
    assert len(C.build_z_w4_d4(6)) == 24
    assert len(C.build_z_w4_d4(4)) == 11
    assert len(C.build_z_w4_d4(5)) == designs.brute_force_packing_number(5, 4, 3) + 10 + 5
    assert valid(C.build_z_w4_d4(8))


@pytest.mark.parametrize("n, size", [(8, 10), (4, 5), (13, 26)])
def test_z_w4_d6_examples(n, size):
    code = C.build_z_w4_d6(n)
    assert len(code) == size == d_quads_pairs(n) + n and valid(code)


@pytest.mark.parametrize("n, size", [(6, 9), (8, 14), (9, 18)])
def test_t3_w3_d4_examples(n, size):
    code = C.build_t3_w3_d4(n)
    assert len(code) == size and valid(code)


def test_t3_w4_d4_examples():
    assert len(C.build_t3_w4_d4(6)) == 18
    code = C.build_t3_w4_d4(4)
    assert len(code) == 7 and valid(code)
    zz = [u for u in C.build_t3_w4_d4(7).words if u.signature() == "2^2"]
    assert min(l1_distance(a, b) for a, b in combinations(zz, 2)) == 4


def test_packing_unavailable():
    with pytest.raises(C.PackingUnavailable):
        C.quad_triple_packing(11)


@pytest.mark.parametrize("n, size", [(7, 7), (12, 16)])
def test_t3_w4_d6_small(n, size):
    code = C.build_t3_w4_d6(n)
    assert len(code) == size and valid(code)


def test_t3_w4_d6_from_six_seven():
    code = C.build_t3_w4_d6(42)
    assert len(code) == 161 and valid(code)
    assert "6^7" in code.provenance


def test_gdd_fill_six_seven():
    g = designs.catalog("6^7")
    short = develop(load_table("n6"))
    code = C.gdd_fill(g, {6: short})
    assert len(code) == 126 + 7 * 5 and valid(code)


def test_gdd_fill_blocks_only():
    plane = designs.cyclic_packing(13, [(0, 1, 3, 9)])
    g = designs.GDD(13, [(i,) for i in range(13)], plane.blocks)
    empty = Code(CodeParams(1, 3, 4, 6), ())
    code = C.gdd_fill(g, {1: empty})
    assert len(code) == 13 and valid(code)


def test_gdd_fill_mismatch():
    g = designs.catalog("6^7")
    with pytest.raises(C.GroupCodeMismatch):
        C.gdd_fill(g, {7: develop(load_table("n7"))})


def test_fill_extra_point():
    g = designs.catalog("12^4")
    group = C.normalize_extra_points(develop(load_table("eg13")), 1)
    tail = Code(CodeParams(1, 3, 4, 6), ())
    code = C.gdd_fill_extra(g, 1, group, tail)
    assert len(code) == U(12 * 4 + 0 + 1) and valid(code)


def test_fill_extra_rejects_bad_group_codes():
    g = designs.catalog("12^4")
    group = C.normalize_extra_points(develop(load_table("eg13")), 1)
    swap = list(range(13))
    swap[0], swap[12] = 12, 0
    moved = group.with_words([u.relabel(swap) for u in group.words])
    with pytest.raises(C.Symbol2OnExtraPoint):
        C.gdd_fill_extra(g, 1, moved, Code(CodeParams(1, 3, 4, 6), ()))
    b = develop(load_table("eg26"))
    swap = list(range(26))
    swap[0], swap[24] = 24, 0
    inside = b.with_words([u.relabel(swap) for u in b.words])
    with pytest.raises(C.PropertyViolation):
        C.gdd_fill_extra(designs.catalog("24^4"), 2, inside, develop(load_table("n2")))
    with pytest.raises(C.PropertyViolation):
        C.gdd_fill_extra(g, 1, develop(load_table("n7")), Code(CodeParams(1, 3, 4, 6), ()))


@pytest.mark.parametrize("n", [37, 49, 110])
def test_recipes_with_extra_points(n):
    code = C.build_t3_w4_d6(n)
    assert len(code) == U(n) and valid(code)


def test_no_recipe_names_nearest():
    with pytest.raises(C.NoRecipe) as e:
        C.build_t3_w4_d6(20)
    assert e.value.nearest == [19, 21, 22]
    assert 20 not in C.covered_lengths()


def test_golomb_rulers():
    assert C.golomb_ruler(7, 3).marks == (0, 1, 3)
    assert C.golomb_ruler(13, 4).marks == (0, 1, 3, 9)
    assert C.golomb_ruler(13, 4).is_valid()
    with pytest.raises(C.InfeasibleByCount):
        C.golomb_ruler(6, 3)


def test_clique_packing_is_edge_disjoint():
    g = C.Graph.complete(13)
    blocks = C.clique_packing(g, 4, seed=1, iterations=300)
    pairs = [pr for b in blocks for pr in combinations(sorted(b), 2)]
    assert len(pairs) == len(set(pairs)) and len(blocks) >= 9


def test_general_pipeline_weight_three():
    res = C.build_t3_general(13, 3)
    assert valid(res.code) and len(res.code) <= (13 * 13 + 3 * 13) // 6
    assert res.upper == (13 * 13 + 3 * 13) // 6


def test_general_pipeline_weight_five():
    res = C.build_t3_general(41, 5, budget=300)
    rep = verify_code(res.code)
    assert rep.ok and rep.min_distance >= 8 and len(res.code) >= 41
    assert res.shortfall >= 0


def test_census_limits_on_constructed_codes():
    for n in (13, 36, 42):
        code = C.build_t3_w4_d6(n)
        c = type_census(code)
        assert 6 * c.x + 3 * c.y + c.z <= n * (n - 1) // 2 and c.y + 2 * c.z <= n


def test_triple_packing_sizes():
    for n in range(3, 25):
        assert len(C.triple_packing(n)) == d_triples_pairs(n)
