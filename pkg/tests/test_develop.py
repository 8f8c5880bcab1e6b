from importlib import resources

import pytest
from hypothesis import given, settings, strategies as st

from l1cwc.bounds import U
from l1cwc.core import CodeParams, Codeword, FormatError, l1_distance, type_census, verify_code
from l1cwc.develop import (
    BaseBlockSet,
    OverlappingCycles,
    ParseError,
    Permutation,
    PointOutOfRange,
    TableMismatch,
    check_property_A,
    check_property_B,
    develop,
    format_base_blocks,
    leave_pairs,
    load_base_blocks,
    load_table,
    manifest,
    orbit,
    parse_base_blocks,
    parse_cycles,
    two_two_word,
    verify_table,
)


def test_parse_cycles():
    p = parse_cycles("(0 1 2 3)", 4)
    assert p.order() == 4 and p.images == (1, 2, 3, 0)
    assert str(p) == "(0 1 2 3)"
    assert parse_cycles("", 3) == Permutation.identity(3)
    with pytest.raises(OverlappingCycles):
        parse_cycles("(0 1)(1 2)", 3)
    with pytest.raises(PointOutOfRange):
        parse_cycles("(0 5)", 4)
    with pytest.raises(ParseError):
        parse_cycles("(0 1) x", 4)


def test_eg26_automorphism_order():
    assert load_table("eg26").perm.order() == 4


def test_develop_seven():
    b = BaseBlockSet(CodeParams(7, 3, 4, 6), (Codeword.parse("{0_2,1_1,3_1}"),), Permutation.shift(7))
    code = develop(b)
    rep = verify_code(code)
    assert len(code) == 7 and rep.ok and rep.min_distance == 6


def test_short_orbits():
    perm = load_table("eg26").perm
    assert len(orbit(Codeword.parse("{24_2,25_2}"), perm)) == 1
    assert len(orbit(Codeword.parse("{2_1,11_1,20_1,29_1}"), Permutation.shift(36, 6))) == 3


def test_develop_rejects_out_of_range_base():
    b = BaseBlockSet(CodeParams(5, 3, 4, 6), (Codeword.parse("{0_2,7_2}"),), Permutation.shift(5))
    with pytest.raises(PointOutOfRange):
        develop(b)


def test_named_tables():
    code, rep = verify_table("eg36")
    assert len(code) == 123 and rep.min_distance >= 6
    code, _ = verify_table("eg13")
    c = type_census(code)
    assert len(code) == 19 and c.y == 12 and c.z == 0 and check_property_A(code)
    code, _ = verify_table("n12")
    assert len(code) == 16


def test_eg26_property_B():
    code, _ = verify_table("eg26")
    assert check_property_B(code)
    assert two_two_word(code) == Codeword.parse("{24_2,25_2}")
    assert parse_cycles("(24 25)", 26).apply(two_two_word(code)) == two_two_word(code)


def test_n10_property_A():
    code, _ = verify_table("n10")
    assert check_property_A(code) and not leave_pairs(code)
    assert not check_property_B(code)


@pytest.mark.parametrize("table_id", sorted(manifest()))
def test_every_table_verifies(table_id):
    entry = manifest()[table_id]
    code, rep = verify_table(table_id)
    assert rep.ok and len(code) == entry["size"]
    c = type_census(code)
    n = entry["n"]
    assert 6 * c.x + 3 * c.y + c.z <= n * (n - 1) // 2 and c.y + 2 * c.z <= n


def test_erratum_row_is_rejected():
    path = resources.files("l1cwc") / "data" / "errata" / "n20.table"
    b = load_base_blocks(str(path))
    with pytest.raises(PointOutOfRange):
        develop(b)


def test_table_mismatch_on_wrong_size(tmp_path, monkeypatch):
    (tmp_path / "tables").mkdir()
    src = load_table("n7")
    (tmp_path / "tables" / "n7.table").write_text(format_base_blocks(src))
    (tmp_path / "tables" / "manifest.json").write_text(
        '{"tables": {"n7": {"file": "n7.table", "n": 7, "size": 8, "flags": []}}}')
    monkeypatch.setenv("L1CWC_CATALOG_DIR", str(tmp_path))
    with pytest.raises(TableMismatch):
        verify_table("n7")


def test_base_block_format_round_trip():
    b = load_table("eg26")
    text = format_base_blocks(b, ["round trip"])
    again = parse_base_blocks(text)
    assert again == b
    with pytest.raises(FormatError):
        parse_base_blocks(text.replace("perm", "permx"))


def test_property_checks_on_plain_code():
    code, _ = verify_table("n7")
    assert not check_property_A(code)
    assert U(7) == len(code)


# ------------------------------------------------------------ properties

perms = st.integers(2, 12).flatmap(lambda n: st.tuples(st.just(n), st.permutations(range(n))))


@settings(max_examples=150)
@given(perms, st.data())
def test_orbit_length_divides_order(np_, data):
    n, images = np_
    perm = Permutation(tuple(images))
    k = data.draw(st.integers(1, n))
    support = data.draw(st.lists(st.integers(0, n - 1), min_size=k, max_size=k, unique=True))
    word = Codeword(tuple((x, 1 + (i % 2)) for i, x in enumerate(sorted(support))))
    orb = orbit(word, perm)
    assert perm.order() % len(orb) == 0
    assert len(set(orb)) == len(orb)


@settings(max_examples=100)
@given(perms, st.data())
def test_permutation_preserves_distance(np_, data):
    n, images = np_
    perm = Permutation(tuple(images))
    vec = st.lists(st.integers(0, 2), min_size=n, max_size=n)
    u, v = Codeword.from_vector(data.draw(vec)), Codeword.from_vector(data.draw(vec))
    assert l1_distance(perm.apply(u), perm.apply(v)) == l1_distance(u, v)


@settings(max_examples=60, deadline=None)
@given(perms, st.data())
def test_develop_is_idempotent(np_, data):
    n, images = np_
    perm = Permutation(tuple(images))
    p = CodeParams(n, 3, 2, 2)
    bases = data.draw(st.lists(st.integers(0, n - 1).map(lambda x: Codeword(((x, 2),))), min_size=1, max_size=3))
    once = develop(BaseBlockSet(p, tuple(bases), perm))
    twice = develop(BaseBlockSet(p, once.words, perm))
    assert once == twice


@settings(max_examples=60)
@given(perms)
def test_cycle_notation_round_trip(np_):
    n, images = np_
    perm = Permutation(tuple(images))
    assert parse_cycles(str(perm), n) == perm
    assert perm.compose(Permutation.identity(n)) == perm
