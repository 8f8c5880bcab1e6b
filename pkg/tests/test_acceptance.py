"""Acceptance checks, one per criterion; each prints a single PASS/FAIL line.

Run under pytest (lines appear in the -v log) or directly:
``python3 tests/test_acceptance.py``.
"""

import random
import sys
import time
from functools import lru_cache

import pytest

from l1cwc import construct as C
from l1cwc import designs
from l1cwc.bounds import B, U, d_quads_pairs, d_quads_triples, d_triples_pairs, known_value, z_cap
from l1cwc.core import Code, CodeParams, Codeword, UNBOUNDED, distance_via_overlap, l1_distance, type_census, verify_code
from l1cwc.develop import check_property_A, check_property_B, develop, load_table, manifest, two_two_word, verify_table
from l1cwc.search import SearchConfig, code_of_size, max_code_exact


def _valid(code: Code) -> bool:
    rep = verify_code(code)
    return rep.ok and rep.min_distance >= code.params.d


def _line(num, ok, detail):
    return f"[acceptance {num:>2}] {'PASS' if ok else 'FAIL'}  {detail}"


# ---------------------------------------------------------------- shared data


@lru_cache(maxsize=None)
def table_codes():
    return {tid: verify_table(tid)[0] for tid in sorted(manifest())}


@lru_cache(maxsize=None)
def small_search_results():
    cfg = SearchConfig(time_limit=600)
    out = {}
    for n in range(1, 10):
        t0 = time.monotonic()
        res = max_code_exact(CodeParams(n, 3, 4, 6), cfg)
        out[n] = (res, time.monotonic() - t0)
    return out


@lru_cache(maxsize=None)
def fill_codes():
    g67 = designs.catalog("6^7")
    c42 = C.gdd_fill(g67, {6: develop(load_table("n6"))})
    g12 = designs.catalog("12^4")
    group = C.normalize_extra_points(develop(load_table("eg13")), 1)
    c49 = C.gdd_fill_extra(g12, 1, group, Code(CodeParams(1, 3, 4, 6), ()))
    return c42, c49


# ---------------------------------------------------------------- criteria


def check_1():
    """Ternary weight 3: n in [4,60] hits floor((n^2+3n)/6) exactly, under 5 minutes."""
    t0 = time.monotonic()
    bad = []
    for n in range(4, 61):
        code = C.build_t3_w3_d4(n)
        if len(code) != (n * n + 3 * n) // 6 or not _valid(code):
            bad.append(n)
    elapsed = time.monotonic() - t0
    spots = {n: len(C.build_t3_w3_d4(n)) for n in (6, 7, 8, 9)}
    ok = not bad and elapsed < 300 and spots == {6: 9, 7: 11, 8: 14, 9: 18}
    return ok, f"n=4..60 exact sizes, failures {bad}, {elapsed:.1f}s (< 300s), spot values {spots}"


def check_2():
    """Every bundled table develops to a verified code of its manifest size, under 1 minute."""
    t0 = time.monotonic()
    table_codes.cache_clear()
    codes = table_codes()
    elapsed = time.monotonic() - t0
    sizes_ok = all(len(codes[t]) == manifest()[t]["size"] and _valid(codes[t]) for t in codes)
    eg36, eg13, eg26, n12 = codes["eg36"], codes["eg13"], codes["eg26"], codes["n12"]
    named = (len(eg36) == 123 and verify_code(eg36).min_distance >= 6
             and len(eg13) == 19 and check_property_A(eg13)
             and check_property_B(eg26) and two_two_word(eg26) == Codeword.parse("{24_2,25_2}")
             and len(n12) == 16)
    ok = sizes_ok and named and elapsed < 60
    return ok, (f"{len(codes)} tables verified at manifest size; eg36=123, eg13=19 with A, eg26 with B on (24 25), "
                f"n12=16; {elapsed:.1f}s (< 60s)")


def check_3():
    """Exact search reproduces n=1..9, each proven inside 10 minutes; no size-4 code at n=5."""
    want = [0, 1, 1, 2, 3, 5, 7, 8, 10]
    results = small_search_results()
    got = [len(results[n][0].code) for n in range(1, 10)]
    proven = all(results[n][0].proven_optimal for n in range(1, 10))
    slowest = max(t for _, t in results.values())
    none4, decided = code_of_size(CodeParams(5, 3, 4, 6), 4, SearchConfig(time_limit=600))
    ok = got == want and proven and slowest < 600 and none4 is None and decided
    return ok, (f"sizes {got} (want {want}), all proven={proven}, slowest {slowest:.1f}s; "
                f"size 4 at n=5 ruled out={none4 is None and decided}")


def check_4():
    """Packing oracle equals the closed forms: D(n,3,2) for n<=9, D(n,4,3) for n<=8."""
    tri = {n: designs.brute_force_packing_number(n, 3, 2) for n in range(3, 10)}
    quad = {n: designs.brute_force_packing_number(n, 4, 3) for n in range(4, 9)}
    bad = [("D3", n) for n, v in tri.items() if v != d_triples_pairs(n)]
    bad += [("D43", n) for n, v in quad.items() if v != d_quads_triples(n)]
    ok = not bad and tri[5] == 2 and tri[7] == 7
    return ok, f"D(n,3,2) n=3..9 {list(tri.values())}, D(n,4,3) n=4..8 {list(quad.values())}, mismatches {bad}"


def _random_word(rng, n, top, w):
    vec = [0] * n
    left = w
    while left:
        i = rng.randrange(n)
        if vec[i] < top:
            vec[i] += 1
            left -= 1
    return Codeword.from_vector(vec)


def check_5(pairs_per_point=10_000):
    """Distance identity on random equal-weight pairs over the full grid."""
    rng = random.Random(20240601)
    points = mismatches = 0
    for n in range(1, 21):
        for q in (2, 3, UNBOUNDED):
            top = 6 if q == UNBOUNDED else q - 1
            for w in range(0, 7):
                if w > n * top:
                    continue
                points += 1
                for _ in range(pairs_per_point):
                    u, v = _random_word(rng, n, top, w), _random_word(rng, n, top, w)
                    if distance_via_overlap(u, v) != l1_distance(u, v):
                        mismatches += 1
    return mismatches == 0, f"{points} grid points x {pairs_per_point} pairs, {mismatches} mismatches (tolerance 0)"


def check_6():
    """4-GDD fills: 6^7 gives 161 at n=42; 12^4 plus one point with eg13 gives U(49)."""
    c42, c49 = fill_codes()
    lower42 = known_value(CodeParams(42, 3, 4, 6)).lo
    ok = len(c42) == 161 == lower42 and _valid(c42) and len(c49) == U(49) and _valid(c49)
    return ok, f"n=42 size {len(c42)} (lower bound {lower42}); n=49 size {len(c49)} (U(49)={U(49)}), both verified"


def check_7():
    """Codes over Z>=0: weight 3 reaches D(n,3,2)+n for n<=30, weight 4 reaches D(n,4,2)+n for n<=13."""
    bad = []
    for n in range(1, 31):
        code = C.build_z_w3_d4(n)
        if len(code) != d_triples_pairs(n) + n or not _valid(code):
            bad.append(("w3", n))
    for n in range(1, 14):
        code = C.build_z_w4_d6(n)
        if len(code) != d_quads_pairs(n) + n or not _valid(code):
            bad.append(("w4", n))
    return not bad, f"w=3 n=1..30 and w=4 n=1..13 at exact sizes, failures {bad}"


def check_8():
    """Ruler + K_w packing: valid, size >= n and <= B(n)+n for w=5; n=13, w=4 shortfall reported."""
    rows = []
    ok = True
    for n in (41, 45, 61, 81, 101):
        res = C.build_t3_general(n, 5)
        rep = verify_code(res.code)
        good = rep.ok and rep.min_distance >= 8 and n <= len(res.code) <= B(n, 5) + n
        ok &= good
        rows.append(f"n={n}:{len(res.code)}/{B(n, 5) + n}")
    res13 = C.build_t3_general(13, 4)
    exact13 = known_value(CodeParams(13, 3, 4, 6)).value
    ok &= _valid(res13.code)
    return ok, (f"w=5 sizes (achieved/upper) {' '.join(rows)}; w=4 n=13 gives {len(res13.code)} vs exact {exact13}, "
                f"shortfall {exact13 - len(res13.code)} (reported only)")


def check_9():
    """Counting inequalities hold on every (n,6,4)_3 code produced here."""
    codes = list(table_codes().values())
    codes += [r.code for r, _ in small_search_results().values()]
    codes += list(fill_codes())
    codes += [C.build_t3_w4_d6(n) for n in C.covered_lengths()]
    bad = []
    for code in codes:
        if not _valid(code):
            bad.append((code.params.n, "invalid"))
            continue
        n = code.params.n
        c = type_census(code)
        if 6 * c.x + 3 * c.y + c.z > n * (n - 1) // 2 or c.y + 2 * c.z > n:
            bad.append((n, "census"))
        if len(code) == U(n) and c.z > z_cap(n):
            bad.append((n, "z cap"))
    return not bad, f"{len(codes)} codes audited, violations {bad}"


def check_10(budget=1200.0):
    """Stretch: exact search closes n=10, 11, 12 at 12, 14, 16."""
    want = {10: 12, 11: 14, 12: 16}
    parts = []
    closed = True
    for n, size in want.items():
        res = max_code_exact(CodeParams(n, 3, 4, 6), SearchConfig(time_limit=budget))
        if res.proven_optimal:
            closed &= len(res.code) == size
            parts.append(f"n={n}:{len(res.code)} proven in {res.elapsed:.1f}s")
        else:
            closed = False
            parts.append(f"n={n}: budget exhausted at {len(res.code)} words after {res.elapsed:.0f}s")
    return closed, "stretch, non-blocking; " + "; ".join(parts)


CHECKS = [check_1, check_2, check_3, check_4, check_5, check_6, check_7, check_8, check_9, check_10]


def _run(num, capsys):
    ok, detail = CHECKS[num - 1]()
    with capsys.disabled():
        print("\n" + _line(num, ok, detail))
    return ok, detail


@pytest.mark.parametrize("num", range(1, 10))
def test_acceptance(num, capsys):
    ok, detail = _run(num, capsys)
    assert ok, detail


def test_acceptance_stretch(capsys):
    ok, detail = _run(10, capsys)
    if not ok:
        pytest.xfail(detail)


if __name__ == "__main__":
    failed = 0
    for i, check in enumerate(CHECKS, 1):
        ok, detail = check()
        print(_line(i, ok, detail), flush=True)
        failed += not ok and i != 10
    sys.exit(1 if failed else 0)
