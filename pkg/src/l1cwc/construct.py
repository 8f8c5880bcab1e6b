"""Explicit constructions of constant-weight codes in the l1 metric.

Every ``build_*`` function verifies its output before returning it.
"""

from __future__ import annotations

import random
import time
from bisect import bisect_left
from dataclasses import dataclass, field
from itertools import combinations
from math import comb

from . import designs
from .bounds import B, U, d_quads_pairs, d_quads_triples, d_triples_pairs, known_value
from .core import UNBOUNDED, Code, CodeParams, Codeword, verify_code
from .designs import GDD, LeaveSpec, SetSystem
from .develop import check_property_A, check_property_B, develop, load_table, two_two_word


class ConstructionError(Exception):
    pass


class PackingUnavailable(ConstructionError):
    pass


class NoRecipe(ConstructionError):
    def __init__(self, n: int, nearest: list[int]):
        super().__init__(f"no recipe for n={n}; nearest covered lengths {nearest}")
        self.n = n
        self.nearest = nearest


class GroupCodeMismatch(ConstructionError):
    pass


class PropertyViolation(ConstructionError):
    def __init__(self, which: str, detail: str = ""):
        super().__init__(f"Property {which} violated" + (f": {detail}" if detail else ""))
        self.which = which


class Symbol2OnExtraPoint(ConstructionError):
    pass


class RulerUnavailable(ConstructionError):
    pass


class InfeasibleByCount(ValueError):
    """k marks need k(k-1) distinct nonzero residues but fewer exist."""


def _checked(code: Code) -> Code:
    rep = verify_code(code)
    if not rep.ok or rep.min_distance < code.params.d:
        raise ConstructionError(f"construction produced an invalid code: {rep.summary()}")
    return code


def _word(pairs) -> Codeword:
    return Codeword.from_mapping(dict(pairs))


def _ones(block) -> Codeword:
    return Codeword(tuple((x, 1) for x in sorted(block)))


# ------------------------------------------------------------- packings


def triple_packing(n: int, seed: int = 0) -> SetSystem:
    try:
        ss = designs.optimal_triple_packing(n, seed=seed)
    except designs.NotFound as e:
        raise PackingUnavailable(str(e)) from None
    if len(ss) != d_triples_pairs(n):
        raise PackingUnavailable(f"triple packing of size {len(ss)} < D({n},3,2)")
    return ss


_ORACLE_NODES = 3_000_000


def quad_pair_packing(n: int) -> SetSystem:
    """2-(n,4,1) packing of size D(n,4,2)."""
    target = d_quads_pairs(n)
    if n < 4:
        return SetSystem(n, [])
    if n in (11, 12, 13):
        plane = designs.cyclic_packing(13, [(0, 1, 3, 9)])
        ss = designs.delete_points(plane, range(n, 13))
    else:
        try:
            ss, _ = designs.max_packing(n, 4, 2, limit=3000, target=target, max_nodes=_ORACLE_NODES)
        except designs.TooLarge as e:
            raise PackingUnavailable(str(e)) from None
    if len(ss) != target:
        raise PackingUnavailable(f"found a 2-({n},4,1) packing of size {len(ss)}, need {target}")
    return ss


def steiner_quadruple_system(v: int) -> SetSystem | None:
    """SQS(v) from the boolean construction, doubling, or the exhaustive oracle."""
    if v in (1, 2):
        return SetSystem(v, [])
    if v % 6 not in (2, 4):
        return None
    if v & (v - 1) == 0:
        return designs.boolean_sqs(v.bit_length() - 1)
    if v % 2 == 0 and (v // 2) % 6 in (2, 4):
        half = steiner_quadruple_system(v // 2)
        if half is not None:
            return designs.sqs_double(half)
    if comb(v, 4) <= 300:
        ss, _ = designs.max_packing(v, 4, 3, limit=300, target=v * (v - 1) * (v - 2) // 24, max_nodes=_ORACLE_NODES)
        if len(ss) == v * (v - 1) * (v - 2) // 24:
            return ss
    return None


def quad_triple_packing(n: int) -> SetSystem:
    """3-(n,4,1) packing of size D(n,4,3)."""
    target = d_quads_triples(n)
    if n < 4:
        return SetSystem(n, [])
    ss = steiner_quadruple_system(n)
    if ss is None and n % 6 in (1, 3):
        big = steiner_quadruple_system(n + 1)
        if big is not None:
            ss = designs.delete_points(big, [n])
    if ss is None and comb(n, 4) <= 300:
        ss, _ = designs.max_packing(n, 4, 3, limit=300, target=target, max_nodes=_ORACLE_NODES)
    if ss is None or len(ss) != target:
        raise PackingUnavailable(f"no 3-({n},4,1) packing of size {target} available")
    return ss


# ----------------------------------------------------- codes over Z>=0


def build_z_w3_d4(n: int, seed: int = 0) -> Code:
    """Triple packing as 1^3 words plus the n words 3^1."""
    p = CodeParams(n, UNBOUNDED, 3, 4)
    words = [_ones(b) for b in triple_packing(n, seed).blocks]
    words += [_word({i: 3}) for i in range(n)]
    return _checked(Code(p, tuple(words), "2-(n,3,1) packing + singletons"))


def build_z_w4_d4(n: int) -> Code:
    """3-(n,4,1) packing as 1^4 words, every 2^2 word and every 4^1 word."""
    p = CodeParams(n, UNBOUNDED, 4, 4)
    words = [_ones(b) for b in quad_triple_packing(n).blocks]
    words += [_word({a: 2, b: 2}) for a, b in combinations(range(n), 2)]
    words += [_word({i: 4}) for i in range(n)]
    return _checked(Code(p, tuple(words), "3-(n,4,1) packing + pairs + singletons"))


def build_z_w4_d6(n: int) -> Code:
    """2-(n,4,1) packing as 1^4 words plus the n words 4^1."""
    p = CodeParams(n, UNBOUNDED, 4, 6)
    words = [_ones(b) for b in quad_pair_packing(n).blocks]
    words += [_word({i: 4}) for i in range(n)]
    return _checked(Code(p, tuple(words), "2-(n,4,1) packing + singletons"))


# ------------------------------------------------------- ternary, weight 3


def build_t3_w3_d4(n: int, seed: int = 0) -> Code:
    """Optimal (n,4,3)_3 code of size floor((n^2+3n)/6)."""
    p = CodeParams(n, 3, 3, 4)
    r = n % 6
    words: list[Codeword] = []
    if n == 1:
        recipe = "empty"
    elif r in (2, 4):
        # STS(n-1) plus a point at infinity carrying symbol 1
        inf = n - 1
        words += [_ones(b) for b in designs.sts(n - 1).blocks]
        words += [_word({i: 2, inf: 1}) for i in range(n - 1)]
        recipe = "STS(n-1) + infinity"
    elif r == 3:
        u = n // 3
        if u == 1:
            blocks, groups = [], [(0, 1, 2)]
        else:
            gdd = designs.gdd_3_type3u(u)
            blocks, groups = gdd.blocks, gdd.groups
        words += [_ones(b) for b in blocks]
        for a, b, c in groups:
            words += [_word({a: 1, b: 2}), _word({b: 1, c: 2}), _word({c: 1, a: 2})]
        recipe = "3-GDD of type 3^u"
    elif r in (1, 5):
        # leave is the cycle 0,1,...,n-2; infinity = n-1 is isolated
        try:
            pk = designs.packing_with_leave(n, 3, LeaveSpec.cycle_on_first(n - 1), seed=seed)
        except designs.NotFound as e:
            raise PackingUnavailable(str(e)) from None
        words += [_ones(b) for b in pk.blocks]
        words += [_word({i: 1, (i + 1) % (n - 1): 2}) for i in range(n - 1)]
        recipe = "cycle-leave triple packing"
    else:
        # packing on n-1 points with leave the 4-cycle (0,1,2,3); infinity = n-1
        inf = n - 1
        try:
            pk = designs.packing_with_leave(n - 1, 3, LeaveSpec.four_cycle_on_first(), seed=seed)
        except designs.NotFound as e:
            raise PackingUnavailable(str(e)) from None
        words += [_ones(b) for b in pk.blocks]
        words.append(_ones((1, 2, inf)))
        words += [_word(m) for m in ({0: 2, inf: 1}, {0: 1, 1: 2}, {2: 2, 3: 1}, {0: 1, 3: 2}, {3: 1, inf: 2})]
        words += [_word({i: 2, inf: 1}) for i in range(4, n - 1)]
        recipe = "4-cycle-leave triple packing + infinity"
    return _checked(Code(p, tuple(words), recipe))


# ------------------------------------------------------- ternary, weight 4


def build_t3_w4_d4(n: int) -> Code:
    """3-(n,4,1) packing as 1^4 words plus every 2^2 word."""
    p = CodeParams(n, 3, 4, 4)
    words = [_ones(b) for b in quad_triple_packing(n).blocks]
    words += [_word({a: 2, b: 2}) for a, b in combinations(range(n), 2)]
    return _checked(Code(p, tuple(words), "3-(n,4,1) packing + pairs"))


def _embed(code: Code, positions, n: int) -> list[Codeword]:
    """Relabel position i of ``code`` to ``positions[i]``."""
    if len(positions) != code.params.n:
        raise GroupCodeMismatch(f"code of length {code.params.n} placed on {len(positions)} points")
    return [u.relabel(positions) for u in code.words]


def _check_short_code(code: Code, like: CodeParams | None = None):
    rep = verify_code(code)
    if not rep.ok or rep.min_distance < code.params.d:
        raise GroupCodeMismatch(f"short code is not valid: {rep.summary()}")
    if like is not None and (code.params.q, code.params.w) != (like.q, like.w):
        raise GroupCodeMismatch("short codes disagree on alphabet or weight")


def gdd_fill(g: GDD, group_codes: dict[int, Code]) -> Code:
    """Blocks as all-ones words, plus a short code placed on every group."""
    sizes = {len(grp) for grp in g.groups}
    missing = sizes - set(group_codes)
    if missing:
        raise GroupCodeMismatch(f"no code for group sizes {sorted(missing)}")
    any_code = next(iter(group_codes.values()))
    p0 = any_code.params
    for size, c in group_codes.items():
        if c.params.n != size:
            raise GroupCodeMismatch(f"code of length {c.params.n} offered for groups of size {size}")
        _check_short_code(c, p0)
    bsizes = g.as_set_system().block_sizes()
    if bsizes and bsizes != {p0.w}:
        raise GroupCodeMismatch(f"block sizes {sorted(bsizes)} differ from weight {p0.w}")
    d = min(c.params.d for c in group_codes.values())
    p = CodeParams(g.point_count, p0.q, p0.w, d)
    words = [_ones(b) for b in g.blocks]
    for grp in g.groups:
        words += _embed(group_codes[len(grp)], grp, g.point_count)
    return _checked(Code(p, tuple(words), f"4-GDD {g.type_string()} filled with short codes"))


def normalize_extra_points(code: Code, t: int) -> Code:
    """Relabel a Property A/B code so its adjoinable point(s) come last.

    For t = 1 that is the position carrying no symbol 2; for t = 2 the
    support of the 2^2 word.
    """
    n = code.params.n
    if t == 1:
        twos = {x for u in code.words for x, v in u.entries if v == 2}
        free = [x for x in range(n) if x not in twos]
        if len(free) != 1:
            raise PropertyViolation("A", f"{len(free)} positions without symbol 2")
        extra = free
    else:
        zz = two_two_word(code)
        if zz is None:
            raise PropertyViolation("B", "no word of type 2^2")
        extra = list(zz.support)
    order = [x for x in range(n) if x not in extra] + extra
    pos = {x: i for i, x in enumerate(order)}
    return code.with_words([u.relabel(pos) for u in code.words])


def gdd_fill_extra(g: GDD, t: int, group_code: Code, tail_code: Code, tail_group: int | None = None) -> Code:
    """Fill a 4-GDD of type g^u m^1 after adjoining t in {1, 2} points to every group.

    The adjoined points are the last t positions of ``group_code`` and
    ``tail_code``.  For t = 2 the shared 2^2 word on the adjoined pair is
    kept once, through the tail code.  ``tail_code`` has length t when
    the GDD has no tail group.
    """
    if t not in (1, 2):
        raise ValueError("t must be 1 or 2")
    which = "A" if t == 1 else "B"
    check = check_property_A if t == 1 else check_property_B
    if not check(group_code):
        raise PropertyViolation(which)
    gsize = group_code.params.n - t
    extra_local = list(range(gsize, gsize + t))
    if t == 2:
        zz = two_two_word(group_code)
        if list(zz.support) != extra_local:
            raise PropertyViolation("B", f"2^2 word {zz} is not on the adjoined points")
    for u in group_code.words:
        if t == 1 and any(x in extra_local and v == 2 for x, v in u.entries):
            raise Symbol2OnExtraPoint(f"{u} puts symbol 2 on the adjoined point")
    _check_short_code(tail_code, group_code.params)
    m = tail_code.params.n - t
    if m < 0:
        raise GroupCodeMismatch("tail code shorter than the number of adjoined points")

    groups = list(g.groups)
    if tail_group is None and m > 0:
        odd = [i for i, grp in enumerate(groups) if len(grp) != gsize]
        if len(odd) == 1:
            tail_group = odd[0]
        elif not odd and m == gsize:
            tail_group = len(groups) - 1
        else:
            raise GroupCodeMismatch(f"cannot identify the tail group of size {m}")
    if tail_group is not None and len(groups[tail_group]) != m:
        raise GroupCodeMismatch(f"tail group has size {len(groups[tail_group])}, tail code expects {m}")
    N = g.point_count
    extra = list(range(N, N + t))
    p = CodeParams(N + t, group_code.params.q, group_code.params.w, group_code.params.d)
    words = [_ones(b) for b in g.blocks]
    body = [u for u in group_code.words if t == 1 or u != zz]
    body_code = group_code.with_words(body)
    for i, grp in enumerate(groups):
        if i == tail_group:
            continue
        if len(grp) != gsize:
            raise GroupCodeMismatch(f"group of size {len(grp)} but group code has {gsize} group points")
        words += _embed(body_code, list(grp) + extra, N + t)
    tail_points = (list(groups[tail_group]) if tail_group is not None else []) + extra
    words += _embed(tail_code, tail_points, N + t)
    code = Code(p, tuple(words), f"4-GDD {g.type_string()} + {t} adjoined point(s)")
    _checked(code)
    twos = [x for u in code.words for x, v in u.entries if v >= 2]
    if len(twos) != len(set(twos)):
        raise ConstructionError("symbol 2 repeated at a position")
    return code


# ------------------------------------------------- (n,6,4)_3 recipe table


@dataclass(frozen=True)
class Recipe:
    kind: str  # "table", "fill", "extra"
    table: str = ""
    gdd: str = ""
    group: object = None  # table id or length of the short code
    t: int = 0
    note: str = ""


def _recipes() -> dict[int, Recipe]:
    from .develop import manifest

    out: dict[int, Recipe] = {}
    for tid, entry in manifest().items():
        if tid.startswith("n"):
            out[entry["n"]] = Recipe("table", table=tid, note="bundled base codewords")
    out[13] = Recipe("table", table="eg13", note="bundled code with Property A")
    out[36] = Recipe("table", table="eg36", note="bundled base codewords")
    # 4-GDD recursions with uniform catalog GDDs
    out[28] = Recipe("fill", gdd="7^4", group="n7")
    out[42] = Recipe("fill", gdd="6^7", group="n6", note="best known, not proven optimal")
    out[60] = Recipe("fill", gdd="15^4", group="n15")
    out[108] = Recipe("fill", gdd="27^4", group="n27")
    out[144] = Recipe("fill", gdd="36^4", group="eg36")
    out[156] = Recipe("fill", gdd="39^4", group="n39")
    out[37] = Recipe("extra", gdd="9^4", group="n10", t=1)
    out[49] = Recipe("extra", gdd="12^4", group="eg13", t=1)
    out[97] = Recipe("extra", gdd="24^4", group="n25", t=1)
    out[145] = Recipe("extra", gdd="36^4", group=37, t=1)
    out[110] = Recipe("extra", gdd="27^4", group="n29", t=2)
    out[146] = Recipe("extra", gdd="36^4", group="n38", t=2)
    out[158] = Recipe("extra", gdd="39^4", group="n41", t=2)
    return out


def covered_lengths() -> list[int]:
    return sorted(_recipes())


def recipe_for(n: int) -> Recipe:
    table = _recipes()
    if n not in table:
        cov = sorted(table)
        i = bisect_left(cov, n)
        nearest = sorted(cov[max(i - 2, 0): i + 2], key=lambda m: (abs(m - n), m))[:3]
        raise NoRecipe(n, sorted(nearest))
    return table[n]


def _short_code(ref) -> Code:
    if isinstance(ref, int):
        return build_t3_w4_d6(ref)
    return develop(load_table(ref))


def build_t3_w4_d6(n: int) -> Code:
    """(n,6,4)_3 code meeting the best known size, from the static recipe table."""
    r = recipe_for(n)
    if r.kind == "table":
        code = develop(load_table(r.table))
        src = f"table {r.table}"
    elif r.kind == "fill":
        g = designs.catalog(r.gdd)
        short = _short_code(r.group)
        code = gdd_fill(g, {short.params.n: short})
        src = f"4-GDD {r.gdd} filled with {r.group}"
    else:
        g = designs.catalog(r.gdd)
        short = normalize_extra_points(_short_code(r.group), r.t)
        gsize = short.params.n - r.t
        m = g.point_count - gsize * sum(1 for grp in g.groups if len(grp) == gsize)
        tail = develop(load_table(f"n{m + r.t}"))
        code = gdd_fill_extra(g, r.t, short, tail)
        src = f"4-GDD {r.gdd} + {r.t} point(s), groups from {r.group}"
    code = _checked(code)
    kv = known_value(code.params)
    want = kv.hi if kv.kind == "exact" else kv.lo
    if len(code) != want:
        raise ConstructionError(f"recipe for n={n} gave {len(code)} words, expected {want}")
    return code.with_words(code.words, src + (f"; {r.note}" if r.note else ""))


# ----------------------------------------------- distance 2w-2, general w


@dataclass(frozen=True)
class Ruler:
    n: int
    marks: tuple[int, ...]

    def differences(self) -> list[int]:
        return [(a - b) % self.n for a in self.marks for b in self.marks if a != b]

    def is_valid(self) -> bool:
        d = self.differences()
        return 0 not in d and len(d) == len(set(d))


@dataclass
class Graph:
    vertex_count: int
    edges: set = field(default_factory=set)

    def add(self, a: int, b: int):
        if a == b:
            raise ValueError("loops not allowed")
        self.edges.add((min(a, b), max(a, b)))

    def degrees(self) -> list[int]:
        deg = [0] * self.vertex_count
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return deg

    def masks(self) -> list[int]:
        adj = [0] * self.vertex_count
        for a, b in self.edges:
            adj[a] |= 1 << b
            adj[b] |= 1 << a
        return adj

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls(n, set(combinations(range(n), 2)))


def golomb_ruler(n: int, k: int, budget: int = 1_000_000) -> Ruler:
    """First modular Golomb ruler with k marks mod n, marks starting at 0."""
    if k * (k - 1) > n - 1:
        raise InfeasibleByCount(f"{k} marks need {k * (k - 1)} differences, only {n - 1} nonzero residues mod {n}")
    if k <= 1:
        return Ruler(n, tuple(range(k)))
    nodes = 0

    def extend(marks: list[int], used: set[int]):
        nonlocal nodes
        if len(marks) == k:
            return list(marks)
        for c in range(marks[-1] + 1, n):
            nodes += 1
            if nodes > budget:
                raise designs.NotFound(f"no ({n},{k}) ruler found within budget")
            new = set()
            ok = True
            for a in marks:
                for diff in ((c - a) % n, (a - c) % n):
                    if diff in used or diff in new:
                        ok = False
                        break
                    new.add(diff)
                if not ok:
                    break
            if ok:
                marks.append(c)
                found = extend(marks, used | new)
                if found:
                    return found
                marks.pop()
        return None

    found = extend([0], set())
    if found is None:
        raise designs.NotFound(f"no ({n},{k}) modular Golomb ruler exists")
    return Ruler(n, tuple(found))


def _find_clique(adj: list[int], v: int, size: int, order) -> list[int] | None:
    def rec(C, P):
        if len(C) == size:
            return list(C)
        if bin(P).count("1") < size - len(C):
            return None
        for u in order:
            if P >> u & 1:
                C.append(u)
                r = rec(C, P & adj[u])
                C.pop()
                if r:
                    return r
                P &= ~(1 << u)
        return None

    return rec([v], adj[v])


def clique_packing(graph: Graph, w: int, *, seed: int = 0, iterations: int = 2000,
                   deadline: float | None = None) -> list[tuple[int, ...]]:
    """Edge-disjoint K_w's in ``graph``: randomized greedy, then remove-and-refill moves."""
    rng = random.Random(seed)
    n = graph.vertex_count
    adj = graph.masks()

    def remove(block):
        for a, b in combinations(block, 2):
            adj[a] &= ~(1 << b)
            adj[b] &= ~(1 << a)

    def restore(block):
        for a, b in combinations(block, 2):
            adj[a] |= 1 << b
            adj[b] |= 1 << a

    def fill(vertices):
        found = []
        order = list(range(n))
        for v in vertices:
            while True:
                rng.shuffle(order)
                c = _find_clique(adj, v, w, order)
                if c is None:
                    break
                c = tuple(sorted(c))
                remove(c)
                found.append(c)
        return found

    verts = list(range(n))
    rng.shuffle(verts)
    blocks = fill(verts)
    for _ in range(iterations):
        if deadline is not None and time.monotonic() > deadline:
            break
        if not blocks:
            break
        k = min(len(blocks), rng.choice((1, 2, 2, 3)))
        drop = rng.sample(range(len(blocks)), k)
        dropped = [blocks[i] for i in drop]
        kept = [b for i, b in enumerate(blocks) if i not in set(drop)]
        for b in dropped:
            restore(b)
        touched = sorted({x for b in dropped for x in b})
        rng.shuffle(touched)
        added = fill(touched)
        if len(added) >= k:
            blocks = kept + added
        else:
            for b in added:
                restore(b)
            for b in dropped:
                remove(b)
    return sorted(blocks)


@dataclass(frozen=True)
class GeneralResult:
    code: Code
    upper: int
    ruler: Ruler
    blocks: int

    @property
    def shortfall(self) -> int:
        return self.upper - len(self.code)


def build_t3_general(n: int, w: int, budget: int = 2000, seed: int = 0) -> GeneralResult:
    """(n, 2w-2, w)_3 code: shifted ruler words of type 1^(w-2) 2^1 plus a K_w packing of the rest."""
    if w < 3:
        raise ValueError("w >= 3 required")
    try:
        ruler = golomb_ruler(n, w - 1)
    except (designs.NotFound, InfeasibleByCount) as e:
        raise RulerUnavailable(str(e)) from None
    a = ruler.marks
    words = []
    S = Graph(n)
    for i in range(n):
        pts = [(x + i) % n for x in a]
        words.append(_word({pts[0]: 2, **{x: 1 for x in pts[1:]}}))
        for x, y in combinations(pts, 2):
            S.add(x, y)
    G = Graph(n, set(combinations(range(n), 2)) - S.edges)
    blocks = clique_packing(G, w, seed=seed, iterations=budget)
    words += [_ones(b) for b in blocks]
    p = CodeParams(n, 3, w, 2 * w - 2)
    code = _checked(Code(p, tuple(words), f"ruler {list(a)} mod {n} + greedy K_{w} packing"))
    return GeneralResult(code, B(n, w) + n, ruler, len(blocks))
