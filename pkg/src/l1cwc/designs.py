"""Set systems, packings and group divisible designs.

Points are always ``0..n-1``.  Where a construction has a distinguished
"infinity" point it is the largest index ``n-1``.
"""

from __future__ import annotations

import os
import random
import re
from dataclasses import dataclass
from importlib import resources
from itertools import combinations
from math import comb
from pathlib import Path
from typing import Iterable, Sequence

from .clique import max_clique


class DesignError(Exception):
    pass


class BadOrder(DesignError, ValueError):
    pass


class InconsistentSpec(DesignError, ValueError):
    pass


class NotFound(DesignError):
    """A search ran out of budget; says nothing about existence."""


class TooLarge(DesignError, ValueError):
    pass


class DesignParseError(DesignError, ValueError):
    pass


class VerificationError(DesignError):
    pass


def _norm_blocks(blocks: Iterable[Iterable[int]]) -> tuple[tuple[int, ...], ...]:
    return tuple(sorted(tuple(sorted(b)) for b in blocks))


@dataclass(frozen=True)
class SetSystem:
    point_count: int
    blocks: tuple[tuple[int, ...], ...]

    def __init__(self, point_count: int, blocks: Iterable[Iterable[int]]):
        object.__setattr__(self, "point_count", point_count)
        object.__setattr__(self, "blocks", _norm_blocks(blocks))
        for b in self.blocks:
            if b and (b[0] < 0 or b[-1] >= point_count):
                raise DesignError(f"block {b} outside [0,{point_count})")

    def __len__(self):
        return len(self.blocks)

    def block_sizes(self) -> set[int]:
        return {len(b) for b in self.blocks}


@dataclass(frozen=True)
class LeaveGraph:
    point_count: int
    edges: frozenset

    def degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e)

    def is_cycle(self) -> bool:
        """True when the edges form one cycle (isolated vertices allowed)."""
        if not self.edges:
            return False
        verts = {v for e in self.edges for v in e}
        if any(self.degree(v) != 2 for v in verts):
            return False
        adj = {v: [] for v in verts}
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        start = next(iter(verts))
        seen = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == len(verts)


@dataclass(frozen=True)
class PackingCheck:
    ok: bool
    leave: object  # LeaveGraph for t = 2, sorted list of t-subsets otherwise
    repeated: tuple | None = None  # first repeated t-subset


@dataclass(frozen=True)
class GDD:
    point_count: int
    groups: tuple[tuple[int, ...], ...]
    blocks: tuple[tuple[int, ...], ...]

    def __init__(self, point_count, groups, blocks):
        object.__setattr__(self, "point_count", point_count)
        object.__setattr__(self, "groups", tuple(tuple(sorted(g)) for g in groups))
        object.__setattr__(self, "blocks", _norm_blocks(blocks))

    def type_string(self) -> str:
        sizes: dict[int, int] = {}
        for g in self.groups:
            sizes[len(g)] = sizes.get(len(g), 0) + 1
        return " ".join(f"{g}^{c}" for g, c in sorted(sizes.items(), key=lambda kv: (-kv[1], kv[0])))

    def as_set_system(self) -> SetSystem:
        return SetSystem(self.point_count, self.blocks)


# --------------------------------------------------------------- verification


def verify_packing(ss: SetSystem, t: int = 2) -> PackingCheck:
    seen: set[tuple[int, ...]] = set()
    repeated = None
    for b in ss.blocks:
        for sub in combinations(b, t):
            if sub in seen:
                if repeated is None:
                    repeated = sub
            else:
                seen.add(sub)
    uncovered = [s for s in combinations(range(ss.point_count), t) if s not in seen]
    leave = LeaveGraph(ss.point_count, frozenset(uncovered)) if t == 2 else uncovered
    return PackingCheck(repeated is None, leave, repeated)


def verify_gdd(g: GDD, K: Iterable[int]) -> bool:
    K = set(K)
    pts = sorted(p for grp in g.groups for p in grp)
    if pts != list(range(g.point_count)):
        return False
    group_of = {p: i for i, grp in enumerate(g.groups) for p in grp}
    covered: set[tuple[int, int]] = set()
    for b in g.blocks:
        if len(b) not in K or len(set(b)) != len(b):
            return False
        for x, y in combinations(b, 2):
            if x < 0 or y >= g.point_count:
                return False
            if group_of[x] == group_of[y] or (x, y) in covered:
                return False
            covered.add((x, y))
    cross = comb(g.point_count, 2) - sum(comb(len(grp), 2) for grp in g.groups)
    return len(covered) == cross


# ------------------------------------------------------------- constructions


def _point(x: int, i: int) -> int:
    return 3 * x + i


def _bose_blocks(v: int) -> tuple[list[tuple[int, ...]], list[tuple[int, ...]]]:
    """Bose triples on Z_v x Z_3 (v odd): (group blocks, other blocks)."""
    half = (v + 1) // 2
    groups = [(_point(x, 0), _point(x, 1), _point(x, 2)) for x in range(v)]
    others = []
    for x, y in combinations(range(v), 2):
        z = ((x + y) * half) % v
        for i in range(3):
            others.append((_point(x, i), _point(y, i), _point(z, (i + 1) % 3)))
    return groups, others


def _skolem_blocks(t: int) -> list[tuple[int, ...]]:
    """Skolem STS(6t+1) on Z_2t x Z_3 plus infinity (= 6t)."""
    m = 2 * t
    inf = 6 * t

    def op(x, y):
        s = (x + y) % m
        return s // 2 if s % 2 == 0 else (s - 1) // 2 + t

    blocks = [(_point(x, 0), _point(x, 1), _point(x, 2)) for x in range(t)]
    for x in range(t):
        for i in range(3):
            blocks.append((inf, _point(x + t, i), _point(x, (i + 1) % 3)))
    for x, y in combinations(range(m), 2):
        z = op(x, y)
        for i in range(3):
            blocks.append((_point(x, i), _point(y, i), _point(z, (i + 1) % 3)))
    return blocks


def sts(n: int) -> SetSystem:
    """Steiner triple system of order n (Bose for n = 3 mod 6, Skolem for 1 mod 6)."""
    if n == 1:
        return SetSystem(1, [])
    if n < 3 or n % 6 not in (1, 3):
        raise BadOrder(f"no STS of order {n}")
    if n % 6 == 3:
        groups, others = _bose_blocks(n // 3)
        return SetSystem(n, groups + others)
    return SetSystem(n, _skolem_blocks((n - 1) // 6))


def gdd_3_type3u(u: int) -> GDD:
    """3-GDD of type 3^u, groups {3i, 3i+1, 3i+2}."""
    if u < 3 or u % 2 == 0:
        raise BadOrder(f"no 3-GDD of type 3^{u}")
    groups, others = _bose_blocks(u)
    return GDD(3 * u, groups, others)


# Latin squares: x + k*y over GF(p^a); products of these stay mutually orthogonal.

def _prime_power(q: int) -> tuple[int, int] | None:
    for p in range(2, q + 1):
        if q % p == 0:
            a, r = 0, q
            while r % p == 0:
                r //= p
                a += 1
            return (p, a) if r == 1 else None
    return None


def _gf_tables(q: int):
    """Addition and multiplication tables of GF(q), elements 0..q-1."""
    p, a = _prime_power(q)
    if a == 1:
        add = [[(x + y) % q for y in range(q)] for x in range(q)]
        mul = [[(x * y) % q for y in range(q)] for x in range(q)]
        return add, mul
    # polynomial basis, digits base p; find a monic irreducible of degree a
    def digits(x):
        return [(x // p**i) % p for i in range(a)]

    def undigits(ds):
        return sum(d * p**i for i, d in enumerate(ds))

    def polymulmod(xs, ys, mod):
        prod = [0] * (2 * a - 1)
        for i, xi in enumerate(xs):
            for j, yj in enumerate(ys):
                prod[i + j] = (prod[i + j] + xi * yj) % p
        for k in range(2 * a - 2, a - 1, -1):
            c = prod[k]
            if c:
                for i in range(a + 1):
                    prod[k - a + i] = (prod[k - a + i] - c * mod[i]) % p
        return prod[:a]

    def irreducible(mod):
        elems = [digits(x) for x in range(q)]
        nonzero = [e for e in elems if any(e)]
        one = [1] + [0] * (a - 1)
        # field iff every nonzero element has an inverse
        for e in nonzero:
            if not any(polymulmod(e, f, mod) == one for f in nonzero):
                return False
        return True

    mod = None
    for tail in range(p**a):
        cand = digits(tail) + [1]
        if irreducible(cand):
            mod = cand
            break
    add = [[undigits([(u + v) % p for u, v in zip(digits(x), digits(y))]) for y in range(q)] for x in range(q)]
    mul = [[undigits(polymulmod(digits(x), digits(y), mod)) for y in range(q)] for x in range(q)]
    return add, mul


def mols(n: int, count: int) -> list[list[list[int]]]:
    """``count`` mutually orthogonal Latin squares of order n (MacNeish product)."""
    factors = []
    r = n
    p = 2
    while r > 1:
        if r % p == 0:
            q = 1
            while r % p == 0:
                r //= p
                q *= p
            factors.append(q)
        p += 1
    if any(q - 1 < count for q in factors):
        raise BadOrder(f"MacNeish product gives fewer than {count} MOLS of order {n}")
    squares = [[[0]] for _ in range(count)]
    size = 1
    for q in factors:
        add, mul = _gf_tables(q)
        new = []
        for k, sq in enumerate(squares):
            lam = k + 1
            small = [[add[x][mul[lam][y]] for y in range(q)] for x in range(q)]
            big = [[0] * (size * q) for _ in range(size * q)]
            for x1 in range(size):
                for y1 in range(size):
                    for x2 in range(q):
                        for y2 in range(q):
                            big[x1 * q + x2][y1 * q + y2] = sq[x1][y1] * q + small[x2][y2]
            new.append(big)
        squares = new
        size *= q
    return squares


def transversal_gdd(g: int, k: int = 4) -> GDD:
    """k-GDD of type g^k (a transversal design) from k-2 MOLS of order g.

    Group j holds points ``j*g .. j*g+g-1``.
    """
    squares = mols(g, k - 2)
    groups = [tuple(range(j * g, (j + 1) * g)) for j in range(k)]
    blocks = []
    for r in range(g):
        for c in range(g):
            blocks.append((r, g + c) + tuple((2 + i) * g + squares[i][r][c] for i in range(k - 2)))
    return GDD(k * g, groups, blocks)


def cyclic_gdd(n: int, base_blocks: Sequence[Sequence[int]], group_count: int) -> GDD:
    """Develop base blocks mod n; groups are the residue classes mod ``group_count``."""
    blocks = {tuple(sorted((b + s) % n for b in base)) for base in base_blocks for s in range(n)}
    groups = [tuple(range(r, n, group_count)) for r in range(group_count)]
    return GDD(n, groups, blocks)


# ------------------------------------------------------ prescribed-leave packings


@dataclass(frozen=True)
class LeaveSpec:
    kind: str  # "empty", "cycle", "four_cycle", "edges"
    length: int = 0
    edges: frozenset = frozenset()

    @classmethod
    def empty(cls):
        return cls("empty")

    @classmethod
    def cycle_on_first(cls, length: int):
        return cls("cycle", length)

    @classmethod
    def four_cycle_on_first(cls):
        return cls("cycle", 4)

    @classmethod
    def explicit(cls, edges):
        return cls("edges", edges=frozenset(tuple(sorted(e)) for e in edges))

    def edge_set(self, n: int) -> frozenset:
        if self.kind == "empty":
            return frozenset()
        if self.kind == "cycle":
            L = self.length
            if L < 3 or L > n:
                raise InconsistentSpec(f"cycle of length {L} on {n} points")
            return frozenset(tuple(sorted((i, (i + 1) % L))) for i in range(L))
        for a, b in self.edges:
            if a == b or not (0 <= a < n and 0 <= b < n):
                raise InconsistentSpec(f"bad leave edge {(a, b)}")
        return self.edges


def _check_triangle_spec(n: int, leave: frozenset) -> None:
    if (comb(n, 2) - len(leave)) % 3:
        raise InconsistentSpec(f"{comb(n, 2)} - {len(leave)} pairs is not a multiple of 3")
    deg = [n - 1] * n
    for a, b in leave:
        deg[a] -= 1
        deg[b] -= 1
    odd = [v for v in range(n) if deg[v] % 2]
    if odd:
        raise InconsistentSpec(f"points {odd[:5]} would have odd residual degree")


def triangle_decomposition(
    n: int, leave: frozenset, *, seed: int = 0, budget: int = 2_000_000, restarts: int = 20
) -> list[tuple[int, int, int]]:
    """Hill-climbing for triangles covering every pair of [0,n) outside ``leave`` once."""
    _check_triangle_spec(n, leave)
    target = (comb(n, 2) - len(leave)) // 3
    if target == 0:
        return []
    in_graph = [[x != y for y in range(n)] for x in range(n)]
    for a, b in leave:
        in_graph[a][b] = in_graph[b][a] = False
    rng = random.Random(seed)
    per_run = max(budget // max(restarts, 1), 1)
    for _ in range(max(restarts, 1)):
        # third[x][y] = z when pair xy is covered by block {x,y,z}
        third = [[-1] * n for _ in range(n)]
        free = [set(y for y in range(n) if in_graph[x][y]) for x in range(n)]
        live = set(x for x in range(n) if free[x])
        count = 0
        for _step in range(per_run):
            if count == target:
                break
            x = rng.choice(tuple(live))
            fx = tuple(free[x])
            y, z = rng.sample(fx, 2)
            if not in_graph[y][z]:
                pairs = [(a, b) for a, b in combinations(fx, 2) if in_graph[a][b]]
                if not pairs:
                    continue
                y, z = rng.choice(pairs)
            w = third[y][z]
            if w >= 0:
                # evict block {y,z,w}
                for a, b in ((y, z), (y, w), (z, w)):
                    third[a][b] = third[b][a] = -1
                    free[a].add(b)
                    free[b].add(a)
                    live.add(a)
                    live.add(b)
                count -= 1
            for a, b, c in ((x, y, z), (x, z, y), (y, z, x)):
                third[a][b] = third[b][a] = c
                free[a].discard(b)
                free[b].discard(a)
            for a in (x, y, z):
                if not free[a]:
                    live.discard(a)
            count += 1
        if count == target:
            blocks = {tuple(sorted((x, y, third[x][y]))) for x in range(n) for y in range(x + 1, n) if third[x][y] >= 0}
            return sorted(blocks)
    raise NotFound(f"no triangle decomposition found within budget (n={n})")


def packing_with_leave(n: int, k: int = 3, shape: LeaveSpec | None = None, budget: int = 2_000_000, seed: int = 0) -> SetSystem:
    """2-(n,3,1) packing whose leave graph is exactly ``shape``."""
    if k != 3:
        raise DesignError("prescribed-leave search is implemented for triples only")
    if budget <= 0:
        raise ValueError("budget must be positive")
    shape = shape or LeaveSpec.empty()
    leave = shape.edge_set(n)
    if shape.kind == "empty" and n % 6 in (1, 3):
        return sts(n)
    blocks = triangle_decomposition(n, leave, seed=seed, budget=budget)
    return SetSystem(n, blocks)


def optimal_triple_packing(n: int, seed: int = 0, budget: int = 2_000_000) -> SetSystem:
    """A 2-(n,3,1) packing of the maximum size."""
    if n < 3:
        return SetSystem(n, [])
    r = n % 6
    if r in (1, 3):
        return sts(n)
    if r in (0, 2):
        # delete a point from STS(n+1): leave is a perfect matching
        big = sts(n + 1)
        return SetSystem(n, [b for b in big.blocks if n not in b])
    if r == 5:
        return packing_with_leave(n, 3, LeaveSpec.four_cycle_on_first(), budget, seed)
    # n = 4 mod 6: leave is a 3-star plus a perfect matching on the rest
    edges = [(0, 1), (0, 2), (0, 3)] + [(i, i + 1) for i in range(4, n, 2)]
    return packing_with_leave(n, 3, LeaveSpec.explicit(edges), budget, seed)


# ------------------------------------------------------- quadruple systems


def cyclic_packing(n: int, base_blocks: Sequence[Sequence[int]]) -> SetSystem:
    """Develop base blocks under x -> x+1 mod n."""
    return SetSystem(n, {tuple(sorted((b + s) % n for b in base)) for base in base_blocks for s in range(n)})


def delete_points(ss: SetSystem, points: Iterable[int]) -> SetSystem:
    """Drop every block meeting ``points``; relabel the rest to 0..n-k-1."""
    gone = set(points)
    keep = [x for x in range(ss.point_count) if x not in gone]
    new = {x: i for i, x in enumerate(keep)}
    return SetSystem(len(keep), [[new[x] for x in b] for b in ss.blocks if not gone.intersection(b)])


def boolean_sqs(k: int) -> SetSystem:
    """SQS(2^k): quadruples of GF(2)^k summing to zero."""
    n = 1 << k
    blocks = [(a, b, c, a ^ b ^ c) for a, b, c in combinations(range(n), 3) if (a ^ b ^ c) > c]
    return SetSystem(n, blocks)


def one_factorization(v: int) -> list[list[tuple[int, int]]]:
    """Round-robin 1-factorization of K_v, v even."""
    if v % 2:
        raise BadOrder("K_v has a 1-factorization only for even v")
    m = v - 1
    factors = []
    for r in range(m):
        f = [(r, m)] if v > 1 else []
        for i in range(1, v // 2):
            f.append(((r + i) % m, (r - i) % m))
        factors.append(f)
    return factors


def sqs_double(ss: SetSystem) -> SetSystem:
    """SQS(2v) from SQS(v): two copies plus one block per pair of edges in a common 1-factor."""
    v = ss.point_count
    blocks = [b for b in ss.blocks] + [tuple(x + v for x in b) for b in ss.blocks]
    for f in one_factorization(v):
        for a, b in f:
            for c, d in f:
                blocks.append((a, b, c + v, d + v))
    return SetSystem(2 * v, blocks)


# ---------------------------------------------------------------- exact oracle


def _packing_graph(n: int, k: int, t: int):
    cands = list(combinations(range(n), k))
    sets = [frozenset(c) for c in cands]
    adj = [0] * len(cands)
    for i in range(len(cands)):
        for j in range(i + 1, len(cands)):
            if len(sets[i] & sets[j]) < t:
                adj[i] |= 1 << j
                adj[j] |= 1 << i
    return cands, adj


def max_packing(n: int, k: int, t: int, *, limit: int = 800, target: int | None = None,
                max_nodes: int | None = None) -> tuple[SetSystem, bool]:
    """Exhaustive search for a largest t-(n,k,1) packing.

    Returns the packing and whether it is proven maximum.  ``target``
    stops the search once a packing of that size is found.
    """
    if k > n or t > k:
        return SetSystem(n, []), True
    if comb(n, k) > limit:
        raise TooLarge(f"C({n},{k}) = {comb(n, k)} candidate blocks exceeds limit {limit}")
    cands, adj = _packing_graph(n, k, t)
    # every nonempty packing is isomorphic to one containing {0..k-1}
    res = max_clique(adj, initial=[0], lower=[0], upper=target, max_nodes=max_nodes)
    proven = res.proven and (target is None or len(res.clique) < target)
    return SetSystem(n, [cands[i] for i in res.clique]), proven


def brute_force_packing_number(n: int, k: int, t: int, *, limit: int = 800) -> int:
    ss, proven = max_packing(n, k, t, limit=limit)
    assert proven
    return len(ss.blocks)


# ---------------------------------------------------------------- file format


def format_design(obj, comments: Sequence[str] = ()) -> str:
    lines = ["design v1"]
    lines.extend(f"# {c}" for c in comments)
    lines.append(f"points {obj.point_count}")
    if isinstance(obj, GDD):
        for g in obj.groups:
            lines.append("group " + " ".join(map(str, g)))
    for b in obj.blocks:
        lines.append("block " + " ".join(map(str, b)))
    return "\n".join(lines) + "\n"


def parse_design(text: str, *, check: bool = True, block_sizes: Iterable[int] | None = None):
    header = False
    points = None
    groups = []
    blocks = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not header:
            if line != "design v1":
                raise DesignParseError(f"line {lineno}: expected 'design v1'")
            header = True
            continue
        key, _, rest = line.partition(" ")
        try:
            nums = [int(x) for x in rest.split()]
        except ValueError:
            raise DesignParseError(f"line {lineno}: non-integer token") from None
        if key == "points":
            if len(nums) != 1:
                raise DesignParseError(f"line {lineno}: points takes one integer")
            points = nums[0]
        elif key == "group":
            groups.append(nums)
        elif key == "block":
            blocks.append(nums)
        else:
            raise DesignParseError(f"line {lineno}: unknown keyword {key!r}")
    if not header or points is None:
        raise DesignParseError("missing header or points line")
    for b in blocks + groups:
        if any(p < 0 or p >= points for p in b) or len(set(b)) != len(b):
            raise DesignParseError(f"bad point list {b}")
    if groups:
        obj = GDD(points, groups, blocks)
        if check:
            K = set(block_sizes) if block_sizes else {len(b) for b in obj.blocks}
            if not verify_gdd(obj, K):
                raise VerificationError("GDD axioms fail")
        return obj
    obj = SetSystem(points, blocks)
    if check:
        t = 2
        if not verify_packing(obj, t).ok:
            raise VerificationError("not a 2-packing")
    return obj


def load_design(path, **kw):
    return parse_design(Path(path).read_text(), **kw)


CATALOG_ENV = "L1CWC_CATALOG_DIR"


def _catalog_dir() -> Path:
    override = os.environ.get(CATALOG_ENV)
    if override:
        return Path(override) / "designs"
    return Path(str(resources.files("l1cwc") / "data" / "designs"))


def _catalog_name(type_id: str) -> str:
    return re.sub(r"[^0-9a-z]+", "_", type_id.replace("^", "p")).strip("_") + ".design"


def catalog_ids() -> list[str]:
    out = []
    for p in sorted(_catalog_dir().glob("*.design")):
        for line in p.read_text().splitlines():
            if line.startswith("# type "):
                out.append(line[len("# type "):].strip())
                break
    return out


def catalog_provenance(type_id: str) -> list[str]:
    path = _catalog_dir() / _catalog_name(type_id)
    return [l[2:] for l in path.read_text().splitlines() if l.startswith("# ")]


def catalog(type_id: str) -> GDD:
    """Bundled 4-GDD by type string, e.g. ``"6^7"`` or ``"12^4"``."""
    path = _catalog_dir() / _catalog_name(type_id)
    if not path.exists():
        raise KeyError(f"no catalog GDD of type {type_id}; have {catalog_ids()}")
    return load_design(path, block_sizes={4})
