"""Exact and greedy search for largest codes at small length.

Candidate words are vertices of a compatibility graph (edge iff the two
words are at distance >= d); a code is a clique.  The exact search is
the bitset branch-and-bound of :mod:`l1cwc.clique` with two extras:

* symmetry breaking: every nonempty code can be relabelled to contain a
  fixed representative of its smallest word type, so one search per type
  suffices;
* a counting bound when d = 2w - 2: word supports then share at most
  one position, so their pair sets are disjoint, and no position holds a
  symbol >= 2 in two words.

When the counting bound says a code one word larger than the incumbent
would have to use every pair and every symbol-2 position exactly once,
that question is an exact cover problem, and it is settled by a
dedicated cover search instead of the clique search.
"""

from __future__ import annotations

import random
import re
import time
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb

from .bounds import Unsupported, count_weight_vectors, upper_bound
from .clique import BudgetExhausted, first_clique_in_order, max_clique
from .core import Code, CodeParams, Codeword, UNBOUNDED
from .designs import TooLarge


@dataclass
class SearchConfig:
    max_nodes: int | None = None
    time_limit: float | None = None  # seconds
    seed: int = 0
    prune_with_census: bool = True
    initial_lower: Code | None = None
    lex_witness: bool = True
    shuffle_seed: int | None = None  # permute the candidate order (determinism audits)
    candidate_cap: int = 20000
    local_search_steps: int = 20000  # warm-start improvement moves; 0 disables

    def __post_init__(self):
        if self.max_nodes is not None and self.max_nodes <= 0:
            raise ValueError("node budget must be positive")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time budget must be positive")


def parse_budget(text: str) -> dict:
    """``"60s"`` -> time limit, ``"1e7nodes"`` -> node limit."""
    m = re.fullmatch(r"\s*([0-9.eE+]+)\s*(s|nodes)\s*", text)
    if not m:
        raise ValueError(f"bad budget {text!r}; use e.g. 60s or 1e7nodes")
    v = float(m.group(1))
    if v <= 0:
        raise ValueError("budget must be positive")
    return {"time_limit": v} if m.group(2) == "s" else {"max_nodes": int(v)}


@dataclass
class SearchResult:
    code: Code
    proven_optimal: bool
    nodes: int = 0
    elapsed: float = 0.0
    stats: dict = field(default_factory=dict)


def _vectors(n: int, w: int, top: int):
    """All length-n vectors with entries in [0, top] summing to w (sparse form)."""
    def rec(pos, left, acc):
        if left == 0:
            yield tuple(acc)
            return
        if pos == n:
            return
        for v in range(min(top, left), -1, -1):
            if v:
                acc.append((pos, v))
            yield from rec(pos + 1, left - v, acc)
            if v:
                acc.pop()
    yield from rec(0, w, [])


def enumerate_candidates(p: CodeParams, cap: int = 20000) -> list[Codeword]:
    total = count_weight_vectors(p.n, p.q, p.w)
    if total > cap:
        raise TooLarge(f"{total} candidate words exceeds cap {cap}")
    return sorted(Codeword(e) for e in _vectors(p.n, p.w, p.max_entry))


def _level_masks(u: Codeword, top: int) -> list[int]:
    masks = [0] * top
    for x, v in u.entries:
        for k in range(v):
            masks[k] |= 1 << x
    return masks


def compatibility_graph(words: list[Codeword], p: CodeParams) -> list[int]:
    """adj[i] has bit j set iff words i and j are at distance >= d."""
    top = max(p.max_entry, 1)
    # sum_x min(u_x, v_x) = sum_k |{x : u_x > k and v_x > k}|
    levels = [_level_masks(u, top) for u in words]
    limit = p.w - p.d // 2  # largest overlap that keeps distance >= d
    adj = [0] * len(words)
    for i in range(len(words)):
        li = levels[i]
        row = 0
        for j in range(i + 1, len(words)):
            lj = levels[j]
            ov = 0
            for k in range(top):
                m = li[k] & lj[k]
                if not m:
                    break
                ov += m.bit_count()
            if ov <= limit:
                row |= 1 << j
                adj[j] |= 1 << i
        adj[i] |= row
    return adj


def _type_key(u: Codeword) -> tuple[int, ...]:
    return tuple(sorted((v for _, v in u.entries), reverse=True))


def _canonical(key: tuple[int, ...]) -> Codeword:
    return Codeword(tuple((i, v) for i, v in enumerate(key)))


@lru_cache(maxsize=1 << 18)
def _census_max(costs: tuple, pairs: int, twos: int, avail: tuple) -> int:
    """Max number of words with the given per-type (pair, two) costs within budgets."""
    if not costs:
        return 0
    (pc, tc), rest = costs[0], costs[1:]
    best = 0
    cap = avail[0]
    if pc:
        cap = min(cap, pairs // pc)
    if tc:
        cap = min(cap, twos // tc)
    if not rest:
        return cap
    for k in range(cap + 1):
        best = max(best, k + _census_max(rest, pairs - k * pc, twos - k * tc, avail[1:]))
    return best


class _CensusBound:
    """Counting bound on how many more words fit.

    Budgets are the pairs and symbol-2 positions that some remaining
    candidate can still use; words compatible with the current code can
    never reuse the ones it already occupies.
    """

    def __init__(self, words: list[Codeword], p: CodeParams):
        n = p.n
        by_type: dict[tuple, int] = {}
        pair_masks = [0] * (n * n)
        two_masks = [0] * n
        for i, u in enumerate(words):
            sup = u.support
            c = (comb(len(sup), 2), sum(1 for _, v in u.entries if v >= 2))
            by_type[c] = by_type.get(c, 0) | (1 << i)
            bit = 1 << i
            for a in range(len(sup)):
                for b in range(a + 1, len(sup)):
                    pair_masks[sup[a] * n + sup[b]] |= bit
            for x, v in u.entries:
                if v >= 2:
                    two_masks[x] |= bit
        self.pair_masks = [m for m in pair_masks if m]
        self.two_masks = [m for m in two_masks if m]
        # types with zero two-cost go last, so the recursion ends in a closed form
        self.types = tuple(sorted(by_type, key=lambda c: (c[1] == 0, c)))
        self.masks = [by_type[c] for c in self.types]

    def __call__(self, C: list[int], P: int) -> int:
        pairs = sum(1 for m in self.pair_masks if P & m)
        twos = sum(1 for m in self.two_masks if P & m)
        avail = tuple((P & m).bit_count() for m in self.masks)
        return _census_max(self.types, pairs, twos, avail)


def _census_applies(p: CodeParams) -> bool:
    return p.d == 2 * p.w - 2 and p.w >= 2


def _cost(u: Codeword) -> tuple[int, int]:
    return comb(len(u.support), 2), sum(1 for _, v in u.entries if v >= 2)


def _cover_plan(costs, pairs: int, twos: int, target: int):
    """Word types a code of ``target`` words may use, if it must exhaust both budgets.

    Returns ``"impossible"`` when no type mix fits, ``None`` when some mix
    leaves slack (no exact cover formulation), else the set of usable costs.
    """
    used = set()
    feasible = False
    tight = True

    def rec(i, left, pr, tw, mix):
        nonlocal feasible, tight
        if left == 0:
            feasible = True
            if pr or tw:
                tight = False
            used.update(c for c, k in zip(costs, mix) if k)
            return
        if i == len(costs):
            return
        pc, tc = costs[i]
        k = 0
        while k <= left and k * pc <= pr and k * tc <= tw:
            rec(i + 1, left - k, pr - k * pc, tw - k * tc, mix + [k])
            if not pc and not tc:
                break
            k += 1

    rec(0, target, pairs, twos, [])
    if not feasible:
        return "impossible"
    return used if tight else None


def _exact_cover(words: list[Codeword], n: int, costs: set, *, max_nodes=None, deadline=None):
    """Pairwise compatible words covering every pair and symbol-2 position once.

    Positions not touched by chosen words or by the column being branched
    on are interchangeable, so a branch word must put its untouched
    positions on the lowest free ones with non-increasing symbols.
    Returns (indices into ``words`` or None, nodes).
    """
    col_id: dict[tuple, int] = {}
    col_pts: list[int] = []
    rows, row_idx = [], []
    for i, u in enumerate(words):
        if _cost(u) not in costs:
            continue
        sup = u.support
        cols = [(a, b) for k, a in enumerate(sup) for b in sup[k + 1:]]
        cols += [(x,) for x, v in u.entries if v >= 2]
        m = 0
        for c in cols:
            if c not in col_id:
                col_id[c] = len(col_id)
                col_pts.append(sum(1 << x for x in c))
            m |= 1 << col_id[c]
        rows.append(m)
        row_idx.append(i)
    by_col = [0] * len(col_id)
    for r, m in enumerate(rows):
        for c in _bits_list(m):
            by_col[c] |= 1 << r
    row_pts = [sum(1 << x for x in words[i].support) for i in row_idx]
    all_pts = (1 << n) - 1
    nodes = 0

    def canonical(r, fixed):
        free = all_pts & ~fixed
        last = None
        for x, v in words[row_idx[r]].entries:
            if fixed >> x & 1:
                continue
            if free & -free != 1 << x or (last is not None and v > last):
                return False
            free &= free - 1
            last = v
        return True

    def rec(uncovered, alive, touched):
        nonlocal nodes
        nodes += 1
        if max_nodes is not None and nodes > max_nodes:
            raise BudgetExhausted("node budget exhausted")
        if deadline is not None and nodes & 1023 == 0 and time.monotonic() > deadline:
            raise BudgetExhausted("time budget exhausted")
        if not uncovered:
            return []
        col, fewest = -1, None
        for c in _bits_list(uncovered):
            k = (alive & by_col[c]).bit_count()
            if fewest is None or k < fewest:
                col, fewest = c, k
                if k == 0:
                    return None
        fixed = touched | col_pts[col]
        for r in _bits_list(alive & by_col[col]):
            if not canonical(r, fixed):
                continue
            rest = alive
            for c in _bits_list(rows[r]):
                rest &= ~by_col[c]
            found = rec(uncovered & ~rows[r], rest, touched | row_pts[r])
            if found is not None:
                return [row_idx[r]] + found
        return None

    found = rec((1 << len(col_id)) - 1, (1 << len(rows)) - 1, 0)
    return found, nodes


def max_code_greedy(p: CodeParams, seed: int | None = 0, *, cap: int = 20000) -> Code:
    """A maximal code: scan candidates (shuffled by ``seed``) and keep what fits."""
    words = enumerate_candidates(p, cap)
    adj = compatibility_graph(words, p)
    chosen = _greedy_clique(adj, seed)
    return Code(p, tuple(words[i] for i in chosen), f"greedy, seed {seed}")


def _greedy_clique(adj: list[int], seed: int | None) -> list[int]:
    order = list(range(len(adj)))
    if seed is not None:
        random.Random(seed).shuffle(order)
    P = (1 << len(adj)) - 1
    chosen = []
    for i in order:
        if P >> i & 1:
            chosen.append(i)
            P &= adj[i]
    return sorted(chosen)


def local_search_clique(adj: list[int], start: list[int], steps: int, seed: int = 0,
                        target: int | None = None) -> list[int]:
    """Plateau search for a large clique: add when possible, else swap one vertex out.

    Recently dropped vertices are tabu for a few moves; restarts from a
    random vertex when stuck.
    """
    N = len(adj)
    if N == 0:
        return []
    rng = random.Random(seed)
    full = (1 << N) - 1
    C = set(start)
    best = sorted(C)
    tabu: dict[int, int] = {}
    for step in range(steps):
        if target is not None and len(best) >= target:
            break
        cmask = 0
        common = full
        for v in C:
            cmask |= 1 << v
            common &= adj[v]
        common &= ~cmask
        cand = [v for v in _bits_list(common) if tabu.get(v, -1) < step]
        if cand:
            C.add(rng.choice(cand))
            if len(C) > len(best):
                best = sorted(C)
            continue
        # vertices missing exactly one clique neighbour
        swaps = []
        for v in range(N):
            miss = cmask & ~adj[v]
            if miss and miss & (miss - 1) == 0 and not cmask >> v & 1 and tabu.get(v, -1) < step:
                swaps.append((v, miss.bit_length() - 1))
        if swaps:
            v, u = rng.choice(swaps)
            C.discard(u)
            C.add(v)
            tabu[u] = step + 7
        else:
            v = rng.randrange(N)
            C = {v}
            tabu.clear()
    return best


def _bits_list(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def max_code_exact(p: CodeParams, cfg: SearchConfig | None = None, *, stop_at: int | None = None) -> SearchResult:
    """Largest code by branch and bound; ``proven_optimal`` is False when the budget ran out.

    With ``stop_at`` the search ends as soon as a code of that size is found.
    """
    cfg = cfg or SearchConfig()
    start = time.monotonic()
    deadline = start + cfg.time_limit if cfg.time_limit else None
    words = enumerate_candidates(p, cfg.candidate_cap)
    if cfg.shuffle_seed is not None:
        random.Random(cfg.shuffle_seed).shuffle(words)
    index = {u: i for i, u in enumerate(words)}
    adj = compatibility_graph(words, p)
    N = len(words)
    stats: dict = {"candidates": N}
    bound = _CensusBound(words, p) if cfg.prune_with_census and _census_applies(p) else None
    try:
        upper = upper_bound(p).value
    except Unsupported:
        upper = None
    if stop_at is not None:
        upper = stop_at if upper is None else min(upper, stop_at)
    stats["upper_cutoff"] = upper

    # warm start
    best: list[int] = []
    if cfg.initial_lower is not None:
        best = sorted(index[u] for u in cfg.initial_lower.words)
        for a in best:
            if any(b != a and not (adj[a] >> b & 1) for b in best):
                raise ValueError("initial_lower is not a valid code for these parameters")
    greedy = _greedy_clique(adj, cfg.seed)
    if len(greedy) > len(best):
        best = greedy
    if cfg.local_search_steps and (upper is None or len(best) < upper):
        ls = local_search_clique(adj, best, cfg.local_search_steps, cfg.seed, upper)
        if len(ls) > len(best):
            best = ls
    stats["warm_start"] = len(best)

    nodes = 0
    proven = True
    settled = False
    if bound is not None and N:
        costs = tuple(sorted({_cost(u) for u in words}))
        pairs = len(bound.pair_masks)
        twos = len(bound.two_masks)
        while upper is None or len(best) < upper:
            plan = _cover_plan(costs, pairs, twos, len(best) + 1)
            if plan is None:
                break
            if plan == "impossible":
                settled = True
                break
            remaining = None if cfg.max_nodes is None else cfg.max_nodes - nodes
            try:
                found, used = _exact_cover(words, p.n, plan, max_nodes=remaining, deadline=deadline)
            except BudgetExhausted:
                proven = False
                settled = True
                break
            nodes += used
            stats["exact_cover_nodes"] = stats.get("exact_cover_nodes", 0) + used
            if found is None:
                settled = True
                break
            best = sorted(found)
    if not settled and N and (upper is None or len(best) < upper):
        keys = sorted({_type_key(u) for u in words})
        stats["branches"] = [",".join(map(str, k)) for k in keys]
        allowed = (1 << N) - 1
        for key in keys:
            type_mask = 0
            for i, u in enumerate(words):
                if _type_key(u) == key:
                    type_mask |= 1 << i
            root = index[_canonical(key)]
            remaining = None if cfg.max_nodes is None else cfg.max_nodes - nodes
            if remaining is not None and remaining <= 0:
                proven = False
                break
            res = max_clique(adj, allowed, initial=[root], lower=best, upper=upper,
                             max_nodes=remaining, deadline=deadline, extra_bound=bound)
            nodes += res.nodes
            if len(res.clique) > len(best):
                best = res.clique
            if not res.proven:
                proven = False
                break
            if upper is not None and len(best) >= upper:
                break
            # later branches never use this type
            allowed &= ~type_mask
    stats["nodes_optimum"] = nodes

    if stop_at is not None and len(best) >= stop_at:
        proven = False  # stopped early; says nothing about optimality
    if proven and cfg.lex_witness and best:
        remaining = None if cfg.max_nodes is None else max(cfg.max_nodes - nodes, 1)
        try:
            lex = first_clique_in_order(adj, range(N), len(best), max_nodes=remaining,
                                        deadline=deadline, extra_bound=bound)
            if lex is not None:
                best = lex
                stats["witness"] = "lexicographically least"
        except BudgetExhausted:
            stats["witness"] = "first found (lexicographic pass out of budget)"
    code = Code(p, tuple(words[i] for i in best), "exhaustive search" if proven else "search, budget exhausted")
    return SearchResult(code, proven, nodes, time.monotonic() - start, stats)


def code_of_size(p: CodeParams, size: int, cfg: SearchConfig | None = None) -> tuple[Code | None, bool]:
    """Find a code with ``size`` words.  Returns (code or None, decided)."""
    cfg = cfg or SearchConfig()
    quiet = SearchConfig(cfg.max_nodes, cfg.time_limit, cfg.seed, cfg.prune_with_census,
                         None, False, cfg.shuffle_seed, cfg.candidate_cap)
    res = max_code_exact(p, quiet, stop_at=size)
    if len(res.code) >= size:
        return res.code.with_words(res.code.words[:size]), True
    return None, res.proven_optimal
