"""Bitset branch-and-bound maximum clique.

Vertices are ``0..n-1`` and ``adj[v]`` is an int bitmask of the neighbours
of ``v``.  The search is the usual colour-ordered expansion: greedy
sequential colouring of the candidate set gives an upper bound for every
prefix, and vertices are branched on from the highest colour down.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Sequence


class BudgetExhausted(Exception):
    pass


def bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(vertices) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


@dataclass
class CliqueResult:
    clique: list[int]
    proven: bool
    nodes: int
    elapsed: float
    stats: dict = field(default_factory=dict)


def _colour_sort(P: int, adj: Sequence[int]):
    order: list[int] = []
    colours: list[int] = []
    Q = P
    k = 0
    while Q:
        k += 1
        R = Q
        while R:
            low = R & -R
            v = low.bit_length() - 1
            R &= ~adj[v] & ~low
            Q &= ~low
            order.append(v)
            colours.append(k)
    return order, colours


def max_clique(
    adj: Sequence[int],
    candidates: int | None = None,
    *,
    initial: Sequence[int] = (),
    lower: Sequence[int] = (),
    upper: int | None = None,
    max_nodes: int | None = None,
    deadline: float | None = None,
    extra_bound: Callable[[list[int], int], int] | None = None,
) -> CliqueResult:
    """Largest clique among ``candidates`` that contains ``initial``.

    ``lower`` is a known clique (including ``initial``) to beat; ``upper`` a
    proven bound on the answer, so reaching it ends the search early.
    ``extra_bound(clique, P)`` may return an upper bound on how many
    vertices of ``P`` can still be added.  On budget exhaustion the best
    clique found is returned with ``proven=False``.
    """
    n = len(adj)
    if candidates is None:
        candidates = (1 << n) - 1
    start = time.monotonic()
    best = list(lower)
    state = {"nodes": 0}
    C = list(initial)
    P0 = candidates
    for v in C:
        P0 &= adj[v]

    def expand(C: list[int], P: int):
        nonlocal best
        state["nodes"] += 1
        if max_nodes is not None and state["nodes"] > max_nodes:
            raise BudgetExhausted
        if deadline is not None and state["nodes"] & 255 == 0 and time.monotonic() > deadline:
            raise BudgetExhausted
        if not P:
            if len(C) > len(best):
                best = list(C)
            return
        if extra_bound is not None and len(C) + extra_bound(C, P) <= len(best):
            return
        order, colours = _colour_sort(P, adj)
        for i in range(len(order) - 1, -1, -1):
            if len(C) + colours[i] <= len(best):
                return
            v = order[i]
            C.append(v)
            expand(C, P & adj[v])
            C.pop()
            if upper is not None and len(best) >= upper:
                return
            P &= ~(1 << v)
        if len(C) > len(best):
            best = list(C)

    proven = True
    if upper is None or len(best) < upper:
        try:
            expand(C, P0)
        except BudgetExhausted:
            proven = False
    if len(C) > len(best):
        best = list(C)
    return CliqueResult(sorted(best), proven, state["nodes"], time.monotonic() - start)


def first_clique_in_order(
    adj: Sequence[int],
    order: Sequence[int],
    size: int,
    *,
    candidates: int | None = None,
    max_nodes: int | None = None,
    deadline: float | None = None,
    extra_bound: Callable[[list[int], int], int] | None = None,
) -> list[int] | None:
    """First clique of ``size`` met by include-first DFS along ``order``.

    With ``order`` ascending this is the lexicographically least clique of
    that size.  Raises :class:`BudgetExhausted` when out of budget.
    """
    n = len(adj)
    rank = {v: i for i, v in enumerate(order)}
    if candidates is None:
        candidates = (1 << n) - 1
    nodes = 0

    def dfs(C: list[int], P: int) -> list[int] | None:
        nonlocal nodes
        nodes += 1
        if max_nodes is not None and nodes > max_nodes:
            raise BudgetExhausted
        if deadline is not None and nodes & 255 == 0 and time.monotonic() > deadline:
            raise BudgetExhausted
        if len(C) == size:
            return list(C)
        need = size - len(C)
        if P.bit_count() < need:
            return None
        if extra_bound is not None and extra_bound(C, P) < need:
            return None
        _, colours = _colour_sort(P, adj)
        if colours and colours[-1] < need:
            return None
        for v in sorted(bits(P), key=rank.__getitem__):
            if P.bit_count() < need:
                return None
            C.append(v)
            found = dfs(C, P & adj[v])
            C.pop()
            if found is not None:
                return found
            P &= ~(1 << v)
        return None

    return dfs([], candidates)
