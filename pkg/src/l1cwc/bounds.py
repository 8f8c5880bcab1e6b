"""Closed-form packing numbers, bounds and known values of A_q(n,d,w)."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .core import CodeError, CodeParams, UNBOUNDED


class Unsupported(CodeError):
    def __init__(self, params):
        super().__init__(f"no bound available for {params}")
        self.params = params


@dataclass(frozen=True)
class BoundResult:
    kind: str  # "exact", "upper" or "range"
    lo: int | None
    hi: int
    source: str

    def __post_init__(self):
        if self.kind not in ("exact", "upper", "range"):
            raise ValueError(f"bad kind {self.kind!r}")
        if not self.source:
            raise ValueError("source tag required")
        if self.kind == "exact" and self.lo != self.hi:
            raise ValueError("exact result carries a single value")
        if self.kind == "range" and not (self.lo is not None and self.lo <= self.hi):
            raise ValueError("range needs lo <= hi")

    @classmethod
    def exact(cls, v: int, source: str) -> "BoundResult":
        return cls("exact", v, v, source)

    @classmethod
    def upper(cls, v: int, source: str) -> "BoundResult":
        return cls("upper", None, v, source)

    @classmethod
    def range(cls, lo: int, hi: int, source: str) -> "BoundResult":
        return cls("range", lo, hi, source)

    @property
    def value(self) -> int:
        """The exact value, or the upper bound."""
        return self.hi

    def describe(self) -> str:
        if self.kind == "exact":
            return f"Exact {self.hi} ({self.source})"
        if self.kind == "upper":
            return f"UpperOnly {self.hi} ({self.source})"
        return f"Range {self.lo}..{self.hi} ({self.source})"

    def as_dict(self) -> dict:
        d = {"kind": self.kind, "source": self.source}
        if self.kind == "range":
            d.update(lo=self.lo, hi=self.hi)
        else:
            d["value"] = self.hi
        return d


@dataclass(frozen=True)
class GDDType:
    """4-GDD type g^u m^1 (m = 0 for the uniform type g^u)."""

    g: int
    u: int
    m: int = 0

    def __post_init__(self):
        if self.g < 1 or self.u < 1 or self.m < 0:
            raise ValueError("need g >= 1, u >= 1, m >= 0")

    def __str__(self):
        return f"{self.g}^{self.u}" + (f" {self.m}^1" if self.m else "")

    @property
    def order(self) -> int:
        return self.g * self.u + self.m


# ------------------------------------------------------------ packing numbers


def d_triples_pairs(n: int) -> int:
    """D(n,3,2): maximum number of triples pairwise meeting in < 2 points."""
    v = n * ((n - 1) // 2) // 3
    return v - 1 if n % 6 == 5 else v


_D42_EXCEPTIONS = {8: 2, 9: 3, 10: 5, 11: 6, 17: 20, 19: 25}


def d_quads_pairs(n: int) -> int:
    """D(n,4,2)."""
    if n in _D42_EXCEPTIONS:
        return _D42_EXCEPTIONS[n]
    v = n * ((n - 1) // 3) // 4
    return v - 1 if n % 12 in (7, 10) else v


def d_quads_triples(n: int) -> int:
    """D(n,4,3)."""
    if n < 4:
        return 0
    x = (n - 1) * ((n - 2) // 2) // 3
    if n % 6 == 0:
        x -= 1
    return n * x // 4


# ---------------------------------------------------------------- simple counts


def count_weight_vectors(n: int, q: int, w: int) -> int:
    """Number of vectors in {0..q-1}^n (or Z>=0^n when q is UNBOUNDED) of weight w."""
    if w < 0:
        return 0
    if q == UNBOUNDED:
        return comb(n + w - 1, w)
    return sum((-1) ** j * comb(n, j) * comb(n - 1 + w - j * q, w - j * q) for j in range(w // q + 1))


def U(n: int) -> int:
    return n * (n + 5) // 12


def B(n: int, w: int) -> int:
    return n * (n - 1 - (w - 1) * (w - 2)) // (w * (w - 1))


def z_cap(n: int) -> int:
    """Most type-2^2 words an (n,6,4)_3 code of size U(n) can have."""
    r = n % 12
    if r in (0, 3, 4, 7):
        return 0
    if r in (2, 5):
        return 1
    if r in (1, 6, 9, 10):
        return 3
    return 4


def trivial_value(p: CodeParams) -> BoundResult | None:
    n, q, w, d = p.n, p.q, p.w, p.d
    delta = d // 2
    if w < delta:
        has_word = count_weight_vectors(n, q, w) > 0
        return BoundResult.exact(1 if has_word else 0, "single word; any two words are too close")
    if d == 2 * w:
        if q == UNBOUNDED:
            return BoundResult.exact(n, "disjoint supports")
        per_word = -(-w // (q - 1))
        return BoundResult.exact(n // per_word, "disjoint supports")
    if d == 2:
        return BoundResult.exact(count_weight_vectors(n, q, w), "all vectors of weight w")
    return None


# ------------------------------------------------------------------ dispatch


def _ternary_w3_d4(n):
    return (n * n + 3 * n) // 6


def upper_bound(p: CodeParams) -> BoundResult:
    triv = trivial_value(p)
    if triv is not None:
        return BoundResult.upper(triv.value, triv.source)
    n, w, d = p.n, p.w, p.d
    if p.q == 3:
        if (w, d) == (3, 4):
            return BoundResult.upper(_ternary_w3_d4(n), "symbol-2 counting bound")
        if (w, d) == (4, 4):
            return BoundResult.upper(d_quads_triples(n) + comb(n, 2), "3-packing plus pair words")
        if (w, d) == (4, 6):
            return BoundResult.upper(U(n), "pair and symbol-2 counting bound")
        if d == 2 * w - 2:
            return BoundResult.upper(B(n, w) + n, "pair and symbol-2 counting bound")
    if p.unbounded:
        if (w, d) == (3, 4):
            return BoundResult.upper(d_triples_pairs(n) + n, "2-(n,3,1) packing plus singletons")
        if (w, d) == (4, 4):
            return BoundResult.upper(d_quads_triples(n) + comb(n, 2) + n, "3-(n,4,1) packing plus pairs and singletons")
        if (w, d) == (4, 6):
            return BoundResult.upper(d_quads_pairs(n) + n, "2-(n,4,1) packing plus singletons")
    raise Unsupported(p)


# lower and upper bounds on A_3(n,6,4) for the lengths left open
OPEN_RANGES_W4_D6 = {
    14: (21, 22), 17: (30, 31), 18: (33, 34), 24: (55, 58), 35: (114, 116),
    42: (161, 164), 44: (176, 179), 47: (200, 203), 56: (280, 284), 59: (310, 314),
    68: (409, 413), 71: (445, 449), 72: (461, 462), 78: (538, 539), 80: (562, 566),
    83: (603, 608), 84: (616, 623), 90: (705, 712), 92: (738, 743), 95: (786, 791),
    96: (803, 808), 102: (901, 909),
}
DEFICIENT_W4_D6 = (3, 4, 5, 12)


def known_value(p: CodeParams) -> BoundResult:
    triv = trivial_value(p)
    if triv is not None:
        return triv
    n, w, d = p.n, p.w, p.d
    if p.q == 3:
        if (w, d) == (3, 4):
            return BoundResult.exact(_ternary_w3_d4(n), "triple packings with prescribed leave")
        if (w, d) == (4, 4):
            return BoundResult.exact(d_quads_triples(n) + comb(n, 2), "3-(n,4,1) packing plus pair words")
        if (w, d) == (4, 6):
            if n in OPEN_RANGES_W4_D6:
                lo, hi = OPEN_RANGES_W4_D6[n]
                return BoundResult.range(lo, hi, "open length; best construction vs. refined count")
            if n in DEFICIENT_W4_D6:
                return BoundResult.exact(U(n) - 1, "exhaustive search at small length")
            return BoundResult.exact(U(n), "4-GDD recursion and base-block constructions")
    if p.unbounded and (w, d) in ((3, 4), (4, 4), (4, 6)):
        ub = upper_bound(p)
        return BoundResult.exact(ub.value, ub.source)
    try:
        return upper_bound(p)
    except Unsupported:
        total = count_weight_vectors(p.n, p.q, p.w)
        return BoundResult.range(min(1, total), total, "no closed form; count of weight-w vectors")


# ------------------------------------------------------------ 4-GDD existence


@dataclass(frozen=True)
class GDDStatus:
    exists: bool
    status: str  # "exists", "not-exists", "open", "unknown"
    reason: str

    def __bool__(self):
        return self.exists


# (g, u, m) triples, m = 0 for uniform types
SPORADIC_4GDDS = frozenset({
    (6, 7, 0), (6, 15, 0), (6, 11, 30), (6, 12, 30), (7, 4, 0), (7, 12, 10),
    (9, 4, 0), (9, 4, 6), (9, 5, 0), (9, 5, 6), (27, 4, 0), (27, 4, 9), (27, 5, 0), (39, 4, 6),
})
_SETTLED_G = (2, 6, 7, 9, 12, 15, 24, 27, 36)
_SETTLED_UNIFORM_G = (6, 12, 24, 36)
GDD_POSSIBLE_EXCEPTIONS = frozenset({
    (2, 33, 23), (2, 33, 29), (2, 39, 35), (6, 13, 27), (6, 13, 33),
    (6, 17, 39), (6, 19, 45), (6, 19, 51), (6, 23, 63),
})


def _forms(t: GDDType):
    """Equivalent (g, u, m) spellings of one type."""
    yield (t.g, t.u, t.m)
    if t.m == t.g:
        yield (t.g, t.u + 1, 0)
    if t.m == 0 and t.u >= 2:
        yield (t.g, t.u - 1, t.g)


def _necessary_conditions(g, u, m) -> bool:
    n = g * u + m
    return (2 * m <= g * (u - 1) and (g * u) % 3 == 0 and (g * (u - 1) + m) % 3 == 0
            and (comb(n, 2) - u * comb(g, 2) - comb(m, 2)) % 6 == 0)


def _status_one(g, u, m) -> GDDStatus | None:
    if (g, u, m) in SPORADIC_4GDDS:
        return GDDStatus(True, "exists", "sporadic construction")
    if (g, u, m) == (2, 6, 5):
        return GDDStatus(False, "not-exists", "known exception 2^6 5^1")
    if (g, u, m) in GDD_POSSIBLE_EXCEPTIONS:
        return GDDStatus(False, "open", "possible exception; existence unresolved")
    if g == 12:
        ok = (u == 3 and m == 12) or (u >= 4 and m % 3 == 0 and 0 <= m <= 6 * (u - 1))
        return GDDStatus(ok, "exists" if ok else "not-exists", "type 12^u m^1 characterization")
    if g == 15:
        r = u % 4
        ok = ((r == 0 and m % 3 == 0 and 2 * m <= 15 * u - 18)
              or (r == 1 and m % 6 == 0 and 2 * m <= 15 * u - 15)
              or (r == 3 and m % 6 == 3 and 0 < m and 2 * m <= 15 * u - 15))
        return GDDStatus(ok, "exists" if ok else "not-exists", "type 15^u m^1 characterization")
    if g in (24, 36) and u >= 4:
        cap = (g // 2) * (u - 1)
        ok = m % 3 == 0 and m <= cap
        return GDDStatus(ok, "exists" if ok else "not-exists", f"type {g}^u m^1 characterization")
    if g == 2 and u >= 6 and u % 3 == 0 and m % 3 == 2 and 2 <= m <= u - 1:
        return GDDStatus(True, "exists", "type 2^u m^1 family")
    if g in _SETTLED_G and u >= 4 and (m > 0 or g in _SETTLED_UNIFORM_G):
        ok = _necessary_conditions(g, u, m)
        return GDDStatus(ok, "exists" if ok else "not-exists", "g^u m^1 necessary-and-sufficient conditions")
    return None


def gdd4_status(t: GDDType) -> GDDStatus:
    """Existence of a 4-GDD of the given type, as far as it is settled."""
    if t.u == 1 and t.m == 0:
        return GDDStatus(True, "exists", "single group, no blocks")
    found = [s for s in (_status_one(*f) for f in _forms(t)) if s is not None]
    for s in found:
        if s.status == "exists":
            return s
    for s in found:
        if s.status == "open":
            return s
    if found:
        return found[0]
    return GDDStatus(False, "unknown", "not covered by the existence results used here")


def gdd4_exists(t: GDDType) -> bool:
    return gdd4_status(t).exists
