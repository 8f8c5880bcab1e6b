"""Codewords, codes and the l1 metric.

A codeword is stored sparsely as a sorted tuple of ``(position, value)``
pairs with every value positive.  The text form used throughout the
package writes a codeword ``{0_2,1_1,3_1}`` (position ``_`` value).
"""

from __future__ import annotations

import logging
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, Mapping, Sequence

from .designs import SetSystem

log = logging.getLogger(__name__)

UNBOUNDED = 0  # q sentinel for codes over the non-negative integers


class CodeError(ValueError):
    pass


class WeightMismatch(CodeError):
    pass


class FormatError(CodeError):
    pass


class PackingViolation(CodeError):
    def __init__(self, tau_subset, block1, block2):
        self.tau_subset = tuple(tau_subset)
        self.block1 = tuple(block1)
        self.block2 = tuple(block2)
        super().__init__(
            f"{len(self.tau_subset)}-subset {self.tau_subset} lies in supports "
            f"{self.block1} and {self.block2}"
        )


@dataclass(frozen=True, order=True)
class Codeword:
    entries: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        ents = tuple(sorted((int(p), int(v)) for p, v in self.entries))
        positions = [p for p, _ in ents]
        if len(set(positions)) != len(positions):
            raise CodeError(f"repeated position in {ents}")
        for p, v in ents:
            if p < 0:
                raise CodeError(f"negative position {p}")
            if v < 1:
                raise CodeError(f"entry value must be >= 1, got {v} at {p}")
        object.__setattr__(self, "entries", ents)

    @classmethod
    def from_mapping(cls, m: Mapping[int, int]) -> "Codeword":
        return cls(tuple((p, v) for p, v in m.items() if v))

    @classmethod
    def from_vector(cls, vec: Sequence[int]) -> "Codeword":
        return cls(tuple((i, v) for i, v in enumerate(vec) if v))

    @classmethod
    def parse(cls, text: str) -> "Codeword":
        """Accept a digit string ``210100`` or set notation ``{0_2,1_1,3_1}``."""
        text = text.strip()
        if text.startswith("{"):
            body = text.strip("{}").strip()
            if not body:
                return cls()
            ents = []
            for tok in body.split(","):
                m = re.fullmatch(r"\s*(\d+)_(\d+)\s*", tok)
                if not m:
                    raise FormatError(f"bad entry {tok!r}")
                ents.append((int(m.group(1)), int(m.group(2))))
            return cls(tuple(ents))
        if not text.isdigit():
            raise FormatError(f"cannot parse codeword {text!r}")
        return cls.from_vector([int(c) for c in text])

    @property
    def weight(self) -> int:
        return sum(v for _, v in self.entries)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.entries)

    def as_dict(self) -> dict[int, int]:
        return dict(self.entries)

    def get(self, pos: int) -> int:
        for p, v in self.entries:
            if p == pos:
                return v
        return 0

    def max_entry(self) -> int:
        return max((v for _, v in self.entries), default=0)

    def to_vector(self, n: int) -> list[int]:
        vec = [0] * n
        for p, v in self.entries:
            vec[p] = v
        return vec

    def signature(self) -> str:
        """Type string such as ``1^2 2^1``; the empty word gives ``0``."""
        c = Counter(v for _, v in self.entries)
        if not c:
            return "0"
        return " ".join(f"{v}^{c[v]}" for v in sorted(c))

    def relabel(self, mapping) -> "Codeword":
        """Move positions through ``mapping`` (sequence or dict), entries fixed."""
        return Codeword(tuple((mapping[p], v) for p, v in self.entries))

    def __str__(self):
        return "{" + ",".join(f"{p}_{v}" for p, v in self.entries) + "}"


@dataclass(frozen=True)
class CodeParams:
    n: int
    q: int  # alphabet size; UNBOUNDED (0) for the non-negative integers
    w: int
    d: int

    def __post_init__(self):
        if self.n < 1:
            raise CodeError("n must be >= 1")
        if self.w < 1:
            raise CodeError("w must be >= 1")
        if self.q < 0 or self.q == 1:
            raise CodeError("q must be >= 2, or 0 for unbounded")
        if self.d < 1:
            raise CodeError("d must be >= 1")
        if self.d % 2:
            # equal-weight words are always at even distance
            log.info("odd distance %d normalized to %d", self.d, self.d + 1)
            object.__setattr__(self, "d", self.d + 1)

    @property
    def unbounded(self) -> bool:
        return self.q == UNBOUNDED

    @property
    def t(self) -> int:
        return self.d // 2

    @property
    def tau(self) -> int:
        return self.w - self.t + 1

    @property
    def max_entry(self) -> int:
        return self.w if self.unbounded else min(self.w, self.q - 1)

    def q_text(self) -> str:
        return "inf" if self.unbounded else str(self.q)

    def __str__(self):
        sub = "" if self.unbounded else f"_{self.q}"
        return f"({self.n},{self.d},{self.w}){sub}"


def parse_q(text) -> int:
    if isinstance(text, int):
        return text
    text = str(text).strip().lower()
    if text in ("inf", "infinity", "unbounded", "z", "0"):
        return UNBOUNDED
    return int(text)


@dataclass(frozen=True)
class Code:
    params: CodeParams
    words: tuple[Codeword, ...] = ()
    provenance: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "words", tuple(sorted(self.words)))

    def __len__(self):
        return len(self.words)

    def __iter__(self) -> Iterator[Codeword]:
        return iter(self.words)

    def __contains__(self, word):
        return word in set(self.words)

    @property
    def n(self):
        return self.params.n

    def deduplicated(self) -> "Code":
        return Code(self.params, tuple(set(self.words)), self.provenance)

    def with_words(self, words: Iterable[Codeword], provenance: str | None = None) -> "Code":
        return Code(self.params, tuple(words), self.provenance if provenance is None else provenance)


def l1_weight(u: Codeword) -> int:
    return sum(abs(v) for _, v in u.entries)


def l1_distance(u: Codeword, v: Codeword) -> int:
    a, b = u.as_dict(), v.as_dict()
    return sum(abs(a.get(x, 0) - b.get(x, 0)) for x in a.keys() | b.keys())


def overlap(u: Codeword, v: Codeword) -> int:
    """Sum over the common support of the smaller entry."""
    b = v.as_dict()
    return sum(min(x, b[p]) for p, x in u.entries if p in b)


def distance_via_overlap(u: Codeword, v: Codeword) -> int:
    w = l1_weight(u)
    if l1_weight(v) != w:
        raise WeightMismatch(f"weights differ: {w} vs {l1_weight(v)}")
    return 2 * w - 2 * overlap(u, v)


INF_DISTANCE = math.inf  # min distance of a code with fewer than two words


@dataclass
class VerificationReport:
    params: CodeParams
    size: int
    min_distance: float
    closest_pair: tuple[Codeword, Codeword] | None = None
    weight_violations: list[Codeword] = field(default_factory=list)
    alphabet_violations: list[Codeword] = field(default_factory=list)
    range_violations: list[Codeword] = field(default_factory=list)
    duplicate_count: int = 0
    distance_violations: list[tuple[Codeword, Codeword, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (
            self.weight_violations
            or self.alphabet_violations
            or self.range_violations
            or self.duplicate_count
            or self.distance_violations
        )

    def as_dict(self) -> dict:
        md = self.min_distance
        return {
            "params": {"n": self.params.n, "q": self.params.q_text(), "w": self.params.w, "d": self.params.d},
            "valid": self.ok,
            "size": self.size,
            "min_distance": None if md == INF_DISTANCE else md,
            "weight_violations": [str(u) for u in self.weight_violations],
            "alphabet_violations": [str(u) for u in self.alphabet_violations],
            "range_violations": [str(u) for u in self.range_violations],
            "duplicate_count": self.duplicate_count,
            "distance_violations": [
                {"u": str(u), "v": str(v), "distance": dist} for u, v, dist in self.distance_violations
            ],
        }

    def summary(self) -> str:
        md = "unconstrained" if self.min_distance == INF_DISTANCE else str(self.min_distance)
        lines = [
            f"code {self.params}: {self.size} words, min distance {md}, "
            + ("VALID" if self.ok else "INVALID")
        ]
        for u in self.weight_violations:
            lines.append(f"  weight violation: {u} has weight {u.weight}")
        for u in self.alphabet_violations:
            lines.append(f"  alphabet violation: {u}")
        for u in self.range_violations:
            lines.append(f"  position out of range: {u}")
        if self.duplicate_count:
            lines.append(f"  duplicates: {self.duplicate_count}")
        for u, v, dist in self.distance_violations[:20]:
            lines.append(f"  distance violation: {u} {v} at distance {dist}")
        if len(self.distance_violations) > 20:
            lines.append(f"  ... {len(self.distance_violations) - 20} more distance violations")
        return "\n".join(lines)


def verify_code(code: Code) -> VerificationReport:
    p = code.params
    rep = VerificationReport(params=p, size=len(code.words), min_distance=INF_DISTANCE)
    for u in code.words:
        if u.weight != p.w:
            rep.weight_violations.append(u)
        if not p.unbounded and u.max_entry() >= p.q:
            rep.alphabet_violations.append(u)
        if u.entries and u.entries[-1][0] >= p.n:
            rep.range_violations.append(u)
    counts = Counter(code.words)
    rep.duplicate_count = sum(c - 1 for c in counts.values())
    distinct = sorted(counts)
    # bucket by position so that disjoint pairs (distance = sum of weights) are skipped
    by_pos: dict[int, list[int]] = {}
    for i, u in enumerate(distinct):
        for x in u.support:
            by_pos.setdefault(x, []).append(i)
    best = math.inf
    best_pair = None
    seen: set[tuple[int, int]] = set()
    for members in by_pos.values():
        for a, b in combinations(members, 2):
            if (a, b) in seen:
                continue
            seen.add((a, b))
            dist = l1_distance(distinct[a], distinct[b])
            if dist < p.d:
                rep.distance_violations.append((distinct[a], distinct[b], dist))
            if dist < best:
                best, best_pair = dist, (distinct[a], distinct[b])
    m = len(distinct)
    if len(seen) < m * (m - 1) // 2:
        # some pairs have disjoint supports: distance is the weight sum
        weights = {u.weight for u in distinct}
        if len(weights) == 1:
            disjoint = 2 * weights.pop()
            if disjoint < best:
                best = disjoint
                best_pair = next(
                    (distinct[a], distinct[b])
                    for a in range(m)
                    for b in range(a + 1, m)
                    if (a, b) not in seen
                )
            if disjoint < p.d:
                for a in range(m):
                    for b in range(a + 1, m):
                        if (a, b) not in seen:
                            rep.distance_violations.append((distinct[a], distinct[b], disjoint))
        else:
            for a in range(m):
                for b in range(a + 1, m):
                    if (a, b) in seen:
                        continue
                    dist = distinct[a].weight + distinct[b].weight
                    if dist < p.d:
                        rep.distance_violations.append((distinct[a], distinct[b], dist))
                    if dist < best:
                        best, best_pair = dist, (distinct[a], distinct[b])
    if best_pair is not None:
        rep.min_distance = best
        rep.closest_pair = best_pair
    if rep.duplicate_count:
        rep.min_distance = 0
    return rep


def unc_packing(code: Code, tau: int | None = None) -> SetSystem:
    """Supports of size >= tau, checked to form a tau-packing.

    Raises :class:`PackingViolation` naming the first tau-subset that
    appears in two supports.
    """
    p = code.params
    if tau is None:
        tau = p.tau
    blocks = []
    owner: dict[tuple[int, ...], tuple[int, ...]] = {}
    for u in code.words:
        s = u.support
        if len(s) < max(tau, 1):
            continue
        for sub in combinations(s, tau):
            if sub in owner:
                raise PackingViolation(sub, owner[sub], s)
            owner[sub] = s
        blocks.append(s)
    return SetSystem(p.n, blocks)


@dataclass(frozen=True)
class TypeCensus:
    counts: Mapping[str, int]

    def __getitem__(self, sig: str) -> int:
        return self.counts.get(sig, 0)

    def total(self) -> int:
        return sum(self.counts.values())

    def as_dict(self) -> dict[str, int]:
        return dict(sorted(self.counts.items()))

    # weight-4 ternary shorthand: x = 1^4, y = 1^2 2^1, z = 2^2
    @property
    def x(self):
        return self["1^4"]

    @property
    def y(self):
        return self["1^2 2^1"]

    @property
    def z(self):
        return self["2^2"]

    def beta(self, w: int) -> list[int]:
        """Counts of ternary types 1^(w-2j) 2^j for j = 0..w//2."""
        out = []
        for j in range(w // 2 + 1):
            parts = []
            if w - 2 * j:
                parts.append(f"1^{w - 2 * j}")
            if j:
                parts.append(f"2^{j}")
            out.append(self[" ".join(parts)])
        return out


def type_census(code: Code) -> TypeCensus:
    return TypeCensus(dict(Counter(u.signature() for u in code.words)))


# ---------------------------------------------------------------- text format

HEADER = "l1cwc v1"


def format_code(code: Code, extra_headers: Sequence[str] = (), footer: Sequence[str] = ()) -> str:
    p = code.params
    lines = [HEADER, f"params n={p.n} q={p.q_text()} w={p.w} d={p.d}"]
    lines.extend(extra_headers)
    for u in code.words:
        lines.append("c " + " ".join(f"{x}:{v}" for x, v in u.entries) if u.entries else "c")
    lines.extend(f"# {f}" for f in footer)
    return "\n".join(lines) + "\n"


_PARAM_RE = re.compile(r"params\s+n=(\d+)\s+q=(\w+)\s+w=(\d+)\s+d=(\d+)\s*$")


def parse_code_text(text: str, extra: dict | None = None) -> Code:
    """Parse the code text format.

    Lines other than the header, ``params`` and ``c`` lines are handed to
    ``extra`` (keyword -> rest of line) when given, else rejected.
    """
    params = None
    words = []
    header_seen = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not header_seen:
            if line != HEADER:
                raise FormatError(f"line {lineno}: expected {HEADER!r}")
            header_seen = True
            continue
        if line.startswith("params"):
            m = _PARAM_RE.fullmatch(line)
            if not m:
                raise FormatError(f"line {lineno}: bad params line")
            params = CodeParams(int(m.group(1)), parse_q(m.group(2)), int(m.group(3)), int(m.group(4)))
            continue
        key, _, rest = line.partition(" ")
        if key == "c":
            ents = []
            for tok in rest.split():
                m = re.fullmatch(r"(\d+):(\d+)", tok)
                if not m:
                    raise FormatError(f"line {lineno}: bad entry {tok!r}")
                ents.append((int(m.group(1)), int(m.group(2))))
            try:
                words.append(Codeword(tuple(ents)))
            except CodeError as e:
                raise FormatError(f"line {lineno}: {e}") from None
        elif extra is not None:
            extra.setdefault(key, []).append(rest.strip())
        else:
            raise FormatError(f"line {lineno}: unknown line {line!r}")
    if not header_seen:
        raise FormatError("empty file")
    if params is None:
        raise FormatError("missing params line")
    return Code(params, tuple(words))


def read_code(path) -> Code:
    with open(path) as fh:
        return parse_code_text(fh.read())


def write_code(code: Code, path, footer: Sequence[str] = ()) -> None:
    with open(path, "w") as fh:
        fh.write(format_code(code, footer=footer))


def code_from_strings(params: CodeParams, words: Iterable[str], provenance: str = "") -> Code:
    return Code(params, tuple(Codeword.parse(s) for s in words), provenance)
