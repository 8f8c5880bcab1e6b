"""Developing base codewords under a permutation of positions."""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass
from importlib import resources
from math import lcm
from pathlib import Path

from .bounds import U, known_value, z_cap
from .core import Code, CodeParams, Codeword, FormatError, VerificationReport, parse_code_text, type_census, verify_code


class ParseError(ValueError):
    pass


class OverlappingCycles(ParseError):
    pass


class PointOutOfRange(ParseError):
    pass


class TableMismatch(Exception):
    def __init__(self, detail: str, report: VerificationReport | None = None):
        super().__init__(detail)
        self.detail = detail
        self.report = report


@dataclass(frozen=True)
class Permutation:
    images: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.images) != list(range(len(self.images))):
            raise ValueError("not a bijection")

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @classmethod
    def shift(cls, n: int, step: int = 1) -> "Permutation":
        return cls(tuple((i + step) % n for i in range(n)))

    def __len__(self):
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x]

    def cycles(self) -> list[tuple[int, ...]]:
        seen = set()
        out = []
        for s in range(len(self.images)):
            if s in seen:
                continue
            cyc = []
            x = s
            while x not in seen:
                seen.add(x)
                cyc.append(x)
                x = self.images[x]
            out.append(tuple(cyc))
        return out

    def order(self) -> int:
        return lcm(*(len(c) for c in self.cycles())) if self.images else 1

    def compose(self, other: "Permutation") -> "Permutation":
        """``self`` after ``other``."""
        return Permutation(tuple(self.images[other.images[i]] for i in range(len(self.images))))

    def apply(self, word: Codeword) -> Codeword:
        return Codeword(tuple((self.images[x], v) for x, v in word.entries))

    def __str__(self):
        return "".join("(" + " ".join(map(str, c)) + ")" for c in self.cycles() if len(c) > 1) or "()"


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str, n: int) -> Permutation:
    """Parse cycle notation such as ``(0 6 12 18)(24 25)``; unlisted points are fixed."""
    stripped = _CYCLE_RE.sub("", text)
    if stripped.strip():
        raise ParseError(f"unexpected text outside cycles: {stripped.strip()!r}")
    images = list(range(n))
    used: set[int] = set()
    for body in _CYCLE_RE.findall(text):
        toks = body.replace(",", " ").split()
        try:
            pts = [int(t) for t in toks]
        except ValueError:
            raise ParseError(f"non-integer in cycle ({body})") from None
        for p in pts:
            if not 0 <= p < n:
                raise PointOutOfRange(f"point {p} not in [0,{n})")
            if p in used:
                raise OverlappingCycles(f"point {p} appears twice")
            used.add(p)
        for a, b in zip(pts, pts[1:] + pts[:1]):
            images[a] = b
    return Permutation(tuple(images))


@dataclass(frozen=True)
class BaseBlockSet:
    params: CodeParams
    bases: tuple[Codeword, ...]
    perm: Permutation
    repeat: int | None = None  # take at most this many images per orbit
    expect_size: int | None = None
    flags: frozenset = frozenset()

    @property
    def n(self) -> int:
        return self.params.n


def orbit(word: Codeword, perm: Permutation, cap: int | None = None) -> list[Codeword]:
    out = [word]
    cur = perm.apply(word)
    while cur != word and (cap is None or len(out) < cap):
        out.append(cur)
        cur = perm.apply(cur)
    return out


def develop(b: BaseBlockSet) -> Code:
    if len(b.perm) != b.n:
        raise ValueError(f"permutation on {len(b.perm)} points, code length {b.n}")
    words: dict[Codeword, None] = {}
    for base in b.bases:
        if base.entries and base.support[-1] >= b.n:
            raise PointOutOfRange(f"base codeword {base} has a position outside [0,{b.n})")
        for u in orbit(base, b.perm, b.repeat):
            words[u] = None
    return Code(b.params, tuple(words), "developed base codewords")


# ------------------------------------------------------------------ file I/O


def parse_base_blocks(text: str) -> BaseBlockSet:
    extra: dict[str, list[str]] = {}
    code = parse_code_text(text, extra)
    unknown = set(extra) - {"perm", "expect", "repeat"}
    if unknown:
        raise FormatError(f"unknown keywords {sorted(unknown)}")
    perm_text = " ".join(extra.get("perm", []))
    try:
        perm = parse_cycles(perm_text, code.params.n)
    except ParseError as e:
        raise FormatError(f"bad perm line: {e}") from None
    expect_size = None
    flags = set()
    for line in extra.get("expect", []):
        for tok in line.split():
            if tok.startswith("size="):
                expect_size = int(tok[5:])
            elif tok in ("propertyA", "propertyB"):
                flags.add(tok)
            else:
                raise FormatError(f"bad expect token {tok!r}")
    repeat = int(extra["repeat"][0]) if "repeat" in extra else None
    return BaseBlockSet(code.params, tuple(code.words), perm, repeat, expect_size, frozenset(flags))


def format_base_blocks(b: BaseBlockSet, comments=()) -> str:
    p = b.params
    lines = ["l1cwc v1"]
    lines.extend(f"# {c}" for c in comments)
    lines.append(f"params n={p.n} q={p.q_text()} w={p.w} d={p.d}")
    lines.append(f"perm {b.perm}")
    exp = []
    if b.expect_size is not None:
        exp.append(f"size={b.expect_size}")
    exp.extend(sorted(b.flags))
    if exp:
        lines.append("expect " + " ".join(exp))
    for u in b.bases:
        lines.append("c " + " ".join(f"{x}:{v}" for x, v in u.entries))
    return "\n".join(lines) + "\n"


def load_base_blocks(path) -> BaseBlockSet:
    return parse_base_blocks(Path(path).read_text())


TABLES_ENV = "L1CWC_CATALOG_DIR"


def tables_dir() -> Path:
    override = os.environ.get(TABLES_ENV)
    if override:
        return Path(override) / "tables"
    return Path(str(resources.files("l1cwc") / "data" / "tables"))


def manifest() -> dict[str, dict]:
    with open(tables_dir() / "manifest.json") as fh:
        return json.load(fh)["tables"]


def load_table(table_id: str) -> BaseBlockSet:
    entries = manifest()
    if table_id not in entries:
        raise KeyError(f"unknown table {table_id!r}")
    return load_base_blocks(tables_dir() / entries[table_id]["file"])


# ------------------------------------------------------------ code properties


def leave_pairs(code: Code) -> set[tuple[int, int]]:
    """Pairs of positions not covered by any codeword support."""
    covered = set()
    for u in code.words:
        s = u.support
        for i in range(len(s)):
            for j in range(i + 1, len(s)):
                covered.add((s[i], s[j]))
    n = code.params.n
    return {(a, b) for a in range(n) for b in range(a + 1, n)} - covered


def _is_w4_d6_ternary(code: Code) -> bool:
    p = code.params
    return p.q == 3 and p.w == 4 and p.d == 6


def check_property_A(code: Code) -> bool:
    """Size U(n), n-1 words of type 1^2 2^1 and none of type 2^2."""
    if not _is_w4_d6_ternary(code) or not verify_code(code).ok:
        return False
    n = code.params.n
    c = type_census(code)
    if not (len(code) == U(n) and c.y == n - 1 and c.z == 0 and c.x + c.y == len(code)):
        return False
    # for these lengths the pair count forces the leave to be empty
    return n % 12 not in (1, 6, 9, 10) or not leave_pairs(code)


def check_property_B(code: Code) -> bool:
    """Size U(n), n-2 words of type 1^2 2^1 and exactly one of type 2^2."""
    if not _is_w4_d6_ternary(code) or not verify_code(code).ok:
        return False
    n = code.params.n
    c = type_census(code)
    if not (len(code) == U(n) and c.y == n - 2 and c.z == 1 and c.x + c.y + c.z == len(code)):
        return False
    if n % 12 not in (2, 5):
        return True
    zz = two_two_word(code)
    rest = code.with_words([u for u in code.words if u != zz])
    return leave_pairs(rest) == {zz.support}


def two_two_word(code: Code) -> Codeword | None:
    for u in code.words:
        if u.signature() == "2^2":
            return u
    return None


def symbol2_positions(code: Code) -> list[int]:
    return sorted(x for u in code.words for x, v in u.entries if v == 2)


# ----------------------------------------------------------------- verification


def verify_table(table_id: str) -> tuple[Code, VerificationReport]:
    """Develop a bundled table and check it against its recorded claims."""
    entry = manifest()[table_id]
    b = load_table(table_id)
    code = develop(b)
    report = verify_code(code)
    p = b.params
    if not report.ok or report.min_distance < p.d:
        raise TableMismatch(f"{table_id}: {report.summary()}", report)
    expected = entry["size"]
    if b.expect_size is not None and b.expect_size != expected:
        raise TableMismatch(f"{table_id}: file expects {b.expect_size}, manifest {expected}", report)
    if len(code) != expected:
        raise TableMismatch(f"{table_id}: developed {len(code)} words, expected {expected}", report)
    known = known_value(p)
    if len(code) > known.hi:
        raise TableMismatch(f"{table_id}: {len(code)} words exceeds upper bound {known.hi}", report)
    if _is_w4_d6_ternary(code) and len(code) == U(p.n) and type_census(code).z > z_cap(p.n):
        raise TableMismatch(f"{table_id}: too many 2^2 words for a code of size U(n)", report)
    flags = set(entry.get("flags", [])) | set(b.flags)
    if "propertyA" in flags and not check_property_A(code):
        raise TableMismatch(f"{table_id}: Property A fails", report)
    if "propertyB" in flags and not check_property_B(code):
        raise TableMismatch(f"{table_id}: Property B fails", report)
    return code, report
