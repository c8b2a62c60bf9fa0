"""Alphabets, finite patterns on Z^d, shifts of finite type and admissibility.

A pattern is a sparse map from sites (integer d-tuples) to symbol indices.
Forbidden patterns are stored in translation-normal form: the support is
shifted so that its lexicographically smallest site sits at the origin.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import BudgetExhausted, DimensionMismatch, FormatError, SupportNotContained
from .search import Budget, Problem

Site = tuple[int, ...]


def add_sites(u: Site, v: Site) -> Site:
    return tuple(a + b for a, b in zip(u, v))


def sub_sites(u: Site, v: Site) -> Site:
    return tuple(a - b for a, b in zip(u, v))


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple[str, ...]

    def __post_init__(self):
        symbols = tuple(str(s) for s in self.symbols)
        object.__setattr__(self, "symbols", symbols)
        if not symbols:
            raise ValueError("alphabet must be nonempty")
        if len(set(symbols)) != len(symbols):
            raise ValueError(f"duplicate symbol names in {symbols}")
        for s in symbols:
            if not s or any(c.isspace() for c in s) or any(c in s for c in ",=#:;") or s == "->":
                raise ValueError(f"bad symbol name {s!r}")

    @classmethod
    def of_size(cls, k: int) -> "Alphabet":
        return cls(tuple(str(i) for i in range(k)))

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def index(self, name: str) -> int:
        try:
            return self.symbols.index(name)
        except ValueError:
            raise KeyError(f"unknown symbol {name!r}") from None

    def name(self, i: int) -> str:
        return self.symbols[i]

    @property
    def compact(self) -> bool:
        """True if every name is one character, so words can be concatenated."""
        return all(len(s) == 1 for s in self.symbols)

    def format_word(self, word: Sequence[int]) -> str:
        names = [self.symbols[s] for s in word]
        return "".join(names) if self.compact else ",".join(names)

    def parse_word(self, text: str) -> tuple[int, ...]:
        text = text.strip()
        if "," in text:
            parts = [p.strip() for p in text.split(",")]
        elif " " in text:
            parts = text.split()
        elif self.compact:
            parts = list(text)
        else:
            parts = [text]
        return tuple(self.index(p) for p in parts)


@dataclass(frozen=True)
class Box:
    lo: Site
    hi: Site

    def __post_init__(self):
        lo, hi = tuple(self.lo), tuple(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if len(lo) != len(hi) or not lo:
            raise DimensionMismatch("box corners must share a positive dimension")
        if any(a > b for a, b in zip(lo, hi)):
            raise ValueError(f"empty box {lo}..{hi}")

    @classmethod
    def cube(cls, n: int, dim: int) -> "Box":
        """The box [-n; n]^dim."""
        return cls((-n,) * dim, (n,) * dim)

    @classmethod
    def corner(cls, n: int, dim: int) -> "Box":
        """The box [0; n-1]^dim."""
        return cls((0,) * dim, (n - 1,) * dim)

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(b - a + 1 for a, b in zip(self.lo, self.hi))

    @property
    def size(self) -> int:
        return math.prod(self.shape)

    def sites(self) -> list[Site]:
        return list(itertools.product(*(range(a, b + 1) for a, b in zip(self.lo, self.hi))))

    def __contains__(self, site: Site) -> bool:
        return all(a <= x <= b for a, x, b in zip(self.lo, site, self.hi))

    def contains_box(self, other: "Box") -> bool:
        return other.lo in self and other.hi in self

    def expand(self, lo_pad: Sequence[int], hi_pad: Sequence[int]) -> "Box":
        return Box(sub_sites(self.lo, tuple(lo_pad)), add_sites(self.hi, tuple(hi_pad)))


@dataclass(frozen=True)
class Pattern:
    """Finite coloring of a nonempty set of sites. Built from a mapping or pairs."""

    dim: int
    cells: tuple[tuple[Site, int], ...] = field()

    def __init__(self, dim: int, cells: Mapping[Site, int] | Iterable[tuple[Site, int]]):
        items = cells.items() if isinstance(cells, Mapping) else cells
        norm: dict[Site, int] = {}
        for site, sym in items:
            site = tuple(int(x) for x in site)
            if len(site) != dim:
                raise DimensionMismatch(f"site {site} has arity {len(site)}, expected {dim}")
            if site in norm and norm[site] != sym:
                raise ValueError(f"conflicting symbols at {site}")
            norm[site] = int(sym)
        if dim < 1:
            raise ValueError("dimension must be positive")
        if not norm:
            raise ValueError("pattern support must be nonempty")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "cells", tuple(sorted(norm.items())))

    @classmethod
    def from_word(cls, word: Sequence[int], start: int = 0) -> "Pattern":
        return cls(1, {(start + i,): s for i, s in enumerate(word)})

    @classmethod
    def from_grid(cls, rows: Sequence[Sequence[int]], origin: Site = (0, 0)) -> "Pattern":
        """2D pattern with ``rows[i][j]`` at site ``origin + (i, j)``."""
        return cls(2, {(origin[0] + i, origin[1] + j): s
                       for i, row in enumerate(rows) for j, s in enumerate(row)})

    @classmethod
    def on_box(cls, box: Box, values: Sequence[int]) -> "Pattern":
        """Total pattern on ``box`` with values listed in lexicographic site order."""
        return cls(box.dim, zip(box.sites(), values))

    @cached_property
    def mapping(self) -> dict[Site, int]:
        return dict(self.cells)

    @property
    def support(self) -> tuple[Site, ...]:
        return tuple(s for s, _ in self.cells)

    def __getitem__(self, site: Site) -> int:
        return self.mapping[site]

    def __len__(self) -> int:
        return len(self.cells)

    def symbols(self) -> tuple[int, ...]:
        return tuple(v for _, v in self.cells)

    def translate(self, u: Site) -> "Pattern":
        return Pattern(self.dim, ((add_sites(s, u), v) for s, v in self.cells))

    def normal_form(self) -> "Pattern":
        first = self.cells[0][0]
        if not any(first):
            return self
        return self.translate(tuple(-x for x in first))

    def restrict(self, sites: Iterable[Site]) -> "Pattern":
        m = self.mapping
        return Pattern(self.dim, ((s, m[s]) for s in sites if s in m))

    @cached_property
    def bounding_box(self) -> Box:
        sup = self.support
        lo = tuple(min(s[i] for s in sup) for i in range(self.dim))
        hi = tuple(max(s[i] for s in sup) for i in range(self.dim))
        return Box(lo, hi)

    @property
    def extent(self) -> tuple[int, ...]:
        return self.bounding_box.shape

    @property
    def diameter(self) -> int:
        return max(self.extent) - 1

    def is_total_on(self, box: Box) -> bool:
        return len(self.cells) == box.size and all(s in box for s in self.support)

    def values_on(self, box: Box) -> tuple[int, ...]:
        m = self.mapping
        return tuple(m[s] for s in box.sites())

    def word(self) -> tuple[int, ...]:
        """Symbols in site order (the 1D word when the support is an interval)."""
        return self.symbols()


@dataclass(frozen=True)
class SftSpec:
    alphabet: Alphabet
    dim: int
    forbidden: tuple[Pattern, ...] = ()

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be positive")
        seen = set()
        for p in self.forbidden:
            if p.dim != self.dim:
                raise DimensionMismatch(f"forbidden pattern of dim {p.dim} in a {self.dim}-dim spec")
            for s in p.symbols():
                if not 0 <= s < len(self.alphabet):
                    raise ValueError(f"symbol index {s} outside alphabet of size {len(self.alphabet)}")
            seen.add(p.normal_form())
        object.__setattr__(self, "forbidden", tuple(sorted(seen, key=pattern_key)))

    @property
    def max_extent(self) -> tuple[int, ...]:
        """Per-axis maximum extent of the forbidden patterns (1 when there are none)."""
        if not self.forbidden:
            return (1,) * self.dim
        return tuple(max(p.extent[i] for p in self.forbidden) for i in range(self.dim))

    @property
    def max_diameter(self) -> int:
        return max((p.diameter for p in self.forbidden), default=0)


def pattern_key(p: Pattern):
    return (len(p.cells), p.cells)


def _check_dims(*patterns: Pattern) -> None:
    dims = {p.dim for p in patterns}
    if len(dims) != 1:
        raise DimensionMismatch(f"dimension mismatch: {sorted(dims)}")


def appears_at(a: Pattern, b: Pattern, u: Site) -> bool:
    """Whether ``b`` occurs in ``a`` shifted by ``u``: a(u+v) == b(v) on support(b)."""
    _check_dims(a, b)
    if len(u) != a.dim:
        raise DimensionMismatch(f"offset {u} has wrong arity")
    am = a.mapping
    for v, sym in b.cells:
        w = add_sites(u, v)
        if w not in am:
            raise SupportNotContained(f"support(b)+{u} is not inside support(a)")
    return all(am[add_sites(u, v)] == sym for v, sym in b.cells)


def is_admissible(a: Pattern, spec: SftSpec) -> bool:
    if a.dim != spec.dim:
        raise DimensionMismatch(f"pattern dim {a.dim} vs spec dim {spec.dim}")
    am = a.mapping
    for b in spec.forbidden:
        anchor = b.cells[0][0]  # origin in normal form
        for s in a.support:
            u = sub_sites(s, anchor)
            for v, sym in b.cells:
                got = am.get(add_sites(u, v))
                if got != sym:
                    break
            else:
                return False
    return True


def placements(b: Pattern, box: Box) -> Iterator[Site]:
    """Offsets u with support(b)+u inside ``box``."""
    bb = b.bounding_box
    ranges = [range(lo - blo, hi - bhi + 1)
              for lo, hi, blo, bhi in zip(box.lo, box.hi, bb.lo, bb.hi)]
    return itertools.product(*ranges)


def box_problem(spec: SftSpec, box: Box, order: Sequence[Site] | None = None):
    """Backtracking problem whose solutions are the admissible patterns on ``box``.

    Returns ``(problem, sites)`` where ``sites[i]`` is the site of variable i.
    """
    sites = list(order) if order is not None else box.sites()
    index = {s: i for i, s in enumerate(sites)}
    prob = Problem([len(spec.alphabet)] * len(sites))
    for b in spec.forbidden:
        for u in placements(b, box):
            prob.forbid((index[add_sites(u, v)], sym) for v, sym in b.cells)
    return prob, sites


def admissible_values(spec: SftSpec, box: Box, budget: Budget | int | None = None):
    """Admissible patterns on ``box`` as value tuples in lexicographic site order."""
    if box.dim != spec.dim:
        raise DimensionMismatch(f"box dim {box.dim} vs spec dim {spec.dim}")
    prob, _ = box_problem(spec, box)
    for sol in prob.solutions(budget):
        yield tuple(sol)


def enumerate_admissible(spec: SftSpec, box: Box,
                         budget: Budget | int | None = None) -> Iterator[Pattern]:
    """Yield every admissible pattern on ``box`` once, lexicographically.

    Raises BudgetExhausted after a prefix if the node budget runs out.
    """
    sites = box.sites()
    for values in admissible_values(spec, box, budget):
        yield Pattern(spec.dim, zip(sites, values))


def count_admissible(spec: SftSpec, n: int, budget: Budget | int | None = None) -> int:
    if n < 1:
        raise ValueError("n must be at least 1")
    return sum(1 for _ in admissible_values(spec, Box.corner(n, spec.dim), budget))


def entropy_upper(spec: SftSpec, n: int, budget: Budget | int | None = None) -> float:
    """log(#admissible patterns on [0, n-1]^d) / n^d; -inf when there are none."""
    count = count_admissible(spec, n, budget)
    if count == 0:
        return float("-inf")
    return math.log(count) / n ** spec.dim


# --- text format --------------------------------------------------------------

def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_site(text: str, dim: int | None = None, lineno: int | None = None) -> Site:
    try:
        site = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise FormatError(f"bad site {text!r}", lineno) from None
    if dim is not None and len(site) != dim:
        raise FormatError(f"site {text!r} should have {dim} coordinates", lineno)
    return site


def format_site(site: Site) -> str:
    return ",".join(str(x) for x in site)


def parse_header(lines: list[tuple[int, str]], keys: Sequence[str]) -> dict[str, str]:
    """Consume leading ``key value`` lines for the given keys."""
    out = {}
    while lines and lines[0][1].split(None, 1)[0] in keys:
        lineno, line = lines.pop(0)
        parts = line.split(None, 1)
        if len(parts) != 2:
            raise FormatError(f"missing value for {parts[0]!r}", lineno)
        if parts[0] in out:
            raise FormatError(f"duplicate {parts[0]!r}", lineno)
        out[parts[0]] = parts[1]
    missing = [k for k in keys if k not in out]
    if missing:
        raise FormatError(f"missing header line(s): {', '.join(missing)}")
    return out


def content_lines(text: str) -> list[tuple[int, str]]:
    out = []
    for i, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if line:
            out.append((i, line))
    return out


def parse_dim(text: str, lineno=None) -> int:
    try:
        d = int(text)
    except ValueError:
        raise FormatError(f"bad dimension {text!r}", lineno) from None
    if d < 1:
        raise FormatError("dimension must be positive", lineno)
    return d


def parse_alphabet(text: str) -> Alphabet:
    try:
        return Alphabet(tuple(text.split()))
    except ValueError as e:
        raise FormatError(str(e)) from None


def parse_sft(text: str) -> SftSpec:
    lines = content_lines(text)
    head = parse_header(lines, ("dim", "alphabet"))
    dim = parse_dim(head["dim"])
    alphabet = parse_alphabet(head["alphabet"])
    blocks: list[dict[Site, int]] = []
    for lineno, line in lines:
        if line == "forbid":
            blocks.append({})
            continue
        if not line.startswith("site "):
            raise FormatError(f"unexpected line {line!r}", lineno)
        if not blocks:
            raise FormatError("site line outside a forbid block", lineno)
        lhs, eq, rhs = line[5:].partition("=")
        if not eq:
            raise FormatError("expected 'site x1,...,xd = symbol'", lineno)
        site = parse_site(lhs.strip(), dim, lineno)
        try:
            sym = alphabet.index(rhs.strip())
        except KeyError as e:
            raise FormatError(e.args[0], lineno) from None
        if site in blocks[-1]:
            raise FormatError(f"site {lhs.strip()} repeated", lineno)
        blocks[-1][site] = sym
    if any(not b for b in blocks):
        raise FormatError("empty forbid block")
    return SftSpec(alphabet, dim, tuple(Pattern(dim, b) for b in blocks))


def write_sft(spec: SftSpec) -> str:
    out = [f"dim {spec.dim}", "alphabet " + " ".join(spec.alphabet.symbols)]
    for p in spec.forbidden:
        out.append("forbid")
        for site, sym in p.cells:
            out.append(f"site {format_site(site)} = {spec.alphabet.name(sym)}")
    return "\n".join(out) + "\n"


__all__ = [
    "Alphabet", "Box", "BudgetExhausted", "Pattern", "SftSpec", "Site",
    "appears_at", "count_admissible", "entropy_upper", "enumerate_admissible",
    "is_admissible", "parse_sft", "write_sft",
]
