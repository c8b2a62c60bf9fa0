"""Exact dyadic numbers, closed dyadic cells, binary digit streams and the
digit-interleaving code between [0,1]^d and the Cantor space."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import FormatError
from .patterns import content_lines, format_site, parse_dim, parse_site

Point = tuple[Fraction, ...]


@dataclass(frozen=True)
class Dyadic:
    """k / 2^N in canonical form (k odd or N = 0)."""

    k: int
    N: int = 0

    def __post_init__(self):
        k, N = self.k, self.N
        if N < 0:
            raise ValueError("level must be nonnegative")
        while N > 0 and k % 2 == 0:
            k //= 2
            N -= 1
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "N", N)

    @classmethod
    def from_fraction(cls, x: Fraction) -> "Dyadic":
        x = Fraction(x)
        d = x.denominator
        if d & (d - 1):
            raise ValueError(f"{x} is not dyadic")
        return cls(x.numerator, d.bit_length() - 1)

    def __float__(self):
        return self.k / 2 ** self.N

    @property
    def value(self) -> Fraction:
        return Fraction(self.k, 2 ** self.N)


def is_dyadic(x: Fraction) -> bool:
    d = Fraction(x).denominator
    return d & (d - 1) == 0


@dataclass(frozen=True)
class DyadicCell:
    """The closed cell prod_i [k_i / 2^N, (k_i + 1) / 2^N]."""

    dim: int
    level: int
    corner: tuple[int, ...]

    def __post_init__(self):
        corner = tuple(int(k) for k in self.corner)
        object.__setattr__(self, "corner", corner)
        if len(corner) != self.dim:
            raise ValueError(f"corner {corner} does not have {self.dim} coordinates")
        if self.level < 0:
            raise ValueError("cell level must be nonnegative")

    @property
    def side(self) -> Fraction:
        return Fraction(1, 2 ** self.level)

    @property
    def lo(self) -> Point:
        return tuple(Fraction(k, 2 ** self.level) for k in self.corner)

    @property
    def hi(self) -> Point:
        return tuple(Fraction(k + 1, 2 ** self.level) for k in self.corner)

    @property
    def centre(self) -> Point:
        return tuple(Fraction(2 * k + 1, 2 ** (self.level + 1)) for k in self.corner)

    def children(self) -> list["DyadicCell"]:
        return self.subcells(self.level + 1)

    def subcells(self, level: int) -> list["DyadicCell"]:
        if level < self.level:
            raise ValueError("subcells must be at least as fine")
        s = 2 ** (level - self.level)
        ranges = [range(k * s, (k + 1) * s) for k in self.corner]
        return [DyadicCell(self.dim, level, c) for c in itertools.product(*ranges)]

    def parent(self, level: int) -> "DyadicCell":
        if level > self.level:
            raise ValueError("parent must be coarser")
        s = self.level - level
        return DyadicCell(self.dim, level, tuple(k >> s for k in self.corner))

    def contains_point(self, x: Sequence[Fraction]) -> bool:
        return all(a <= xi <= b for a, xi, b in zip(self.lo, x, self.hi))

    def meets(self, other: "DyadicCell") -> bool:
        """Closed cells meet iff their intervals overlap (touching counts)."""
        return all(a1 <= b2 and a2 <= b1
                   for a1, b1, a2, b2 in zip(self.lo, self.hi, other.lo, other.hi))

    def distance_inf(self, x: Sequence[Fraction]) -> Fraction:
        """Sup-norm distance from the point x to the cell."""
        gaps = [max(a - xi, xi - b, Fraction(0)) for a, xi, b in zip(self.lo, x, self.hi)]
        return max(gaps)


def cells_meeting_box(lo: Sequence[Fraction], hi: Sequence[Fraction], level: int) -> list[tuple[int, ...]]:
    """Corners of the level-N cells meeting the closed box [lo, hi]."""
    scale = 2 ** level
    ranges = []
    for a, b in zip(lo, hi):
        ranges.append(range(math.ceil(Fraction(a) * scale) - 1, math.floor(Fraction(b) * scale) + 1))
    return list(itertools.product(*ranges))


# --- binary digit streams ---------------------------------------------------------------

@dataclass(frozen=True)
class BinaryStream:
    """x = integer + sum_j digit(j) 2^-(j+1); digits past the prefix repeat ``tail``."""

    integer: int
    prefix: tuple[int, ...] = ()
    tail: int = 0

    def digit(self, j: int) -> int:
        return self.prefix[j] if j < len(self.prefix) else self.tail

    @property
    def value(self) -> Fraction:
        x = Fraction(self.integer)
        for j, b in enumerate(self.prefix):
            x += Fraction(b, 2 ** (j + 1))
        if self.tail:
            x += Fraction(1, 2 ** len(self.prefix))
        return x


@dataclass(frozen=True)
class RationalStream:
    """Binary expansion of a rational number (the finite one when x is dyadic)."""

    x: Fraction

    @property
    def integer(self) -> int:
        return math.floor(self.x)

    def digit(self, j: int) -> int:
        return math.floor(self.x * 2 ** (j + 1)) & 1

    @property
    def value(self) -> Fraction:
        return Fraction(self.x)


def representations(x: Fraction) -> list[BinaryStream]:
    """Both binary expansions of a dyadic x: finite first, then the 1-tailed one."""
    x = Fraction(x)
    if not is_dyadic(x):
        raise ValueError(f"{x} is not dyadic")
    a = math.floor(x)
    N = x.denominator.bit_length() - 1
    if N == 0:
        return [BinaryStream(a), BinaryStream(a - 1, (), 1)]
    k = (x - a) * 2 ** N
    digits = tuple((int(k) >> (N - 1 - j)) & 1 for j in range(N))
    return [BinaryStream(a, digits, 0), BinaryStream(a, digits[:-1] + (0,), 1)]


def point_representations(x: Sequence[Fraction]) -> list[tuple[BinaryStream, ...]]:
    """All at most 2^d digit-stream representations of a dyadic point."""
    return list(itertools.product(*(representations(xi) for xi in x)))


class DigitReader:
    """Hands out digits of several streams and records how many were read."""

    def __init__(self, streams: Sequence):
        self.streams = tuple(streams)
        self.digits_read = 0

    def integer(self, i: int) -> int:
        return self.streams[i].integer

    def read(self, i: int, N: int) -> int:
        """The first N fractional digits of coordinate i, as an N-bit integer."""
        s = self.streams[i]
        out = 0
        for j in range(N):
            out = 2 * out + s.digit(j)
        self.digits_read = max(self.digits_read, N)
        return out

    def prefix_cell(self, N: int) -> DyadicCell:
        """The level-N cell of every point sharing the first N digits."""
        corner = tuple(self.integer(i) * 2 ** N + self.read(i, N) for i in range(len(self.streams)))
        return DyadicCell(len(self.streams), N, corner)


# --- the interleaving code [0,1]^d <-> {0,1}^N --------------------------------------------

def binary_digits(x: Fraction, k: int) -> list[int]:
    """First k digits of x in [0,1]; ties take the finite expansion and x = 1 is 0.111..."""
    x = Fraction(x)
    if not 0 <= x <= 1:
        raise ValueError(f"{x} is outside [0, 1]")
    if x == 1:
        return [1] * k
    v = math.floor(x * 2 ** k)
    return [(v >> (k - 1 - j)) & 1 for j in range(k)]


def encode_point(x: Sequence[Fraction], k: int) -> list[int]:
    """Bits 0 .. dk-1 of the code of x: bit dn + i is digit n of x_i (weight 2^-(n+1))."""
    d = len(x)
    digits = [binary_digits(xi, k) for xi in x]
    return [digits[i][n] for n in range(k) for i in range(d)]


def decode_prefix(bits: Sequence[int], d: int) -> DyadicCell:
    """The closed level-k cell of points whose code starts with ``bits`` (length dk)."""
    if len(bits) % d:
        raise ValueError("prefix length must be a multiple of the dimension")
    k = len(bits) // d
    corner = [0] * d
    for n in range(k):
        for i in range(d):
            corner[i] = 2 * corner[i] + bits[d * n + i]
    return DyadicCell(d, k, tuple(corner))


def cell_bits(cell: DyadicCell) -> list[int]:
    """Inverse of decode_prefix for cells inside [0,1]^d."""
    d, k = cell.dim, cell.level
    if any(not 0 <= c < 2 ** k for c in cell.corner):
        raise ValueError("cell is not inside the unit cube")
    return [(cell.corner[i] >> (k - 1 - n)) & 1 for n in range(k) for i in range(d)]


# --- text format -------------------------------------------------------------------------

def format_cell(cell: DyadicCell) -> str:
    return f"cell level={cell.level} corner={format_site(cell.corner)}"


def parse_cell(line: str, lineno=None, dim: int | None = None) -> DyadicCell:
    parts = line.split()
    if len(parts) != 3 or parts[0] != "cell":
        raise FormatError("expected 'cell level=<N> corner=<k1,...,kd>'", lineno)
    fields = {}
    for item in parts[1:]:
        key, eq, val = item.partition("=")
        if not eq or key not in ("level", "corner") or key in fields:
            raise FormatError(f"bad field {item!r}", lineno)
        fields[key] = val
    if set(fields) != {"level", "corner"}:
        raise FormatError("cell needs level= and corner=", lineno)
    try:
        level = int(fields["level"])
    except ValueError:
        raise FormatError(f"bad level {fields['level']!r}", lineno) from None
    if level < 0:
        raise FormatError("level must be nonnegative", lineno)
    corner = parse_site(fields["corner"], dim, lineno)
    return DyadicCell(len(corner), level, corner)


def write_cells(cells: Iterable[DyadicCell]) -> str:
    cells = list(cells)
    if not cells:
        raise ValueError("nothing to write")
    out = [f"dim {cells[0].dim}"] + [format_cell(c) for c in cells]
    return "\n".join(out) + "\n"


def parse_cells(text: str) -> list[DyadicCell]:
    lines = content_lines(text)
    dim = None
    if lines and lines[0][1].split()[0] == "dim":
        lineno, line = lines.pop(0)
        dim = parse_dim(line[3:].strip(), lineno)
    cells = []
    for lineno, line in lines:
        cell = parse_cell(line, lineno, dim)
        if dim is None:
            dim = cell.dim
        cells.append(cell)
    if not cells:
        raise FormatError("no cells")
    return cells


def parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise FormatError(f"bad rational {text!r}") from None


def format_fraction(x: Fraction) -> str:
    return str(Fraction(x))
