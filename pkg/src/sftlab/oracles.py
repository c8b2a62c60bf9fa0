"""Precision oracles for maps on R^d, all in exact rational arithmetic.

An oracle answers a query (digit streams of x, precision m) with a rational
point within 1/m of f(x) in the sup norm, reading only finitely many digits.
Every oracle here reads N digits per coordinate, where N is chosen from a
sup-norm Lipschitz bound L so that 2^N >= L m. It then evaluates f to within
1/(2m) at the centre of the level-N cell those digits determine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Sequence

from .dyadic import DigitReader, DyadicCell, Point, parse_fraction
from .errors import DomainViolation, FormatError
from .patterns import content_lines, parse_dim


class MapOracle:
    dim: int
    lipschitz: Fraction

    def in_domain(self, x: Point) -> bool:
        return True

    def approx_at(self, x: Point, m: int) -> Point:
        """A point within 1/m of f(x); x must lie in the domain."""
        raise NotImplementedError

    def digits_needed(self, m: int) -> int:
        """Least N with 2^N >= L m."""
        target = self.lipschitz * m
        N = 0
        while 2 ** N < target:
            N += 1
        return N

    def precision_for(self, N: int) -> int:
        """Largest precision answered after reading N digits."""
        if self.lipschitz == 0:
            return 2 ** (N + 8)
        return math.floor(Fraction(2 ** N) / self.lipschitz)

    def query(self, streams: Sequence, m: int) -> tuple[Point, int]:
        if m < 1:
            raise ValueError("precision must be a positive integer")
        if len(streams) != self.dim:
            raise ValueError(f"expected {self.dim} coordinates")
        reader = DigitReader(streams)
        y = self.answer_cell(reader.prefix_cell(self.digits_needed(m)), m)
        return y, reader.digits_read

    def answer_cell(self, cell: DyadicCell, m: int) -> Point:
        """The answer shared by every query whose digit prefix fixes ``cell``."""
        c = cell.centre
        if not self.in_domain(c):
            raise DomainViolation(f"query near {tuple(map(str, c))} leaves the domain")
        return self.approx_at(c, 2 * m)


def _sup_rowsum(matrix) -> Fraction:
    return max((sum(abs(a) for a in row) for row in matrix), default=Fraction(0))


@dataclass(frozen=True)
class AffineOracle(MapOracle):
    """x -> A x + b, evaluated exactly."""

    matrix: tuple[tuple[Fraction, ...], ...]
    offset: tuple[Fraction, ...]

    def __post_init__(self):
        matrix = tuple(tuple(Fraction(a) for a in row) for row in self.matrix)
        offset = tuple(Fraction(b) for b in self.offset)
        d = len(offset)
        if d == 0 or len(matrix) != d or any(len(row) != d for row in matrix):
            raise ValueError("affine map needs a square matrix matching the offset")
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "offset", offset)

    @property
    def dim(self) -> int:
        return len(self.offset)

    @property
    def lipschitz(self) -> Fraction:
        return _sup_rowsum(self.matrix)

    def exact(self, x: Point) -> Point:
        return tuple(sum((a * xi for a, xi in zip(row, x)), Fraction(0)) + b
                     for row, b in zip(self.matrix, self.offset))

    def approx_at(self, x: Point, m: int) -> Point:
        return self.exact(x)


def scalar_affine(a, b) -> AffineOracle:
    return AffineOracle(((Fraction(a),),), (Fraction(b),))


def identity_oracle(dim: int = 1) -> AffineOracle:
    return AffineOracle(tuple(tuple(Fraction(int(i == j)) for j in range(dim)) for i in range(dim)),
                        (Fraction(0),) * dim)


@lru_cache(maxsize=64)
def _cos_sin_one(K: int) -> tuple[int, int]:
    """floor(cos 1 * 2^K) and floor(sin 1 * 2^K) from alternating Taylor series."""
    tol = Fraction(1, 2 ** (K + 4))
    cos = sin = Fraction(0)
    term = Fraction(1)  # 1/j!
    j = 0
    while term > tol:
        if j % 4 == 0:
            cos += term
        elif j % 4 == 1:
            sin += term
        elif j % 4 == 2:
            cos -= term
        else:
            sin -= term
        j += 1
        term /= j
    # truncation error < tol, far below one unit of 2^-K
    return math.floor(cos * 2 ** K), math.floor(sin * 2 ** K)


SQRT2_UP = Fraction(1415, 1000)


@dataclass(frozen=True)
class SpiralOracle(MapOracle):
    """Planar map that in polar coordinates about ``center`` (lengths measured in units
    of ``scale``) sends (r, t) to (1/2 + r/2, t + 1).  The unit circle is its attractor.
    Queries closer to the centre than ``rmin`` units are refused."""

    center: tuple[Fraction, Fraction] = (Fraction(0), Fraction(0))
    scale: Fraction = Fraction(1)
    rmin: Fraction = Fraction(1, 2)

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(Fraction(c) for c in self.center))
        object.__setattr__(self, "scale", Fraction(self.scale))
        object.__setattr__(self, "rmin", Fraction(self.rmin))
        if len(self.center) != 2 or self.scale <= 0 or self.rmin <= 0:
            raise ValueError("spiral needs a planar centre and positive scale and rmin")

    dim = 2

    @property
    def lipschitz(self) -> Fraction:
        # p -> p/|p| is 1/rmin-Lipschitz off the rmin-ball (Euclidean); sup <= euclid <= sqrt2 sup
        return SQRT2_UP * (Fraction(1, 2) + 1 / (2 * self.rmin))

    def _local(self, x: Point) -> list[tuple[int, int]]:
        """(numerator, positive denominator) of each local coordinate (x - center) / scale."""
        sn, sd = self.scale.numerator, self.scale.denominator
        out = []
        for xi, c in zip(x, self.center):
            xn, xd = xi.numerator, xi.denominator
            out.append(((xn * c.denominator - c.numerator * xd) * sd, xd * c.denominator * sn))
        return out

    def _outside_disc(self, q) -> bool:
        (xn, xd), (yn, yd) = q
        rn, rd = self.rmin.numerator, self.rmin.denominator
        return (xn * xn * yd * yd + yn * yn * xd * xd) * rd * rd >= rn * rn * xd * xd * yd * yd

    def in_domain(self, x: Point) -> bool:
        return self._outside_disc(self._local(x))

    @cached_property
    def _k_floor(self) -> int:
        # keeps 2^-K below rmin / 8
        return (-(-8 * self.rmin.denominator // self.rmin.numerator) - 1).bit_length()

    def approx_at(self, x: Point, m: int) -> Point:
        q = self._local(x)
        if not self._outside_disc(q):
            raise DomainViolation("spiral evaluated inside its excluded disc")
        (xn, xd), (yn, yd) = q
        # work in units of 2^-K; the steps below lose at most
        # 9 + 4/rmin + 2(|qx| + |qy|) units, and the answer is then scaled by ``scale``
        m_local = -(-m * self.scale.numerator // self.scale.denominator)
        l1 = -(-(abs(xn) * yd + abs(yn) * xd) // (xd * yd))
        budget = 9 + -(-4 * self.rmin.denominator // self.rmin.numerator) + 2 * l1
        K = max(8, self._k_floor, (budget * m_local - 1).bit_length())
        X = (xn << K) // xd
        Y = (yn << K) // yd
        root = math.isqrt(X * X + Y * Y)
        ux, uy = (X << K) // root, (Y << K) // root
        C, S = _cos_sin_one(K)
        hx, hy = X + ux, Y + uy  # twice (q/2 + q/2|q|)
        den = 2 ** (2 * K + 1)
        sn, sd = self.scale.numerator, self.scale.denominator
        out = []
        for c, num in zip(self.center, (C * hx - S * hy, S * hx + C * hy)):
            out.append(Fraction(c.numerator * sd * den + sn * num * c.denominator,
                                c.denominator * sd * den))
        return tuple(out)


@dataclass(frozen=True)
class ComposedOracle(MapOracle):
    """outer o inner.  The outer Lipschitz bound must hold near the inner image."""

    outer: MapOracle
    inner: MapOracle

    def __post_init__(self):
        if self.outer.dim != self.inner.dim:
            raise ValueError("composed maps must share the dimension")

    @property
    def dim(self) -> int:
        return self.inner.dim

    @property
    def lipschitz(self) -> Fraction:
        return self.outer.lipschitz * self.inner.lipschitz

    def in_domain(self, x: Point) -> bool:
        return self.inner.in_domain(x)

    def approx_at(self, x: Point, m: int) -> Point:
        lo = self.outer.lipschitz
        y = self.inner.approx_at(x, max(1, math.ceil(2 * lo * m)))
        if not self.outer.in_domain(y):
            raise DomainViolation("inner image leaves the outer domain")
        return self.outer.approx_at(y, 2 * m)


def compose(*oracles: MapOracle) -> MapOracle:
    """compose(f1, f2, ..., fk) applies f1 first."""
    if not oracles:
        raise ValueError("nothing to compose")
    out = oracles[0]
    for o in oracles[1:]:
        out = ComposedOracle(o, out)
    return out


# --- declarative oracle files ---------------------------------------------------------

def _parse_vector(text: str, d: int) -> tuple[Fraction, ...]:
    parts = text.split(",")
    if len(parts) != d:
        raise FormatError(f"expected {d} components in {text!r}")
    return tuple(parse_fraction(p) for p in parts)


def _parse_map(line: str, d: int, lineno) -> MapOracle:
    words = line.split()
    kind, fields = words[1] if len(words) > 1 else "", {}
    for item in words[2:]:
        key, eq, val = item.partition("=")
        if not eq or key in fields:
            raise FormatError(f"bad field {item!r}", lineno)
        fields[key] = val
    try:
        if kind == "affine" and set(fields) == {"matrix", "offset"}:
            rows = fields["matrix"].split(";")
            if len(rows) != d:
                raise FormatError(f"matrix needs {d} rows", lineno)
            return AffineOracle(tuple(_parse_vector(r, d) for r in rows), _parse_vector(fields["offset"], d))
        if kind == "spiral" and d == 2 and set(fields) <= {"center", "scale", "rmin"}:
            kw = {}
            if "center" in fields:
                kw["center"] = _parse_vector(fields["center"], 2)
            if "scale" in fields:
                kw["scale"] = parse_fraction(fields["scale"])
            if "rmin" in fields:
                kw["rmin"] = parse_fraction(fields["rmin"])
            return SpiralOracle(**kw)
    except FormatError as e:
        raise FormatError(str(e), lineno) from None
    except ValueError as e:
        raise FormatError(str(e), lineno) from None
    raise FormatError(f"unknown map {line!r}", lineno)


def parse_oracle(text: str) -> MapOracle:
    """``dim d`` then ``map affine matrix=a,b;c,d offset=e,f`` or
    ``map spiral center=x,y scale=s rmin=r`` lines, applied top to bottom."""
    lines = content_lines(text)
    if not lines or lines[0][1].split()[0] != "dim":
        raise FormatError("expected 'dim <d>' first")
    lineno, line = lines.pop(0)
    d = parse_dim(line[3:].strip(), lineno)
    maps = []
    for lineno, line in lines:
        if line.split()[0] != "map":
            raise FormatError(f"unexpected line {line!r}", lineno)
        maps.append(_parse_map(line, d, lineno))
    if not maps:
        raise FormatError("no maps")
    return compose(*maps)


def _fmt_vec(v) -> str:
    return ",".join(str(Fraction(x)) for x in v)


def write_oracle(oracle: MapOracle) -> str:
    chain = []
    o = oracle
    while isinstance(o, ComposedOracle):
        chain.append(o.outer)
        o = o.inner
    chain.append(o)
    out = [f"dim {oracle.dim}"]
    for m in reversed(chain):
        if isinstance(m, AffineOracle):
            out.append(f"map affine matrix={';'.join(_fmt_vec(r) for r in m.matrix)} offset={_fmt_vec(m.offset)}")
        elif isinstance(m, SpiralOracle):
            out.append(f"map spiral center={_fmt_vec(m.center)} scale={m.scale} rmin={m.rmin}")
        else:
            raise ValueError(f"no text form for {type(m).__name__}")
    return "\n".join(out) + "\n"
