"""Image approximation on dyadic cells, semi-decisions about attractors, and the
encoding of an attractor as a one-dimensional effective subshift.

Everything is exact: points are tuples of Fractions, cells are integer corners.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Union

from .dyadic import (
    DyadicCell, Point, cell_bits, cells_meeting_box, point_representations,
)
from .eds import CylinderPattern, FunctionEnumerator, GenCylinder
from .errors import BudgetExhausted, DimensionMismatch, DomainViolation, TrapRejected
from .multidim import Unknown
from .oracles import MapOracle

DEFAULT_MAX_CELLS = 1 << 16


@dataclass(frozen=True)
class ProvedDisjoint:
    n: int
    kind = "disjoint"


SemiVerdict = Union[ProvedDisjoint, Unknown]


def _cover_image(oracle: MapOracle, D: DyadicCell, m: int, max_cells: int) -> list[Point]:
    """Answers at precision m whose validity cells cover D.

    A subcell Q is settled once every binary representation of its centre is
    answered after reading at most level(Q) + 1 digits: the cells fixed by those
    digit prefixes then cover Q, so each point of f(Q) is within 1/m of an answer.
    """
    if D.dim != oracle.dim:
        raise DimensionMismatch("cell and oracle dimensions differ")
    start = max(D.level, oracle.digits_needed(m) - 1)
    if 2 ** (D.dim * (start - D.level)) > max_cells:
        raise BudgetExhausted(f"image cover needs more than {max_cells} subcells")
    stack = D.subcells(start)
    stack.reverse()
    answers: set[Point] = set()
    processed = 0
    N = oracle.digits_needed(m)
    if type(oracle).query is MapOracle.query and N <= start + 1:
        # the base query reads exactly N digits, so the prefix cells of the
        # centre representations of all level-``start`` subcells are these
        prefix_cells = D.subcells(N) if N >= D.level else [D.parent(N)]
        for cell in prefix_cells:
            answers.add(oracle.answer_cell(cell, m))
        return sorted(answers)
    while stack:
        Q = stack.pop()
        processed += 1
        if processed > max_cells:
            raise BudgetExhausted(f"image cover needs more than {max_cells} subcells", spent=processed)
        outs = []
        for rep in point_representations(Q.centre):
            y, read = oracle.query(rep, m)
            if read > Q.level + 1:
                break
            outs.append(y)
        else:
            answers.update(outs)
            continue
        stack.extend(reversed(Q.children()))
    return sorted(answers)


@lru_cache(maxsize=4096)
def approx_image(oracle: MapOracle, D: DyadicCell, n: int,
                 max_cells: int = DEFAULT_MAX_CELLS) -> tuple[Point, ...]:
    """Finite S with every point within 1/(5n) of f(D) and f(D) within 1/(5n) of S."""
    if n < 1:
        raise ValueError("precision must be positive")
    return tuple(_cover_image(oracle, D, 5 * n, max_cells))


@dataclass(frozen=True)
class TrapRegion:
    cells: tuple[DyadicCell, ...]

    def __post_init__(self):
        cells = tuple(sorted(set(self.cells), key=lambda c: (c.level, c.corner)))
        if not cells:
            raise ValueError("trap region must be nonempty")
        if len({c.dim for c in cells}) != 1:
            raise DimensionMismatch("trap cells of different dimensions")
        object.__setattr__(self, "cells", cells)

    @property
    def dim(self) -> int:
        return self.cells[0].dim

    @cached_property
    def level(self) -> int:
        return max(c.level for c in self.cells)

    @cached_property
    def corners(self) -> frozenset[tuple[int, ...]]:
        """The trap as level-``self.level`` cell corners."""
        h = self.level
        return frozenset(s.corner for c in self.cells for s in c.subcells(h))


def _near(corners: frozenset, level: int, y: Point, r: Fraction) -> bool:
    lo = tuple(v - r for v in y)
    hi = tuple(v + r for v in y)
    return any(c in corners for c in cells_meeting_box(lo, hi, level))


def check_trap(oracle: MapOracle, trap: TrapRegion, precisions: Iterable[int] = (1, 2, 4)) -> None:
    """Reject the trap when an approximate image point lies beyond 2/n of it.

    Passing is only a necessary condition for forward invariance.
    """
    if trap.dim != oracle.dim:
        raise DimensionMismatch("trap and oracle dimensions differ")
    corners = trap.corners
    for n in precisions:
        r = Fraction(2, n)
        for cell in trap.cells:
            for y in approx_image(oracle, cell, n):
                if not _near(corners, trap.level, y, r):
                    raise TrapRejected(f"image point {tuple(map(str, y))} at precision {n} leaves the trap")


def _cells_near(y: Point, m: int, level: int) -> list[tuple[int, ...]]:
    """Corners of level cells meeting the closed sup-norm ball of radius 1/m about y."""
    ranges = []
    for v in y:
        p, q = v.numerator, v.denominator
        b = q * m
        lo = -(-((p * m - q) << level) // b) - 1
        hi = ((p * m + q) << level) // b
        ranges.append(range(lo, hi + 1))
    return list(itertools.product(*ranges))


class AttractorCover:
    """Nested finite covers B_0 = C, B_1, ... of the attractor X of f inside C.

    B_n keeps the level-h_n subcells of B_{n-1} that meet the 1/m-neighbourhood of
    an image cover of B_{n-1}.  Since X = f(X) lies in B_{n-1}, it lies in B_n.
    The cell side 2^-h_n is at most 1/(2n).
    """

    def __init__(self, oracle: MapOracle, trap: TrapRegion, max_cells: int = DEFAULT_MAX_CELLS):
        if trap.dim != oracle.dim:
            raise DimensionMismatch("trap and oracle dimensions differ")
        self.oracle = oracle
        self.trap = trap
        self.max_cells = max_cells
        self.stages: list[tuple[int, frozenset]] = [(trap.level, trap.corners)]

    def level_for(self, n: int) -> int:
        return max(self.trap.level, (n - 1).bit_length() + 1)

    def stage(self, n: int) -> tuple[int, frozenset]:
        while len(self.stages) <= n:
            self._advance()
        return self.stages[n]

    def _advance(self) -> None:
        n = len(self.stages)
        h_prev, prev = self.stages[-1]
        h = self.level_for(n)
        if n >= 2 and h == h_prev and self.stages[-2] == self.stages[-1]:
            self.stages.append(self.stages[-1])  # a fixed point of the refinement step
            return
        m = max(1, self.oracle.precision_for(h_prev + 1))
        shift = h - h_prev
        d = self.trap.dim
        new = set()
        for corner in sorted(prev):
            for y in _cover_image(self.oracle, DyadicCell(d, h_prev, corner), m, self.max_cells):
                for c in _cells_near(y, m, h):
                    if tuple(k >> shift for k in c) in prev:
                        new.add(c)
        if len(new) > self.max_cells:
            raise BudgetExhausted(f"attractor cover exceeds {self.max_cells} cells")
        self.stages.append((h, frozenset(new)))

    def meets(self, n: int, D: DyadicCell) -> bool:
        h, cells = self.stage(n)
        candidates = cells_meeting_box(D.lo, D.hi, h)
        if len(candidates) <= len(cells):
            return any(c in cells for c in candidates)
        return any(D.meets(DyadicCell(D.dim, h, c)) for c in cells)


@lru_cache(maxsize=32)
def attractor_cover(oracle: MapOracle, trap: TrapRegion) -> AttractorCover:
    return AttractorCover(oracle, trap)


def semidecide_cell_avoids_attractor(oracle: MapOracle, trap: TrapRegion, D: DyadicCell,
                                     fuel: int) -> SemiVerdict:
    """ProvedDisjoint(n) once the stage-n cover misses D; sound whenever the trap is."""
    if D.dim != trap.dim:
        raise DimensionMismatch("cell and trap dimensions differ")
    cover = attractor_cover(oracle, trap)
    for n in range(1, fuel + 1):
        if not cover.meets(n, D):
            return ProvedDisjoint(n)
    return Unknown(fuel)


def semidecide_images_disjoint(oracle: MapOracle, D1: DyadicCell, D2: DyadicCell,
                               fuel: int) -> SemiVerdict:
    """ProvedDisjoint(n) once every point of approx_image(D1, n) is farther than 1/n from D2."""
    if D1.dim != D2.dim:
        raise DimensionMismatch("cells of different dimensions")
    for n in range(1, fuel + 1):
        r = Fraction(1, n)
        if all(D2.distance_inf(y) > r for y in approx_image(oracle, D1, n)):
            return ProvedDisjoint(n)
    return Unknown(fuel)


# --- the subshift presentation ------------------------------------------------------------

def cell_cylinder(cell: DyadicCell) -> CylinderPattern:
    return CylinderPattern(enumerate(cell_bits(cell)))


def pair_cylinder(a: DyadicCell, b: DyadicCell) -> GenCylinder:
    return GenCylinder(1, {(0,): cell_cylinder(a), (1,): cell_cylinder(b)})


def unit_cells(dim: int, level: int) -> list[DyadicCell]:
    return DyadicCell(dim, 0, (0,) * dim).subcells(level)


class Presentation:
    """Forbidden consecutive pairs of depth-k cells for orbits in the attractor.

    A pair (a, b) is forbidden once one of three semi-decisions halts: a avoids X,
    b avoids X, or f(a) misses b.  Halting stages are memoized, so emissions at
    fuel k are monotone in k.
    """

    def __init__(self, oracle: MapOracle, trap: TrapRegion, max_depth: int = 3):
        if oracle.dim != trap.dim:
            raise DimensionMismatch("trap and oracle dimensions differ")
        self.oracle, self.trap, self.max_depth = oracle, trap, max_depth
        self._avoid: dict[DyadicCell, tuple[int | None, int]] = {}
        self._apart: dict[tuple[DyadicCell, DyadicCell], tuple[int | None, int]] = {}

    def _memo(self, table, key, fuel, run):
        halted, tried = table.get(key, (None, 0))
        if halted is None and tried < fuel:
            v = run(fuel)
            halted = v.n if isinstance(v, ProvedDisjoint) else None
            table[key] = (halted, fuel)
        return halted is not None and halted <= fuel

    def avoids(self, cell: DyadicCell, fuel: int) -> bool:
        return self._memo(self._avoid, cell, fuel,
                          lambda f: semidecide_cell_avoids_attractor(self.oracle, self.trap, cell, f))

    def apart(self, a: DyadicCell, b: DyadicCell, fuel: int) -> bool:
        def run(f):
            try:
                return semidecide_images_disjoint(self.oracle, a, b, f)
            except DomainViolation:
                return Unknown(f)
        return self._memo(self._apart, (a, b), fuel, run)

    def clause(self, a: DyadicCell, b: DyadicCell, fuel: int) -> str | None:
        if self.avoids(a, fuel):
            return "a"
        if self.avoids(b, fuel):
            return "b"
        if self.apart(a, b, fuel):
            return "c"
        return None

    def emissions(self, fuel: int) -> list[GenCylinder]:
        out = []
        for k in range(1, min(self.max_depth, fuel) + 1):
            cells = unit_cells(self.trap.dim, k)
            for a in cells:
                for b in cells:
                    if self.clause(a, b, fuel):
                        out.append(pair_cylinder(a, b))
        return out


def enumerate_forbidden_cylinders(oracle: MapOracle, trap: TrapRegion, fuel: int,
                                  max_depth: int = 3) -> list[GenCylinder]:
    return Presentation(oracle, trap, max_depth).emissions(fuel)


def eds_presentation(oracle: MapOracle, trap: TrapRegion, max_depth: int = 3) -> FunctionEnumerator:
    pres = Presentation(oracle, trap, max_depth)
    return FunctionEnumerator(1, pres.emissions)


def squared_radius_range(cell: DyadicCell, center: Point, scale: Fraction) -> tuple[Fraction, Fraction]:
    """Exact min and max of |(p - center) / scale|^2 over the closed cell."""
    lo_sq = hi_sq = Fraction(0)
    for a, b, c in zip(cell.lo, cell.hi, center):
        a, b = (a - c) / scale, (b - c) / scale
        lo_sq += 0 if a <= 0 <= b else min(a * a, b * b)
        hi_sq += max(a * a, b * b)
    return lo_sq, hi_sq


def annulus_cells(center: Point, scale: Fraction, r_in: Fraction, r_out: Fraction,
                  level: int, lo: Point, hi: Point) -> list[DyadicCell]:
    """Level cells inside the box [lo, hi] that meet the closed annulus
    r_in <= |(p - center) / scale| <= r_out."""
    d = len(center)
    out = []
    for corner in cells_meeting_box(lo, hi, level):
        cell = DyadicCell(d, level, corner)
        if not all(a <= x and y <= b for a, b, x, y in zip(lo, hi, cell.lo, cell.hi)):
            continue
        mn, mx = squared_radius_range(cell, center, scale)
        if mn <= r_out * r_out and mx >= r_in * r_in:
            out.append(cell)
    return out
