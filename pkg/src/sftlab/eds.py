"""Effective subshifts over the Cantor alphabet K = {0,1}^N at finite stages.

A cylinder pattern fixes finitely many bits of a point of K; a generalized
cylinder assigns cylinder patterns to finitely many sites of Z^d.  An
effective subshift is the set of configurations avoiding every translate of
an enumerated list of generalized cylinders; everything here works with the
finite stage reached after k enumeration steps.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .errors import BudgetExhausted, DimensionMismatch, FormatError, InvalidPartition
from .onedim import DEFAULT_BIT_CAP, decide_empty_eds_1d
from .patterns import (
    Alphabet, Box, SftSpec, Site, add_sites, content_lines, format_site, parse_alphabet,
    parse_dim, parse_site, placements,
)
from .search import Budget, as_budget


@dataclass(frozen=True)
class CylinderPattern:
    bits: tuple[tuple[int, int], ...] = ()

    def __init__(self, bits: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        items = bits.items() if isinstance(bits, Mapping) else bits
        norm: dict[int, int] = {}
        for i, v in items:
            i, v = int(i), int(v)
            if i < 0 or v not in (0, 1):
                raise ValueError(f"bad bit constraint {i}={v}")
            if norm.get(i, v) != v:
                raise ValueError(f"conflicting values for bit {i}")
            norm[i] = v
        object.__setattr__(self, "bits", tuple(sorted(norm.items())))

    @cached_property
    def mapping(self) -> dict[int, int]:
        return dict(self.bits)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.bits)

    def __len__(self) -> int:
        return len(self.bits)

    def __bool__(self) -> bool:
        return bool(self.bits)

    def weight(self) -> int:
        return sum(i + 1 for i, _ in self.bits)


@dataclass(frozen=True)
class GenCylinder:
    dim: int
    cells: tuple[tuple[Site, CylinderPattern], ...]

    def __init__(self, dim: int, cells: Mapping | Iterable):
        items = cells.items() if isinstance(cells, Mapping) else cells
        norm: dict[Site, CylinderPattern] = {}
        for site, cyl in items:
            site = tuple(int(x) for x in site)
            if len(site) != dim:
                raise DimensionMismatch(f"site {site} has arity {len(site)}, expected {dim}")
            if site in norm:
                raise ValueError(f"site {site} listed twice")
            norm[site] = cyl if isinstance(cyl, CylinderPattern) else CylinderPattern(cyl)
        if not norm:
            raise ValueError("a generalized cylinder needs a nonempty site support")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "cells", tuple(sorted(norm.items(), key=lambda kv: kv[0])))

    @cached_property
    def mapping(self) -> dict[Site, CylinderPattern]:
        return dict(self.cells)

    @property
    def support(self) -> tuple[Site, ...]:
        return tuple(s for s, _ in self.cells)

    @cached_property
    def key(self) -> tuple:
        return tuple((s, c.bits) for s, c in self.cells)

    @cached_property
    def semantic_key(self) -> tuple:
        """Equal exactly when the cylinder sets are equal."""
        return tuple((s, c.bits) for s, c in self.cells if c)

    def translate(self, u: Site) -> "GenCylinder":
        return GenCylinder(self.dim, ((add_sites(s, u), c) for s, c in self.cells))

    def literals(self, u: Site | None = None) -> list[tuple[tuple[Site, int], int]]:
        """((site, bit), value) constraints of the translate by ``u``."""
        u = u or (0,) * self.dim
        return [((add_sites(s, u), i), v) for s, c in self.cells for i, v in c.bits]


def cyl_subset(a: CylinderPattern, b: CylinderPattern) -> bool:
    """[a] is inside [b]: b's support lies in a's and the two agree there."""
    am = a.mapping
    return all(am.get(i) == v for i, v in b.bits)


def gencyl_subset(a: GenCylinder, b: GenCylinder) -> bool:
    """[a] is inside [b] in K^(Z^d).

    Sites where b carries the empty pattern constrain nothing and are skipped.
    """
    if a.dim != b.dim:
        raise DimensionMismatch("generalized cylinders of different dimensions")
    am = a.mapping
    for site, cb in b.cells:
        if not cb:
            continue
        ca = am.get(site)
        if ca is None or not cyl_subset(ca, cb):
            return False
    return True


# --- recursive pairing and the product decomposition K = K x K x ... ----------------

def pairing(i: int, n: int) -> int:
    """Cantor pairing: bit i of lane n sits at position (i+n)(i+n+1)/2 + n."""
    if i < 0 or n < 0:
        raise ValueError("pairing is defined on natural numbers")
    return (i + n) * (i + n + 1) // 2 + n


def unpairing(k: int) -> tuple[int, int]:
    if k < 0:
        raise ValueError("unpairing is defined on natural numbers")
    w = (math.isqrt(8 * k + 1) - 1) // 2
    n = k - w * (w + 1) // 2
    return w - n, n


def project_cylinder(n: int, a: CylinderPattern) -> CylinderPattern:
    out = {}
    for k, v in a.bits:
        i, lane = unpairing(k)
        if lane == n:
            out[i] = v
    return CylinderPattern(out)


def lift_cylinder(n: int, b: CylinderPattern) -> CylinderPattern:
    return CylinderPattern({pairing(i, n): v for i, v in b.bits})


def project_gencyl(n: int, a: GenCylinder) -> GenCylinder:
    return GenCylinder(a.dim, ((s, project_cylinder(n, c)) for s, c in a.cells))


def lift_gencyl(n: int, b: GenCylinder) -> GenCylinder:
    """The least restrictive cylinder whose lane-n projection is b."""
    return GenCylinder(b.dim, ((s, lift_cylinder(n, c)) for s, c in b.cells))


def proj_subset(n: int, a: GenCylinder, b: GenCylinder) -> bool:
    """Whether the lane-n projection of [a] lies inside [b]."""
    return gencyl_subset(project_gencyl(n, a), b)


# --- points described by finite data ----------------------------------------------------

@dataclass(frozen=True)
class FinitePoint:
    """A fully periodic point of K^(Z^d): ``ones[j]`` lists the bits equal to 1 at the
    j-th site of the fundamental domain (lexicographic order); all other bits are 0."""

    periods: tuple[int, ...]
    ones: tuple[frozenset[int], ...]

    def __post_init__(self):
        object.__setattr__(self, "periods", tuple(self.periods))
        object.__setattr__(self, "ones", tuple(frozenset(s) for s in self.ones))
        if len(self.ones) != math.prod(self.periods):
            raise ValueError("one bit set per fundamental-domain site is required")

    @property
    def dim(self) -> int:
        return len(self.periods)

    def _flat(self, site: Site) -> int:
        idx = 0
        for x, p in zip(site, self.periods):
            idx = idx * p + x % p
        return idx

    def bit(self, site: Site, i: int) -> int:
        return 1 if i in self.ones[self._flat(site)] else 0

    def in_translate(self, g: GenCylinder, u: Site) -> bool:
        """Whether T^u x lies in [g]."""
        return all(self.bit(add_sites(u, s), i) == v for s, c in g.cells for i, v in c.bits)

    def avoids(self, excluded: Iterable[GenCylinder]) -> bool:
        dom = Box((0,) * self.dim, tuple(p - 1 for p in self.periods)).sites()
        return not any(self.in_translate(g, u) for g in excluded for u in dom)

    def project(self, n: int) -> "FinitePoint":
        lane = []
        for bits in self.ones:
            lane.append(frozenset(i for i, m in map(unpairing, bits) if m == n))
        return FinitePoint(self.periods, tuple(lane))


# --- stages -----------------------------------------------------------------------------

@dataclass(frozen=True)
class StageSet:
    dim: int
    excluded: tuple[GenCylinder, ...] = ()

    def __post_init__(self):
        uniq: dict[tuple, GenCylinder] = {}
        for g in self.excluded:
            if g.dim != self.dim:
                raise DimensionMismatch("stage mixes dimensions")
            uniq.setdefault(g.semantic_key, g)
        object.__setattr__(self, "excluded", tuple(uniq[k] for k in sorted(uniq)))

    def __len__(self) -> int:
        return len(self.excluded)

    def __iter__(self):
        return iter(self.excluded)

    def contains(self, point: FinitePoint) -> bool:
        """Whether ``point`` avoids every translate of every excluded cylinder."""
        return point.avoids(self.excluded)

    def semantic_keys(self) -> set[tuple]:
        return {g.semantic_key for g in self.excluded}

    def is_empty_1d(self, bit_cap: int = DEFAULT_BIT_CAP) -> bool:
        if self.dim != 1:
            raise DimensionMismatch("the exact emptiness decision is one-dimensional")
        return decide_empty_eds_1d(self.excluded, bit_cap)


class Enumerator:
    """Step-indexed enumeration: ``step(k)`` is what was emitted within k steps."""

    dim: int

    def step(self, k: int) -> frozenset:
        raise NotImplementedError


class ScriptedEnumerator(Enumerator):
    def __init__(self, dim: int, emissions: Iterable[tuple[int, GenCylinder]]):
        self.dim = dim
        self.emissions = tuple(sorted(emissions, key=lambda e: (e[0], e[1].key)))
        for stamp, g in self.emissions:
            if stamp < 1:
                raise ValueError("emission stamps start at 1")
            if g.dim != dim:
                raise DimensionMismatch("emission has the wrong dimension")

    def step(self, k: int) -> frozenset:
        return frozenset(g for stamp, g in self.emissions if stamp <= k)

    def __repr__(self):
        return f"ScriptedEnumerator(dim={self.dim}, emissions={len(self.emissions)})"


class GeneratorEnumerator(Enumerator):
    """Wraps a generator factory; each ``next()`` is one step and yields None, one
    GenCylinder, or an iterable of them.  The cursor is stateful: serialize access."""

    def __init__(self, dim: int, factory: Callable[[], Iterator]):
        self.dim = dim
        self._factory = factory
        self._it = factory()
        self._emitted: list[frozenset] = [frozenset()]
        self._done = False

    def step(self, k: int) -> frozenset:
        while len(self._emitted) <= k and not self._done:
            try:
                out = next(self._it)
            except StopIteration:
                self._done = True
                break
            if out is None:
                new = frozenset()
            elif isinstance(out, GenCylinder):
                new = frozenset((out,))
            else:
                new = frozenset(out)
            self._emitted.append(self._emitted[-1] | new)
        return self._emitted[min(k, len(self._emitted) - 1)]


class FunctionEnumerator(Enumerator):
    """``step(k) = fn(k)``, memoized; fn must be monotone with fn(0) empty."""

    def __init__(self, dim: int, fn: Callable[[int], Iterable[GenCylinder]]):
        self.dim = dim
        self._fn = fn
        self._cache: dict[int, frozenset] = {0: frozenset()}

    def step(self, k: int) -> frozenset:
        if k not in self._cache:
            self._cache[k] = frozenset(self._fn(k))
        return self._cache[k]


def lane_depth(n: int, k: int) -> int:
    """Steps lane n has received after k master steps: max j with pairing(j, n) <= k."""
    if pairing(0, n) > k:
        return 0
    j = 0
    while pairing(j + 1, n) <= k:
        j += 1
    return j


class MasterEnumerator:
    """Dovetails lanes: master step k runs lane n for ``lane_depth(n, k)`` steps and
    reports pairs (n, cylinder)."""

    def __init__(self, lanes: Sequence[Enumerator]):
        dims = {lane.dim for lane in lanes}
        if len(dims) > 1:
            raise DimensionMismatch("lanes of different dimensions")
        self.lanes = list(lanes)
        self.dim = dims.pop() if dims else 1

    def lane_steps(self, k: int) -> dict[int, int]:
        return {n: lane_depth(n, k) for n in range(len(self.lanes))}

    def step(self, k: int) -> frozenset:
        return frozenset((n, g) for n, j in self.lane_steps(k).items()
                         for g in self.lanes[n].step(j))


def product_stage(master: MasterEnumerator | Sequence[Enumerator], k: int) -> StageSet:
    """Stage-k exclusions of the product system: every emitted (n, b) lifted through lane n."""
    if not isinstance(master, MasterEnumerator):
        master = MasterEnumerator(master)
    return StageSet(master.dim, tuple(lift_gencyl(n, b) for n, b in master.step(k)))


# --- canonical enumeration b_1, b_2, ... of generalized cylinders ------------------------
#
# weight(b) = sum over sites u of (1 + |u|_1 + sum of (i + 1) over fixed bits i);
# finitely many cylinders share a weight, and inside a weight class the order is
# lexicographic on ``GenCylinder.key``.

def gencyl_weight(g: GenCylinder) -> int:
    return sum(1 + sum(abs(x) for x in s) + c.weight() for s, c in g.cells)


@lru_cache(maxsize=None)
def _bit_completions(after: int, w: int) -> int:
    """Cylinder patterns using only bits > after with total bit weight w."""
    if w == 0:
        return 1
    return sum(2 * _bit_completions(q, w - q - 1) for q in range(after + 1, w))


def _patterns_below(c: CylinderPattern, w: int) -> int:
    """Cylinder patterns of bit weight w ordered strictly before c."""
    count = 0
    used = 0
    prev = -1
    for p, v in c.bits:
        if used == w:
            count += 1  # the proper prefix itself
        for q in range(prev + 1, p):
            rest = w - used - (q + 1)
            if rest >= 0:
                count += 2 * _bit_completions(q, rest)
        if v == 1:
            rest = w - used - (p + 1)
            if rest >= 0:
                count += _bit_completions(p, rest)
        used += p + 1
        prev = p
    return count


@lru_cache(maxsize=None)
def _sites_upto(dim: int, w: int) -> tuple[Site, ...]:
    """Sites of site weight <= w, lexicographically sorted."""
    r = w - 1
    if r < 0:
        return ()
    box = Box.cube(r, dim)
    return tuple(s for s in box.sites() if sum(abs(x) for x in s) <= r)


class _Counter:
    def __init__(self, dim: int, w_max: int):
        self.sites = _sites_upto(dim, w_max)
        self.site_w = [1 + sum(abs(x) for x in s) for s in self.sites]
        self.index = {s: i for i, s in enumerate(self.sites)}
        self._memo: dict[tuple[int, int], int] = {}

    def completions(self, j: int, w: int) -> int:
        """(Possibly empty) cell lists on sites j, j+1, ... with total weight w."""
        if w < 0:
            return 0
        if j >= len(self.sites):
            return 1 if w == 0 else 0
        key = (j, w)
        if key not in self._memo:
            total = self.completions(j + 1, w)
            sw = self.site_w[j]
            for pw in range(0, w - sw + 1):
                total += _bit_completions(-1, pw) * self.completions(j + 1, w - sw - pw)
            self._memo[key] = total
        return self._memo[key]


@lru_cache(maxsize=64)
def _counter(dim: int, w_max: int) -> _Counter:
    return _Counter(dim, w_max)


def count_of_weight(dim: int, w: int) -> int:
    if w < 1:
        return 0
    return _counter(dim, w).completions(0, w)


def canonical_index(g: GenCylinder) -> int:
    """1-based position of g in the canonical enumeration."""
    W = gencyl_weight(g)
    before = sum(count_of_weight(g.dim, w) for w in range(1, W))
    cnt = _counter(g.dim, W)
    rank = 0
    used = 0
    prev = -1
    for site, cyl in g.cells:
        j = cnt.index[site]
        rem = W - used
        for jj in range(prev + 1, j):
            sw = cnt.site_w[jj]
            for pw in range(0, rem - sw + 1):
                rank += _bit_completions(-1, pw) * cnt.completions(jj + 1, rem - sw - pw)
        sw = cnt.site_w[j]
        for pw in range(0, rem - sw + 1):
            rank += _patterns_below(cyl, pw) * cnt.completions(j + 1, rem - sw - pw)
        used += sw + cyl.weight()
        prev = j
    return before + rank + 1


def _patterns_of_weight(w: int, after: int = -1) -> Iterator[tuple[tuple[int, int], ...]]:
    if w == 0:
        yield ()
        return
    for q in range(after + 1, w):
        for v in (0, 1):
            for rest in _patterns_of_weight(w - q - 1, q):
                yield ((q, v),) + rest


def gencyls_of_weight(dim: int, w: int) -> list[GenCylinder]:
    """Brute-force listing of one weight class in canonical order (small w only)."""
    sites = _sites_upto(dim, w)
    out = []

    def rec(j, rem, acc):
        if rem == 0:
            if acc:
                out.append(GenCylinder(dim, acc))
            return
        for jj in range(j, len(sites)):
            sw = 1 + sum(abs(x) for x in sites[jj])
            for pw in range(0, rem - sw + 1):
                for bits in _patterns_of_weight(pw):
                    rec(jj + 1, rem - sw - pw, acc + [(sites[jj], CylinderPattern(bits))])

    rec(0, w, [])
    out.sort(key=lambda g: g.key)
    return out


def canonical_gencyls(dim: int) -> Iterator[GenCylinder]:
    """b_1, b_2, ... by brute force."""
    for w in itertools.count(1):
        yield from gencyls_of_weight(dim, w)


# --- the guarded construction -------------------------------------------------------------

def indexed_truncation(enum: Enumerator, j: int) -> frozenset:
    """{b_i : i <= j and b_i emitted within j steps}."""
    return frozenset(g for g in enum.step(j) if canonical_index(g) <= j)


def guard_trace(enum: Enumerator, k: int, bit_cap: int = DEFAULT_BIT_CAP) -> tuple[frozenset, int | None]:
    """(L_k', first j <= k whose truncation defines the empty shift, or None)."""
    if enum.dim != 1:
        raise DimensionMismatch("the guard relies on one-dimensional emptiness")
    last: frozenset = frozenset()
    for j in range(1, k + 1):
        cur = indexed_truncation(enum, j)
        if cur != last:
            if decide_empty_eds_1d(cur, bit_cap):
                return last, j
            last = cur
    return last, None


def guarded_stage(enum: Enumerator, k: int, bit_cap: int = DEFAULT_BIT_CAP) -> StageSet:
    """L_{k'} for the largest k' <= k whose truncation still defines a nonempty shift."""
    kept, _ = guard_trace(enum, k, bit_cap)
    return StageSet(1, tuple(kept))


def universal_lanes(k: int, registry: Sequence[Enumerator],
                    bit_cap: int = DEFAULT_BIT_CAP) -> dict[int, StageSet]:
    """Guarded stage of each lane n <= k after dovetailing k master steps."""
    lanes = {}
    for n, enum in enumerate(registry):
        if n > k:
            break
        lanes[n] = guarded_stage(enum, lane_depth(n, k), bit_cap)
    return lanes


def universal_stage(k: int, registry: Sequence[Enumerator],
                    bit_cap: int = DEFAULT_BIT_CAP) -> StageSet:
    lanes = universal_lanes(k, registry, bit_cap)
    return StageSet(1, tuple(lift_gencyl(n, g) for n, st in lanes.items() for g in st))


# --- clopen partitions and the partition factor check -------------------------------------

PARTITION_BIT_CAP = 20


@dataclass(frozen=True)
class ClopenPartition:
    """parts[s] is a finite union of generalized cylinders mapped to symbol s."""

    dim: int
    alphabet: Alphabet
    parts: tuple[tuple[GenCylinder, ...], ...]

    def __post_init__(self):
        parts = tuple(tuple(p) for p in self.parts)
        object.__setattr__(self, "parts", parts)
        if len(parts) != len(self.alphabet):
            raise InvalidPartition("one part per symbol is required")
        if any(g.dim != self.dim for p in parts for g in p):
            raise DimensionMismatch("partition mixes dimensions")
        self._validate()

    def _validate(self) -> None:
        variables = sorted({lit for p in parts_iter(self) for lit, _ in p.literals()})
        if len(variables) > PARTITION_BIT_CAP:
            raise InvalidPartition(f"{len(variables)} constrained bits exceeds the cap")
        pos = {v: i for i, v in enumerate(variables)}
        compiled = [[[(pos[lit], val) for lit, val in g.literals()] for g in part]
                     for part in self.parts]
        for bits in itertools.product((0, 1), repeat=len(variables)):
            hits = [s for s, part in enumerate(compiled)
                    if any(all(bits[i] == v for i, v in lits) for lits in part)]
            if len(hits) != 1:
                what = "an overlap" if hits else "a gap"
                raise InvalidPartition(f"partition has {what} at assignment {bits}")

    def symbol_at(self, point: FinitePoint, u: Site) -> int:
        for s, part in enumerate(self.parts):
            if any(point.in_translate(g, u) for g in part):
                return s
        raise AssertionError("validated partitions cover every point")


def parts_iter(part: ClopenPartition) -> Iterator[GenCylinder]:
    for p in part.parts:
        yield from p


def _nogood_sat(nogoods: list[list[tuple[object, int]]], assign: dict, budget: Budget) -> dict | None:
    """Find binary values avoiding every nogood (a list of var=value literals that may
    not all hold), extending ``assign``; None if impossible."""
    assign = dict(assign)
    while True:
        budget.spend()
        changed = False
        for ng in nogoods:
            open_lits = []
            for var, val in ng:
                a = assign.get(var)
                if a is None:
                    open_lits.append((var, val))
                elif a != val:
                    break
            else:
                if not open_lits:
                    return None
                if len(open_lits) == 1:
                    var, val = open_lits[0]
                    assign[var] = 1 - val
                    changed = True
        if not changed:
            break
    for ng in nogoods:
        if all(assign.get(var, val) == val for var, val in ng):
            var = next(var for var, _ in ng if var not in assign)
            for val in (0, 1):
                found = _nogood_sat(nogoods, {**assign, var: val}, budget)
                if found is not None:
                    return found
            return None
    return assign


def partition_counterexample(src_stage: StageSet, part: ClopenPartition, dst_spec: SftSpec,
                             n: int, r: int, budget: Budget | int | None = None) -> dict | None:
    """Bit assignment surviving the stage exclusions on ||u|| <= n whose symbolization
    shows a dst-forbidden pattern inside [-r; r]^d, or None."""
    budget = as_budget(budget)
    d = src_stage.dim
    nogoods = []
    for g in src_stage:
        for u in Box.cube(n, d).sites():
            nogoods.append(g.literals(u))
    if any(not ng for ng in nogoods):
        return None  # some excluded cylinder is all of K^(Z^d)
    window = Box.cube(r, d)
    for b in dst_spec.forbidden:
        for t in placements(b, window):
            targets = [(add_sites(t, v), sym) for v, sym in b.cells]
            choices = [[(site, g) for g in part.parts[sym]] for site, sym in targets]
            for combo in itertools.product(*choices):
                budget.spend()
                fixed: dict = {}
                ok = True
                for site, g in combo:
                    for lit, val in g.literals(site):
                        if fixed.setdefault(lit, val) != val:
                            ok = False
                            break
                    if not ok:
                        break
                if not ok:
                    continue
                found = _nogood_sat(nogoods, fixed, budget)
                if found is not None:
                    return found
    return None


def verify_partition_factor(src_stage: StageSet, part: ClopenPartition, dst_spec: SftSpec,
                            n: int, r: int, budget: Budget | int | None = None) -> bool:
    """Every point surviving the stage exclusions on the window ||u|| <= n symbolizes,
    through the partition, to a dst-admissible pattern on [-r; r]^d."""
    if not (src_stage.dim == part.dim == dst_spec.dim):
        raise DimensionMismatch("stage, partition and target dimensions differ")
    if part.alphabet != dst_spec.alphabet:
        raise InvalidPartition("partition symbols differ from the target alphabet")
    if r <= dst_spec.max_diameter:
        raise ValueError(f"radius {r} must exceed the target diameter {dst_spec.max_diameter}")
    return partition_counterexample(src_stage, part, dst_spec, n, r, budget) is None


# --- text formats -----------------------------------------------------------------------------

def format_gencyl_lines(g: GenCylinder) -> list[str]:
    lines = []
    for site, cyl in g.cells:
        bits = ", ".join(f"bit {i} = {v}" for i, v in cyl.bits)
        lines.append(f"site {format_site(site)} :" + (f" {bits}" if bits else ""))
    return lines


def parse_site_line(line: str, dim: int, lineno=None) -> tuple[Site, CylinderPattern]:
    if not line.startswith("site "):
        raise FormatError(f"expected a site line, got {line!r}", lineno)
    lhs, colon, rhs = line[5:].partition(":")
    if not colon:
        raise FormatError("expected 'site x1,...,xd : bit i = v, ...'", lineno)
    site = parse_site(lhs.strip(), dim, lineno)
    bits = {}
    rhs = rhs.strip()
    if rhs:
        for item in rhs.split(","):
            key, eq, val = item.partition("=")
            key = key.split()
            if not eq or len(key) != 2 or key[0] != "bit":
                raise FormatError(f"bad bit constraint {item.strip()!r}", lineno)
            try:
                i, v = int(key[1]), int(val)
            except ValueError:
                raise FormatError(f"bad bit constraint {item.strip()!r}", lineno) from None
            if i < 0 or v not in (0, 1) or i in bits:
                raise FormatError(f"bad bit constraint {item.strip()!r}", lineno)
            bits[i] = v
    return site, CylinderPattern(bits)


def _blocks(lines, dim, header_words):
    """Split into (header line, lineno, [GenCylinder cells]) blocks."""
    blocks = []
    for lineno, line in lines:
        word = line.split()[0]
        if word in header_words:
            blocks.append((line, lineno, {}))
        else:
            if not blocks:
                raise FormatError(f"site line before any of {header_words}", lineno)
            site, cyl = parse_site_line(line, dim, lineno)
            if site in blocks[-1][2]:
                raise FormatError(f"site {format_site(site)} repeated", lineno)
            blocks[-1][2][site] = cyl
    for header, lineno, cells in blocks:
        if not cells and header.split()[0] in ("gencyl", "emit"):
            raise FormatError("generalized cylinder without sites", lineno)
    return blocks


def _take_dim(lines) -> int:
    if not lines or lines[0][1].split()[0] != "dim":
        raise FormatError("expected 'dim <d>' first")
    lineno, line = lines.pop(0)
    return parse_dim(line.split(None, 1)[1] if len(line.split()) > 1 else "", lineno)


def write_gencyls(dim: int, cylinders: Iterable[GenCylinder]) -> str:
    out = [f"dim {dim}"]
    for g in sorted(cylinders, key=lambda g: g.key):
        out.append("gencyl")
        out.extend(format_gencyl_lines(g))
    return "\n".join(out) + "\n"


def parse_gencyls(text: str) -> tuple[int, list[GenCylinder]]:
    lines = content_lines(text)
    dim = _take_dim(lines)
    out = []
    for header, lineno, cells in _blocks(lines, dim, ("gencyl",)):
        if header != "gencyl":
            raise FormatError(f"unexpected line {header!r}", lineno)
        out.append(GenCylinder(dim, cells))
    return dim, out


def write_script(enum: ScriptedEnumerator) -> str:
    out = [f"dim {enum.dim}"]
    for stamp, g in enum.emissions:
        out.append(f"emit {stamp}")
        out.extend(format_gencyl_lines(g))
    return "\n".join(out) + "\n"


def parse_script(text: str) -> ScriptedEnumerator:
    lines = content_lines(text)
    dim = _take_dim(lines)
    emissions = []
    for header, lineno, cells in _blocks(lines, dim, ("emit",)):
        parts = header.split()
        try:
            stamp = int(parts[1]) if len(parts) == 2 else -1
        except ValueError:
            stamp = -1
        if stamp < 1:
            raise FormatError("expected 'emit <stamp>' with stamp >= 1", lineno)
        emissions.append((stamp, GenCylinder(dim, cells)))
    return ScriptedEnumerator(dim, emissions)


def write_partition(part: ClopenPartition) -> str:
    out = [f"dim {part.dim}", "alphabet " + " ".join(part.alphabet.symbols)]
    for s, gs in enumerate(part.parts):
        out.append(f"part {part.alphabet.name(s)}")
        for g in sorted(gs, key=lambda g: g.key):
            out.append("gencyl")
            out.extend(format_gencyl_lines(g))
    return "\n".join(out) + "\n"


def parse_partition(text: str) -> ClopenPartition:
    lines = content_lines(text)
    dim = _take_dim(lines)
    if not lines or lines[0][1].split()[0] != "alphabet":
        raise FormatError("expected 'alphabet ...' after dim")
    alphabet = parse_alphabet(lines.pop(0)[1].split(None, 1)[1])
    parts: dict[int, list[GenCylinder]] = {}
    current = None
    for header, lineno, cells in _blocks(lines, dim, ("part", "gencyl")):
        words = header.split()
        if words[0] == "part":
            if len(words) != 2:
                raise FormatError("expected 'part <symbol>'", lineno)
            try:
                current = alphabet.index(words[1])
            except KeyError as e:
                raise FormatError(e.args[0], lineno) from None
            if cells:
                raise FormatError("site lines must follow 'gencyl'", lineno)
            parts.setdefault(current, [])
        else:
            if current is None:
                raise FormatError("gencyl before any part", lineno)
            parts[current].append(GenCylinder(dim, cells))
    try:
        return ClopenPartition(dim, alphabet, tuple(tuple(parts.get(s, ())) for s in range(len(alphabet))))
    except InvalidPartition as e:
        raise FormatError(str(e)) from None
