import itertools
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

import bruteforce as bf
from sftlab.attractor import (
    ProvedDisjoint, Presentation, TrapRegion, annulus_cells, approx_image, attractor_cover,
    cell_cylinder, check_trap, eds_presentation, enumerate_forbidden_cylinders, pair_cylinder,
    semidecide_cell_avoids_attractor, semidecide_images_disjoint, unit_cells,
)
from sftlab.dyadic import DyadicCell, cell_bits, encode_point
from sftlab.eds import FinitePoint, gencyl_subset
from sftlab.errors import DimensionMismatch, TrapRejected
from sftlab.multidim import Unknown
from sftlab.oracles import AffineOracle, SpiralOracle, identity_oracle, scalar_affine

HALF = scalar_affine(F(1, 2), 0)
HALF_TRAP = TrapRegion((DyadicCell(1, 1, (-1,)), DyadicCell(1, 1, (0,))))
UNIT = SpiralOracle(center=(F(1, 2), F(1, 2)), scale=F(1, 4), rmin=F(1, 2))
UNIT_TRAP = TrapRegion(tuple(annulus_cells(UNIT.center, UNIT.scale, F(3, 4), F(5, 4), 5,
                                           (F(0), F(0)), (F(1), F(1)))))


def c1(level, k):
    return DyadicCell(1, level, (k,))


def test_trap_check():
    check_trap(HALF, HALF_TRAP)
    with pytest.raises(TrapRejected):
        check_trap(scalar_affine(4, 0), HALF_TRAP)
    check_trap(UNIT, UNIT_TRAP)


def test_half_map_cells():
    assert semidecide_cell_avoids_attractor(HALF, HALF_TRAP, c1(2, 1), 32) == ProvedDisjoint(5)
    assert semidecide_cell_avoids_attractor(HALF, HALF_TRAP, c1(3, -1), 16) == Unknown(16)
    assert semidecide_cell_avoids_attractor(HALF, HALF_TRAP, c1(0, 3), 4) == ProvedDisjoint(1)


def test_cover_stages_shrink_onto_zero():
    cover = attractor_cover(HALF, HALF_TRAP)
    for n in range(1, 20):
        h, cells = cover.stage(n)
        side = F(1, 2 ** h)
        assert side <= F(1, 2 * n)
        assert any(DyadicCell(1, h, c).contains_point((F(0),)) for c in cells)  # zero is never lost
        assert max(abs(F(c[0]) * side) for c in cells) <= F(2, n) + side


@settings(max_examples=40, deadline=None)
@given(st.fractions(-2, 2, max_denominator=4), st.fractions(-1, 1, max_denominator=4),
       st.integers(0, 3), st.integers(-4, 3), st.integers(0, 3), st.integers(-4, 3))
def test_images_disjoint_is_sound(a, b, l1, k1, l2, k2):
    f = scalar_affine(a, b)
    D1, D2 = c1(l1, k1), c1(l2, k2)
    v = semidecide_images_disjoint(f, D1, D2, 12)
    lo, hi = sorted((a * D1.lo[0] + b, a * D1.hi[0] + b))
    meets = lo <= D2.hi[0] and D2.lo[0] <= hi
    if meets:
        assert isinstance(v, Unknown)
    gap = max(D2.lo[0] - hi, lo - D2.hi[0])
    if gap > F(1, 3):
        assert isinstance(v, ProvedDisjoint)


def test_images_disjoint_examples():
    assert semidecide_images_disjoint(HALF, c1(1, 1), c1(3, 0), 32) == ProvedDisjoint(8)
    ident = identity_oracle(1)
    assert semidecide_images_disjoint(ident, c1(2, 0), c1(2, 2), 32) == ProvedDisjoint(4)
    assert isinstance(semidecide_images_disjoint(ident, c1(2, 0), c1(2, 1), 32), Unknown)


@pytest.mark.parametrize("seed", range(5))
def test_approx_image_two_sided_2d_full_matrix(seed):
    """Non-diagonal maps: compare against the exact image parallelogram's vertices."""
    rng = random.Random(seed)
    m = tuple(tuple(F(rng.randint(-4, 4), 4) for _ in range(2)) for _ in range(2))
    f = AffineOracle(m, (F(rng.randint(-4, 4), 8), F(0)))
    D = DyadicCell(2, 2, (rng.randint(-4, 3), rng.randint(-4, 3)))
    n = rng.randint(1, 8)
    pts = approx_image(f, D, n)
    # (i) each answer is within 1/n of f(D): test against f at the nearest preimage on a fine grid
    grid = [f.exact(c.centre) for c in D.subcells(D.level + 5)] + \
           [f.exact(v) for v in itertools.product(*zip(D.lo, D.hi))]
    r = F(1, n)
    fine = F(1, 2 ** (D.level + 5)) * f.lipschitz  # grid spacing in the image
    for y in pts:
        assert min(max(abs(a - b) for a, b in zip(y, g)) for g in grid) <= r + fine
    # (ii) every grid image point is within 1/n of an answer
    for g in grid:
        assert min(max(abs(a - b) for a, b in zip(y, g)) for y in pts) <= r


def test_dimension_checks():
    with pytest.raises(DimensionMismatch):
        approx_image(HALF, DyadicCell(2, 0, (0, 0)), 1)
    with pytest.raises(DimensionMismatch):
        semidecide_cell_avoids_attractor(UNIT, HALF_TRAP, c1(0, 0), 1)


# --- presentation -----------------------------------------------------------------------------

def test_emissions_are_monotone_in_fuel():
    p = Presentation(HALF, HALF_TRAP, max_depth=3)
    prev = set()
    for k in range(1, 16):
        cur = {g.key for g in p.emissions(k)}
        assert prev <= cur
        prev = cur


def test_zero_orbit_never_excluded():
    """The constant orbit at 0 lies in the attractor; its code must avoid every emission."""
    cyls = enumerate_forbidden_cylinders(HALF, HALF_TRAP, 12, max_depth=3)
    orbit = FinitePoint((1,), (frozenset(i for i, b in enumerate(encode_point((F(0),), 6)) if b),))
    for g in cyls:
        assert not orbit.in_translate(g, (0,))


def test_clauses():
    p = Presentation(HALF, HALF_TRAP)
    assert p.clause(c1(2, 1), c1(2, 1), 6) == "a"
    assert p.clause(c1(2, 0), c1(2, 1), 8) == "b"
    assert p.clause(c1(2, 0), c1(2, 0), 32) is None


def test_eds_presentation_enumerator():
    e = eds_presentation(HALF, HALF_TRAP, max_depth=1)
    assert len(e.step(8)) == 3
    assert e.step(2) <= e.step(8)


def test_pair_cylinder_bits():
    a, b = c1(2, 1), c1(1, 1)
    g = pair_cylinder(a, b)
    assert dict(g.mapping[(0,)].bits) == dict(enumerate(cell_bits(a)))
    assert dict(g.mapping[(1,)].bits) == {0: 1}
    assert gencyl_subset(pair_cylinder(c1(2, 3), b), pair_cylinder(c1(1, 1), b))
    assert cell_cylinder(DyadicCell(2, 1, (1, 0))).mapping == {0: 1, 1: 0}


PYTHAGOREAN = [(F(3, 5), F(4, 5)), (F(-4, 5), F(3, 5)), (F(5, 13), F(-12, 13)), (F(-8, 17), F(-15, 17))]


@pytest.mark.parametrize("p", PYTHAGOREAN)
def test_orbit_pairs_on_the_circle_survive(p):
    """(cell of x, cell of f(x)) for x on the unit circle is a pair of the attractor's
    orbit, so no clause may forbid it."""
    x = tuple(F(1, 2) + c / 4 for c in p)
    y = UNIT.approx_at(x, 10 ** 6)
    pres = Presentation(UNIT, UNIT_TRAP, max_depth=2)
    for level in (1, 2):
        a = [DyadicCell(2, level, c) for c in itertools.product(range(2 ** level), repeat=2)
             if DyadicCell(2, level, c).contains_point(x)]
        # cells surely containing f(x): the answer is within 1e-6 of it
        b = [DyadicCell(2, level, c) for c in itertools.product(range(2 ** level), repeat=2)
             if all(lo + F(1, 10 ** 5) <= v <= hi - F(1, 10 ** 5)
                    for lo, hi, v in zip(DyadicCell(2, level, c).lo, DyadicCell(2, level, c).hi, y))]
        for ca in a:
            for cb in b:
                assert pres.clause(ca, cb, 6) is None


def test_unit_spiral_presentation_sample():
    cyls = enumerate_forbidden_cylinders(UNIT, UNIT_TRAP, 4, max_depth=1)
    # every depth-1 quadrant touches the circle, so nothing is forbidden by (a) or (b)
    assert all(len(g.cells) == 2 for g in cyls)
    assert unit_cells(2, 1) == [DyadicCell(2, 1, c) for c in [(0, 0), (0, 1), (1, 0), (1, 1)]]
