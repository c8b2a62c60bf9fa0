"""Acceptance criteria 1-9, each checked against an independent brute-force oracle.

Every test prints one ``criterion N: PASS|FAIL ...`` line.  Running this file
directly (``python tests/test_acceptance.py``) prints the nine lines without pytest.
"""

from __future__ import annotations

import itertools
import math
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

import bruteforce as bf  # noqa: E402
from sftlab import catalog  # noqa: E402
from sftlab.attractor import (  # noqa: E402
    ProvedDisjoint, TrapRegion, annulus_cells, approx_image, semidecide_cell_avoids_attractor,
)
from sftlab.blockcode import (  # noqa: E402
    ca_image_language, constant_code, factor_radius, identity_code, random_code,
    verify_factor_step, xor_code,
)
from sftlab.dyadic import DyadicCell  # noqa: E402
from sftlab.eds import (  # noqa: E402
    CylinderPattern, FinitePoint, GenCylinder, ScriptedEnumerator, cyl_subset, gencyl_subset,
    guard_trace, guarded_stage, lane_depth, pairing, product_stage, unpairing,
)
from sftlab.multidim import (  # noqa: E402
    ProvedEmpty, ProvedNonempty, WangTile, semidecide_empty, verify_torus, wang_to_sft,
)
from sftlab.onedim import decide_empty_1d  # noqa: E402
from sftlab.oracles import AffineOracle, SpiralOracle, scalar_affine  # noqa: E402
from sftlab.patterns import Alphabet, count_admissible, entropy_upper  # noqa: E402

F = Fraction


# --- criterion 1 ---------------------------------------------------------------------

def criterion_1():
    words = [w for w in itertools.product((0, 1), repeat=2)]
    t0 = time.perf_counter()
    agree = 0
    for mask in range(16):
        chosen = [w for b, w in enumerate(words) if mask >> b & 1]
        got = decide_empty_1d(catalog.forbid_words(chosen))
        agree += got == bf.empty_by_cycles(chosen)
    elapsed = time.perf_counter() - t0
    return agree == 16 and elapsed < 1.0, f"{agree}/16 agree in {elapsed:.3f}s"


# --- criterion 2 ---------------------------------------------------------------------

def criterion_2():
    gm = catalog.golden_mean()
    counts = [count_admissible(gm, n) for n in range(1, 6)]
    brute = [bf.count_words_avoiding(n, [(1, 1)]) for n in range(1, 6)]
    h = [entropy_upper(gm, n) for n in range(1, 13)]
    monotone = all(a >= b for a, b in zip(h, h[1:]))
    target = math.log((1 + math.sqrt(5)) / 2)
    gap = h[-1] - target
    ok = counts == brute == [2, 3, 5, 8, 13] and monotone and 0 <= gap < 0.05
    return ok, f"counts={counts} brute={brute} monotone={monotone} h12-log(phi)={gap:.4f}"


# --- criterion 3 ---------------------------------------------------------------------

def criterion_3():
    tile = WangTile("A", n="red", e="red", s="blue", w="green")
    t0 = time.perf_counter()
    v_wang = semidecide_empty(wang_to_sft([tile]), max_radius=4)
    t_wang = time.perf_counter() - t0
    cb = catalog.checkerboard()
    t0 = time.perf_counter()
    v_cb = semidecide_empty(cb, max_radius=4)
    t_cb = time.perf_counter() - t0
    wang_ok = v_wang == ProvedEmpty(1)
    cb_ok = (isinstance(v_cb, ProvedNonempty) and v_cb.cert.periods == (2, 2)
             and verify_torus(cb, v_cb.cert) and _torus_proper_by_hand(v_cb.cert))
    ok = wang_ok and cb_ok and t_wang < 1.0 and t_cb < 1.0
    return ok, (f"wang={type(v_wang).__name__}({getattr(v_wang, 'n', '-')}) in {t_wang:.3f}s; "
                f"checkerboard torus={getattr(getattr(v_cb, 'cert', None), 'cells', None)} in {t_cb:.3f}s")


def _torus_proper_by_hand(t) -> bool:
    p, q = t.periods
    return all(t.value((x, y)) != t.value(((x + 1) % p, y)) and
               t.value((x, y)) != t.value((x, (y + 1) % q))
               for x in range(p) for y in range(q))


# --- criterion 4 ---------------------------------------------------------------------

def criterion_4():
    gm2 = catalog.golden_mean(2)
    ident = identity_code(gm2.alphabet, 2)
    R = factor_radius(gm2, gm2)
    r = R + ident.radius + 2
    id_ok = verify_factor_step(gm2, gm2, ident, r)
    one = constant_code(gm2.alphabet, gm2.alphabet, 1, 2)
    const_fails = not verify_factor_step(gm2, gm2, one, R + one.radius + 2)
    lang = {p.word() for p in ca_image_language(xor_code(1), 3, 4)}
    rule = {w: w[0] ^ w[1] for w in itertools.product((0, 1), repeat=2)}
    brute = bf.ca_images_1d(rule, (0, 1), 2, 3, 4)
    xor_ok = lang == brute and len(lang) == 16
    ok = id_ok and const_fails and xor_ok
    return ok, f"identity(r={r})={id_ok} constant-1 rejected={const_fails} xor words={len(lang)} brute={len(brute)}"


# --- criterion 5 ---------------------------------------------------------------------

def criterion_5(seed: int = 5):
    rng = random.Random(seed)
    a = Alphabet.of_size(2)
    checked = violations = mismatches = 0
    for _ in range(5):
        width = rng.choice((1, 2))
        start = rng.choice((-1, 0))
        window = tuple((start + i,) for i in range(width))
        ca = random_code(rng, 1, a, a, window)
        rule = {w: ca(w) for w in itertools.product((0, 1), repeat=width)}
        offsets = tuple(s[0] for s in ca.window)
        n = rng.randint(1, 5)
        langs = [{p.word() for p in ca_image_language(ca, t, n)} for t in range(5)]
        for t in range(5):
            if langs[t] != bf.ca_images_1d(rule, offsets, 2, t, n):
                mismatches += 1
        for t in range(4):
            checked += 1
            violations += not langs[t + 1] <= langs[t]
    ok = violations == 0 and mismatches == 0
    return ok, f"{checked} inclusions checked, {violations} violations, {mismatches} brute-force mismatches"


# --- criterion 6 ---------------------------------------------------------------------

def _g(*site_bits) -> GenCylinder:
    """_g((site, {bit: value}), ...) in dimension 1."""
    return GenCylinder(1, {(s,): CylinderPattern(bits) for s, bits in site_bits})


def guard_registry(seed: int = 6) -> list[ScriptedEnumerator]:
    rng = random.Random(seed)
    covering = [
        # bit 0 fixed to each value in turn
        ScriptedEnumerator(1, [(2, _g((0, {0: 0}))), (7, _g((0, {0: 1})))]),
        # bit 0 = 1, then bit 0 = 0 split over the two values of bit 1
        ScriptedEnumerator(1, [(3, _g((0, {0: 1}))), (9, _g((0, {0: 0, 1: 0}))),
                               (12, _g((0, {0: 0, 1: 1})))]),
    ]
    rest = []
    for _ in range(8):
        emissions = []
        for _ in range(rng.randint(1, 6)):
            sites = rng.sample(range(3), rng.randint(1, 2))
            cells = [(s, {b: rng.randint(0, 1) for b in rng.sample(range(3), rng.randint(1, 2))})
                     for s in sites]
            emissions.append((rng.randint(1, 50), _g(*cells)))
        rest.append(ScriptedEnumerator(1, emissions))
    return covering + rest


def criterion_6():
    registry = guard_registry()
    violations = 0
    fired = []
    for enum in registry:
        for k in range(1, 51):
            if guarded_stage(enum, k).is_empty_1d():
                violations += 1
        fired.append(guard_trace(enum, 50)[1])
    covering_caught = all(j is not None for j in fired[:2])
    # the covering scripts really do cover K once everything has been emitted
    really_cover = all(_g_empty(e.emissions) for e in registry[:2])
    ok = violations == 0 and covering_caught and really_cover
    return ok, f"{len(registry)} enumerators x 50 stages, {violations} violations, guard fired at {fired[:2]}"


def _g_empty(emissions) -> bool:
    """Single-site cylinders at site 0 cover K iff every value of the bits they
    mention matches one of them."""
    cyls = [g for _, g in emissions]
    assert all(g.support == ((0,),) for g in cyls)
    bits = sorted({i for g in cyls for _, c in g.cells for i, _ in c.bits})
    return all(any(all(dict(zip(bits, vals))[i] == v for _, c in g.cells for i, v in c.bits)
                   for g in cyls)
               for vals in itertools.product((0, 1), repeat=len(bits)))


# --- criterion 7 ---------------------------------------------------------------------

def _lane_avoids(point: FinitePoint, lane: int, cyls) -> bool:
    """Brute force on the product coordinates: bit i of lane n is bit pairing(i, n)."""
    dom = range(point.periods[0])
    for g in cyls:
        for u in dom:
            if all(point.bit((u + s[0],), pairing(i, lane)) == v for s, c in g.cells for i, v in c.bits):
                return False
    return True


def criterion_7(seed: int = 7):
    rng = random.Random(seed)
    agree = 0
    for _ in range(100):
        lanes = []
        for _ in range(2):
            em = []
            for _ in range(rng.randint(0, 3)):
                cells = [(s, {b: rng.randint(0, 1) for b in rng.sample(range(2), rng.randint(1, 2))})
                         for s in rng.sample(range(2), rng.randint(1, 2))]
                em.append((rng.randint(1, 6), _g(*cells)))
            lanes.append(ScriptedEnumerator(1, em))
        k = rng.randint(0, 30)
        period = rng.randint(1, 3)
        ones = []
        for _ in range(period):
            ones.append({pairing(i, n) for i in range(2) for n in range(2) if rng.random() < 0.4})
        point = FinitePoint((period,), tuple(ones))
        got = product_stage(lanes, k).contains(point)
        want = all(_lane_avoids(point, n, lanes[n].step(lane_depth(n, k))) for n in range(2))
        agree += got == want
    return agree == 100, f"{agree}/100 agree"


# --- criterion 8 ---------------------------------------------------------------------

HALF = scalar_affine(F(1, 2), 0)
HALF_TRAP = TrapRegion((DyadicCell(1, 1, (-1,)), DyadicCell(1, 1, (0,))))
SPIRAL = SpiralOracle()
SPIRAL_TRAP = TrapRegion(tuple(annulus_cells((F(0), F(0)), F(1), F(3, 4), F(5, 4), 3,
                                             (F(-2), F(-2)), (F(2), F(2)))))


def grid(dim: int, lo: int, hi: int, max_level: int = 4):
    """Every cell of level <= max_level inside [lo, hi]^dim."""
    for level in range(max_level + 1):
        side = 2 ** level
        for corner in itertools.product(range(lo * side, hi * side), repeat=dim):
            yield DyadicCell(dim, level, corner)


def half_geometry(cell):
    lo, hi = cell.lo[0], cell.hi[0]
    meets = lo <= 0 <= hi
    far = lo >= F(1, 8) or hi <= -F(1, 8)
    return meets, far


def spiral_geometry(cell):
    mn, mx = bf.sq_radius_range(cell)
    meets = mn <= 1 <= mx
    far = mn >= F(81, 64) or mx <= F(49, 64)
    return meets, far


def soundness_run(oracle, trap, cells, geometry, fuel: int = 32):
    unsound = missed = total = 0
    for cell in cells:
        total += 1
        v = semidecide_cell_avoids_attractor(oracle, trap, cell, fuel)
        meets, far = geometry(cell)
        if meets and isinstance(v, ProvedDisjoint):
            unsound += 1
        if far and not isinstance(v, ProvedDisjoint):
            missed += 1
    return total, unsound, missed


def random_affine_case(rng: random.Random):
    dim = rng.choice((1, 2))
    diag = [F(rng.randint(-8, 8), rng.choice((1, 2, 4))) for _ in range(dim)]
    matrix = tuple(tuple(diag[i] if i == j else F(0) for j in range(dim)) for i in range(dim))
    offset = tuple(F(rng.randint(-8, 8), rng.choice((1, 3, 8))) for _ in range(dim))
    level = rng.randint(0, 4) if dim == 1 else rng.randint(2, 4)
    corner = tuple(rng.randint(-2 ** level, 2 ** level - 1) for _ in range(dim))
    n = rng.randint(1, 16)
    return AffineOracle(matrix, offset), DyadicCell(dim, level, corner), n


def exact_affine_image_box(oracle: AffineOracle, cell: DyadicCell):
    lo, hi = [], []
    for i in range(oracle.dim):
        a = oracle.matrix[i][i]
        e1, e2 = a * cell.lo[i] + oracle.offset[i], a * cell.hi[i] + oracle.offset[i]
        lo.append(min(e1, e2))
        hi.append(max(e1, e2))
    return lo, hi


def approx_image_run(cases: int = 50, seed: int = 8):
    rng = random.Random(seed)
    bad_near = bad_dense = 0
    for _ in range(cases):
        oracle, cell, n = random_affine_case(rng)
        pts = approx_image(oracle, cell, n)
        lo, hi = exact_affine_image_box(oracle, cell)
        r = F(1, n)
        if any(bf.box_distance_inf(lo, hi, y) > r for y in pts):
            bad_near += 1
        if not bf.balls_cover_box(lo, hi, pts, r):
            bad_dense += 1
    return bad_near, bad_dense


def criterion_8():
    t0 = time.perf_counter()
    h_total, h_unsound, h_missed = soundness_run(HALF, HALF_TRAP, grid(1, -1, 1), half_geometry)
    s_total, s_unsound, s_missed = soundness_run(SPIRAL, SPIRAL_TRAP, grid(2, -2, 2), spiral_geometry)
    bad_near, bad_dense = approx_image_run()
    elapsed = time.perf_counter() - t0
    ok = not (h_unsound or h_missed or s_unsound or s_missed or bad_near or bad_dense)
    return ok, (f"x/2: {h_total} cells unsound={h_unsound} missed={h_missed}; "
                f"spiral: {s_total} cells unsound={s_unsound} missed={s_missed}; "
                f"approx_image: 50 cases, {bad_near} far points, {bad_dense} coverage gaps; {elapsed:.1f}s")


# --- criterion 9 ---------------------------------------------------------------------

def _random_cyl(rng, max_bit: int = 4) -> CylinderPattern:
    bits = rng.sample(range(max_bit), rng.randint(0, max_bit))
    return CylinderPattern({b: rng.randint(0, 1) for b in bits})


def _random_gencyl(rng) -> GenCylinder:
    sites = rng.sample(range(-1, 2), rng.randint(1, 3))
    return GenCylinder(1, {(s,): _random_cyl(rng, 3) for s in sites})


def _lits_cyl(c: CylinderPattern):
    return list(c.bits)


def _lits_gencyl(g: GenCylinder):
    return [((s, i), v) for s, c in g.cells for i, v in c.bits]


def criterion_9(seed: int = 9):
    rng = random.Random(seed)
    agree = 0
    for case in range(1000):
        if case % 2 == 0:
            a, b = _random_cyl(rng), _random_cyl(rng)
            if rng.random() < 0.3:  # bias toward inclusions
                a = CylinderPattern({**b.mapping, **a.mapping})
            agree += cyl_subset(a, b) == bf.literal_sets_included(_lits_cyl(a), _lits_cyl(b))
        else:
            a, b = _random_gencyl(rng), _random_gencyl(rng)
            if rng.random() < 0.3:
                merged = {s: CylinderPattern({**c.mapping, **a.mapping.get(s, CylinderPattern()).mapping})
                          for s, c in b.cells}
                a = GenCylinder(1, {**a.mapping, **merged})
            agree += gencyl_subset(a, b) == bf.literal_sets_included(_lits_gencyl(a), _lits_gencyl(b))
    roundtrip = all(pairing(*unpairing(k)) == k for k in range(10 ** 4))
    injective = len({unpairing(k) for k in range(10 ** 4)}) == 10 ** 4
    ok = agree == 1000 and roundtrip and injective
    return ok, f"{agree}/1000 inclusion cases agree; pairing round-trip on [0, 10^4) = {roundtrip and injective}"


# --- pytest entry points ----------------------------------------------------------------

CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
            6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9}


def _line(num: int, ok: bool, detail: str) -> str:
    return f"criterion {num}: {'PASS' if ok else 'FAIL'} ({detail})"


@pytest.mark.parametrize("num", sorted(CRITERIA))
def test_criterion(num, capsys):
    ok, detail = CRITERIA[num]()
    with capsys.disabled():
        print("\n" + _line(num, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    results = [CRITERIA[k]() for k in sorted(CRITERIA)]
    for k, (ok, detail) in zip(sorted(CRITERIA), results):
        print(_line(k, ok, detail))
    sys.exit(0 if all(ok for ok, _ in results) else 1)
