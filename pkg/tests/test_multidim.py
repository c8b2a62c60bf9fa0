import itertools

import pytest
from hypothesis import given, settings

from strategies import sft_2d
from sftlab import catalog
from sftlab.errors import FormatError
from sftlab.multidim import (
    ProvedEmpty, ProvedNonempty, TorusPattern, Unknown, WangTile, parse_torus, parse_wang,
    semidecide_empty, verdict_record, verify_torus, wang_to_sft, write_torus, write_wang,
)
from sftlab.patterns import Box, Pattern, is_admissible


def _brute_box_nonempty(spec, n):
    box = Box.cube(n, 2)
    sites = box.sites()
    return any(is_admissible(Pattern(2, zip(sites, vals)), spec)
               for vals in itertools.product(range(len(spec.alphabet)), repeat=len(sites)))


def _brute_torus_ok(spec, t):
    """Unfold the torus on a box two periods wide and check every placement."""
    p, q = t.periods
    big = Box((0, 0), (2 * p + 1, 2 * q + 1))
    return is_admissible(Pattern(2, {s: t.value(s) for s in big.sites()}), spec)


@settings(max_examples=40, deadline=None)
@given(sft_2d())
def test_verdicts_are_sound(spec):
    v = semidecide_empty(spec, max_radius=2)
    if isinstance(v, ProvedEmpty):
        assert not _brute_box_nonempty(spec, v.n)
    elif isinstance(v, ProvedNonempty):
        assert verify_torus(spec, v.cert)
        assert _brute_torus_ok(spec, v.cert)
    else:
        assert isinstance(v, Unknown)


@settings(max_examples=40, deadline=None)
@given(sft_2d())
def test_torus_verification_matches_unfolding(spec):
    for p, q in [(1, 1), (1, 2), (2, 1), (2, 2)]:
        for cells in itertools.product((0, 1), repeat=p * q):
            t = TorusPattern((p, q), cells)
            assert verify_torus(spec, t) == _brute_torus_ok(spec, t)


def test_checkerboard_certificate():
    v = semidecide_empty(catalog.checkerboard(), max_radius=4)
    assert isinstance(v, ProvedNonempty)
    assert verdict_record(v) == {"verdict": "ProvedNonempty", "periods": [2, 2], "cells": [0, 1, 1, 0]}


def test_wang_compilation():
    a = WangTile("A", n="x", e="y", s="x", w="y")
    assert isinstance(semidecide_empty(wang_to_sft([a])), ProvedNonempty)
    b = WangTile("B", n="x", e="y", s="z", w="y")
    assert semidecide_empty(wang_to_sft([b])) == ProvedEmpty(1)


def test_budget_exhaustion_is_unknown():
    v = semidecide_empty(catalog.golden_mean(2), max_radius=4, node_budget=3)
    assert isinstance(v, Unknown) and v.fuel_spent >= 3


def test_wang_roundtrip():
    tiles = [WangTile("A", "r", "g", "b", "y"), WangTile("B", "g", "g", "r", "r")]
    assert parse_wang(write_wang(tiles)) == tiles


def test_torus_roundtrip():
    spec = catalog.checkerboard()
    t = TorusPattern((2, 3), (0, 1, 0, 1, 0, 1))
    assert parse_torus(write_torus(t, spec.alphabet), spec.alphabet) == t


@pytest.mark.parametrize("text", ["tile A n=r e=g s=b\n", "tile A n=r e=g s=b q=y\n",
                                  "tile A n=r e=g s=b w=y\ntile A n=r e=g s=b w=y\n", ""])
def test_malformed_wang(text):
    with pytest.raises(FormatError):
        parse_wang(text)
