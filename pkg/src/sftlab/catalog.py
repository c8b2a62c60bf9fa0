"""Standard small shifts used by tests, scripts and the shipped corpus."""

from __future__ import annotations

from typing import Iterable, Sequence

from .patterns import Alphabet, Pattern, SftSpec


def unit_vector(axis: int, dim: int) -> tuple[int, ...]:
    return tuple(1 if i == axis else 0 for i in range(dim))


def full_shift(k: int = 2, dim: int = 1) -> SftSpec:
    return SftSpec(Alphabet.of_size(k), dim, ())


def forbid_words(words: Iterable[Sequence[int] | str], k: int = 2) -> SftSpec:
    """1D SFT over {0..k-1} forbidding the given words (strings of digits allowed)."""
    pats = []
    for w in words:
        if isinstance(w, str):
            w = [int(c) for c in w]
        pats.append(Pattern.from_word(w))
    return SftSpec(Alphabet.of_size(k), 1, tuple(pats))


def golden_mean(dim: int = 1) -> SftSpec:
    """No two adjacent 1s along any axis."""
    pats = [Pattern(dim, {(0,) * dim: 1, unit_vector(i, dim): 1}) for i in range(dim)]
    return SftSpec(Alphabet.of_size(2), dim, tuple(pats))


def checkerboard(dim: int = 2) -> SftSpec:
    """Adjacent sites along every axis carry different symbols."""
    pats = [Pattern(dim, {(0,) * dim: s, unit_vector(i, dim): s})
            for i in range(dim) for s in (0, 1)]
    return SftSpec(Alphabet.of_size(2), dim, tuple(pats))


def forbid_all_symbols(k: int = 2, dim: int = 1) -> SftSpec:
    return SftSpec(Alphabet.of_size(k), dim,
                   tuple(Pattern(dim, {(0,) * dim: s}) for s in range(k)))
