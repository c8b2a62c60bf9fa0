"""Hypothesis strategies shared by the module tests."""

from hypothesis import strategies as st

from sftlab.eds import CylinderPattern, GenCylinder
from sftlab.patterns import Alphabet, Pattern, SftSpec


def words(k=2, min_size=1, max_size=3):
    return st.lists(st.integers(0, k - 1), min_size=min_size, max_size=max_size).map(tuple)


@st.composite
def sft_1d(draw, k=2, max_words=4, max_len=3):
    ws = draw(st.lists(words(k, 1, max_len), max_size=max_words, unique=True))
    return SftSpec(Alphabet.of_size(k), 1, tuple(Pattern.from_word(w) for w in ws))


@st.composite
def pattern_2d(draw, k=2, max_cells=3):
    sites = draw(st.lists(st.tuples(st.integers(0, 1), st.integers(0, 1)),
                          min_size=1, max_size=max_cells, unique=True))
    return Pattern(2, {s: draw(st.integers(0, k - 1)) for s in sites})


@st.composite
def sft_2d(draw, k=2, max_patterns=3):
    pats = draw(st.lists(pattern_2d(k), max_size=max_patterns))
    return SftSpec(Alphabet.of_size(k), 2, tuple(pats))


def cylinders(max_bit=4):
    return st.dictionaries(st.integers(0, max_bit - 1), st.integers(0, 1)).map(CylinderPattern)


def gencyls(dim=1, max_sites=3, max_bit=4, span=2):
    site = st.tuples(*[st.integers(-span, span)] * dim)
    return st.dictionaries(site, cylinders(max_bit), min_size=1, max_size=max_sites).map(
        lambda m: GenCylinder(dim, m))
