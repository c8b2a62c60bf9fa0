import itertools

import pytest
from hypothesis import given, settings

import bruteforce as bf
from strategies import sft_1d, sft_2d
from sftlab import catalog
from sftlab.errors import FormatError, SupportNotContained
from sftlab.patterns import (
    Alphabet, Box, Pattern, appears_at, count_admissible, entropy_upper, is_admissible,
    parse_sft, write_sft,
)


@settings(max_examples=60, deadline=None)
@given(sft_1d())
def test_count_matches_brute_force_1d(spec):
    forb = [p.word() for p in spec.forbidden]
    for n in range(1, 6):
        assert count_admissible(spec, n) == bf.count_words_avoiding(n, forb)


@settings(max_examples=40, deadline=None)
@given(sft_2d())
def test_count_matches_brute_force_2d(spec):
    box = Box.corner(2, 2)
    sites = box.sites()
    brute = sum(1 for vals in itertools.product((0, 1), repeat=4)
                if is_admissible(Pattern(2, zip(sites, vals)), spec))
    assert count_admissible(spec, 2) == brute


@settings(max_examples=60, deadline=None)
@given(sft_1d(k=3))
def test_sft_roundtrip_1d(spec):
    assert parse_sft(write_sft(spec)) == spec


@settings(max_examples=40, deadline=None)
@given(sft_2d())
def test_sft_roundtrip_2d(spec):
    assert parse_sft(write_sft(spec)) == spec


def test_appearance_is_translation_of_support():
    a = Pattern.from_word((0, 1, 1, 0))
    b = Pattern.from_word((1, 1))
    assert appears_at(a, b, (1,))
    assert not appears_at(a, b, (0,))
    with pytest.raises(SupportNotContained):
        appears_at(a, b, (3,))


def test_two_dimensional_counts():
    # independent sets of the 2x2 grid graph (a 4-cycle)
    assert count_admissible(catalog.golden_mean(2), 2) == 7
    assert count_admissible(catalog.checkerboard(), 3) == 2


def test_entropy_of_full_shift_is_log_k():
    import math
    assert entropy_upper(catalog.full_shift(3), 4) == pytest.approx(math.log(3))
    assert entropy_upper(catalog.forbid_all_symbols(), 2) == float("-inf")


def test_alphabet_words():
    a = Alphabet(("red", "blue"))
    assert a.parse_word("red blue red") == (0, 1, 0)
    assert Alphabet.of_size(2).parse_word("0110") == (0, 1, 1, 0)


@pytest.mark.parametrize("text", [
    "",
    "dim 1\nalphabet 0 1\nforbid\nsite 0 = 2\n",
    "dim 1\nalphabet 0 0\n",
    "dim x\nalphabet 0 1\n",
    "dim 2\nalphabet 0 1\nforbid\nsite 0 = 1\n",
    "dim 1\nalphabet 0 1\nforbid\n",
])
def test_malformed_sft_is_format_error(text):
    with pytest.raises(FormatError):
        parse_sft(text)
