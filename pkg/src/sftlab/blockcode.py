"""Sliding block codes between shifts, factor-step verification, and CA image languages.

Rule tables are dense: the word read on the window (in sorted site order) is
encoded in mixed radix with the first window site most significant, so the
table lists entries in lexicographic word order.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

from .errors import AlphabetMismatch, BudgetExhausted, DimensionMismatch, EmptyOutputSupport, FormatError
from .patterns import (
    Alphabet, Box, Pattern, SftSpec, Site, add_sites, admissible_values, box_problem,
    content_lines, format_site, is_admissible, parse_alphabet, parse_dim, parse_header,
    parse_site, placements,
)
from .search import Budget, as_budget


@dataclass(frozen=True)
class BlockCode:
    dim: int
    src: Alphabet
    dst: Alphabet
    window: tuple[Site, ...]
    rule: tuple[int, ...]

    def __post_init__(self):
        window = tuple(tuple(s) for s in self.window)
        object.__setattr__(self, "window", window)
        object.__setattr__(self, "rule", tuple(self.rule))
        if not window:
            raise ValueError("window must be nonempty")
        if any(len(s) != self.dim for s in window):
            raise DimensionMismatch("window sites must have arity dim")
        if list(window) != sorted(set(window)):
            raise ValueError("window must be sorted without repeats")
        if len(self.rule) != len(self.src) ** len(window):
            raise ValueError(f"rule table needs {len(self.src) ** len(window)} entries")
        if any(not 0 <= s < len(self.dst) for s in self.rule):
            raise ValueError("rule table has symbols outside the target alphabet")

    @classmethod
    def from_function(cls, dim: int, src: Alphabet, dst: Alphabet, window: Sequence[Site],
                      fn: Callable[[tuple[int, ...]], int]) -> "BlockCode":
        window = tuple(sorted(set(tuple(s) for s in window)))
        table = tuple(fn(w) for w in itertools.product(range(len(src)), repeat=len(window)))
        return cls(dim, src, dst, window, table)

    def index(self, word: Sequence[int]) -> int:
        k = len(self.src)
        idx = 0
        for s in word:
            idx = idx * k + s
        return idx

    def __call__(self, word: Sequence[int]) -> int:
        return self.rule[self.index(word)]

    @property
    def radius(self) -> int:
        """Least k with the window inside [-k; k]^d."""
        return max(abs(x) for s in self.window for x in s)

    @property
    def window_box(self) -> Box:
        lo = tuple(min(s[i] for s in self.window) for i in range(self.dim))
        hi = tuple(max(s[i] for s in self.window) for i in range(self.dim))
        return Box(lo, hi)

    @property
    def diameter(self) -> int:
        return max(self.window_box.shape) - 1


CaSpec = BlockCode  # a block code whose source and target alphabets agree


def identity_code(alphabet: Alphabet, dim: int = 1) -> BlockCode:
    return BlockCode(dim, alphabet, alphabet, ((0,) * dim,), tuple(range(len(alphabet))))


def shift_code(alphabet: Alphabet, u: Site) -> BlockCode:
    """(pi x)(v) = x(v + u)."""
    return BlockCode(len(u), alphabet, alphabet, (tuple(u),), tuple(range(len(alphabet))))


def constant_code(src: Alphabet, dst: Alphabet, symbol: int, dim: int = 1) -> BlockCode:
    return BlockCode(dim, src, dst, ((0,) * dim,), (symbol,) * len(src))


def xor_code(dim: int = 1) -> BlockCode:
    """x(0) + x(e_last) mod 2 on {0,1}; in 1D the window is {0, 1}."""
    a = Alphabet.of_size(2)
    window = ((0,) * dim, (0,) * (dim - 1) + (1,))
    return BlockCode.from_function(dim, a, a, window, lambda w: w[0] ^ w[1])


def random_code(rng: random.Random, dim: int, src: Alphabet, dst: Alphabet,
                window: Sequence[Site]) -> BlockCode:
    window = tuple(sorted(set(tuple(s) for s in window)))
    size = len(src) ** len(window)
    return BlockCode(dim, src, dst, window, tuple(rng.randrange(len(dst)) for _ in range(size)))


def output_box(code: BlockCode, box: Box) -> Box | None:
    wb = code.window_box
    lo = tuple(a - w for a, w in zip(box.lo, wb.lo))
    hi = tuple(b - w for b, w in zip(box.hi, wb.hi))
    if any(x > y for x, y in zip(lo, hi)):
        return None
    return Box(lo, hi)


def _strides(shape: Sequence[int]) -> list[int]:
    strides = [1] * len(shape)
    for i in range(len(shape) - 2, -1, -1):
        strides[i] = strides[i + 1] * shape[i + 1]
    return strides


def apply_values(code: BlockCode, box: Box, values: Sequence[int]) -> tuple[Box, tuple[int, ...]]:
    """Apply to a total pattern given as values on ``box`` (lexicographic order)."""
    out = output_box(code, box)
    if out is None:
        raise EmptyOutputSupport(f"box of shape {box.shape} is too small for the window")
    strides = _strides(box.shape)
    offsets = [sum(v * s for v, s in zip(site, strides)) for site in code.window]
    base_shift = sum((o - b) * s for o, b, s in zip(out.lo, box.lo, strides))
    k = len(code.src)
    rule = code.rule
    result = []
    for u in itertools.product(*(range(n) for n in out.shape)):
        base = base_shift + sum(x * s for x, s in zip(u, strides))
        idx = 0
        for off in offsets:
            idx = idx * k + values[base + off]
        result.append(rule[idx])
    return out, tuple(result)


def apply_to_pattern(code: BlockCode, a: Pattern) -> Pattern:
    if a.dim != code.dim:
        raise DimensionMismatch(f"pattern dim {a.dim} vs code dim {code.dim}")
    box = a.bounding_box
    if not a.is_total_on(box):
        raise ValueError("block codes are applied to patterns that fill a box")
    if any(not 0 <= s < len(code.src) for s in a.symbols()):
        raise AlphabetMismatch("pattern uses symbols outside the source alphabet")
    out, vals = apply_values(code, box, a.values_on(box))
    return Pattern.on_box(out, vals)


def compose(outer: BlockCode, inner: BlockCode) -> BlockCode:
    """The code of ``outer`` after ``inner``; its window is the sum of the two windows."""
    if outer.dim != inner.dim:
        raise DimensionMismatch("codes of different dimensions")
    if inner.dst != outer.src:
        raise AlphabetMismatch("inner target alphabet differs from outer source alphabet")
    window = tuple(sorted({add_sites(a, b) for a in outer.window for b in inner.window}))
    pos = {s: i for i, s in enumerate(window)}
    plan = [[pos[add_sites(a, b)] for b in inner.window] for a in outer.window]

    def rule(word):
        mid = [inner(tuple(word[j] for j in row)) for row in plan]
        return outer(mid)

    return BlockCode.from_function(outer.dim, inner.src, outer.dst, window, rule)


def power(ca: BlockCode, t: int) -> BlockCode:
    if t < 1:
        raise ValueError("power needs t >= 1")
    out = ca
    for _ in range(t - 1):
        out = compose(ca, out)
    return out


def factor_radius(src_spec: SftSpec, dst_spec: SftSpec) -> int:
    """R: every forbidden pattern of either shift fits in a translate of [-R; R]^d."""
    return max(src_spec.max_diameter, dst_spec.max_diameter)


def _check_code_for(src_spec: SftSpec, dst_spec: SftSpec, code: BlockCode) -> None:
    if not (src_spec.dim == dst_spec.dim == code.dim):
        raise DimensionMismatch("spec and code dimensions differ")
    if code.src != src_spec.alphabet or code.dst != dst_spec.alphabet:
        raise AlphabetMismatch("code alphabets do not match the shifts")


def _centre_out(box: Box, core: Sequence[Site]) -> list[Site]:
    core_set = set(core)
    rest = [s for s in box.sites() if s not in core_set]

    def dist(s):
        return min(max(abs(a - b) for a, b in zip(s, c)) for c in core)

    rest.sort(key=lambda s: (dist(s), s))
    return sorted(core_set) + rest


def find_factor_counterexample(src_spec: SftSpec, dst_spec: SftSpec, code: BlockCode, r: int,
                               budget: Budget | int | None = None) -> Pattern | None:
    """An src-admissible pattern on [-r; r]^d whose image shows a dst-forbidden pattern
    inside [-R; R]^d, or None if there is no such pattern."""
    _check_code_for(src_spec, dst_spec, code)
    budget = as_budget(budget)
    d = code.dim
    R = factor_radius(src_spec, dst_spec)
    big = Box.cube(r, d)
    inner = Box.cube(R, d)
    for b in dst_spec.forbidden:
        for u in placements(b, inner):
            targets = [(add_sites(u, v), sym) for v, sym in b.cells]
            core = sorted({add_sites(t, w) for t, _ in targets for w in code.window})
            if any(s not in big for s in core):
                continue
            order = _centre_out(big, core)
            prob, sites = box_problem(src_spec, big, order)
            index = {s: i for i, s in enumerate(sites)}
            for t, sym in targets:
                idxs = [index[add_sites(t, w)] for w in code.window]
                prob.require(idxs, _output_is(code, idxs, sym))
            sol = prob.first_solution(budget)
            if sol is not None:
                return Pattern(d, zip(sites, sol))
    return None


def _output_is(code: BlockCode, idxs: list[int], sym: int):
    def check(vals):
        return code(tuple(vals[i] for i in idxs)) == sym
    return check


def verify_factor_step(src_spec: SftSpec, dst_spec: SftSpec, code: BlockCode, r: int,
                       budget: Budget | int | None = None) -> bool:
    """Whether every src-admissible pattern on [-r; r]^d maps to a pattern that is
    dst-admissible on [-R; R]^d.  Requires r > R + k + 1."""
    _check_code_for(src_spec, dst_spec, code)
    R = factor_radius(src_spec, dst_spec)
    k = code.radius
    if r <= R + k + 1:
        raise ValueError(f"radius {r} must exceed R + k + 1 = {R + k + 1}")
    return find_factor_counterexample(src_spec, dst_spec, code, r, budget) is None


def verify_factor_step_naive(src_spec: SftSpec, dst_spec: SftSpec, code: BlockCode, r: int,
                             budget: Budget | int | None = None) -> bool:
    """Direct reading: enumerate a_1..a_N and test each image. Only for small boxes."""
    _check_code_for(src_spec, dst_spec, code)
    R = factor_radius(src_spec, dst_spec)
    big = Box.cube(r, code.dim)
    inner = Box.cube(R, code.dim)
    for vals in admissible_values(src_spec, big, budget):
        out = Pattern.on_box(*apply_values(code, big, vals))
        if not is_admissible(out.restrict(inner.sites()), dst_spec):
            return False
    return True


def rule_from_index(index: int, entries: int, k: int) -> tuple[int, ...]:
    table = []
    for _ in range(entries):
        index, rem = divmod(index, k)
        table.append(rem)
    return tuple(reversed(table))


def search_factor(src_spec: SftSpec, dst_spec: SftSpec, max_k: int, max_r: int,
                  rule_budget: int = 10_000, node_budget: int | None = 1_000_000,
                  samples: int = 8) -> tuple[BlockCode, int] | None:
    """First (k, r, rule index) passing verify_factor_step, or None.

    None also covers an exhausted rule or node budget.  Each candidate is first
    tried on a few src-admissible sample patterns before the exhaustive check.
    """
    if src_spec.dim != dst_spec.dim:
        raise DimensionMismatch("spec dimensions differ")
    d = src_spec.dim
    R = factor_radius(src_spec, dst_spec)
    budget = Budget(node_budget)
    ndst = len(dst_spec.alphabet)
    tried = 0
    try:
        for k in range(max_k + 1):
            window = tuple(Box.cube(k, d).sites())
            entries = len(src_spec.alphabet) ** len(window)
            for r in range(R + k + 2, max_r + 1):
                big = Box.cube(r, d)
                inner = Box.cube(R, d)
                sample = list(itertools.islice(admissible_values(src_spec, big, budget), samples))
                if not sample:
                    # src has no admissible pattern at this radius: every code passes
                    code = BlockCode(d, src_spec.alphabet, dst_spec.alphabet, window, (0,) * entries)
                    return code, r
                for idx in range(ndst ** entries):
                    tried += 1
                    if tried > rule_budget:
                        return None
                    code = BlockCode(d, src_spec.alphabet, dst_spec.alphabet, window,
                                     rule_from_index(idx, entries, ndst))
                    if not all(is_admissible(Pattern.on_box(*apply_values(code, big, v))
                                             .restrict(inner.sites()), dst_spec) for v in sample):
                        continue
                    if verify_factor_step(src_spec, dst_spec, code, r, budget):
                        return code, r
    except BudgetExhausted:
        return None
    return None


# --- cellular automata ----------------------------------------------------------------

def ca_image_language(ca: BlockCode, t: int, n: int, budget: int | None = 1_000_000) -> set[Pattern]:
    """Exact set of patterns on [0, n-1]^d occurring in f^t(full shift)."""
    if ca.src != ca.dst:
        raise AlphabetMismatch("a cellular automaton maps a shift to itself")
    if t < 0 or n < 1:
        raise ValueError("need t >= 0 and n >= 1")
    d = ca.dim
    target = Box.corner(n, d)
    wb = ca.window_box
    src_box = Box(tuple(t * a for a in wb.lo), tuple(n - 1 + t * b for b in wb.hi))
    k = len(ca.src)
    total = k ** src_box.size
    if budget is not None and total > budget:
        raise BudgetExhausted(f"{total} inflated patterns exceed the budget of {budget}")
    images = set()
    for vals in itertools.product(range(k), repeat=src_box.size):
        box = src_box
        for _ in range(t):
            box, vals = apply_values(ca, box, vals)
        assert box == target
        images.add(vals)
    return {Pattern.on_box(target, v) for v in images}


def quiescent_fixed_points(ca: BlockCode) -> frozenset[int]:
    if ca.src != ca.dst:
        raise AlphabetMismatch("a cellular automaton maps a shift to itself")
    return frozenset(s for s in range(len(ca.src)) if ca((s,) * len(ca.window)) == s)


# --- text format ---------------------------------------------------------------------

def write_code(code: BlockCode) -> str:
    out = [
        f"dim {code.dim}",
        "src " + " ".join(code.src.symbols),
        "dst " + " ".join(code.dst.symbols),
        "window " + " ".join(format_site(s) for s in code.window),
    ]
    words = itertools.product(range(len(code.src)), repeat=len(code.window))
    for word, sym in zip(words, code.rule):
        out.append(f"map {code.src.format_word(word)} -> {code.dst.name(sym)}")
    return "\n".join(out) + "\n"


def parse_code(text: str) -> BlockCode:
    lines = content_lines(text)
    head = parse_header(lines, ("dim", "src", "dst", "window"))
    dim = parse_dim(head["dim"])
    src, dst = parse_alphabet(head["src"]), parse_alphabet(head["dst"])
    window = [parse_site(tok, dim) for tok in head["window"].split()]
    if sorted(set(window)) != window:
        raise FormatError("window sites must be listed sorted and without repeats")
    table: dict[tuple[int, ...], int] = {}
    for lineno, line in lines:
        if not line.startswith("map "):
            raise FormatError(f"unexpected line {line!r}", lineno)
        lhs, arrow, rhs = line[4:].partition("->")
        if not arrow:
            raise FormatError("expected 'map <word> -> <symbol>'", lineno)
        try:
            word = src.parse_word(lhs)
            sym = dst.index(rhs.strip())
        except KeyError as e:
            raise FormatError(e.args[0], lineno) from None
        if len(word) != len(window):
            raise FormatError(f"word length {len(word)} does not match the window", lineno)
        if word in table:
            raise FormatError("duplicate map entry", lineno)
        table[word] = sym
    words = list(itertools.product(range(len(src)), repeat=len(window)))
    missing = [w for w in words if w not in table]
    if missing:
        raise FormatError(f"rule table is missing word {src.format_word(missing[0])}")
    return BlockCode(dim, src, dst, tuple(window), tuple(table[w] for w in words))


def iter_words(alphabet: Alphabet, length: int) -> Iterator[tuple[int, ...]]:
    return itertools.product(range(len(alphabet)), repeat=length)
