"""Exact emptiness for one-dimensional SFTs via the transfer graph on m-blocks.

Bi-infinite admissible sequences are exactly the bi-infinite walks of the
graph, so the shift is nonempty iff some vertex survives repeated removal of
vertices lacking a predecessor or a successor.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

from .errors import DimensionMismatch, SupportCapExceeded
from .patterns import Alphabet, Box, Pattern, SftSpec, admissible_values, is_admissible

Word = tuple[int, ...]


@dataclass(frozen=True)
class TransferGraph:
    block_len: int
    vertices: tuple[Word, ...]
    edges: tuple[tuple[Word, Word], ...]

    def successors(self) -> dict[Word, list[Word]]:
        succ: dict[Word, list[Word]] = {v: [] for v in self.vertices}
        for v, w in self.edges:
            succ[v].append(w)
        return succ


def _require_1d(spec: SftSpec) -> None:
    if spec.dim != 1:
        raise DimensionMismatch(f"expected a 1-dimensional spec, got dim {spec.dim}")


def build_transfer_graph(spec: SftSpec, block_len: int | None = None) -> TransferGraph:
    _require_1d(spec)
    needed = spec.max_extent[0]
    m = needed if block_len is None else block_len
    if m < needed:
        raise ValueError(f"block_len {m} is shorter than the longest forbidden word ({needed})")
    vertices = tuple(admissible_values(spec, Box((0,), (m - 1,))))
    vset = set(vertices)
    by_prefix: dict[Word, list[Word]] = {}
    for w in vertices:
        by_prefix.setdefault(w[:-1], []).append(w)
    edges = []
    for v in vertices:
        for w in by_prefix.get(v[1:], ()):
            merged = v + w[-1:]
            if is_admissible(Pattern.from_word(merged), spec):
                edges.append((v, w))
    assert all(v in vset and w in vset for v, w in edges)
    return TransferGraph(m, vertices, tuple(edges))


def prune(graph: TransferGraph) -> tuple[set[Word], int]:
    """Vertices with infinite forward and backward walks, plus the pruning-round count."""
    alive = set(graph.vertices)
    edges = list(graph.edges)
    rounds = 0
    while True:
        live_edges = [(v, w) for v, w in edges if v in alive and w in alive]
        has_out = {v for v, _ in live_edges}
        has_in = {w for _, w in live_edges}
        keep = alive & has_out & has_in
        if keep == alive:
            return alive, rounds
        alive = keep
        edges = live_edges
        rounds += 1


def decide_empty_1d(spec: SftSpec) -> bool:
    """True iff the 1D SFT has no point."""
    alive, _ = prune(build_transfer_graph(spec))
    return not alive


def _shortest_cycle_word(graph: TransferGraph, alive: set[Word]) -> Word | None:
    succ = {v: sorted(w for w in ws if w in alive) for v, ws in graph.successors().items() if v in alive}
    order = sorted(alive)
    for p in range(1, len(order) + 1):
        for start in order:
            # reach[l] = vertices with a walk of exactly l steps to start
            reach = [{start}]
            for _ in range(p):
                prev = reach[-1]
                reach.append({v for v in order if any(w in prev for w in succ[v])})
            if start not in reach[p]:
                continue
            # lexicographically least vertex sequence is the least word
            path = [start]
            v = start
            for remaining in range(p - 1, 0, -1):
                v = next(w for w in succ[v] if w in reach[remaining])
                path.append(v)
            return tuple(u[0] for u in path)
    return None


def periodic_point_1d(spec: SftSpec) -> tuple[int, Word] | None:
    """Shortest periodic word (least lexicographically among ties), or None if empty."""
    graph = build_transfer_graph(spec)
    alive, _ = prune(graph)
    if not alive:
        return None
    w = _shortest_cycle_word(graph, alive)
    assert w is not None
    return len(w), w


def periodic_word_is_admissible(spec: SftSpec, word: Word) -> bool:
    """Check the bi-infinite repetition of ``word`` on a long enough window."""
    reps = 2 + (spec.max_extent[0] + len(word) - 1) // len(word)
    return is_admissible(Pattern.from_word(word * reps), spec)


# --- effective subshifts presented by finitely many generalized cylinders ----

DEFAULT_BIT_CAP = 20
DEFAULT_PATTERN_CAP = 200_000


def bits_alphabet(bits: tuple[int, ...]) -> Alphabet:
    """Alphabet {0,1}^I; symbol j sets bit I[t] to (j >> t) & 1, named by its bit string."""
    if not bits:
        return Alphabet(("-",))
    names = ["".join(str((j >> t) & 1) for t in range(len(bits))) for j in range(2 ** len(bits))]
    return Alphabet(tuple(names))


def eds_to_sft(cylinders: Iterable, bit_cap: int = DEFAULT_BIT_CAP,
               pattern_cap: int = DEFAULT_PATTERN_CAP) -> SftSpec:
    """Reduce finitely many 1D generalized cylinders to an SFT over {0,1}^I.

    Each excluded cylinder becomes the finite set of words over {0,1}^I on its
    site support whose symbols satisfy the cylinder's bit constraints.
    """
    cylinders = list(cylinders)
    for g in cylinders:
        if g.dim != 1:
            raise DimensionMismatch("expected 1-dimensional generalized cylinders")
    bits = tuple(sorted({i for g in cylinders for _, c in g.cells for i, _ in c.bits}))
    if len(bits) > bit_cap:
        raise SupportCapExceeded(f"{len(bits)} constrained bits exceeds the cap of {bit_cap}")
    pos = {b: t for t, b in enumerate(bits)}
    alphabet = bits_alphabet(bits)
    nsym = len(alphabet)
    forbidden = []
    total = 0
    for g in cylinders:
        choices = []
        for site, cyl in g.cells:
            mask = val = 0
            for i, v in cyl.bits:
                mask |= 1 << pos[i]
                val |= v << pos[i]
            choices.append((site, [j for j in range(nsym) if j & mask == val]))
        count = 1
        for _, syms in choices:
            count *= len(syms)
        total += count
        if total > pattern_cap:
            raise SupportCapExceeded(f"reduction needs more than {pattern_cap} forbidden words")
        sites = [s for s, _ in choices]
        for combo in itertools.product(*(syms for _, syms in choices)):
            forbidden.append(Pattern(1, zip(sites, combo)))
    return SftSpec(alphabet, 1, tuple(forbidden))


def decide_empty_eds_1d(cylinders: Iterable, bit_cap: int = DEFAULT_BIT_CAP,
                        pattern_cap: int = DEFAULT_PATTERN_CAP) -> bool:
    """True iff excluding every translate of the given cylinders leaves nothing."""
    spec = eds_to_sft(cylinders, bit_cap, pattern_cap)
    if len(spec.alphabet) ** spec.max_extent[0] > pattern_cap * 8:
        raise SupportCapExceeded("transfer graph over {0,1}^I would be too large")
    return decide_empty_1d(spec)
