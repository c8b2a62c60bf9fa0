"""Run the 2D emptiness semi-decision over shipped shifts and random small SFTs,
reporting verdict counts and timings.

    python scripts/emptiness_sweep.py --random 50 --fuel 3 --seed 1
"""

from __future__ import annotations

import argparse
import collections
import random
import time
from dataclasses import dataclass

from sftlab import catalog
from sftlab.multidim import WangTile, semidecide_empty, verdict_record, wang_to_sft
from sftlab.patterns import Alphabet, Pattern, SftSpec


@dataclass(frozen=True)
class SweepConfig:
    fuel: int = 4
    random: int = 30
    seed: int = 0
    patterns: int = 3
    node_budget: int = 200_000


def random_sft(rng: random.Random, n_patterns: int) -> SftSpec:
    pats = []
    for _ in range(rng.randint(1, n_patterns)):
        sites = rng.sample([(0, 0), (0, 1), (1, 0), (1, 1)], rng.randint(1, 3))
        pats.append(Pattern(2, {s: rng.randint(0, 1) for s in sites}))
    return SftSpec(Alphabet.of_size(2), 2, tuple(pats))


def named_instances():
    yield "checkerboard", catalog.checkerboard()
    yield "golden-mean-2d", catalog.golden_mean(2)
    yield "single-bad-wang", wang_to_sft([WangTile("A", "red", "red", "blue", "green")])
    yield "two-wang", wang_to_sft([WangTile("A", "x", "y", "x", "z"), WangTile("B", "x", "z", "x", "y")])


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--fuel", type=int, default=SweepConfig.fuel)
    ap.add_argument("--random", type=int, default=SweepConfig.random)
    ap.add_argument("--seed", type=int, default=SweepConfig.seed)
    ap.add_argument("--patterns", type=int, default=SweepConfig.patterns)
    ap.add_argument("--node-budget", type=int, default=SweepConfig.node_budget)
    cfg = SweepConfig(**{k.replace("-", "_"): v for k, v in vars(ap.parse_args(argv)).items()})
    for name, spec in named_instances():
        t0 = time.perf_counter()
        v = semidecide_empty(spec, cfg.fuel, cfg.node_budget)
        print(f"{name}\t{verdict_record(v)}\t{time.perf_counter() - t0:.4f}s")
    rng = random.Random(cfg.seed)
    tally = collections.Counter()
    t0 = time.perf_counter()
    for _ in range(cfg.random):
        tally[type(semidecide_empty(random_sft(rng, cfg.patterns), cfg.fuel, cfg.node_budget)).__name__] += 1
    print(f"random x{cfg.random}\t{dict(sorted(tally.items()))}\t{time.perf_counter() - t0:.3f}s")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
