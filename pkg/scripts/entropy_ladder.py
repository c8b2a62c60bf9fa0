"""Word counts and the entropy upper bounds log(N_n) / n^d for a few shifts.

    python scripts/entropy_ladder.py --max-n 12
    python scripts/entropy_ladder.py --sft data/corpus/golden-mean-2d.sft --max-n 5
"""

from __future__ import annotations

import argparse
import math
from dataclasses import dataclass
from pathlib import Path

from sftlab import catalog
from sftlab.patterns import count_admissible, parse_sft


@dataclass(frozen=True)
class LadderConfig:
    max_n: int = 12
    budget: int = 5_000_000
    sft: str | None = None


def ladder(spec, cfg: LadderConfig):
    for n in range(1, cfg.max_n + 1):
        count = count_admissible(spec, n, cfg.budget)
        h = math.log(count) / n ** spec.dim if count else float("-inf")
        yield n, count, h


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-n", type=int, default=LadderConfig.max_n)
    ap.add_argument("--budget", type=int, default=LadderConfig.budget)
    ap.add_argument("--sft", help="SFT file; default runs the golden mean shift in 1D and 2D")
    cfg = LadderConfig(**{k.replace("-", "_"): v for k, v in vars(ap.parse_args(argv)).items()})
    if cfg.sft:
        shifts = {Path(cfg.sft).stem: parse_sft(Path(cfg.sft).read_text())}
    else:
        shifts = {"golden-mean": catalog.golden_mean(), "golden-mean-2d": catalog.golden_mean(2)}
    target = math.log((1 + math.sqrt(5)) / 2)
    for name, spec in shifts.items():
        print(f"# {name} (dim {spec.dim})")
        print("n\tcount\tbound")
        n_max = cfg.max_n if spec.dim == 1 else min(cfg.max_n, 5)
        for n, count, h in ladder(spec, LadderConfig(n_max, cfg.budget)):
            print(f"{n}\t{count}\t{h:.6f}")
        if name == "golden-mean":
            print(f"# log of the golden ratio: {target:.6f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
