"""Attractor experiment: cover refinement, cell tests and the forbidden-pair
presentation for a map given by oracle and trap files.

    python scripts/attractor_run.py                         # the spiral, original coordinates
    python scripts/attractor_run.py --oracle data/attractors/spiral-unit.oracle \\
        --trap data/attractors/spiral-unit.trap --encode-fuel 6 --depth 2
"""

from __future__ import annotations

import argparse
import itertools
import math
import time
from dataclasses import dataclass
from pathlib import Path

from sftlab.attractor import (
    ProvedDisjoint, TrapRegion, attractor_cover, check_trap, enumerate_forbidden_cylinders,
    semidecide_cell_avoids_attractor,
)
from sftlab.dyadic import DyadicCell, parse_cells
from sftlab.oracles import parse_oracle

DATA = Path(__file__).resolve().parent.parent / "data" / "attractors"


@dataclass(frozen=True)
class AttractorConfig:
    oracle: str = str(DATA / "spiral.oracle")
    trap: str = str(DATA / "spiral.trap")
    stages: int = 24
    grid_level: int = 3
    fuel: int = 32
    encode_fuel: int = 0
    depth: int = 2


def radius_span(cells, level, mid):
    """Range of Euclidean distances from ``mid`` to the cell centres."""
    side = 1 / 2 ** level
    rs = [math.dist([(c + 0.5) * side for c in corner], mid) for corner in cells]
    return min(rs), max(rs)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for field, default in AttractorConfig.__dataclass_fields__.items():
        ap.add_argument("--" + field.replace("_", "-"), type=type(default.default), default=default.default)
    cfg = AttractorConfig(**{k.replace("-", "_"): v for k, v in vars(ap.parse_args(argv)).items()})
    oracle = parse_oracle(Path(cfg.oracle).read_text())
    trap = TrapRegion(tuple(parse_cells(Path(cfg.trap).read_text())))
    t0 = time.perf_counter()
    check_trap(oracle, trap)
    print(f"trap: {len(trap.cells)} cells, check passed in {time.perf_counter() - t0:.2f}s")
    lo = [min(c.lo[i] for c in trap.cells) for i in range(trap.dim)]
    hi = [max(c.hi[i] for c in trap.cells) for i in range(trap.dim)]
    mid = [float(a + b) / 2 for a, b in zip(lo, hi)]
    cover = attractor_cover(oracle, trap)
    t0 = time.perf_counter()
    print("stage\tlevel\tcells\tdistance from trap centre")
    for n in range(0, cfg.stages + 1, max(1, cfg.stages // 8)):
        h, cells = cover.stage(n)
        r_lo, r_hi = radius_span(cells, h, mid)
        print(f"{n}\t{h}\t{len(cells)}\t[{r_lo:.4f}, {r_hi:.4f}]")
    print(f"cover: {time.perf_counter() - t0:.2f}s")
    # cell tests over a grid around the trap
    grid = [DyadicCell(trap.dim, cfg.grid_level, k) for k in _corners(lo, hi, cfg.grid_level)]
    t0 = time.perf_counter()
    proved = sum(isinstance(semidecide_cell_avoids_attractor(oracle, trap, c, cfg.fuel), ProvedDisjoint)
                 for c in grid)
    print(f"grid level {cfg.grid_level}: {proved}/{len(grid)} cells proved disjoint at fuel {cfg.fuel} "
          f"({time.perf_counter() - t0:.2f}s)")
    if cfg.encode_fuel:
        t0 = time.perf_counter()
        for k in range(1, cfg.encode_fuel + 1):
            cyls = enumerate_forbidden_cylinders(oracle, trap, k, cfg.depth)
            print(f"encode fuel {k}: {len(cyls)} forbidden pairs")
        print(f"encode: {time.perf_counter() - t0:.2f}s")
    return 0


def _corners(lo, hi, level):
    side = 2 ** level
    ranges = [range(int(a * side), int(b * side)) for a, b in zip(lo, hi)]
    return itertools.product(*ranges)


if __name__ == "__main__":
    raise SystemExit(main())
