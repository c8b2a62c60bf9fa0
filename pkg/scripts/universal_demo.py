"""Guarded stages and the dovetailed universal stage over a registry of scripted
enumerators (some of which eventually exclude everything).

    python scripts/universal_demo.py data/corpus/guard.eds data/corpus/no-ones.eds --k 40
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass, field
from pathlib import Path

from sftlab.eds import guard_trace, lane_depth, parse_script, universal_lanes, universal_stage


@dataclass(frozen=True)
class UniversalConfig:
    scripts: tuple[str, ...] = field(default_factory=tuple)
    k: int = 30
    every: int = 5


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("scripts", nargs="+")
    ap.add_argument("--k", type=int, default=UniversalConfig.k)
    ap.add_argument("--every", type=int, default=UniversalConfig.every)
    a = ap.parse_args(argv)
    cfg = UniversalConfig(tuple(a.scripts), a.k, a.every)
    registry = [parse_script(Path(p).read_text()) for p in cfg.scripts]
    for n, (path, enum) in enumerate(zip(cfg.scripts, registry)):
        kept, fired = guard_trace(enum, cfg.k)
        print(f"lane {n} {Path(path).name}: keeps {len(kept)} cylinders, guard "
              + (f"fired at j={fired}" if fired else "never fired"))
    print("k\tlane depths\texcluded\tall lanes nonempty")
    for k in range(0, cfg.k + 1, cfg.every):
        lanes = universal_lanes(k, registry)
        depths = [lane_depth(n, k) for n in range(len(registry))]
        nonempty = all(not s.is_empty_1d() for s in lanes.values())
        print(f"{k}\t{depths}\t{len(universal_stage(k, registry))}\t{nonempty}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
