"""Euler product partial values against the reported tail bound as P_max grows.

    python3 scripts/euler_tail.py --m 2 --s 3.5
"""

import argparse
import math
from dataclasses import dataclass, field

from campana.densities import euler_product
from campana.orbifold import build_model


@dataclass
class Config:
    model: str = "p3-heisenberg"
    m: int = 2
    s: float = 3.5
    bounds: list = field(default_factory=lambda: [10**k for k in range(2, 7)])


def run(cfg: Config):
    model = build_model(cfg.model, m=cfg.m)
    reports = [euler_product(model, cfg.s, P) for P in cfg.bounds]
    final = reports[-1].value
    return [(r.prime_bound, r.value, r.tail_bound, abs(math.log(final / r.value))) for r in reports]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--model", default="p3-heisenberg")
    ap.add_argument("--m", type=int, default=2)
    ap.add_argument("--s", type=float, default=3.5)
    args = ap.parse_args(argv)
    rows = run(Config(model=args.model, m=args.m, s=args.s))
    print(f"{'P_max':>9} {'value':>16} {'tail bound':>12} {'|log(v_last/v)|':>16}")
    for P, v, tail, gap in rows:
        print(f"{P:>9} {v:>16.12f} {tail:>12.3e} {gap:>16.3e}")


if __name__ == "__main__":
    main()
