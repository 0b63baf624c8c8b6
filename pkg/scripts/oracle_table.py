"""Closed-form local factors next to their residue-count oracles, for every built-in model.

    python3 scripts/oracle_table.py --depth 6
"""

import argparse
from dataclasses import dataclass

from campana.densities import local_density_closed, local_density_oracle, twisted_local_density, twisted_local_oracle
from campana.localfactor import frac_str
from campana.orbifold import MODEL_NAMES, build_model


@dataclass
class Config:
    depth: int = 6
    primes: tuple = (2, 3, 5)
    ms: tuple = (1, 2, 3, "inf")


def run(cfg: Config):
    rows = []
    for name in MODEL_NAMES:
        for m in cfg.ms:
            model = build_model(name, m=m)
            for p in cfg.primes:
                closed = local_density_closed(model, p)
                oracle = local_density_oracle(model, p, N=cfg.depth)
                a = (1,) * len(model.character_coords)
                tw = twisted_local_density(model, p, a)
                tw_oracle = twisted_local_oracle(model, p, a, N=cfg.depth)
                rows.append((name, m, p, str(closed), oracle == closed.series(cfg.depth), str(tw), tw_oracle == tw.series(cfg.depth), oracle))
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--depth", type=int, default=6)
    args = ap.parse_args(argv)
    for name, m, p, closed, ok, tw, tw_ok, coeffs in run(Config(depth=args.depth)):
        series = ", ".join(frac_str(c) for c in coeffs)
        print(f"{name:14} m={m!s:3} p={p:<2} {closed:34} oracle {'ok' if ok else 'MISMATCH'}  twisted {tw:14} {'ok' if tw_ok else 'MISMATCH'}  [{series}]")


if __name__ == "__main__":
    main()
