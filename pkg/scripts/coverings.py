"""Evaluate the multiple-cover tree sum at several points under both sign conventions.

Usage: python3 scripts/coverings.py [--max-d 5]
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass

from treesums.coverings import SHIPPED_LAMBDAS, cancellation_report, m_d_full
from treesums.trees import enumerate_covering_trees


@dataclass
class CoveringsConfig:
    max_d: int = 5


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--max-d", type=int, default=CoveringsConfig.max_d)
    cfg = CoveringsConfig(parser.parse_args().max_d)
    for sign in ("edges", "F"):
        print(f"sign exponent: d + {'number of edges' if sign == 'edges' else 'number of colour-2 vertices'}")
        for d in range(1, cfg.max_d + 1):
            vals = [str(m_d_full(d, lam, sign)) for lam in SHIPPED_LAMBDAS]
            print(f"  d={d} ({len(enumerate_covering_trees(d))} trees): " + ", ".join(vals))
    print("star sum split (one-part term, remainder from proper partitions)")
    for d in range(1, 11):
        r = cancellation_report(d)
        print(f"  d={d}: {r.trivial_term} + {r.remainder} = {r.total}")


if __name__ == "__main__":
    main()
