"""Compare exact Euler characteristics of the moduli spaces with the asymptotic formula.

Usage: python3 scripts/asymptotics.py [--max-n 500] [--every 25]
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass

from treesums.moduli import chi_asymptotic_report


@dataclass
class AsymptoticsConfig:
    max_n: int = 500
    every: int = 25


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--max-n", type=int, default=AsymptoticsConfig.max_n)
    parser.add_argument("--every", type=int, default=AsymptoticsConfig.every)
    cfg = AsymptoticsConfig(**{k.replace("-", "_"): v for k, v in vars(parser.parse_args()).items()})

    rows = chi_asymptotic_report(cfg.max_n)
    print(f"{'n':>5} {'digits':>7} {'log chi':>14} {'log f':>14} {'rel. error':>11} {'ratio':>9}")
    for r in rows:
        if r["n"] % cfg.every == 0 or r["n"] == rows[-1]["n"]:
            print(
                f"{r['n']:>5} {len(str(r['chi'])):>7} {r['log_chi']:>14.6f} {r['log_f']:>14.6f}"
                f" {r['log_rel_error']:>11.3e} {r['ratio']:>9.5f}"
            )


if __name__ == "__main__":
    main()
