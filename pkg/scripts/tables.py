"""Tabulate Poincaré polynomials by every available route and report agreement.

Usage: python3 scripts/tables.py [--moduli-n 8] [--config-n 5]
"""

from __future__ import annotations

import argparse
import time
from dataclasses import dataclass
from math import factorial

from treesums.configuration import SHIPPED_INSTANCES, poincare_confspace_strata, psi_series, x0_closed_form
from treesums.engine import partition_function_direct
from treesums.moduli import moduli_tensor_data, poincare_compact_recursive, poincare_compact_strata


@dataclass
class TablesConfig:
    moduli_n: int = 8
    config_n: int = 5


def moduli(cfg: TablesConfig) -> None:
    start = time.perf_counter()
    z = partition_function_direct(moduli_tensor_data(), cfg.moduli_n)
    print("compactified moduli of stable curves")
    for n in range(3, cfg.moduli_n + 1):
        rec = poincare_compact_recursive(n)
        routes = {"strata": poincare_compact_strata(n), "tree sum": z[n] * factorial(n)}
        agree = all(v == rec for v in routes.values())
        print(f"  n={n}: {rec}   chi={rec(-1)}   {'agree' if agree else 'DISAGREE'}")
    print(f"  ({time.perf_counter() - start:.1f}s)")


def configuration(cfg: TablesConfig) -> None:
    for inst in SHIPPED_INSTANCES:
        print(f"configuration spaces, {inst}")
        psi = psi_series(inst, cfg.config_n)
        x0 = x0_closed_form(inst, cfg.config_n)
        for n in range(1, cfg.config_n + 1):
            series = psi[n] * factorial(n)
            ok = poincare_confspace_strata(inst, n) == series
            if n >= 2:
                ok &= x0[n - 1] * factorial(n - 1) == series
            print(f"  n={n}: {series}   chi={series(-1)}   {'agree' if ok else 'DISAGREE'}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--moduli-n", type=int, default=TablesConfig.moduli_n)
    parser.add_argument("--config-n", type=int, default=TablesConfig.config_n)
    args = parser.parse_args()
    cfg = TablesConfig(args.moduli_n, args.config_n)
    moduli(cfg)
    configuration(cfg)


if __name__ == "__main__":
    main()
