"""Command-line front end.

Exit codes: 0 success, 1 a verification failed, 2 usage error (bad flags,
malformed polynomial, budget exceeded).
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Sequence

from . import configuration as conf
from . import coverings as cov
from . import engine
from . import moduli
from .algebra import QPoly
from .report import VerificationReport, compare_series

BUDGETS = {"strata_n": 8, "recursion_n": 500, "coverings_d": 6, "stars_d": 200, "engine_order": 8}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    max_n: int = 8
    d: int = 1
    order: int = 10
    p_x: str = "q^2+1"
    m: int = 1
    lambdas: list[cov.LambdaPoint] = field(default_factory=list)
    method: str = "recursion"
    suite: str = "all"
    stars: bool = False
    asymptotics: bool = False
    format: str = "pretty"
    output: str | None = None


# --------------------------------------------------------------------------
# emitters


def _rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _emit_table(columns: list[str], rows: list[list], fmt: str, json_rows: list[dict], meta: dict) -> str:
    if fmt == "json":
        return json.dumps({**meta, "rows": json_rows}, indent=2) + "\n"
    if fmt == "csv":
        lines = [", ".join(columns)] + [", ".join(str(c) for c in r) for r in rows]
        return "\n".join(lines) + "\n"
    widths = [max(len(str(c)) for c in [h] + [r[i] for r in rows]) for i, h in enumerate(columns)]
    out = io.StringIO()
    out.write("  ".join(h.ljust(w) for h, w in zip(columns, widths)).rstrip() + "\n")
    for r in rows:
        out.write("  ".join(str(c).ljust(w) for c, w in zip(r, widths)).rstrip() + "\n")
    return out.getvalue()


def load_table_json(text: str) -> dict:
    """Parse a JSON table emitted by ``moduli``/``config`` back into exact values."""
    data = json.loads(text)
    rows = {}
    for r in data["rows"]:
        rows[int(r["n"])] = (QPoly.from_json(r["poincare"]), Fraction(r["euler"]))
    return {**{k: v for k, v in data.items() if k != "rows"}, "rows": rows}


# --------------------------------------------------------------------------
# commands


def _cmd_moduli(cfg: RunConfig) -> tuple[str, int]:
    limit = BUDGETS["strata_n"] if cfg.method == "strata" else BUDGETS["recursion_n"]
    if not 3 <= cfg.max_n <= limit:
        raise UsageError(f"--max-n must lie in 3..{limit} for method {cfg.method}")
    table = moduli.moduli_table(cfg.max_n, cfg.method)
    rows = [[r.n, str(r.poincare), r.euler] for r in table.rows]
    jrows = [{"n": r.n, "poincare": r.poincare.to_json(), "euler": str(r.euler)} for r in table.rows]
    return _emit_table(["n", "poincare", "euler"], rows, cfg.format, jrows, {"space": "M0n-bar", "method": cfg.method}), 0


def _cmd_euler(cfg: RunConfig) -> tuple[str, int]:
    if not 3 <= cfg.max_n <= BUDGETS["recursion_n"]:
        raise UsageError(f"--max-n must lie in 3..{BUDGETS['recursion_n']}")
    if cfg.asymptotics:
        rep = moduli.chi_asymptotic_report(cfg.max_n - 1)
        cols = ["n", "log_chi", "log_f", "log_rel_error", "ratio"]
        rows = [[r["n"], f"{r['log_chi']:.6f}", f"{r['log_f']:.6f}", f"{r['log_rel_error']:.6e}", f"{r['ratio']:.6f}"] for r in rep]
        jrows = [{k: (str(v) if k == "chi" else v) for k, v in r.items()} for r in rep]
        return _emit_table(cols, rows, cfg.format, jrows, {"space": "M0n-bar", "quantity": "euler asymptotics"}), 0
    vals = moduli.chi_values(cfg.max_n)
    rows = [[n, v] for n, v in vals.items()]
    jrows = [{"n": n, "euler": str(v)} for n, v in vals.items()]
    return _emit_table(["n", "euler"], rows, cfg.format, jrows, {"space": "M0n-bar", "quantity": "euler"}), 0


def _instance(cfg: RunConfig) -> conf.ConfigInstance:
    try:
        P = QPoly.parse(cfg.p_x)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if cfg.m < 1:
        raise UsageError("--m must be positive")
    return conf.ConfigInstance(cfg.m, P)


def _cmd_config(cfg: RunConfig) -> tuple[str, int]:
    inst = _instance(cfg)
    method = "series" if cfg.method == "recursion" else cfg.method
    limit = 5 if method == "strata" else BUDGETS["recursion_n"]
    if not 1 <= cfg.max_n <= limit:
        raise UsageError(f"--max-n must lie in 1..{limit} for method {method}")
    table = conf.config_table(inst, cfg.max_n, method)
    rows = [[r.n, str(r.poincare), _rational(r.euler)] for r in table.rows]
    jrows = [{"n": r.n, "poincare": r.poincare.to_json(), "euler": _rational(r.euler)} for r in table.rows]
    meta = {"space": "X[n]", "m": inst.m, "p_x": inst.P.to_json(), "method": method}
    return _emit_table(["n", "poincare", "euler"], rows, cfg.format, jrows, meta), 0


def _cmd_coverings(cfg: RunConfig) -> tuple[str, int]:
    if cfg.stars:
        if not 1 <= cfg.d <= BUDGETS["stars_d"]:
            raise UsageError(f"--d must lie in 1..{BUDGETS['stars_d']} with --stars")
        rows, jrows, ok = [], [], True
        for d in range(1, cfg.d + 1):
            s = cov.star_reduction_sum(d)
            good = s == cov.star_reduction_oracle(d)
            ok &= good
            rows.append([d, _rational(s), (-1) ** d, "ok" if good else "MISMATCH"])
            jrows.append({"d": d, "sum": _rational(s), "expected": (-1) ** d, "passed": good})
        return _emit_table(["d", "star_sum", "expected", "status"], rows, cfg.format, jrows, {"quantity": "star reduction"}), 0 if ok else 1
    if not 1 <= cfg.d <= BUDGETS["coverings_d"]:
        raise UsageError(f"--d must lie in 1..{BUDGETS['coverings_d']}")
    lams = cfg.lambdas or list(cov.SHIPPED_LAMBDAS)
    out, ok, jrows = [], True, []
    for lam in lams:
        try:
            val = cov.m_d_full(cfg.d, lam)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        good = val == Fraction(1, cfg.d ** 3)
        ok &= good
        out.append(f"m_{cfg.d} = {_rational(val)}  at lambda={lam}  (1/d^3 = {_rational(Fraction(1, cfg.d ** 3))}: {'match' if good else 'MISMATCH'})")
        jrows.append({"d": cfg.d, "lambda": [_rational(lam.l1), _rational(lam.l2)], "value": _rational(val), "passed": good})
    if cfg.format == "json":
        return json.dumps({"quantity": "m_d", "rows": jrows}, indent=2) + "\n", 0 if ok else 1
    if cfg.format == "csv":
        lines = ["d, lambda1, lambda2, value"] + [f"{r['d']}, {r['lambda'][0]}, {r['lambda'][1]}, {r['value']}" for r in jrows]
        return "\n".join(lines) + "\n", 0 if ok else 1
    return "\n".join(out) + "\n", 0 if ok else 1


# --------------------------------------------------------------------------
# verification suites


def suite_moduli(order: int) -> list[VerificationReport]:
    phi = moduli.phi_series(order)
    chi = moduli.chi_series(order)
    reports = moduli.verify_phi_equations(phi) + moduli.verify_chi_equations(chi)
    reports.append(compare_series("chi is phi at q=-1", "chi(t) = phi(-1, t)", chi, phi.at_q(-1)))
    n_top = min(order + 1, 7)
    strata = [moduli.poincare_compact_strata(n) for n in range(3, n_top + 1)]
    rec = [moduli.poincare_compact_recursive(n) for n in range(3, n_top + 1)]
    ser = [phi[n - 1] * factorial(n - 1) for n in range(3, n_top + 1)]
    reports.append(
        VerificationReport(
            "moduli strata = recursion = series",
            f"three routes agree for 3 <= n <= {n_top}",
            strata == rec == ser,
            order,
        )
    )
    for a in (2, 3, 4):
        reports += moduli.verify_ramification(a, order)
    return reports


def suite_config(order: int) -> list[VerificationReport]:
    reports = []
    for inst in conf.SHIPPED_INSTANCES:
        reports += conf.verify_y0_equations(inst, order)
        psi = conf.psi_series(inst, 5)
        agree = all(conf.poincare_confspace_strata(inst, n) == psi[n] * factorial(n) for n in range(1, 6))
        reports.append(VerificationReport(f"nest strata = psi series [{inst}]", "agree for n <= 5", agree, 5))
        reports.append(compare_series(f"x0 closed form [{inst}]", "phi_X = psi' - P", conf.x0_closed_form(inst, order), conf.phi_x_series(inst, order)))
        b = conf.printed_brackets(inst)
        x0 = conf.x0_closed_form(inst, 3)
        reports.append(
            VerificationReport(
                f"printed expansion of phi_X/P [{inst}]",
                "first three brackets",
                all(x0[n] * factorial(n) == inst.P * b[n - 1] for n in (1, 2, 3)),
                3,
            )
        )
        reports.append(
            compare_series(
                f"Euler specialisation [{inst}]",
                "psi(-1, t) = (1+eta)^chi(X)",
                conf.psi_series(inst, min(order, 8)).at_q(-1),
                conf.chi_conf_series(inst.euler, inst.m, min(order, 8)),
            )
        )
    for m in (1, 2):
        reports += conf.verify_eta_equations(m, order)
    for a, m in ((2, 1), (3, 2)):
        reports += conf.verify_ramification_conf(a, m, order)
    return reports


def suite_engine(order: int) -> list[VerificationReport]:
    order = min(order, 7)
    reports = []
    datasets = [engine.quadratic_data(), moduli.moduli_tensor_data()] + [
        conf.configuration_tensor_data(i) for i in conf.SHIPPED_INSTANCES
    ]
    for data in datasets:
        z = engine.partition_function_direct(data, order)
        reports.append(engine.verify_critical_value(data, order, z))
        reports.append(engine.verify_t_derivative(data, order, z))
        reports.append(engine.verify_critical_residual(data, order))
    return reports


def suite_coverings(d_max: int = 3) -> list[VerificationReport]:
    reports = []
    for d in range(1, d_max + 1):
        vals = {str(lam): cov.m_d_full(d, lam) for lam in cov.SHIPPED_LAMBDAS}
        reports.append(
            VerificationReport(
                f"multiple cover d={d}",
                "m_d = 1/d^3 at every shipped lambda",
                all(v == Fraction(1, d ** 3) for v in vals.values()),
                details=vals,
            )
        )
    stars = all(cov.star_reduction_sum(d) == cov.star_reduction_oracle(d) for d in range(1, 31))
    reports.append(VerificationReport("star reduction", "sum over partitions = (-1)^d for d <= 30", stars))
    splits = [cov.cancellation_report(d) for d in range(1, 16)]
    reports.append(
        VerificationReport(
            "star sum split",
            "one-part term + proper-partition remainder = (-1)^d for d <= 15",
            all(c.total == (-1) ** c.d for c in splits),
            details={"remark holds for d": [c.d for c in splits if c.remark_holds]},
        )
    )
    return reports


def suite_asymptotics() -> list[VerificationReport]:
    rep = {r["n"]: r for r in moduli.chi_asymptotic_report(200)}
    errs = [rep[n]["log_rel_error"] for n in range(50, 201)]
    return [
        VerificationReport("asymptotics at n=200", "log-relative error < 0.02", rep[200]["log_rel_error"] < 0.02, details={"error": rep[200]["log_rel_error"]}),
        VerificationReport("asymptotics monotone", "error decreasing on 50..200", all(a > b for a, b in zip(errs, errs[1:]))),
    ]


SUITES = {
    "moduli": lambda cfg: suite_moduli(cfg.order),
    "config": lambda cfg: suite_config(cfg.order),
    "engine": lambda cfg: suite_engine(cfg.order),
    "coverings": lambda cfg: suite_coverings(),
    "asymptotics": lambda cfg: suite_asymptotics(),
}


def _cmd_verify(cfg: RunConfig) -> tuple[str, int]:
    if cfg.order < 2 or cfg.order > 30:
        raise UsageError("--order must lie in 2..30")
    names = list(SUITES) if cfg.suite == "all" else [cfg.suite]
    reports: list[VerificationReport] = []
    for name in names:
        reports += SUITES[name](cfg)
    ok = all(r.passed for r in reports)
    if cfg.format == "json":
        text = json.dumps({"suite": cfg.suite, "passed": ok, "reports": [r.to_json() for r in reports]}, indent=2) + "\n"
    else:
        text = "\n".join(r.line() for r in reports) + f"\n{sum(r.passed for r in reports)}/{len(reports)} checks passed\n"
    return text, 0 if ok else 1


COMMANDS = {
    "moduli": _cmd_moduli,
    "euler": _cmd_euler,
    "config": _cmd_config,
    "coverings": _cmd_coverings,
    "verify": _cmd_verify,
}


def run(cfg: RunConfig) -> tuple[str, int]:
    if cfg.command not in COMMANDS:
        raise UsageError(f"unknown command {cfg.command!r}")
    return COMMANDS[cfg.command](cfg)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="treesums", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, max_n=None):
        p.add_argument("--format", choices=["json", "csv", "pretty"], default="pretty")
        p.add_argument("--output", "-o")
        if max_n is not None:
            p.add_argument("--max-n", type=int, default=max_n)

    p = sub.add_parser("moduli", help="Poincaré polynomials of M0n-bar")
    common(p, 8)
    p.add_argument("--method", choices=["recursion", "strata", "series"], default="recursion")

    p = sub.add_parser("euler", help="Euler characteristics of M0n-bar")
    common(p, 10)
    p.add_argument("--asymptotics", action="store_true")

    p = sub.add_parser("config", help="Poincaré polynomials of X[n]")
    common(p, 5)
    p.add_argument("--p-x", default="q^2+1")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--method", choices=["series", "strata"], default="series")

    p = sub.add_parser("coverings", help="multiple-cover contribution m_d")
    common(p)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--lambda", dest="lambdas", action="append", default=[], metavar="L1,L2")
    p.add_argument("--stars", action="store_true")

    p = sub.add_parser("verify", help="run verification suites")
    common(p)
    p.add_argument("--suite", choices=["all", *SUITES], default="all")
    p.add_argument("--order", type=int, default=10)
    return parser


def _config_from_args(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=ns.command, format=ns.format, output=ns.output)
    for name in ("max_n", "d", "order", "p_x", "m", "method", "suite", "stars", "asymptotics"):
        if hasattr(ns, name):
            setattr(cfg, name, getattr(ns, name))
    if getattr(ns, "lambdas", None):
        try:
            cfg.lambdas = [cov.LambdaPoint.parse(s) for s in ns.lambdas]
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"bad --lambda value: {exc}") from exc
    return cfg


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = _config_from_args(ns)
        text, code = run(cfg)
    except (UsageError, engine.EnumerationBudgetError) as exc:
        print(f"treesums: error: {exc}", file=sys.stderr)
        return 2
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
