"""Poincaré polynomials and Euler characteristics of genus-zero moduli spaces.

Indexing: ``P(n)`` is the polynomial of the compactified space of stable
curves with ``n`` marked points.  In the generating series
``phi(q, t) = t + sum_{n>=2} P(n+1) t**n / n!`` the coefficient of
``t**n / n!`` is ``P(n+1)``; in ``Phi = t**2/2 + sum_{n>=3} P(n) t**n / n!``
it is ``P(n)``.  Variables follow ``q`` (not ``q**2``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

from .algebra import Q, QPoly, Series, falling_factorial, series_inverse, series_log1p, series_pow, solve_ode_recursive
from .engine import TensorData
from .report import VerificationReport, compare_series, zero_residual
from .trees import MarkedStableTree, enumerate_marked_stable

__all__ = [
    "poincare_open",
    "stratum_poly",
    "poincare_compact_strata",
    "poincare_compact_recursive",
    "phi_series",
    "Phi_series",
    "chi_series",
    "chi_values",
    "ModuliRow",
    "ModuliTable",
    "moduli_table",
    "moduli_tensor_data",
    "potential_derivative",
    "potential_derivative_euler",
    "verify_phi_equations",
    "verify_chi_equations",
    "chi_asymptotic_report",
    "verify_ramification",
]

Q2 = Q * Q


def poincare_open(k: int) -> QPoly:
    """Open part (smooth curves) with ``k`` points: ``(q^2-2)(q^2-3)...(q^2-k+2)``."""
    if k < 3:
        raise ValueError("need k >= 3 marked points")
    return falling_factorial(Q2 - 2, k - 3)


def stratum_poly(t: MarkedStableTree) -> QPoly:
    vals = t.tree.valencies
    out = QPoly.const(1)
    for v in t.interior:
        out = out * poincare_open(vals[v])
    return out


def poincare_compact_strata(n: int) -> QPoly:
    """Sum of stratum polynomials over all marked stable trees with ``n`` ends."""
    total = QPoly()
    for t in enumerate_marked_stable(n):
        total = total + stratum_poly(t)
    return total


def _recursive_table(n_max: int) -> list[QPoly]:
    # P[2] := 1 stands for the bare t term of phi
    P = [QPoly(), QPoly(), QPoly.const(1), QPoly.const(1)]
    for m in range(2, n_max - 1):
        acc = P[m + 1]
        s = QPoly()
        for i in range(2, m + 1):
            j = m + 1 - i
            s = s + P[i + 1] * P[j + 1] * comb(m, i)
        P.append(acc + Q2 * s)
    return P


def poincare_compact_recursive(n: int) -> QPoly:
    if n < 3:
        raise ValueError("need n >= 3 marked points")
    return _recursive_table(n)[n]


def _phi_recursion(q2):
    def step(c: list, n: int):
        # (n+1) c_{n+1} = c_n + q^2 * sum_{i+j=n+1, i>=2} j c_i c_j
        s = sum((c[i] * c[n + 1 - i] * (n + 1 - i) for i in range(2, n + 1)), c[0] * 0)
        return (c[n] + q2 * s) / (n + 1)

    return step


def phi_series(order: int) -> Series:
    """``phi(q, t)`` in Q[q][[t]] by the coefficient recursion."""
    if order < 1:
        return Series.zero(order, "poly")
    return solve_ode_recursive(_phi_recursion(Q2), [QPoly(), QPoly.const(1)], order, "poly")


def Phi_series(order: int) -> Series:
    """Antiderivative of ``phi`` with zero constant term."""
    return phi_series(order - 1).integral()


def chi_series(order: int) -> Series:
    """Euler characteristic series (``q = -1``) over Q."""
    if order < 1:
        return Series.zero(order)
    return solve_ode_recursive(_phi_recursion(Fraction(1)), [0, 1], order)


def chi_values(n_max: int) -> dict[int, int]:
    """Euler characteristics of the compact spaces with ``3 <= n <= n_max`` points."""
    s = chi_series(n_max - 1)
    out = {}
    for n in range(3, n_max + 1):
        v = s[n - 1] * factorial(n - 1)
        assert v.denominator == 1
        out[n] = int(v)
    return out


@dataclass(frozen=True)
class ModuliRow:
    n: int
    poincare: QPoly
    euler: int
    p_scaled: QPoly  # P(n) / (n-1)!, the recursion variable p_{n-1}

    def to_json(self) -> dict:
        return {"n": self.n, "poincare": str(self.poincare), "euler": self.euler}


@dataclass(frozen=True)
class ModuliTable:
    rows: tuple[ModuliRow, ...]

    def __post_init__(self):
        for r in self.rows:
            if r.poincare(Fraction(-1)) != r.euler:
                raise ValueError(f"row {r.n}: Euler value differs from P(-1)")
            if any(r.poincare[k] != 0 for k in range(1, r.poincare.degree + 1, 2)):
                raise ValueError(f"row {r.n}: odd powers of q present")


def moduli_table(n_max: int, method: str = "recursion") -> ModuliTable:
    if method == "recursion":
        table = _recursive_table(n_max)
        polys = {n: table[n] for n in range(3, n_max + 1)}
    elif method == "strata":
        polys = {n: poincare_compact_strata(n) for n in range(3, n_max + 1)}
    elif method == "series":
        s = phi_series(n_max - 1)
        polys = {n: s[n - 1] * factorial(n - 1) for n in range(3, n_max + 1)}
    else:
        raise ValueError(f"unknown method {method!r}")
    rows = []
    for n, P in polys.items():
        e = P(Fraction(-1))
        rows.append(ModuliRow(n, P, int(e), P / factorial(n - 1)))
    return ModuliTable(tuple(rows))


# --------------------------------------------------------------------------
# tree-sum data and potential


def moduli_tensor_data() -> TensorData:
    """One index; ``g = 1``; ``C_1 = 1`` (deformed to ``t``), ``C_2 = 0``,
    ``C_k = (q^2-2)...(q^2-k+2)`` for ``k >= 3``."""

    def C(marks):
        k = len(marks)
        if k == 1:
            return QPoly.const(1)
        if k == 2:
            return QPoly()
        return falling_factorial(Q2 - 2, k - 3)

    return TensorData("moduli", ("*",), ((Fraction(1),),), C)


def potential_derivative(phi: Series) -> Series:
    """Closed-form ``dS/dphi`` for generic ``q``, evaluated at a series ``phi``.

    ``((1+phi)^{q^2} - 1 - q^4 phi) / (q^2 (q^2-1)) + t``; the division is
    exact coefficientwise.
    """
    num = series_pow(phi + 1, Q2) - 1 - phi * (Q2 * Q2)
    d = Q2 * (Q2 - 1)
    return num.map(lambda c: c.divexact(d), "poly") + Series.t(phi.order, "poly")


def potential_derivative_euler(chi: Series) -> Series:
    """``(1+chi) log(1+chi) - 2 chi + t`` (the ``q = -1`` case)."""
    return (chi + 1) * series_log1p(chi) - chi * 2 + Series.t(chi.order, chi.ring)


def verify_phi_equations(phi: Series, order: int | None = None) -> list[VerificationReport]:
    order = phi.order if order is None else order
    phi = phi.truncate(order)
    t = Series.t(order, "poly")
    functional = series_pow(phi + 1, Q2) - phi * (Q2 * Q2) + t * (Q2 * (Q2 - 1)) - 1
    ode = (t * Q2 - phi * Q2 + 1).truncate(order - 1) * phi.derivative() - (phi + 1).truncate(order - 1)
    return [
        zero_residual("phi functional equation", "(1+phi)^(q^2) = q^4 phi - q^2(q^2-1) t + 1", functional),
        zero_residual("phi differential equation", "(1 + q^2 t - q^2 phi) phi' = 1 + phi", ode),
    ]


def verify_chi_equations(chi: Series, order: int | None = None) -> list[VerificationReport]:
    order = chi.order if order is None else order
    chi = chi.truncate(order)
    t = Series.t(order, chi.ring)
    functional = (chi + 1) * series_log1p(chi) - chi * 2 + t
    ode = (t - chi + 1).truncate(order - 1) * chi.derivative() - (chi + 1).truncate(order - 1)
    return [
        zero_residual("chi functional equation", "(1+chi) log(1+chi) = 2 chi - t", functional),
        zero_residual("chi differential equation", "(1 + t - chi) chi' = 1 + chi", ode),
    ]


# --------------------------------------------------------------------------
# asymptotics


def _asymptotic_log(n: int) -> float:
    # log of n^{-1/2} (n / (e^2 - 2e))^{n - 1/2}
    return -0.5 * math.log(n) + (n - 0.5) * (math.log(n) - math.log(math.e ** 2 - 2 * math.e))


def chi_asymptotic_report(n_max: int) -> list[dict]:
    """Rows ``(n, chi of the space with n+1 points, log f(n), relative log error, ratio)``."""
    if n_max > 500:
        raise ValueError("asymptotics table is capped at n = 500")
    s = chi_series(n_max)
    rows = []
    for n in range(2, n_max + 1):
        chi = s[n] * factorial(n)
        log_chi = math.log(chi.numerator) - math.log(chi.denominator)
        log_f = _asymptotic_log(n)
        rel = abs(log_chi - log_f) / abs(log_f) if log_f else float("inf")
        rows.append(
            {
                "n": n,
                "chi": int(chi),
                "log_chi": log_chi,
                "log_f": log_f,
                "log_rel_error": rel,
                "ratio": math.exp(log_chi - log_f),
            }
        )
    return rows


# --------------------------------------------------------------------------
# ramification


def verify_ramification(q_squared, order: int = 12) -> list[VerificationReport]:
    """Check the implicit solution ``C x = (w-w1)^A1 (w-w2)^A2`` in log-derivative form.

    With ``y = 1 + q^2 t - q^2 phi``, ``x = q^2 t + q^2 + 1``, ``w = y/x``
    at a rational value of ``q^2``.
    """
    a = Fraction(q_squared)
    if a in (0, 1):
        raise ValueError("q^2 must avoid 0 and 1")
    phi = phi_series(order + 1).map(lambda c: even_at(c, a), "rational")
    t = Series.t(order + 1)
    y = t * a - phi * a + 1
    x = t * a + (a + 1)
    w = y * series_inverse(x)
    w1, w2 = Fraction(1), 1 / a
    A1, A2 = a / (1 - a), 1 / (a - 1)
    reports = [
        VerificationReport(
            "moduli ramification constants",
            "x = q^2+1, y = 1, w = 1/(q^2+1) at t = 0",
            (x[0], y[0], w[0]) == (a + 1, 1, 1 / (a + 1)),
            0,
            details={"x0": x[0], "y0": y[0], "w0": w[0]},
        )
    ]
    for name, c in (("w - w1", w - w1), ("w - w2", w - w2)):
        if c[0] == 0:
            reports.append(VerificationReport("moduli ramification", f"{name} invertible", False, order, 0))
            return reports
    dw = w.derivative()
    lhs = dw * series_inverse((w - w1).truncate(order)) * A1 + dw * series_inverse((w - w2).truncate(order)) * A2
    rhs = x.derivative() * series_inverse(x.truncate(order))
    reports.append(
        compare_series(
            f"moduli ramification at q^2={a}",
            "A1 w'/(w-w1) + A2 w'/(w-w2) = x'/x",
            lhs,
            rhs,
        )
    )
    # the underlying ODE y y_x = a x + b y with b = w1 + w2, a = -w1 w2
    ode = y.truncate(order) * y.derivative() / a - (x.truncate(order) * (-w1 * w2) + y.truncate(order) * (w1 + w2))
    reports.append(zero_residual(f"moduli ramification ODE at q^2={a}", "y y_x = -w1 w2 x + (w1+w2) y", ode))
    return reports


def even_at(c: QPoly, q2: Fraction) -> Fraction:
    """Evaluate an even polynomial in ``q`` at a value of ``q^2``."""
    if any(c[k] != 0 for k in range(1, c.degree + 1, 2)):
        raise ValueError("expected an even polynomial in q")
    return sum((c[k] * q2 ** (k // 2) for k in range(0, c.degree + 1, 2)), Fraction(0))
