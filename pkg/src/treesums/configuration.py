"""Virtual Poincaré polynomials of compactified configuration spaces ``X[n]``.

An instance is a dimension ``m`` together with the polynomial ``P = P_X(q)``
of a smooth compact ``X``.  Generating series:

* ``psi = 1 + sum_{n>=1} P_{X[n]} t**n / n!``  (equals ``(1+y0)**P``)
* ``Phi_X = sum_{n>=2} P_{X[n]} t**n / n!``   (the tree sum)
* ``phi_X = dPhi_X/dt = sum_{n>=1} P_{X[n+1]} t**n / n!``, so ``psi' = P + phi_X``
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .algebra import Q, QPoly, Series, falling_factorial, series_inverse, series_log1p, series_pow, solve_by_residual
from .engine import TensorData
from .report import VerificationReport, compare_series, zero_residual
from .trees import AdmissibleTree, enumerate_nests, nest_to_tree

__all__ = [
    "ConfigInstance",
    "ConfigRow",
    "ConfigTable",
    "stratum_weight",
    "poincare_confspace_strata",
    "y0_series",
    "psi_series",
    "phi_x_series",
    "x0_closed_form",
    "printed_brackets",
    "eta_series",
    "chi_conf_series",
    "configuration_tensor_data",
    "potential_x_derivative",
    "potential_x_derivative_euler",
    "verify_y0_equations",
    "verify_eta_equations",
    "verify_ramification_conf",
    "config_table",
    "SHIPPED_INSTANCES",
]


@dataclass(frozen=True)
class ConfigInstance:
    m: int
    P: QPoly
    kappa: QPoly = field(init=False)
    q2m: QPoly = field(init=False)

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("dimension m must be positive")
        object.__setattr__(self, "P", QPoly.coerce(self.P))
        q2 = Q * Q
        kappa = sum((q2 ** i for i in range(self.m)), QPoly())
        # kappa_m = (q^{2m} - 1) / (q^2 - 1) exactly
        if (q2 ** self.m - 1).divexact(q2 - 1) != kappa:
            raise ArithmeticError("kappa_m disagrees with the quotient formula")
        object.__setattr__(self, "kappa", kappa)
        object.__setattr__(self, "q2m", q2 ** self.m)

    @property
    def euler(self) -> Fraction:
        return self.P(Fraction(-1))

    def __str__(self) -> str:
        return f"m={self.m}, P_X={self.P}"


SHIPPED_INSTANCES = (
    ConfigInstance(1, QPoly.parse("q^2+1")),
    ConfigInstance(2, QPoly.parse("q^4+2*q^2+1")),
    ConfigInstance(2, QPoly.parse("q^4+q^2+1")),
)


def _source_broken(inst: ConfigInstance, k: int) -> QPoly:
    return falling_factorial(inst.P, k)


def _source_whole(inst: ConfigInstance, k: int) -> QPoly:
    return inst.P * inst.kappa * falling_factorial(inst.q2m - 2, k - 2)


def _interior(inst: ConfigInstance, valency: int) -> QPoly:
    return inst.kappa * falling_factorial(inst.q2m - 2, valency - 3)


def stratum_weight(tree: AdmissibleTree, inst: ConfigInstance, whole: bool) -> QPoly:
    """Polynomial of the stratum of a whole or broken nest with admissible tree ``tree``."""
    s = tree.source
    k = tree.out_degree(s)
    out = _source_whole(inst, k) if whole else _source_broken(inst, k)
    vals = tree.tree.valencies
    for v in tree.interior_non_source:
        out = out * _interior(inst, vals[v])
    return out


def poincare_confspace_strata(inst: ConfigInstance, n: int) -> QPoly:
    """Sum over all ``n``-nests of the stratum polynomials."""
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return inst.P
    total = QPoly()
    for nest in enumerate_nests(n):
        total = total + stratum_weight(nest_to_tree(nest), inst, nest.whole)
    return total


# --------------------------------------------------------------------------
# series route


def _y0_ode(inst: ConfigInstance):
    K = inst.q2m - 1 + inst.kappa

    def residual(y: Series) -> Series:
        n = y.order - 1
        t = Series.t(n, "poly")
        yn = y.truncate(n)
        return (t * inst.q2m + 1 - yn * K) * y.derivative() - yn - 1

    return residual


def y0_series(inst: ConfigInstance, order: int) -> Series:
    """The root ``y0`` in ``t + t^2 Q[q^2][[t]]``, solved from its ODE."""
    return solve_by_residual(_y0_ode(inst), [QPoly(), QPoly.const(1)], order, "poly")


def psi_series(inst: ConfigInstance, order: int) -> Series:
    return series_pow(y0_series(inst, order) + 1, inst.P)


def phi_x_series(inst: ConfigInstance, order: int) -> Series:
    """``phi_X`` as ``psi' - P``."""
    return psi_series(inst, order + 1).derivative() - inst.P


def x0_closed_form(inst: ConfigInstance, order: int) -> Series:
    """``phi_X`` from ``y0`` via the vanishing of the y-derivative of the potential."""
    y = y0_series(inst, order)
    t = Series.t(order, "poly")
    Qm, k, P = inst.q2m, inst.kappa, inst.P
    num = series_pow(y + 1, P) + y * (Qm + k - 1) - t * Qm - 1
    den = y * (1 - Qm - k) + t * Qm + 1
    return num * series_inverse(den) * P


def printed_brackets(inst: ConfigInstance) -> tuple[QPoly, QPoly, QPoly]:
    """Closed forms of ``P_{X[n+1]} / P`` for ``n = 1, 2, 3``."""
    P, k, Qm = inst.P, inst.kappa, inst.q2m
    b1 = k + P - 1
    b2 = (P - 1) * (P - 2) + k * (Qm - 2) + (P - 1) * k * 3 + k * k * 3
    b3 = (
        P ** 3 - P * P * 6 + P * 11 - 6
        + k * (P * P * 6 - P * 26 + 26 + P * Qm * 4 - Qm * 9 + Qm * Qm)
        + k * k * (P * 15 + Qm * 10 - 35)
        + k ** 3 * 15
    )
    return b1, b2, b3


def eta_series(m: int, order: int) -> Series:
    """Root ``eta`` in ``t + t^2 Q[[t]]`` of ``(t + 1 - m eta) eta' = 1 + eta``."""

    def residual(e: Series) -> Series:
        n = e.order - 1
        en = e.truncate(n)
        return (Series.t(n) + 1 - en * m) * e.derivative() - en - 1

    return solve_by_residual(residual, [0, 1], order)


def chi_conf_series(chi_x, m: int, order: int) -> Series:
    """``1 + sum chi(X[n]) t^n / n!`` as ``(1+eta)^chi(X)``."""
    return series_pow(eta_series(m, order) + 1, Fraction(chi_x))


def verify_y0_equations(inst: ConfigInstance, order: int) -> list[VerificationReport]:
    y = y0_series(inst, order)
    t = Series.t(order, "poly")
    Qm, k = inst.q2m, inst.kappa
    functional = series_pow(y + 1, Qm) * k - y * (Qm * (Qm + k - 1)) + t * (Qm * (Qm - 1)) - k
    ode = _y0_ode(inst)(y)
    return [
        zero_residual(f"y0 functional equation [{inst}]", "kappa (1+y)^(q^2m) = q^2m (q^2m+kappa-1) y - q^2m (q^2m-1) t + kappa", functional),
        zero_residual(f"y0 differential equation [{inst}]", "(q^2m t + 1 - (q^2m-1+kappa) y) y' = 1 + y", ode),
    ]


def verify_eta_equations(m: int, order: int) -> list[VerificationReport]:
    e = eta_series(m, order)
    t = Series.t(order)
    functional = (e + 1) * series_log1p(e) * m - e * (m + 1) + t
    ode = (t.truncate(order - 1) + 1 - e.truncate(order - 1) * m) * e.derivative() - e.truncate(order - 1) - 1
    return [
        zero_residual(f"eta functional equation [m={m}]", "m (1+eta) log(1+eta) = (m+1) eta - t", functional),
        zero_residual(f"eta differential equation [m={m}]", "(t + 1 - m eta) eta' = 1 + eta", ode),
    ]


# --------------------------------------------------------------------------
# tree-sum data and potential


def configuration_tensor_data(inst: ConfigInstance) -> TensorData:
    """Indices ``+`` (incoming flag) and ``-`` (outgoing flag); ``g^{+-} = 1``.

    ``C_+ = 1`` (deformed to ``t``), ``C_- = 0``, ``C_{+-} = 0``, zero when two
    or more ``+``; ``C_{-^k}`` is the source weight and ``C_{+-^k}`` the
    interior weight for ``k >= 2``.
    """

    def C(marks):
        plus = marks.count("+")
        minus = marks.count("-")
        if plus >= 2:
            return QPoly()
        if plus == 1:
            if minus == 0:
                return QPoly.const(1)
            if minus == 1:
                return QPoly()
            return _interior(inst, minus + 1)
        if minus < 2:
            return QPoly()
        return _source_broken(inst, minus) + _source_whole(inst, minus)

    one, zero = Fraction(1), Fraction(0)
    return TensorData(f"configuration {inst}", ("+", "-"), ((zero, one), (one, zero)), C, bivalent_cap=1)


def potential_x_derivative(inst: ConfigInstance, y: Series) -> Series:
    """Closed-form ``dS/dx`` for generic ``q`` at the series ``y``."""
    Qm, k = inst.q2m, inst.kappa
    num = series_pow(y + 1, Qm) - 1 - y * Qm
    d = Qm * (Qm - 1)
    return -y + Series.t(y.order, "poly") + num.map(lambda c: (c * k).divexact(d), "poly")


def potential_x_derivative_euler(m: int, y: Series) -> Series:
    return -y + Series.t(y.order, y.ring) + ((y + 1) * series_log1p(y) - y) * m


# --------------------------------------------------------------------------
# ramification


def verify_ramification_conf(q_squared, m: int, order: int = 12) -> list[VerificationReport]:
    """Log-derivative form of ``C x = (w-1)^A1 (w-q^2m)^A2`` at rational ``q^2``."""
    a = Fraction(q_squared)
    if a in (0, 1):
        raise ValueError("q^2 must avoid 0 and 1")
    from .moduli import even_at

    Qm = a ** m
    k = sum((a ** i for i in range(m)), Fraction(0))
    inst = ConfigInstance(m, QPoly.const(1))
    y0 = y0_series(inst, order + 1).map(lambda c: even_at(c, a), "rational")
    t = Series.t(order + 1)
    y = t * Qm + 1 - y0 * (Qm + k - 1)
    x = t + (Qm + k) / Qm
    w = y * series_inverse(x)
    w1, w2 = Fraction(1), Qm
    A1, A2 = 1 / (Qm - 1), Qm / (1 - Qm)
    reports = []
    for name, c in (("w - w1", w - w1), ("w - w2", w - w2)):
        if c[0] == 0:
            return [VerificationReport("configuration ramification", f"{name} invertible", False, order, 0)]
    dw = w.derivative()
    lhs = dw * series_inverse((w - w1).truncate(order)) * A1 + dw * series_inverse((w - w2).truncate(order)) * A2
    rhs = x.derivative() * series_inverse(x.truncate(order))
    reports.append(
        compare_series(
            f"configuration ramification at q^2={a}, m={m}",
            "A1 w'/(w-w1) + A2 w'/(w-w2) = x'/x",
            lhs,
            rhs,
        )
    )
    # x' = 1, so y_x = y'
    ode = y.truncate(order) * y.derivative() - (x.truncate(order) * (-Qm) + y.truncate(order) * (Qm + 1))
    reports.append(zero_residual(f"configuration ramification ODE at q^2={a}, m={m}", "y y_x = -q^2m x + (q^2m+1) y", ode))
    return reports


# --------------------------------------------------------------------------
# tables


@dataclass(frozen=True)
class ConfigRow:
    n: int
    poincare: QPoly
    euler: Fraction

    def to_json(self) -> dict:
        return {"n": self.n, "poincare": str(self.poincare), "euler": str(self.euler)}


@dataclass(frozen=True)
class ConfigTable:
    instance: ConfigInstance
    rows: tuple[ConfigRow, ...]

    def __post_init__(self):
        if self.rows and self.rows[0].n == 1 and self.rows[0].poincare != self.instance.P:
            raise ValueError("row 1 must equal P_X")
        for r in self.rows:
            if r.poincare(Fraction(-1)) != r.euler:
                raise ValueError(f"row {r.n}: Euler value differs from P(-1)")


def config_table(inst: ConfigInstance, n_max: int, method: str = "series") -> ConfigTable:
    if method == "series":
        psi = psi_series(inst, n_max)
        polys = {n: psi[n] * factorial(n) for n in range(1, n_max + 1)}
    elif method == "strata":
        polys = {n: poincare_confspace_strata(inst, n) for n in range(1, n_max + 1)}
    else:
        raise ValueError(f"unknown method {method!r}")
    rows = tuple(ConfigRow(n, P, P(Fraction(-1))) for n, P in polys.items())
    return ConfigTable(inst, rows)
