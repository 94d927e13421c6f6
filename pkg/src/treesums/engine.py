"""Sums over trees with flag markings, formal potentials and critical points.

A :class:`TensorData` instance holds an index set ``A``, a constant
symmetric propagator ``g^{ab}`` and symmetric vertex tensors
``C_{a_1..a_k}`` with values in Q[q].  The one-index tensors are deformed
by a single formal parameter ``t`` (``C_a -> t*C_a``), so the weight of a
tree is ``t**(number of ends)`` times a polynomial.

Two routes compute the same series:

* :func:`partition_function_direct` enumerates trees and contracts the
  tensors along each of them;
* :func:`critical_point_solve` finds the critical point of the potential
  order by order and :func:`evaluate_potential` gives the critical value.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations_with_replacement, product
from typing import Callable, Mapping, Sequence

from .algebra import QPoly, Series
from .report import VerificationReport, compare_series
from .trees import Tree, aut_order, trees_up_to

__all__ = [
    "TensorData",
    "PotentialRecord",
    "EnumerationBudgetError",
    "standard_weight",
    "tree_contraction",
    "partition_function_direct",
    "potential_build",
    "evaluate_potential",
    "potential_gradient",
    "critical_point_solve",
    "verify_critical_value",
    "verify_t_derivative",
    "verify_claim_061",
    "verify_claim_062",
    "verify_critical_residual",
    "quadratic_data",
]

ZERO = QPoly()


class EnumerationBudgetError(RuntimeError):
    """Raised when the tree enumeration would be incomplete or too large."""


def _invert(matrix: Sequence[Sequence[Fraction]]) -> tuple[tuple[Fraction, ...], ...]:
    n = len(matrix)
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(matrix)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise ValueError("propagator is not invertible")
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return tuple(tuple(row[n:]) for row in aug)


@dataclass(frozen=True)
class TensorData:
    """Weight data ``(A, g, C)`` for sums over trees.

    ``vertex_tensor`` receives the marks of a vertex's flags sorted by their
    position in ``index_set`` and returns ``C`` for that multiset (missing
    entries are zero).  ``bivalent_cap`` bounds the number of valency-2
    vertices in contributing trees; it is inferred as 0 when every rank-2
    tensor vanishes and is otherwise required.
    """

    name: str
    index_set: tuple[str, ...]
    propagator: tuple[tuple[Fraction, ...], ...]
    vertex_tensor: Callable[[tuple[str, ...]], QPoly]
    bivalent_cap: int | None = None
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        g = tuple(tuple(Fraction(x) for x in row) for row in self.propagator)
        object.__setattr__(self, "propagator", g)
        n = len(self.index_set)
        if len(g) != n or any(len(row) != n for row in g):
            raise ValueError("propagator must be |A| x |A|")
        if any(g[i][j] != g[j][i] for i in range(n) for j in range(n)):
            raise ValueError("propagator must be symmetric")
        object.__setattr__(self, "propagator_inverse", _invert(g))
        if self.bivalent_cap is None:
            if any(not self.C(m).is_zero() for m in combinations_with_replacement(self.index_set, 2)):
                raise ValueError("nonzero rank-2 tensors need an explicit bivalent_cap")
            object.__setattr__(self, "bivalent_cap", 0)
            object.__setattr__(self, "cap_is_exact", True)
        else:
            object.__setattr__(self, "cap_is_exact", False)

    def pos(self, a: str) -> int:
        return self.index_set.index(a)

    def C(self, marks: Sequence[str]) -> QPoly:
        key = tuple(sorted(marks, key=self.index_set.index))
        if key not in self._cache:
            val = ZERO if not key else QPoly.coerce(self.vertex_tensor(key))
            self._cache[key] = val
        return self._cache[key]

    def g(self, a: str, b: str) -> Fraction:
        return self.propagator[self.pos(a)][self.pos(b)]

    @classmethod
    def from_json(cls, data: Mapping | str) -> "TensorData":
        """Build from ``{"name", "index_set", "propagator", "vertex_tensors", "bivalent_cap"}``.

        ``propagator`` entries are rational strings; ``vertex_tensors`` is a
        list of ``{"marks": [...], "value": <polynomial json>}``.
        """
        if isinstance(data, str):
            data = json.loads(data)
        index_set = tuple(data["index_set"])
        table = {}
        for entry in data.get("vertex_tensors", []):
            key = tuple(sorted(entry["marks"], key=index_set.index))
            table[key] = QPoly.from_json(entry["value"])
        return cls(
            data.get("name", "custom"),
            index_set,
            tuple(tuple(Fraction(x) for x in row) for row in data["propagator"]),
            lambda key: table.get(key, ZERO),
            data.get("bivalent_cap"),
        )


def quadratic_data() -> TensorData:
    """One index, ``g = 1``, only ``C_* = 1``: only the two-vertex tree survives."""
    return TensorData("quadratic", ("*",), ((Fraction(1),),), lambda m: QPoly.const(1) if len(m) == 1 else ZERO)


# --------------------------------------------------------------------------
# weights of single trees


def standard_weight(
    tree: Tree,
    marking: Mapping[tuple[int, int], str],
    data: TensorData,
    order: int | None = None,
) -> Series:
    """Weight of one tree with one flag marking.

    ``marking`` maps each flag ``(vertex, edge index)`` to a mark.  The
    result includes ``1/|Aut tree|`` and one factor ``t`` per end vertex.
    """
    order = tree.vertex_count if order is None else order
    value = QPoly.const(Fraction(1, aut_order(tree)))
    for i, (u, v) in enumerate(tree.edges):
        value = value * data.g(marking[(u, i)], marking[(v, i)])
        if value.is_zero():
            return Series.zero(order, "poly")
    at_vertex: dict[int, list[str]] = {v: [] for v in range(tree.vertex_count)}
    for (v, i), mark in marking.items():
        at_vertex[v].append(mark)
    for v, marks in at_vertex.items():
        value = value * data.C(marks)
        if value.is_zero():
            return Series.zero(order, "poly")
    ends = sum(1 for k in tree.valencies if k == 1)
    return Series.constant(value, order, "poly").shift(ends) if ends <= order else Series.zero(order, "poly")


def tree_contraction(tree: Tree, data: TensorData) -> QPoly:
    """Sum over all flag markings of ``prod g * prod C`` (no ``1/|Aut|``, no ``t``)."""
    if tree.vertex_count == 1:
        return data.C(())
    adj = tree.adjacency
    A = data.index_set
    g = data.propagator

    def upward(v: int, parent: int) -> list[QPoly]:
        # h(b) for every mark b on v's flag toward the parent, already pushed
        # through the propagator to give a message indexed by the parent's mark
        kids = [c for c in adj[v] if c != parent]
        msgs = [upward(c, v) for c in kids]
        h = []
        for b in A:
            acc = ZERO
            for marks in product(range(len(A)), repeat=len(kids)):
                term = data.C((b,) + tuple(A[i] for i in marks))
                if term.is_zero():
                    continue
                for m, i in zip(msgs, marks):
                    term = term * m[i]
                    if term.is_zero():
                        break
                acc = acc + term
            h.append(acc)
        return [sum((h[j] * g[i][j] for j in range(len(A)) if g[i][j] != 0), ZERO) for i in range(len(A))]

    root = 0
    msgs = [upward(c, root) for c in adj[root]]
    total = ZERO
    for marks in product(range(len(A)), repeat=len(msgs)):
        term = data.C(tuple(A[i] for i in marks))
        for m, i in zip(msgs, marks):
            if term.is_zero():
                break
            term = term * m[i]
        total = total + term
    return total


def _contributing_trees(order: int, cap: int) -> list[Tree]:
    # L ends, b bivalent, others of valency >= 3  =>  V <= 2L + b - 2
    out = []
    for tree in trees_up_to(max(2 * order + cap - 2, 1)):
        vals = tree.valencies
        ends = sum(1 for k in vals if k == 1)
        bivalent = sum(1 for k in vals if k == 2)
        if 2 <= ends <= order and bivalent <= cap and tree.vertex_count <= 2 * ends + bivalent - 2:
            out.append(tree)
    return out


def partition_function_direct(data: TensorData, order: int, max_trees: int = 200_000) -> Series:
    """The tree sum ``Z`` up to ``t**order``, by explicit enumeration."""
    cap = data.bivalent_cap
    trees = _contributing_trees(order, cap)
    if len(trees) > max_trees:
        raise EnumerationBudgetError(f"{len(trees)} trees exceed the budget of {max_trees}")
    coeffs = [ZERO] * (order + 1)
    for tree in trees:
        val = tree_contraction(tree, data)
        if val.is_zero():
            continue
        ends = sum(1 for k in tree.valencies if k == 1)
        coeffs[ends] = coeffs[ends] + val / aut_order(tree)
    if not data.cap_is_exact:
        for tree in _contributing_trees(order, cap + 1):
            if sum(1 for k in tree.valencies if k == 2) == cap + 1 and not tree_contraction(tree, data).is_zero():
                raise EnumerationBudgetError(
                    f"trees with {cap + 1} bivalent vertices contribute; raise bivalent_cap"
                )
    return Series(coeffs, order, "poly")


# --------------------------------------------------------------------------
# potential and critical point


@dataclass(frozen=True)
class PotentialRecord:
    """Truncated potential ``-g_ab f_a f_b / 2 + t*sum C_a f_a + interactions``.

    ``interactions`` maps exponent vectors (one entry per index) of total
    degree 2..``max_degree`` to their coefficient.
    """

    index_set: tuple[str, ...]
    propagator: tuple[tuple[Fraction, ...], ...]
    propagator_inverse: tuple[tuple[Fraction, ...], ...]
    linear: tuple[QPoly, ...]
    interactions: dict[tuple[int, ...], QPoly]
    max_degree: int
    critical_point: tuple[Series, ...] | None = None
    critical_value: Series | None = None


def potential_build(data: TensorData, order: int) -> PotentialRecord:
    """Potential truncated at polynomial degree ``order + 1`` in the fields.

    Fields at the critical point are ``O(t)``, so monomials of higher degree
    cannot affect the critical point or value modulo ``t**(order+1)``.
    """
    A = data.index_set
    n = len(A)
    inter: dict[tuple[int, ...], QPoly] = {}
    for k in range(2, order + 2):
        for ms in combinations_with_replacement(range(n), k):
            c = data.C(tuple(A[i] for i in ms))
            if c.is_zero():
                continue
            exps = tuple(ms.count(i) for i in range(n))
            denom = 1
            for e in exps:
                for j in range(2, e + 1):
                    denom *= j
            inter[exps] = c / denom
    linear = tuple(data.C((a,)) for a in A)
    return PotentialRecord(A, data.propagator, data.propagator_inverse, linear, inter, order + 1)


def _monomial(phis: Sequence[Series], exps: Sequence[int], cache: dict) -> Series:
    out = None
    for i, e in enumerate(exps):
        if e == 0:
            continue
        key = (i, e)
        if key not in cache:
            cache[key] = phis[i] ** e
        out = cache[key] if out is None else out * cache[key]
    return out


def evaluate_potential(p: PotentialRecord, phis: Sequence[Series]) -> Series:
    order = min(f.order for f in phis)
    n = len(p.index_set)
    cache: dict = {}
    t = Series.t(order, "poly")
    total = Series.zero(order, "poly")
    for a in range(n):
        total = total + t * phis[a] * p.linear[a]
        for b in range(n):
            if p.propagator_inverse[a][b] != 0:
                total = total - phis[a] * phis[b] * (p.propagator_inverse[a][b] / 2)
    for exps, c in p.interactions.items():
        total = total + _monomial(phis, exps, cache) * c
    return total


def _interaction_gradient(p: PotentialRecord, phis: Sequence[Series]) -> list[Series]:
    order = min(f.order for f in phis)
    n = len(p.index_set)
    cache: dict = {}
    grads = [Series.zero(order, "poly") for _ in range(n)]
    for exps, c in p.interactions.items():
        for a in range(n):
            if exps[a] == 0:
                continue
            lowered = list(exps)
            lowered[a] -= 1
            mono = _monomial(phis, lowered, cache)
            term = Series.constant(c * exps[a], order, "poly") if mono is None else mono * (c * exps[a])
            grads[a] = grads[a] + term
    return grads


def potential_gradient(p: PotentialRecord, phis: Sequence[Series]) -> list[Series]:
    """``dS/d(field_a)`` for every index, as series in ``t``."""
    order = min(f.order for f in phis)
    n = len(p.index_set)
    t = Series.t(order, "poly")
    inter = _interaction_gradient(p, phis)
    out = []
    for a in range(n):
        g = inter[a] + t * p.linear[a]
        for b in range(n):
            if p.propagator_inverse[a][b] != 0:
                g = g - phis[b] * p.propagator_inverse[a][b]
        out.append(g)
    return out


def critical_point_solve(p: PotentialRecord, order: int) -> PotentialRecord:
    """Critical point with every field in ``t*Q[q][[t]]``, plus the critical value.

    Iterates ``f = g (t*C + dW(f))`` from ``f = 0``, where ``W`` is the
    interaction part; each pass fixes at least one more order unless the
    rank-2 tensors feed back linearly, so the loop stops on a fixed point.
    """
    if order + 1 > p.max_degree:
        raise ValueError("potential was truncated below the requested order")
    n = len(p.index_set)
    t = Series.t(order, "poly")
    phis = [Series.zero(order, "poly") for _ in range(n)]
    for _ in range((order + 2) * (n + 1)):
        inter = _interaction_gradient(p, phis)
        src = [inter[a] + t * p.linear[a] for a in range(n)]
        new = []
        for a in range(n):
            acc = Series.zero(order, "poly")
            for b in range(n):
                if p.propagator[a][b] != 0:
                    acc = acc + src[b] * p.propagator[a][b]
            new.append(acc)
        if new == phis:
            break
        phis = new
    else:
        raise ArithmeticError("no series critical point with zero constant term was found")
    return replace(p, critical_point=tuple(phis), critical_value=evaluate_potential(p, phis))


# --------------------------------------------------------------------------
# verification


def _solved(data: TensorData, order: int) -> PotentialRecord:
    return critical_point_solve(potential_build(data, order), order)


def verify_critical_value(data: TensorData, order: int, z: Series | None = None) -> VerificationReport:
    """Tree sum equals the critical value of the potential."""
    z = partition_function_direct(data, order) if z is None else z
    p = _solved(data, order)
    return compare_series(
        f"tree sum = critical value [{data.name}]",
        "Z = S(critical point)",
        z,
        p.critical_value,
    )


def verify_t_derivative(data: TensorData, order: int, z: Series | None = None) -> VerificationReport:
    """``dZ/dt`` equals ``sum_a C_a * (critical point)_a``."""
    z = partition_function_direct(data, order) if z is None else z
    p = _solved(data, order)
    rhs = Series.zero(order, "poly")
    for a, f in enumerate(p.critical_point):
        rhs = rhs + f * p.linear[a]
    return compare_series(
        f"t-derivative of tree sum [{data.name}]",
        "dZ/dt = sum_a C_a phi0_a",
        z.derivative(),
        rhs.truncate(order - 1),
    )


def verify_critical_residual(data: TensorData, order: int) -> VerificationReport:
    p = _solved(data, order)
    grads = potential_gradient(p, p.critical_point)
    bad = [g.first_nonzero() for g in grads if g.first_nonzero() is not None]
    return VerificationReport(
        f"critical point residual [{data.name}]",
        "dS/dphi_a = 0 at the critical point",
        not bad,
        order,
        min(bad) if bad else None,
    )


# names used by the public interface
verify_claim_061 = verify_critical_value
verify_claim_062 = verify_t_derivative
