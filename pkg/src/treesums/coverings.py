"""Degree-d multiple-cover contribution as an exact sum over bicoloured trees.

For a point ``(l1, l2)`` with ``l1 != l2``::

    m_d = (l1 - l2)^(2-2d) * sum_tree (-1)^(d+e) l1^(2 w1) l2^(2 w2) V E / |Aut|

with ``V = prod_v sigma_v^(|v|-3)`` and
``E = prod_edges d^3/(d!)^2 prod_{a+b=d, a,b>=1} (a l1 + b l2)^2``.
The expected value is ``1/d^3`` at every point.

The sign exponent ``e`` is the number of edges.  Taking ``e = F`` (the number
of vertices coloured 2) agrees with it on the stars that survive at
``l2 = 0`` but is not symmetric under swapping the colours, and the sum then
depends on the point; it is kept as ``sign="F"`` for comparison.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial, prod
from typing import Iterator

from .algebra import Series, series_exp
from .trees import CoveringTree, enumerate_covering_trees

__all__ = [
    "LambdaPoint",
    "PartitionMultiplicities",
    "SHIPPED_LAMBDAS",
    "vertex_factor",
    "edge_factor",
    "tree_term",
    "m_d_full",
    "partitions",
    "star_reduction_sum",
    "star_reduction_oracle",
    "cancellation_report",
    "CancellationReport",
]


@dataclass(frozen=True)
class LambdaPoint:
    l1: Fraction
    l2: Fraction

    def __post_init__(self):
        object.__setattr__(self, "l1", Fraction(self.l1))
        object.__setattr__(self, "l2", Fraction(self.l2))

    @classmethod
    def parse(cls, text: str) -> "LambdaPoint":
        a, b = text.split(",")
        return cls(Fraction(a.strip()), Fraction(b.strip()))

    def __str__(self) -> str:
        return f"({self.l1},{self.l2})"


SHIPPED_LAMBDAS = (LambdaPoint(1, 0), LambdaPoint(2, 3), LambdaPoint(2, -1), LambdaPoint(5, 1))


def vertex_factor(t: CoveringTree) -> Fraction:
    vals = t.tree.valencies
    return prod((Fraction(t.sigma(v)) ** (vals[v] - 3) for v in range(t.tree.vertex_count)), start=Fraction(1))


def edge_factor(t: CoveringTree, lam: LambdaPoint) -> Fraction:
    out = Fraction(1)
    for d in t.degrees:
        out *= Fraction(d ** 3, factorial(d) ** 2)
        for a in range(1, d):
            out *= (a * lam.l1 + (d - a) * lam.l2) ** 2
    return out


def tree_term(t: CoveringTree, lam: LambdaPoint, sign: str = "edges") -> Fraction:
    """One summand (without the ``(l1-l2)`` prefactor)."""
    if sign == "edges":
        e = len(t.tree.edges)
    elif sign == "F":
        e = t.F
    else:
        raise ValueError(f"unknown sign convention {sign!r}")
    sign = -1 if (t.total_degree + e) % 2 else 1
    return (
        sign
        * lam.l1 ** (2 * t.w(1))
        * lam.l2 ** (2 * t.w(2))
        * vertex_factor(t)
        * edge_factor(t, lam)
        / t.aut_order()
    )


def m_d_full(d: int, lam: LambdaPoint, sign: str = "edges") -> Fraction:
    if d < 1:
        raise ValueError("d must be >= 1")
    if d >= 2 and lam.l1 == lam.l2:
        raise ValueError("l1 == l2 makes the prefactor singular")
    total = sum((tree_term(t, lam, sign) for t in enumerate_covering_trees(d)), Fraction(0))
    return total / (lam.l1 - lam.l2) ** (2 * d - 2)


# --------------------------------------------------------------------------
# the star reduction


@dataclass(frozen=True)
class PartitionMultiplicities:
    """Partition of ``d`` as ``{part: multiplicity}``."""

    r: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if any(i < 1 or k < 1 for i, k in self.r):
            raise ValueError("parts and multiplicities must be positive")
        object.__setattr__(self, "r", tuple(sorted(self.r)))

    @property
    def d(self) -> int:
        return sum(i * k for i, k in self.r)

    @property
    def length(self) -> int:
        return sum(k for _, k in self.r)

    def term(self, d: int | None = None) -> Fraction:
        d = self.d if d is None else d
        out = Fraction(1)
        for i, k in self.r:
            out *= Fraction(-d, i) ** k / factorial(k)
        return out


def partitions(d: int, largest: int | None = None) -> Iterator[PartitionMultiplicities]:
    """Partitions of ``d`` in reverse lexicographic order."""

    def rec(n: int, cap: int) -> Iterator[list[int]]:
        if n == 0:
            yield []
            return
        for part in range(min(n, cap), 0, -1):
            for rest in rec(n - part, part):
                yield [part] + rest

    for parts in rec(d, d if largest is None else largest):
        counts: dict[int, int] = {}
        for p in parts:
            counts[p] = counts.get(p, 0) + 1
        yield PartitionMultiplicities(tuple(counts.items()))


def star_reduction_sum(d: int) -> Fraction:
    """``sum_R prod_i (-d/i)^{r_i} / r_i!`` over partitions of ``d``."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return sum((p.term(d) for p in partitions(d)), Fraction(0))


def star_reduction_oracle(d: int) -> Fraction:
    """Coefficient of ``t^d`` in ``exp(-d sum_i t^i / i)``, by series exponentiation."""
    log_series = Series([Fraction(0)] + [Fraction(-d, i) for i in range(1, d + 1)], d)
    return series_exp(log_series)[d]


@dataclass(frozen=True)
class CancellationReport:
    d: int
    trivial_term: Fraction
    remainder: Fraction
    odd_length_sum: Fraction  # absolute values, proper partitions with an odd number of parts
    even_length_sum: Fraction
    total: Fraction

    @property
    def trivial_matches_total(self) -> bool:
        return self.trivial_term == (-1) ** self.d

    @property
    def remainder_cancels(self) -> bool:
        return self.remainder == 0

    @property
    def odd_equals_even(self) -> bool:
        return self.odd_length_sum == self.even_length_sum

    @property
    def remark_holds(self) -> bool:
        return self.trivial_matches_total and self.remainder_cancels and self.odd_equals_even


def cancellation_report(d: int) -> CancellationReport:
    """Split the star sum into the one-part partition and the proper partitions."""
    trivial = Fraction(0)
    odd = even = Fraction(0)
    for p in partitions(d):
        term = p.term(d)
        if p.length == 1:
            trivial += term
        elif p.length % 2:
            odd += abs(term)
        else:
            even += abs(term)
    # sign of a term is (-1)^length
    remainder = even - odd
    return CancellationReport(d, trivial, remainder, odd, even, trivial + remainder)
