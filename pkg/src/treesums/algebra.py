"""Exact rational, polynomial and truncated power series arithmetic.

Scalars are :class:`fractions.Fraction`.  Polynomials in ``q`` are dense
(:class:`QPoly`), series in ``t`` are truncated at a fixed order
(:class:`Series`) with coefficients either all rational or all polynomial.
Everything is immutable.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Callable, Iterable, Sequence, Union

__all__ = [
    "QPoly",
    "Series",
    "Q",
    "falling_factorial",
    "series_add",
    "series_mul",
    "series_derivative",
    "series_log1p",
    "series_exp",
    "series_pow",
    "series_inverse",
    "solve_ode_recursive",
    "solve_by_residual",
]

Scalar = Union[int, Fraction]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to an exact rational")


class QPoly:
    """Dense univariate polynomial in ``q`` with rational coefficients.

    ``coeffs[i]`` is the coefficient of ``q**i``; trailing zeros are stripped,
    so the zero polynomial has an empty coefficient tuple.
    """

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs: Iterable[Scalar] = ()):
        cs = [_frac(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)
        self._hash = None

    @classmethod
    def const(cls, c: Scalar) -> "QPoly":
        return cls((c,))

    @classmethod
    def monomial(cls, k: int, c: Scalar = 1) -> "QPoly":
        return cls([0] * k + [c])

    @staticmethod
    def coerce(x) -> "QPoly":
        if isinstance(x, QPoly):
            return x
        return QPoly((_frac(x),))

    @property
    def degree(self) -> int:
        """Degree; ``-1`` for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def constant_term(self) -> Fraction:
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        try:
            o = QPoly.coerce(other)
        except TypeError:
            return NotImplemented
        a, b = self.coeffs, o.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return QPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "QPoly":
        return QPoly(-c for c in self.coeffs)

    def __sub__(self, other):
        try:
            o = QPoly.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return QPoly.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return QPoly()
            return QPoly(c * other for c in self.coeffs)
        if not isinstance(other, QPoly):
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return QPoly()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                out[i + j] += x * y
        return QPoly(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("polynomial division by zero")
            return QPoly(c / other for c in self.coeffs)
        if isinstance(other, QPoly):
            return self.divexact(other)
        return NotImplemented

    def __pow__(self, k: int) -> "QPoly":
        if not isinstance(k, int) or k < 0:
            raise ValueError("polynomial powers must be non-negative integers")
        result, base = QPoly.const(1), self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def divmod(self, other: "QPoly") -> tuple["QPoly", "QPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        lead = other.coeffs[-1]
        quot = [Fraction(0)] * max(len(rem) - dq, 0)
        for k in range(len(rem) - 1 - dq, -1, -1):
            c = rem[k + dq] / lead
            quot[k] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    rem[k + j] -= c * b
        return QPoly(quot), QPoly(rem)

    def divexact(self, other: "QPoly") -> "QPoly":
        quot, rem = self.divmod(other)
        if not rem.is_zero():
            raise ArithmeticError(f"{other} does not divide {self}")
        return quot

    # comparison / evaluation ---------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, QPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == QPoly.const(other).coeffs
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(("QPoly", self.coeffs))
        return self._hash

    def __call__(self, x):
        acc = Fraction(0) if not isinstance(x, QPoly) else QPoly()
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def compose(self, other: "QPoly") -> "QPoly":
        acc = QPoly()
        for c in reversed(self.coeffs):
            acc = acc * other + c
        return acc

    def is_palindromic(self) -> bool:
        return self.coeffs == self.coeffs[::-1]

    # text / json ------------------------------------------------------------
    def __repr__(self) -> str:
        return f"QPoly({self})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if k == 0:
                body = _fmt_rational(a)
            else:
                mono = "q" if k == 1 else f"q^{k}"
                body = mono if a == 1 else f"{_fmt_rational(a)}*{mono}"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += sign + body
        return out

    _TERM = re.compile(
        r"\s*([+-])?\s*(?:(\d+(?:/\d+)?)\s*\*?\s*)?(q(?:\s*\^\s*(\d+))?)?\s*"
    )

    @classmethod
    def parse(cls, text: str) -> "QPoly":
        """Parse strings such as ``"q^8+42*q^6-1/2*q+3"``."""
        s = text.strip()
        if not s:
            raise ValueError("empty polynomial string")
        pos, out = 0, {}
        while pos < len(s):
            m = cls._TERM.match(s, pos)
            if m is None or m.end() == pos or (m.group(2) is None and m.group(3) is None):
                raise ValueError(f"malformed polynomial string: {text!r}")
            if pos > 0 and m.group(1) is None:
                raise ValueError(f"malformed polynomial string: {text!r}")
            sign = -1 if m.group(1) == "-" else 1
            coef = Fraction(m.group(2)) if m.group(2) else Fraction(1)
            if m.group(3):
                power = int(m.group(4)) if m.group(4) else 1
            else:
                power = 0
            out[power] = out.get(power, Fraction(0)) + sign * coef
            pos = m.end()
        top = max(out)
        return cls(out.get(k, 0) for k in range(top + 1))

    def to_json(self) -> list[list]:
        return [
            [k, str(c.numerator), str(c.denominator)]
            for k, c in enumerate(self.coeffs)
            if c != 0
        ]

    @classmethod
    def from_json(cls, data: Sequence[Sequence]) -> "QPoly":
        out: dict[int, Fraction] = {}
        for power, num, den in data:
            out[int(power)] = Fraction(int(num), int(den))
        if not out:
            return cls()
        return cls(out.get(k, 0) for k in range(max(out) + 1))


def _fmt_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


Q = QPoly.monomial(1)


def falling_factorial(base, k: int):
    """``base*(base-1)*...*(base-k+1)``, i.e. ``binomial(base, k) * k!``.

    Works for rationals and for :class:`QPoly` bases; ``k == 0`` gives 1.
    """
    if k < 0:
        raise ValueError("falling factorial needs k >= 0")
    out = QPoly.const(1) if isinstance(base, QPoly) else Fraction(1)
    for i in range(k):
        out = out * (base - i)
    return out


# --------------------------------------------------------------------------
# truncated series


def _ring_of(c) -> str:
    if isinstance(c, QPoly):
        return "poly"
    if isinstance(c, (int, Fraction)):
        return "rational"
    raise TypeError(f"unsupported coefficient type {type(c).__name__}")


def _zero(ring: str):
    return QPoly() if ring == "poly" else Fraction(0)


def _one(ring: str):
    return QPoly.const(1) if ring == "poly" else Fraction(1)


def _coerce(c, ring: str):
    if ring == "poly":
        return QPoly.coerce(c)
    if isinstance(c, QPoly):
        if not c.is_constant():
            raise TypeError("ring mismatch: polynomial coefficient in a rational series")
        return c.constant_term()
    return _frac(c)


class Series:
    """Power series in ``t`` modulo ``t**(order+1)``.

    ``ring`` is ``"rational"`` or ``"poly"`` (coefficients in Q[q]).
    Binary operations require equal rings and return the smaller order.
    """

    __slots__ = ("order", "coeffs", "ring")

    def __init__(self, coeffs: Iterable, order: int | None = None, ring: str | None = None):
        cs = list(coeffs)
        if ring is None:
            ring = "poly" if any(isinstance(c, QPoly) for c in cs) else "rational"
        if ring not in ("poly", "rational"):
            raise ValueError(f"unknown coefficient ring {ring!r}")
        if order is None:
            order = max(len(cs) - 1, 0)
        if order < 0:
            raise ValueError("series order must be non-negative")
        cs = [_coerce(c, ring) for c in cs[: order + 1]]
        cs += [_zero(ring)] * (order + 1 - len(cs))
        self.order = order
        self.coeffs = tuple(cs)
        self.ring = ring

    @classmethod
    def zero(cls, order: int, ring: str = "rational") -> "Series":
        return cls((), order, ring)

    @classmethod
    def one(cls, order: int, ring: str = "rational") -> "Series":
        return cls((_one(ring),), order, ring)

    @classmethod
    def t(cls, order: int, ring: str = "rational") -> "Series":
        return cls((_zero(ring), _one(ring)), order, ring)

    @classmethod
    def constant(cls, c, order: int, ring: str | None = None) -> "Series":
        ring = ring or _ring_of(c)
        return cls((c,), order, ring)

    def __getitem__(self, n: int):
        return self.coeffs[n] if 0 <= n <= self.order else _zero(self.ring)

    def __len__(self) -> int:
        return self.order + 1

    def __iter__(self):
        return iter(self.coeffs)

    def _check(self, other: "Series") -> None:
        if self.ring != other.ring:
            raise TypeError(f"ring mismatch: {self.ring} vs {other.ring}")

    def _lift(self, other) -> "Series":
        if isinstance(other, Series):
            self._check(other)
            return other
        return Series.constant(_coerce(other, self.ring), self.order, self.ring)

    def __add__(self, other):
        try:
            o = self._lift(other)
        except TypeError:
            if isinstance(other, Series):
                raise
            return NotImplemented
        n = min(self.order, o.order)
        return Series((self.coeffs[i] + o.coeffs[i] for i in range(n + 1)), n, self.ring)

    __radd__ = __add__

    def __neg__(self) -> "Series":
        return Series((-c for c in self.coeffs), self.order, self.ring)

    def __sub__(self, other):
        try:
            o = self._lift(other)
        except TypeError:
            if isinstance(other, Series):
                raise
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Series):
            try:
                c = _coerce(other, self.ring)
            except TypeError:
                return NotImplemented
            return Series((x * c for x in self.coeffs), self.order, self.ring)
        self._check(other)
        n = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        out = [_zero(self.ring) for _ in range(n + 1)]
        for i in range(n + 1):
            x = a[i]
            if x == 0:
                continue
            for j in range(n + 1 - i):
                y = b[j]
                if y != 0:
                    out[i + j] = out[i + j] + x * y
        return Series(out, n, self.ring)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Series):
            return self * series_inverse(other)
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("series division by zero")
            return Series((x / other for x in self.coeffs), self.order, self.ring)
        return NotImplemented

    def __pow__(self, k: int) -> "Series":
        if not isinstance(k, int) or k < 0:
            raise ValueError("use series_pow for non-integer exponents")
        result, base = Series.one(self.order, self.ring), self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, Series):
            return NotImplemented
        return (self.ring, self.order, self.coeffs) == (other.ring, other.order, other.coeffs)

    def __hash__(self) -> int:
        return hash((self.ring, self.order, self.coeffs))

    def __repr__(self) -> str:
        terms = [f"({c})*t^{n}" for n, c in enumerate(self.coeffs) if c != 0]
        return f"Series[{self.ring}, O(t^{self.order + 1})]({' + '.join(terms) or '0'})"

    def truncate(self, order: int) -> "Series":
        if order > self.order:
            raise ValueError("cannot raise the truncation order")
        return Series(self.coeffs[: order + 1], order, self.ring)

    def derivative(self) -> "Series":
        if self.order == 0:
            raise ValueError("derivative of an order-0 series is undefined")
        return Series(
            (self.coeffs[n] * n for n in range(1, self.order + 1)), self.order - 1, self.ring
        )

    def integral(self) -> "Series":
        """Antiderivative with zero constant term; order grows by one."""
        return Series(
            [_zero(self.ring)] + [self.coeffs[n] / (n + 1) for n in range(self.order + 1)],
            self.order + 1,
            self.ring,
        )

    def shift(self, k: int) -> "Series":
        """Multiply by ``t**k`` keeping the order."""
        return Series([_zero(self.ring)] * k + list(self.coeffs), self.order, self.ring)

    def map(self, fn: Callable, ring: str | None = None) -> "Series":
        """Apply ``fn`` to every coefficient (e.g. specialise ``q``)."""
        vals = [fn(c) for c in self.coeffs]
        return Series(vals, self.order, ring or (_ring_of(vals[0]) if vals else self.ring))

    def at_q(self, value: Scalar) -> "Series":
        """Specialise a polynomial series at ``q = value``."""
        if self.ring != "poly":
            raise TypeError("at_q needs a polynomial series")
        v = _frac(value)
        return Series((c(v) for c in self.coeffs), self.order, "rational")

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def first_nonzero(self) -> int | None:
        for n, c in enumerate(self.coeffs):
            if c != 0:
                return n
        return None

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "coeffs": [QPoly.coerce(c).to_json() for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, data: dict, ring: str = "poly") -> "Series":
        return cls((QPoly.from_json(c) for c in data["coeffs"]), int(data["order"]), ring)


def series_add(a: Series, b: Series) -> Series:
    return a + b


def series_mul(a: Series, b: Series) -> Series:
    return a * b


def series_derivative(a: Series) -> Series:
    return a.derivative()


def series_inverse(s: Series) -> Series:
    """``1/s``; the constant term must be an invertible rational."""
    c0 = s.coeffs[0]
    c0 = c0.constant_term() if isinstance(c0, QPoly) and c0.is_constant() else c0
    if isinstance(c0, QPoly) or c0 == 0:
        raise ZeroDivisionError("series inverse needs a nonzero rational constant term")
    inv0 = 1 / c0
    out = [_coerce(inv0, s.ring)]
    for n in range(1, s.order + 1):
        acc = _zero(s.ring)
        for k in range(1, n + 1):
            if s.coeffs[k] != 0:
                acc = acc + s.coeffs[k] * out[n - k]
        out.append(-acc * inv0)
    return Series(out, s.order, s.ring)


def series_log1p(s: Series) -> Series:
    """``log(1+s)`` for ``s`` with zero constant term."""
    if s.coeffs[0] != 0:
        raise ValueError("series_log1p needs a zero constant term")
    if s.order == 0:
        return Series.zero(0, s.ring)
    # (log(1+s))' = s' / (1+s)
    return (s.derivative() * series_inverse((s + 1).truncate(s.order - 1))).integral()


def series_exp(s: Series) -> Series:
    """``exp(s)`` for ``s`` with zero constant term (only integer divisions)."""
    if s.coeffs[0] != 0:
        raise ValueError("series_exp needs a zero constant term")
    a = s.coeffs
    out = [_one(s.ring)]
    for n in range(1, s.order + 1):
        acc = _zero(s.ring)
        for k in range(1, n + 1):
            if a[k] != 0:
                acc = acc + a[k] * out[n - k] * k
        out.append(acc / n)
    return Series(out, s.order, s.ring)


def series_pow(one_plus_s: Series, exponent) -> Series:
    """``(1+s)**exponent`` as ``exp(exponent * log(1+s))``.

    ``exponent`` may be an integer, a Fraction or a :class:`QPoly`
    (the latter only for polynomial series).
    """
    if one_plus_s.coeffs[0] != 1:
        raise ValueError("series_pow needs constant term exactly 1")
    s = one_plus_s - 1
    return series_exp(series_log1p(s) * _coerce(exponent, one_plus_s.ring))


# --------------------------------------------------------------------------
# order-by-order solvers


def solve_ode_recursive(
    recursion: Callable[[list, int], object],
    seeds: Sequence,
    order: int,
    ring: str = "rational",
) -> Series:
    """Build a series from a coefficient recursion.

    ``recursion(c, n)`` returns ``c[n+1]`` given the list ``c[0..n]``.
    ``seeds`` fixes ``c[0], c[1], ...``; at least ``c[0]`` and ``c[1]``.
    """
    if len(seeds) < 2:
        raise ValueError("need seeds for c_0 and c_1")
    c = [_coerce(x, ring) for x in seeds[: order + 1]]
    while len(c) <= order:
        c.append(_coerce(recursion(c, len(c) - 1), ring))
    # seeds beyond c_1 must agree with the recursion
    for n in range(1, min(len(seeds), order + 1) - 1):
        if _coerce(recursion(c[: n + 1], n), ring) != c[n + 1]:
            raise ValueError(f"seed c_{n + 1} is inconsistent with the recursion")
    return Series(c, order, ring)


def solve_by_residual(
    residual: Callable[[Series], Series],
    seeds: Sequence,
    order: int,
    ring: str = "rational",
) -> Series:
    """Solve ``residual(y) = 0`` by undetermined coefficients.

    The coefficient of ``t**n`` in ``residual(y)`` must be affine in ``c[n+1]``
    with a nonzero rational slope, which is the case for first-order ODEs
    ``A(t, y) y' = B(t, y)`` with ``A(0, 0) != 0``.  The residual is called on
    series of order ``n+1`` and must return one of order at least ``n``.
    """
    c = [_coerce(x, ring) for x in seeds]
    zero = _zero(ring)
    while len(c) <= order:
        n = len(c) - 1
        base = residual(Series(c + [zero], n + 1, ring))[n]
        bumped = residual(Series(c + [_one(ring)], n + 1, ring))[n]
        slope = bumped - base
        if isinstance(slope, QPoly):
            if not slope.is_constant() or slope.is_zero():
                raise ArithmeticError(f"degenerate slope {slope} at order {n}")
            slope = slope.constant_term()
        if slope == 0:
            raise ArithmeticError(f"degenerate slope at order {n}")
        c.append(-base / slope)
    return Series(c[: order + 1], order, ring)
