"""Truncated formal series in a fractional power of q with exact rational coefficients.

A :class:`FracSeries` stores the terms ``c_e * q^(e/M)`` sparsely, keyed by the
integer grid index ``e``, together with a truncation index ``T``: every term
with ``e >= T`` is unknown (the ``O(q^(T/M))`` tail).  ``T`` may be ``None``
for an exact object such as a monomial or a polynomial.

Arithmetic never invents terms at or beyond the truncation bound, and no
coefficient ever passes through floating point.
"""

from __future__ import annotations

import json
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Iterator, Mapping

Rational = int | Fraction


class SeriesError(ValueError):
    pass


class ZeroSeries(SeriesError):
    """Raised when an operation needs a leading term and there is none."""


class NotAnNthPower(SeriesError):
    pass


class BeyondTruncation(SeriesError):
    pass


def _min_trunc(a: int | None, b: int | None) -> int | None:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _as_fraction(x: Rational) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def rational_root(c: Fraction, n: int) -> Fraction:
    """Exact rational n-th root of ``c`` or raise :class:`NotAnNthPower`."""
    c = _as_fraction(c)
    if c == 0:
        raise NotAnNthPower("zero has no unit n-th root")
    sign = 1
    if c < 0:
        if n % 2 == 0:
            raise NotAnNthPower(f"{c} has no real {n}-th root")
        sign = -1
    num = _int_root(abs(c.numerator), n)
    den = _int_root(c.denominator, n)
    if num is None or den is None:
        raise NotAnNthPower(f"{c} is not an exact {n}-th power")
    return Fraction(sign * num, den)


def _int_root(x: int, n: int) -> int | None:
    if x in (0, 1):
        return x
    lo, hi = 1, 1 << (x.bit_length() // n + 1)
    while lo <= hi:
        mid = (lo + hi) // 2
        v = mid**n
        if v == x:
            return mid
        if v < x:
            lo = mid + 1
        else:
            hi = mid - 1
    return None


def _common_denominator(values: Iterable[Fraction]) -> int:
    d = 1
    for v in values:
        d = lcm(d, v.denominator)
    return d


class FracSeries:
    """Immutable truncated series ``sum c_e q^(e/M) + O(q^(T/M))``."""

    __slots__ = ("_M", "_coeffs", "_trunc", "_keys")

    def __init__(
        self,
        ramification: int,
        coeffs: Mapping[int, Rational] | Iterable[tuple[int, Rational]],
        trunc: int | None,
    ):
        if ramification < 1:
            raise SeriesError("ramification must be a positive integer")
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        clean: dict[int, Fraction] = {}
        for e, c in items:
            e = int(e)
            if trunc is not None and e >= trunc:
                continue
            c = _as_fraction(c)
            if c:
                clean[e] = clean.get(e, Fraction(0)) + c
                if not clean[e]:
                    del clean[e]
        self._M = int(ramification)
        self._coeffs = clean
        self._trunc = trunc if trunc is None else int(trunc)
        self._keys = None

    # -- construction helpers -------------------------------------------------

    @classmethod
    def monomial(cls, c: Rational, exponent: Rational | Fraction = 0, trunc=None) -> "FracSeries":
        """``c * q^exponent``; ``trunc`` is an exponent (in units of q), not an index."""
        exponent = _as_fraction(exponent)
        M = exponent.denominator
        t = None
        if trunc is not None:
            trunc = _as_fraction(trunc)
            M = lcm(M, trunc.denominator)
            t = int(trunc * M)
        return cls(M, {int(exponent * M): c}, t)

    @classmethod
    def from_list(cls, coeffs: Iterable[Rational], trunc: int | None = None, ramification: int = 1,
                  start: int = 0) -> "FracSeries":
        """Dense coefficients ``coeffs[i]`` at grid index ``start + i``."""
        coeffs = list(coeffs)
        return cls(ramification, {start + i: c for i, c in enumerate(coeffs)}, trunc)

    @classmethod
    def zero(cls, trunc: int | None = None, ramification: int = 1) -> "FracSeries":
        return cls(ramification, {}, trunc)

    @classmethod
    def one(cls, trunc: int | None = None, ramification: int = 1) -> "FracSeries":
        return cls(ramification, {0: 1}, trunc)

    # -- accessors -------------------------------------------------------------

    @property
    def ramification(self) -> int:
        return self._M

    @property
    def trunc(self) -> int | None:
        return self._trunc

    @property
    def precision(self) -> Fraction | None:
        """Truncation as an exponent of q, or ``None`` for an exact series."""
        return None if self._trunc is None else Fraction(self._trunc, self._M)

    @property
    def is_exact(self) -> bool:
        return self._trunc is None

    def indices(self) -> list[int]:
        if self._keys is None:
            self._keys = sorted(self._coeffs)
        return self._keys

    def items(self) -> Iterator[tuple[int, Fraction]]:
        for e in self.indices():
            yield e, self._coeffs[e]

    def terms(self) -> Iterator[tuple[Fraction, Fraction]]:
        """``(exponent, coefficient)`` pairs in increasing exponent order."""
        for e, c in self.items():
            yield Fraction(e, self._M), c

    def __len__(self) -> int:
        return len(self._coeffs)

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def valuation(self) -> int:
        """Grid index of the leading term."""
        keys = self.indices()
        if not keys:
            raise ZeroSeries("series has no terms before its truncation")
        return keys[0]

    def leading_exponent(self) -> Fraction:
        return Fraction(self.valuation(), self._M)

    def leading_coefficient(self) -> Fraction:
        return self._coeffs[self.valuation()]

    def __getitem__(self, e: int) -> Fraction:
        """Coefficient at grid index ``e`` (not an exponent)."""
        if self._trunc is not None and e >= self._trunc:
            raise BeyondTruncation(f"index {e} is at or beyond truncation {self._trunc}")
        return self._coeffs.get(e, Fraction(0))

    def coefficient(self, numerator: int, denominator: int = 1) -> Fraction:
        """Coefficient of ``q^(numerator/denominator)``; zero for off-grid exponents."""
        if denominator < 1:
            raise SeriesError("denominator must be positive")
        x = Fraction(numerator, denominator)
        if self._trunc is not None and x >= Fraction(self._trunc, self._M):
            raise BeyondTruncation(f"q^({x}) is at or beyond O(q^({self.precision}))")
        idx = x * self._M
        if idx.denominator != 1:
            return Fraction(0)
        return self._coeffs.get(int(idx), Fraction(0))

    def dense(self, start: int, stop: int) -> list[Fraction]:
        return [self._coeffs.get(e, Fraction(0)) for e in range(start, stop)]

    # -- grid handling ---------------------------------------------------------

    def rescale(self, M: int) -> "FracSeries":
        """The same series written on the finer grid ``(1/M) Z``."""
        if M == self._M:
            return self
        if M % self._M:
            raise SeriesError(f"grid 1/{M} does not refine 1/{self._M}")
        k = M // self._M
        t = None if self._trunc is None else self._trunc * k
        return FracSeries(M, {e * k: c for e, c in self._coeffs.items()}, t)

    def canonicalize(self) -> "FracSeries":
        """Rewrite on the coarsest grid that holds every term and the truncation."""
        g = self._M
        for e in self._coeffs:
            g = gcd(g, e)
        if self._trunc is not None:
            g = gcd(g, self._trunc)
        if g == 1:
            return self
        t = None if self._trunc is None else self._trunc // g
        return FracSeries(self._M // g, {e // g: c for e, c in self._coeffs.items()}, t)

    def truncate(self, exponent: Rational) -> "FracSeries":
        """Drop everything from ``q^exponent`` on (never extends precision)."""
        x = _as_fraction(exponent)
        M = lcm(self._M, x.denominator)
        s = self.rescale(M)
        t = _min_trunc(s._trunc, int(x * M))
        return FracSeries(M, s._coeffs, t)

    def substitute(self, k: int) -> "FracSeries":
        """``s(q^k)`` for a positive integer ``k``."""
        if k < 1:
            raise SeriesError("substitution power must be positive")
        t = None if self._trunc is None else self._trunc * k
        return FracSeries(self._M, {e * k: c for e, c in self._coeffs.items()}, t)

    def shift(self, exponent: Rational) -> "FracSeries":
        """Multiply by the exact monomial ``q^exponent``."""
        return self * FracSeries.monomial(1, exponent)

    def map_coefficients(self, fn) -> "FracSeries":
        return FracSeries(self._M, {e: fn(e, c) for e, c in self._coeffs.items()}, self._trunc)

    # -- arithmetic ------------------------------------------------------------

    def _coerce(self, other) -> "FracSeries":
        if isinstance(other, FracSeries):
            return other
        if isinstance(other, (int, Fraction)):
            return FracSeries(1, {0: other}, None)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        M = lcm(self._M, other._M)
        a, b = self.rescale(M), other.rescale(M)
        t = _min_trunc(a._trunc, b._trunc)
        out = dict(a._coeffs)
        for e, c in b._coeffs.items():
            out[e] = out.get(e, 0) + c
        return FracSeries(M, out, t)

    __radd__ = __add__

    def __neg__(self):
        return FracSeries(self._M, {e: -c for e, c in self._coeffs.items()}, self._trunc)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: Rational) -> "FracSeries":
        c = _as_fraction(c)
        if c == 0:
            return FracSeries(self._M, {}, self._trunc)
        return FracSeries(self._M, {e: c * x for e, x in self._coeffs.items()}, self._trunc)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, FracSeries):
            return NotImplemented
        return mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / other)
        if isinstance(other, FracSeries):
            return mul(self, invert(other))
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        return power(self, n)

    # -- comparison ------------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = FracSeries(1, {0: other}, self._trunc)
        if not isinstance(other, FracSeries):
            return NotImplemented
        a, b = self.canonicalize(), other.canonicalize()
        return a._M == b._M and a._trunc == b._trunc and a._coeffs == b._coeffs

    def __hash__(self):
        c = self.canonicalize()
        return hash((c._M, c._trunc, frozenset(c._coeffs.items())))

    def agrees_with(self, other: "FracSeries") -> bool:
        """Equal on every exponent below the smaller of the two truncations."""
        M = lcm(self._M, other._M)
        a, b = self.rescale(M), other.rescale(M)
        t = _min_trunc(a._trunc, b._trunc)
        keys = set(a._coeffs) | set(b._coeffs)
        return all(a._coeffs.get(e, 0) == b._coeffs.get(e, 0) for e in keys if t is None or e < t)

    # -- rendering -------------------------------------------------------------

    def __str__(self) -> str:
        parts = [f"{c}*q^({e}/{self._M})" for e, c in self.items()]
        if self._trunc is not None:
            parts.append(f"O(q^({self._trunc}/{self._M}))")
        return " + ".join(parts) if parts else "0"

    def __repr__(self) -> str:
        return f"FracSeries({self.pretty(8)})"

    def pretty(self, max_terms: int | None = None) -> str:
        """Human form such as ``q - q^2 + 1/3*q^(4/3) + O(q^5)``."""
        out = []
        for i, (x, c) in enumerate(self.terms()):
            if max_terms is not None and i >= max_terms:
                out.append("...")
                break
            sign = "-" if c < 0 else "+"
            c = abs(c)
            if x == 0:
                body = str(c)
            else:
                mono = "q" if x == 1 else (f"q^{x}" if x.denominator == 1 and x > 0 else f"q^({x})")
                body = mono if c == 1 else f"{c}*{mono}"
            out.append((sign, body))
        if self._trunc is not None:
            p = self.precision
            out.append(("+", f"O(q^{p})" if p.denominator == 1 and p >= 0 else f"O(q^({p}))"))
        if not out:
            return "0"
        text = ""
        for i, item in enumerate(out):
            if item == "...":
                text += " + ..."
                continue
            sign, body = item
            if i == 0:
                text = ("-" if sign == "-" else "") + body
            else:
                text += f" {sign} {body}"
        return text

    def to_json(self) -> dict:
        return {
            "ramification": self._M,
            "terms": [[e, c.numerator, c.denominator] for e, c in self.items()],
            "trunc": self._trunc,
        }

    @classmethod
    def from_json(cls, data: dict | str) -> "FracSeries":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(
            data["ramification"],
            {int(e): Fraction(int(n), int(d)) for e, n, d in data["terms"]},
            data["trunc"],
        )


# -- products and inverses ------------------------------------------------------


def _to_ints(values: list[Fraction]) -> tuple[list[int], int]:
    """Common-denominator integer numerators; keeps convolutions in int arithmetic."""
    d = _common_denominator(values)
    if d == 1:
        return [v.numerator for v in values], 1
    return [v.numerator * (d // v.denominator) for v in values], d


def mul(s1: FracSeries, s2: FracSeries) -> FracSeries:
    M = lcm(s1.ramification, s2.ramification)
    a, b = s1.rescale(M), s2.rescale(M)
    if not a or not b:
        if (not a and a.is_exact) or (not b and b.is_exact):
            return FracSeries(M, {}, None)
        # an O-term times something starting at index l is O(q^(T + l))
        la = a.valuation() if a else a.trunc
        lb = b.valuation() if b else b.trunc
        t = _min_trunc(None if a.trunc is None else a.trunc + lb, None if b.trunc is None else b.trunc + la)
        return FracSeries(M, {}, t)
    l1, l2 = a.valuation(), b.valuation()
    t = _min_trunc(None if a.trunc is None else a.trunc + l2, None if b.trunc is None else b.trunc + l1)
    ia, ca = zip(*a.items())
    ib, cb = zip(*b.items())
    na, da = _to_ints(list(ca))
    nb, db = _to_ints(list(cb))
    if len(ia) > len(ib):
        ia, na, ib, nb = ib, nb, ia, na
    acc: dict[int, int] = {}
    for i, x in zip(ia, na):
        if t is None:
            for j, y in zip(ib, nb):
                k = i + j
                acc[k] = acc.get(k, 0) + x * y
        else:
            lim = t - i
            for j, y in zip(ib, nb):
                if j >= lim:
                    break
                k = i + j
                acc[k] = acc.get(k, 0) + x * y
    den = da * db
    return FracSeries(M, {k: Fraction(v, den) for k, v in acc.items() if v}, t)


def _unit_part(s: FracSeries, prec: int | None) -> tuple[int, Fraction, list[Fraction], int]:
    """Split ``s = c q^(l/M) (1 + u_1 q^(1/M) + ...)``; returns ``(l, c, u, n)`` with n known terms."""
    l = s.valuation()
    c = s.leading_coefficient()
    if s.trunc is None:
        if prec is None:
            if len(s) == 1:
                return l, c, [Fraction(1)], None
            raise SeriesError("exact non-monomial operand needs an explicit relative precision")
        n = prec
    else:
        n = s.trunc - l if prec is None else min(prec, s.trunc - l)
    u = [x / c for x in s.dense(l, l + n)]
    return l, c, u, n


def invert(s: FracSeries, prec: int | None = None) -> FracSeries:
    """Multiplicative inverse; ``prec`` bounds the relative precision (grid steps)."""
    if not s:
        raise ZeroSeries("cannot invert a series with no terms before its truncation")
    l, c, u, n = _unit_part(s, prec)
    M = s.ramification
    if n is None:
        return FracSeries(M, {-l: 1 / c}, None)
    if all(x.denominator == 1 for x in u):
        ui = [x.numerator for x in u]
        b = [0] * n
        b[0] = 1
        nz = [(j, ui[j]) for j in range(1, n) if ui[j]]
        for k in range(1, n):
            acc = 0
            for j, x in nz:
                if j > k:
                    break
                acc -= x * b[k - j]
            b[k] = acc
        inv_c = 1 / c
        return FracSeries(M, {k - l: inv_c * v for k, v in enumerate(b) if v}, n - l)
    bf = [Fraction(0)] * n
    bf[0] = Fraction(1)
    nz = [(j, u[j]) for j in range(1, n) if u[j]]
    for k in range(1, n):
        acc = Fraction(0)
        for j, x in nz:
            if j > k:
                break
            acc -= x * bf[k - j]
        bf[k] = acc
    inv_c = 1 / c
    return FracSeries(M, {k - l: inv_c * v for k, v in enumerate(bf) if v}, n - l)


def power(s: FracSeries, n: int) -> FracSeries:
    if n < 0:
        return power(invert(s), -n)
    result = FracSeries(s.ramification, {0: 1}, None)
    base = s
    while n:
        if n & 1:
            result = mul(result, base)
        n >>= 1
        if n:
            base = mul(base, base)
    return result


def nth_root(s: FracSeries, n: int, prec: int | None = None) -> FracSeries:
    """The n-th root whose leading coefficient is the real rational root of s's.

    Uses the coefficient recurrence for ``u^(1/n)`` on the unit part
    ``u = 1 + u_1 x + ...``:  ``n k g_k = sum_j ((n+1) j - n k) u_j g_{k-j}``.
    """
    if n < 1:
        raise SeriesError("root index must be a positive integer")
    if not s:
        raise ZeroSeries("cannot take a root of a series with no terms before its truncation")
    if n == 1:
        return s
    l, c, u, m = _unit_part(s, prec)
    root_c = rational_root(c, n)
    M = s.ramification
    if m is None:
        g: list = [Fraction(1)]
        m = 1
        exact = True
    else:
        exact = False
        g = _root_unit(u, n, m)
    # leading exponent l/(nM); unit part stays on the grid 1/M
    if l % n == 0:
        M2, lead, k = M, l // n, 1
    else:
        M2, lead, k = M * n, l, n
    coeffs = {lead + i * k: root_c * x for i, x in enumerate(g) if x}
    return FracSeries(M2, coeffs, None if exact else lead + m * k)


def _root_unit(u: list[Fraction], n: int, m: int) -> list[Fraction]:
    nz = [(j, u[j]) for j in range(1, m) if u[j]]
    if all(x.denominator == 1 for _, x in nz):
        # coefficients of (1 + integer series)^(1/n) lie in Z[1/n] with n-adic
        # denominator below n^(2k); a fixed scale keeps the recurrence in ints
        scale = n ** (2 * m)
        G = [0] * m
        G[0] = scale
        nzi = [(j, x.numerator) for j, x in nz]
        for k in range(1, m):
            acc = 0
            for j, x in nzi:
                if j > k:
                    break
                acc += ((n + 1) * j - n * k) * x * G[k - j]
            q, r = divmod(acc, n * k)
            if r:
                raise AssertionError("root recurrence left the expected ring")
            G[k] = q
        return [Fraction(x, scale) for x in G]
    g = [Fraction(0)] * m
    g[0] = Fraction(1)
    for k in range(1, m):
        acc = Fraction(0)
        for j, x in nz:
            if j > k:
                break
            acc += ((n + 1) * j - n * k) * x * g[k - j]
        g[k] = acc / (n * k)
    return g


def add(s1: FracSeries, s2: FracSeries) -> FracSeries:
    return s1 + s2


def coefficient(s: FracSeries, numerator: int, denominator: int = 1) -> Fraction:
    return s.coefficient(numerator, denominator)
