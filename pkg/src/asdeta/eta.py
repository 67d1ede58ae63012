"""Eta-quotients with rational exponents.

An :class:`EtaQuotient` is the formal product ``prod eta(q^delta)^r_delta`` with
``r_delta`` rational, so cube roots of ordinary eta-quotients are first-class
objects and identities between them reduce to exponent-vector arithmetic.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import ceil, gcd, lcm
from typing import Iterable, Mapping

from .qseries import FracSeries, invert, mul, nth_root, power


class EtaError(ValueError):
    pass


class NonIntegralExponents(EtaError):
    pass


class ScaleNotDividingLevel(EtaError):
    pass


def divisors(n: int) -> list[int]:
    small = [d for d in range(1, int(n**0.5) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def euler_phi(n: int) -> int:
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def gamma0_index(N: int) -> int:
    """Index of Gamma_0(N) in SL_2(Z): ``N prod_{p | N} (1 + 1/p)``."""
    result, m, p = N, N, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result += result // p
        p += 1
    if m > 1:
        result += result // m
    return result


@dataclass(frozen=True)
class EtaQuotient:
    """``prod eta(q^delta)^r`` stored as sorted ``(delta, r)`` pairs with r != 0."""

    terms: tuple[tuple[int, Fraction], ...] = ()

    def __init__(self, terms: Mapping[int, object] | Iterable[tuple[int, object]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[int, Fraction] = {}
        for delta, r in items:
            delta = int(delta)
            if delta < 1:
                raise EtaError(f"eta scale must be a positive integer, got {delta}")
            acc[delta] = acc.get(delta, Fraction(0)) + Fraction(r)
        object.__setattr__(self, "terms", tuple((d, acc[d]) for d in sorted(acc) if acc[d]))

    # -- exponent-vector algebra ------------------------------------------------

    def as_dict(self) -> dict[int, Fraction]:
        return dict(self.terms)

    def combine(self, other: "EtaQuotient") -> "EtaQuotient":
        return EtaQuotient(list(self.terms) + list(other.terms))

    __mul__ = combine

    def inverse(self) -> "EtaQuotient":
        return self.scale(-1)

    def __truediv__(self, other: "EtaQuotient") -> "EtaQuotient":
        return self.combine(other.inverse())

    def scale(self, k) -> "EtaQuotient":
        k = Fraction(k)
        return EtaQuotient([(d, r * k) for d, r in self.terms])

    def __pow__(self, k) -> "EtaQuotient":
        return self.scale(k)

    # -- derived quantities -----------------------------------------------------

    @property
    def deltas(self) -> tuple[int, ...]:
        return tuple(d for d, _ in self.terms)

    def weight(self) -> Fraction:
        return sum((r for _, r in self.terms), Fraction(0)) / 2

    def leading_exponent(self) -> Fraction:
        """Order at infinity: ``sum r_delta delta / 24``."""
        return sum((r * d for d, r in self.terms), Fraction(0)) / 24

    def is_integral(self) -> bool:
        return all(r.denominator == 1 for _, r in self.terms)

    def exponent_denominator(self) -> int:
        d = 1
        for _, r in self.terms:
            d = lcm(d, r.denominator)
        return d

    def level(self) -> int:
        n = 1
        for d, _ in self.terms:
            n = lcm(n, d)
        return n

    def __bool__(self) -> bool:
        return bool(self.terms)

    # -- rendering --------------------------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "1"

        def factor(d, r):
            base = "eta(q)" if d == 1 else f"eta(q^{d})"
            if r == 1:
                return base
            return f"{base}^{r}" if r.denominator == 1 else f"{base}^({r})"

        num = [factor(d, r) for d, r in self.terms if r > 0]
        den = [factor(d, -r) for d, r in self.terms if r < 0]
        text = "*".join(num) if num else "1"
        if den:
            text += "/" + (den[0] if len(den) == 1 else "(" + "*".join(den) + ")")
        return text

    def to_json(self) -> list[list[int]]:
        return [[d, r.numerator, r.denominator] for d, r in self.terms]

    @classmethod
    def from_json(cls, data) -> "EtaQuotient":
        return cls([(int(d), Fraction(int(n), int(m))) for d, n, m in data])


@dataclass(frozen=True)
class TupleSpec:
    """Row key ``[m, n, r, s]`` over bases ``(a, b, c, d)``: the root of the eta product."""

    bases: tuple[int, ...]
    exponents: tuple[int, ...]
    root: int = 3

    def __post_init__(self):
        object.__setattr__(self, "bases", tuple(int(b) for b in self.bases))
        object.__setattr__(self, "exponents", tuple(int(e) for e in self.exponents))
        if len(self.bases) != len(self.exponents):
            raise EtaError("bases and exponents differ in length")

    def to_eta(self) -> EtaQuotient:
        return EtaQuotient([(b, Fraction(e, self.root)) for b, e in zip(self.bases, self.exponents)])

    def weight(self) -> Fraction:
        return self.to_eta().weight()

    def base_family(self) -> int | None:
        """6 or 8 when every base divides it (6 is preferred), else None."""
        for fam in (6, 8):
            if all(fam % b == 0 for b in self.bases):
                return fam
        return None

    def __str__(self) -> str:
        return f"[{', '.join(map(str, self.exponents))}]@({','.join(map(str, self.bases))})"


BASES = {6: (1, 2, 3, 6), 8: (1, 2, 4, 8)}


# -- expansions -----------------------------------------------------------------


@lru_cache(maxsize=64)
def euler_function(T: int) -> FracSeries:
    """``prod_{n>=1} (1 - q^n) + O(q^T)`` from the pentagonal number theorem."""
    if T < 1:
        raise EtaError("truncation order must be at least 1")
    coeffs = {0: 1}
    k = 1
    while k * (3 * k - 1) // 2 < T:
        sign = -1 if k % 2 else 1
        for g in (k * (3 * k - 1) // 2, k * (3 * k + 1) // 2):
            if g < T:
                coeffs[g] = sign
        k += 1
    return FracSeries(1, coeffs, T)


@lru_cache(maxsize=256)
def _euler_power(delta: int, e: int, n: int) -> FracSeries:
    """``prod (1 - q^(delta k))^e`` to ``O(q^n)`` for an integer ``e``."""
    base = euler_function(ceil(n / delta)).substitute(delta).truncate(n)
    if e < 0:
        base = invert(base, n)
        e = -e
    return power(base, e).truncate(n)


def unit_part(eq: EtaQuotient, n: int) -> FracSeries:
    """``prod (prod_k (1 - q^(delta k)))^r_delta`` to ``O(q^n)``.

    Fractional exponents with common denominator d are handled by forming the
    integral power ``prod (...)^(d r_delta)`` first and taking one d-th root.
    """
    if n < 1:
        return FracSeries(1, {}, max(n, 0))
    d = eq.exponent_denominator()
    result = FracSeries.one(n)
    for delta, r in eq.terms:
        e = int(r * d)
        if delta >= n:
            continue
        result = mul(result, _euler_power(delta, e, n))
    if d > 1:
        result = nth_root(result, d)
    return result


def expand(eq: EtaQuotient, T) -> FracSeries:
    """Expansion of ``eq`` at infinity to ``O(q^T)``."""
    T = Fraction(T)
    L = eq.leading_exponent()
    n = ceil(T - L)
    u = unit_part(eq, n)
    return u.shift(L).truncate(T)


# -- cusp orders ----------------------------------------------------------------


def _require_level(eq: EtaQuotient, N: int):
    if not eq.is_integral():
        raise NonIntegralExponents(f"{eq} has non-integral exponents")
    bad = [d for d in eq.deltas if N % d]
    if bad:
        raise ScaleNotDividingLevel(f"scales {bad} do not divide level {N}")


def cusp_orders(eq: EtaQuotient, N: int) -> list[tuple[int, Fraction]]:
    """Order of vanishing at the cusps of Gamma_0(N), one entry per denominator d | N.

    ``N / (24 gcd(d, N/d) d) * sum_delta gcd(d, delta)^2 r_delta / delta``
    """
    _require_level(eq, N)
    out = []
    for c in divisors(N):
        s = sum((Fraction(gcd(c, d) ** 2) * r / d for d, r in eq.terms), Fraction(0))
        out.append((c, Fraction(N, 24 * gcd(c, N // c) * c) * s))
    return out


def is_holomorphic(eq: EtaQuotient, N: int) -> bool:
    return all(v >= 0 for _, v in cusp_orders(eq, N))


def is_cuspidal(eq: EtaQuotient, N: int) -> bool:
    return all(v > 0 for _, v in cusp_orders(eq, N))


def total_cusp_order(eq: EtaQuotient, N: int) -> Fraction:
    """Sum of orders over all cusps (each denominator class has phi(gcd(d, N/d)) cusps)."""
    return sum((v * euler_phi(gcd(c, N // c)) for c, v in cusp_orders(eq, N)), Fraction(0))


# -- expression syntax ------------------------------------------------------------

_TOKEN = re.compile(r"\s*(eta|cbrt|sqrt|root|q|\d+|[()\[\]^*/,@+-])")


class ParseError(EtaError):
    pass


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = []
        pos = 0
        text = text.strip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                raise ParseError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
            self.toks.append(m.group(1))
            pos = m.end()
            while pos < len(text) and text[pos].isspace():
                pos += 1
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, expected=None):
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise ParseError(f"expected {expected or 'token'} in {self.text!r}, got {tok!r}")
        self.i += 1
        return tok

    def integer(self) -> int:
        sign = 1
        if self.peek() in ("-", "+"):
            sign = -1 if self.take() == "-" else 1
        tok = self.take()
        if not tok.isdigit():
            raise ParseError(f"expected integer, got {tok!r}")
        return sign * int(tok)

    def parse(self) -> EtaQuotient:
        e = self.expr()
        if self.peek() is not None:
            raise ParseError(f"trailing input {self.peek()!r} in {self.text!r}")
        return e

    def expr(self) -> EtaQuotient:
        e = self.term()
        while self.peek() in ("*", "/"):
            op = self.take()
            t = self.term()
            e = e.combine(t) if op == "*" else e.combine(t.inverse())
        return e

    def term(self) -> EtaQuotient:
        f = self.factor()
        if self.peek() == "^":
            self.take()
            f = f.scale(self.exponent())
        return f

    def exponent(self) -> Fraction:
        if self.peek() == "(":
            self.take()
            num = self.integer()
            den = 1
            if self.peek() == "/":
                self.take()
                den = self.integer()
            self.take(")")
            return Fraction(num, den)
        return Fraction(self.integer())

    def factor(self) -> EtaQuotient:
        tok = self.peek()
        if tok == "eta":
            self.take()
            self.take("(")
            self.take("q")
            delta = 1
            if self.peek() == "^":
                self.take()
                delta = self.integer()
            self.take(")")
            return EtaQuotient({delta: 1})
        if tok in ("cbrt", "sqrt"):
            self.take()
            self.take("(")
            e = self.expr()
            self.take(")")
            return e.scale(Fraction(1, 3 if tok == "cbrt" else 2))
        if tok == "root":
            self.take()
            self.take("(")
            e = self.expr()
            self.take(",")
            n = self.integer()
            self.take(")")
            return e.scale(Fraction(1, n))
        if tok == "(":
            self.take()
            e = self.expr()
            self.take(")")
            return e
        if tok == "[":
            return self.tuple_spec().to_eta()
        if tok is not None and tok.isdigit() and int(tok) == 1:
            self.take()
            return EtaQuotient()
        raise ParseError(f"unexpected token {tok!r} in {self.text!r}")

    def tuple_spec(self) -> TupleSpec:
        self.take("[")
        exps = [self.integer()]
        while self.peek() == ",":
            self.take()
            exps.append(self.integer())
        self.take("]")
        self.take("@")
        if self.peek() == "(":
            self.take()
            bases = [self.integer()]
            while self.peek() == ",":
                self.take()
                bases.append(self.integer())
            self.take(")")
        else:
            fam = self.integer()
            if fam not in BASES:
                raise ParseError(f"unknown base shorthand @{fam}; use @6 or @8")
            bases = list(BASES[fam])
        return TupleSpec(tuple(bases), tuple(exps))


def parse_quotient(text: str) -> EtaQuotient:
    """Parse ``eta(q^2)^12*eta(q^4)^14/eta(q)^8``, ``cbrt(...)`` or ``[m,n,r,s]@8``."""
    return _Parser(text).parse()


def parse_tuple(text: str) -> TupleSpec:
    p = _Parser(text)
    t = p.tuple_spec()
    if p.peek() is not None:
        raise ParseError(f"trailing input in {text!r}")
    return t
