"""Ligozat-type criterion for an eta-quotient to be a weight-0 modular function on Gamma_0(N).

Conditions, for ``g = prod_{delta | N} eta(delta z)^r_delta`` with integer exponents:

1. ``sum r_delta * delta        == 0 (mod 24)``
2. ``sum r_delta * (N / delta)  == 0 (mod 24)``
3. ``sum r_delta == 0``

The character is ``chi = prod (N/delta | .)^r_delta``.  Taking the two congruences
modulo 8 instead gives a modular function for ``Gamma_0(N) cap Gamma(6)``.
"""

from __future__ import annotations

import enum
import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import gcd

from .eta import EtaQuotient, NonIntegralExponents, ScaleNotDividingLevel


class NotCoprime(ValueError):
    pass


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol ``(a | n)`` for arbitrary integers."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            result = -result
    # n is now odd and positive: Jacobi symbol
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def squarefree_part(x: Fraction | int) -> int:
    """Signed squarefree kernel of a nonzero rational, i.e. of ``num * den``."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("zero has no squarefree part")
    m = abs(x.numerator * x.denominator)
    out, p = 1, 2
    while p * p <= m:
        while m % (p * p) == 0:
            m //= p * p
        if m % p == 0:
            out *= p
            m //= p
        p += 1
    out *= m
    return out if x > 0 else -out


class Verdict(str, enum.Enum):
    GAMMA0 = "ModularFunctionGamma0N"
    GAMMA0_CAP_GAMMA6 = "ModularFunctionGamma0NCapGamma6"
    FAILS = "Fails"


@dataclass(frozen=True)
class LigozatReport:
    level: int
    cond_delta: bool
    cond_codelta: bool
    cond_weight0: bool
    modulus_used: int
    verdict: Verdict
    character_spec: Fraction
    sum_delta: int = 0
    sum_codelta: int = 0
    sum_exponents: int = 0
    even_exponents: bool = False
    terms: tuple = field(default=(), repr=False)

    @property
    def passed(self) -> bool:
        return self.verdict is not Verdict.FAILS

    @property
    def character_discriminant(self) -> int:
        """Squarefree integer D with chi(a) = (D | a) on units mod N."""
        return squarefree_part(self.character_spec)

    def to_json(self) -> dict:
        d = asdict(self)
        d["verdict"] = self.verdict.value
        d["character_spec"] = str(self.character_spec)
        d["character_discriminant"] = self.character_discriminant
        d["terms"] = [[delta, int(r)] for delta, r in self.terms]
        return d

    def table(self) -> str:
        m = self.modulus_used
        rows = [
            ("level N", str(self.level)),
            (f"(1) sum r*delta = {self.sum_delta} (mod {m}: {self.sum_delta % m})", _ok(self.cond_delta)),
            (f"(2) sum r*(N/delta) = {self.sum_codelta} (mod {m}: {self.sum_codelta % m})", _ok(self.cond_codelta)),
            (f"(3) sum r = {self.sum_exponents}", _ok(self.cond_weight0)),
            ("character", f"({self.character_discriminant} | .)"),
            ("all exponents even (Gamma(12N))", "yes" if self.even_exponents else "no"),
            ("verdict", self.verdict.value),
        ]
        w = max(len(a) for a, _ in rows)
        return "\n".join(f"{a.ljust(w)}  {b}" for a, b in rows)


def _ok(flag: bool) -> str:
    return "ok" if flag else "FAIL"


def check_ligozat(eq: EtaQuotient, N: int, modulus: int = 24) -> LigozatReport:
    """Evaluate the three conditions; ``modulus=8`` also admits the Gamma(6) variant."""
    if modulus not in (24, 8):
        raise ValueError("modulus must be 24 or 8")
    if not eq.is_integral():
        raise NonIntegralExponents(f"{eq} has non-integral exponents")
    bad = [d for d in eq.deltas if N % d]
    if bad:
        raise ScaleNotDividingLevel(f"scales {bad} do not divide level {N}")
    terms = tuple((d, int(r)) for d, r in eq.terms)
    s1 = sum(r * d for d, r in terms)
    s2 = sum(r * (N // d) for d, r in terms)
    s3 = sum(r for _, r in terms)
    spec = Fraction(1)
    for d, r in terms:
        spec *= Fraction(N // d) ** r
    even = all(r % 2 == 0 for _, r in terms)

    def report(m, verdict):
        return LigozatReport(
            level=N,
            cond_delta=s1 % m == 0,
            cond_codelta=s2 % m == 0,
            cond_weight0=s3 == 0,
            modulus_used=m,
            verdict=verdict,
            character_spec=spec,
            sum_delta=s1,
            sum_codelta=s2,
            sum_exponents=s3,
            even_exponents=even,
            terms=terms,
        )

    if s1 % 24 == 0 and s2 % 24 == 0 and s3 == 0:
        return report(24, Verdict.GAMMA0)
    if modulus == 8 and s1 % 8 == 0 and s2 % 8 == 0 and s3 == 0:
        return report(8, Verdict.GAMMA0_CAP_GAMMA6)
    return report(modulus, Verdict.FAILS)


def character_eval(report: LigozatReport, a: int) -> int:
    """``prod (N/delta | a)^r_delta`` for ``a`` coprime to the level."""
    if not report.passed:
        raise ValueError("character is only defined for a passing report")
    if gcd(a, report.level) != 1:
        raise NotCoprime(f"{a} is not coprime to {report.level}")
    value = 1
    for d, r in report.terms:
        if r % 2:
            value *= kronecker(report.level // d, a)
    return value


def report_json(report: LigozatReport) -> str:
    return json.dumps(report.to_json(), sort_keys=True)
