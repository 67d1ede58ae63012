"""Atkin--Swinnerton-Dyer congruence tests on exact coefficient tables.

For a form ``h = sum a_n q^(n/mu)`` and a newform ``f = sum c_n q^n`` of weight
k and character chi, the pair satisfies the relation at a prime p when

    (a_{np} - c_p a_n + chi(p) p^(k-1) a_{n/p}) / (np)^(k-1)

is p-integral for every n (``a_{n/p} = 0`` when p does not divide n).  The
scans below look for the weight-3 shadows of that relation modulo p^2.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .qseries import FracSeries


class InsufficientCoefficients(ValueError):
    pass


class BadPrime(ValueError):
    pass


def vp(x, p: int) -> float | int:
    """p-adic valuation of a rational; ``math.inf`` for zero."""
    x = Fraction(x)
    if x == 0:
        return math.inf
    v = 0
    n, d = x.numerator, x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def residue(x, m: int) -> int:
    """``x mod m`` in ``[0, m)`` for a rational whose denominator is a unit mod m."""
    x = Fraction(x)
    return x.numerator * pow(x.denominator, -1, m) % m


def centered(r: int, m: int) -> int:
    """Representative of ``r mod m`` in ``(-m/2, m/2]``."""
    r %= m
    return r - m if r > m // 2 else r


def is_unit(x, p: int) -> bool:
    return vp(x, p) == 0


class CoefficientTable:
    """Fourier coefficients ``a_1 .. a_max_n`` of one form, indexed in units of ``q^(1/mu)``."""

    __slots__ = ("form_id", "mu", "_coeffs", "max_n")

    def __init__(self, form_id: str, mu: int, coeffs: Mapping[int, object], max_n: int):
        self.form_id = form_id
        self.mu = int(mu)
        self.max_n = int(max_n)
        self._coeffs = {int(n): Fraction(c) for n, c in coeffs.items() if c and 1 <= n <= max_n}

    @classmethod
    def from_series(cls, form_id: str, series: FracSeries, mu: int | None = None) -> "CoefficientTable":
        if series.trunc is None:
            raise InsufficientCoefficients("an exact series has no natural coefficient bound; truncate it first")
        if mu is None:
            series = series.canonicalize()
            mu = series.ramification
        else:
            series = series.rescale(mu) if mu % series.ramification == 0 else series
            if series.ramification != mu:
                raise ValueError(f"series grid 1/{series.ramification} does not fit mu={mu}")
        coeffs = {}
        for e, c in series.items():
            if e < 1:
                raise ValueError(f"{form_id}: expansion has a term at q^({e}/{mu}); not a cusp expansion")
            coeffs[e] = c
        return cls(form_id, mu, coeffs, series.trunc - 1)

    def __getitem__(self, n: int) -> Fraction:
        if n > self.max_n:
            raise InsufficientCoefficients(f"{self.form_id}: a_{n} needed but only {self.max_n} known")
        if n < 1:
            return Fraction(0)
        return self._coeffs.get(n, Fraction(0))

    def get(self, n: int, default=None):
        return self[n] if n <= self.max_n else default

    def items(self):
        return sorted(self._coeffs.items())

    def nonzero(self) -> list[int]:
        return sorted(self._coeffs)

    def scaled(self, c, form_id: str | None = None) -> "CoefficientTable":
        c = Fraction(c)
        return CoefficientTable(form_id or f"{c}*{self.form_id}", self.mu,
                                {n: c * x for n, x in self._coeffs.items()}, self.max_n)

    def plus(self, other: "CoefficientTable", c=1, form_id: str | None = None) -> "CoefficientTable":
        """``self + c * other`` on the common index range."""
        if other.mu != self.mu:
            raise ValueError("tables live on different grids")
        c = Fraction(c)
        m = min(self.max_n, other.max_n)
        keys = set(self._coeffs) | set(other._coeffs)
        data = {n: self._coeffs.get(n, 0) + c * other._coeffs.get(n, 0) for n in keys if n <= m}
        return CoefficientTable(form_id or f"{self.form_id}+({c})*{other.form_id}", self.mu, data, m)

    def with_coefficient(self, n: int, value) -> "CoefficientTable":
        data = dict(self._coeffs)
        data[n] = Fraction(value)
        return CoefficientTable(self.form_id + "'", self.mu, data, self.max_n)

    def residues(self, m: int, upto: int | None = None) -> list[int]:
        """``[a_0, a_1, ..., a_upto] mod m`` (a_0 = 0)."""
        upto = self.max_n if upto is None else upto
        out = [0] * (upto + 1)
        for n, c in self._coeffs.items():
            if n <= upto:
                out[n] = residue(c, m)
        return out

    def __repr__(self) -> str:
        head = ", ".join(f"{n}: {c}" for n, c in self.items()[:5])
        return f"CoefficientTable({self.form_id!r}, mu={self.mu}, max_n={self.max_n}, {{{head}, ...}})"


# -- scans ------------------------------------------------------------------------


class Case(str, enum.Enum):
    ONE = "CaseOne"
    TWO = "CaseTwo"
    NONE = "NoMatch"


@dataclass(frozen=True)
class RatioScan:
    """Values of ``num[np] / den[n] mod p^2`` over admissible n."""

    p: int
    values: frozenset
    witnesses: int
    skipped: int

    def constant(self, witness_min: int = 2) -> int | None:
        if self.witnesses >= witness_min and len(self.values) == 1:
            return next(iter(self.values))
        return None


def _check_range(tables: Iterable[CoefficientTable], nbound: int):
    for t in tables:
        if nbound > t.max_n:
            raise InsufficientCoefficients(f"{t.form_id}: need coefficients through {nbound}, have {t.max_n}")


def ratio_scan(num: CoefficientTable, den: CoefficientTable, p: int, nbound: int | None = None) -> RatioScan:
    """Collect ``num_{np} den_n^(-1) mod p^2`` for n with p not dividing n, ``np <= nbound``.

    Entries where ``den_n`` is not a p-adic unit are counted as skipped.
    """
    if nbound is None:
        nbound = min(num.max_n, den.max_n)
    _check_range((num, den), nbound)
    m = p * p
    values, witnesses, skipped = set(), 0, 0
    for n in range(1, nbound // p + 1):
        if n % p == 0:
            continue
        d = den[n]
        if vp(d, p) != 0:
            skipped += 1
            continue
        values.add(centered(residue(num[n * p] / d, m), m))
        witnesses += 1
    return RatioScan(p, frozenset(values), witnesses, skipped)


def case1_scan(a: CoefficientTable, p: int, nbound: int | None = None, witness_min: int = 2) -> int | None:
    """Common value of ``a_{np}/a_n mod p^2`` (centered residue) or None if it varies."""
    return ratio_scan(a, a, p, nbound).constant(witness_min)


@dataclass(frozen=True)
class Case2Constants:
    p: int
    ab: int
    ba: int
    alpha_sq: int | None
    cp_sq: int
    degenerate: bool


def case2_scan(a: CoefficientTable, b: CoefficientTable, p: int, nbound: int | None = None,
               witness_min: int = 2) -> Case2Constants | None:
    """Constant cross ratios ``a_{np}/b_n`` and ``b_{np}/a_n`` mod p^2.

    On success ``alpha_sq = ab/ba`` and ``cp_sq = ab*ba``; when either constant is
    not a unit the pair is reported as degenerate and ``alpha_sq`` is left undefined.
    """
    k1 = ratio_scan(a, b, p, nbound).constant(witness_min)
    if k1 is None:
        return None
    k2 = ratio_scan(b, a, p, nbound).constant(witness_min)
    if k2 is None:
        return None
    m = p * p
    cp_sq = centered(k1 * k2, m)
    if k1 % p == 0 or k2 % p == 0:
        return Case2Constants(p, k1, k2, None, cp_sq, True)
    return Case2Constants(p, k1, k2, centered(k1 * pow(k2, -1, m), m), cp_sq, False)


@dataclass(frozen=True)
class PrimeReport:
    p: int
    case: Case
    constant: int | None = None  # CaseOne: a_{np}/a_n
    constant_b: int | None = None  # CaseOne: b_{np}/b_n
    case2: Case2Constants | None = None
    witnesses: int = 0
    skipped: int = 0

    @property
    def degenerate(self) -> bool:
        return self.case2 is not None and self.case2.degenerate

    @property
    def alpha_sq(self):
        return None if self.case2 is None else self.case2.alpha_sq

    @property
    def cp_sq(self):
        return None if self.case2 is None else self.case2.cp_sq

    def label(self) -> str:
        if self.case is Case.TWO and self.degenerate:
            return "CaseTwo(degenerate)"
        return self.case.value

    def to_json(self) -> dict:
        d = {"p": self.p, "case": self.case.value, "witnesses": self.witnesses, "skipped": self.skipped}
        if self.case is Case.ONE:
            d["c"] = self.constant
            d["c_b"] = self.constant_b
        elif self.case is Case.TWO:
            c2 = self.case2
            d.update(ab=c2.ab, ba=c2.ba, alpha_sq=c2.alpha_sq, cp_sq=c2.cp_sq, degenerate=c2.degenerate)
        return d


def prime_report(a: CoefficientTable, b: CoefficientTable | None, p: int, nbound: int | None = None,
                 witness_min: int = 2) -> PrimeReport:
    """Classify a pair (or a single form when ``b`` is None or ``a``) at one prime.

    Order: both Case 1 constants nonzero; otherwise constant cross ratios (Case 2,
    degenerate when zero); otherwise both Case 1 constants with a zero among them.
    """
    sa = ratio_scan(a, a, p, nbound)
    ca = sa.constant(witness_min)
    if b is None or b is a:
        if ca is None:
            return PrimeReport(p, Case.NONE, witnesses=sa.witnesses, skipped=sa.skipped)
        return PrimeReport(p, Case.ONE, ca, ca, witnesses=sa.witnesses, skipped=sa.skipped)
    sb = ratio_scan(b, b, p, nbound)
    cb = sb.constant(witness_min)
    if ca is not None and cb is not None and ca and cb:
        return PrimeReport(p, Case.ONE, ca, cb, witnesses=min(sa.witnesses, sb.witnesses),
                           skipped=sa.skipped + sb.skipped)
    sab = ratio_scan(a, b, p, nbound)
    sba = ratio_scan(b, a, p, nbound)
    k1, k2 = sab.constant(witness_min), sba.constant(witness_min)
    if k1 is not None and k2 is not None:
        m = p * p
        cp_sq = centered(k1 * k2, m)
        if k1 % p == 0 or k2 % p == 0:
            c2 = Case2Constants(p, k1, k2, None, cp_sq, True)
        else:
            c2 = Case2Constants(p, k1, k2, centered(k1 * pow(k2, -1, m), m), cp_sq, False)
        return PrimeReport(p, Case.TWO, case2=c2, witnesses=min(sab.witnesses, sba.witnesses),
                           skipped=sab.skipped + sba.skipped)
    if ca is not None and cb is not None:
        return PrimeReport(p, Case.ONE, ca, cb, witnesses=min(sa.witnesses, sb.witnesses),
                           skipped=sa.skipped + sb.skipped)
    return PrimeReport(p, Case.NONE, witnesses=min(sa.witnesses, sb.witnesses),
                       skipped=sa.skipped + sb.skipped)


# -- the defining congruence --------------------------------------------------------


@dataclass(frozen=True)
class AsdResult:
    ok: bool
    p: int
    checked: int
    witness: int | None = None
    numerator: Fraction | None = None
    valuation: float | None = None
    required: int | None = None

    def __bool__(self) -> bool:
        return self.ok


def _lookup(source, p: int):
    if callable(source) and not isinstance(source, (CoefficientTable, Mapping)):
        return source(p)
    return source[p]


def asd_check(h: CoefficientTable, cp, chi_p, k: int, p: int, nbound: int | None = None,
              bad_modulus: int | None = None) -> AsdResult:
    """Check p-integrality of the ASD quotient for every n with ``np <= nbound``.

    ``cp`` and ``chi_p`` map primes to integers (a dict, a callable, or a
    coefficient table of the newform).  Returns the first failing n as witness.
    """
    if bad_modulus is not None and bad_modulus % p == 0:
        raise BadPrime(f"p={p} divides the excluded modulus {bad_modulus}")
    if nbound is None:
        nbound = h.max_n
    _check_range((h,), nbound)
    c = Fraction(_lookup(cp, p))
    chi = Fraction(_lookup(chi_p, p))
    pk = Fraction(p) ** (k - 1)
    checked = 0
    for n in range(1, nbound // p + 1):
        tail = h[n // p] if n % p == 0 else 0
        num = h[n * p] - c * h[n] + chi * pk * tail
        need = (k - 1) * vp(n * p, p)
        v = vp(num, p)
        checked += 1
        if v < need:
            return AsdResult(False, p, checked, n, num, v, need)
    return AsdResult(True, p, checked)


# -- twists ------------------------------------------------------------------------------


@dataclass(frozen=True)
class TwistPattern:
    modulus: int
    signs: dict = field(hash=False)  # residue class mod `modulus` -> +1 / -1
    discriminant: int | None = None  # D with sign(p) = (D | p), when one fits

    def sign(self, p: int) -> int | None:
        return self.signs.get(p % self.modulus)


def _fundamental_discriminants(bound: int = 24) -> list[int]:
    out = []
    for D in range(-bound, bound + 1):
        if D in (0, 1):
            continue
        if D % 4 == 1 and _squarefree(D):
            out.append(D)
        elif D % 4 == 0 and (D // 4) % 4 in (2, 3) and _squarefree(D // 4):
            out.append(D)
    return sorted(out, key=lambda d: (abs(d), d))


def _squarefree(n: int) -> bool:
    n = abs(n)
    p = 2
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        p += 1
    return True


FUNDAMENTAL_DISCRIMINANTS = _fundamental_discriminants(24)


def twist_detect(a_p, c_p, primes: Iterable[int], max_modulus: int = 24) -> TwistPattern | None:
    """Find signs ``u_p`` with ``c_p == u_p a_p (mod p^2)`` that depend only on p mod m.

    Primes where both values vanish mod p^2 place no constraint.  Returns the
    smallest modulus ``m <= max_modulus`` that works, or None.
    """
    from .ligozat import kronecker

    signs: dict[int, int] = {}
    for p in primes:
        m = p * p
        a = residue(_lookup(a_p, p), m)
        c = residue(_lookup(c_p, p), m)
        if a == 0 and c == 0:
            continue
        if c == a:
            signs[p] = 1
        elif c == (-a) % m:
            signs[p] = -1
        else:
            return None
    for mod in range(1, max_modulus + 1):
        classes: dict[int, int] = {}
        if all(classes.setdefault(p % mod, s) == s for p, s in signs.items()):
            disc = None
            for D in [1] + FUNDAMENTAL_DISCRIMINANTS:
                if all(kronecker(D, p) == s for p, s in signs.items()):
                    disc = D
                    break
            return TwistPattern(mod, dict(sorted(classes.items())), disc)
    return None
