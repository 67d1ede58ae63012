"""Named forms: weight-1 blocks for Gamma_1(6)/Gamma_1(12), the t-family for
Gamma_1(4) cap Gamma_0(8), the reference tuple tables, H1/H2 and the level-144 newform.

Every entry carries exact eta-quotient data; printed expansion prefixes are
stored as given so they can be checked against the computed expansions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable

from .asd import CoefficientTable
from .eta import BASES, EtaQuotient, TupleSpec, expand, parse_quotient
from .ligozat import kronecker
from .qseries import FracSeries, invert, nth_root


class UnknownName(KeyError):
    pass


@dataclass(frozen=True)
class NamedForm:
    name: str
    quotient: EtaQuotient
    prefix: dict = field(default_factory=dict, hash=False)  # exponent -> printed coefficient
    group_label: str = ""
    source: str = ""
    level: int | None = None
    nebentypus: int | None = None  # D with chi(p) = (D | p); None when not recorded
    twist: int | None = None  # fundamental discriminant of a quadratic twist, if any

    @property
    def weight(self) -> Fraction:
        return self.quotient.weight()

    def expand(self, T) -> FracSeries:
        s = expand(self.quotient, T)
        if self.twist is None:
            return s
        chi = kronecker_character(self.twist)
        return s.map_coefficients(lambda e, c: chi(e) * c)

    def table(self, T: int) -> CoefficientTable:
        if self.twist is not None:
            base = CoefficientTable.from_series(self.name, expand(self.quotient, T + 1), mu=1)
            return twist(base, abs(self.twist), kronecker_character(self.twist), form_id=self.name)
        return CoefficientTable.from_series(self.name, expand(self.quotient, T + 1))

    def chi(self, p: int) -> int:
        """Nebentypus at p, as a character modulo the level."""
        if self.level is not None and self.level % p == 0:
            return 0
        if self.nebentypus is None:
            raise ValueError(f"{self.name}: no nebentypus recorded")
        return kronecker(self.nebentypus, p)

    def prefix_matches(self) -> bool:
        if not self.prefix:
            return True
        top = max(self.prefix) + 1
        if self.twist is not None:
            t = self.table(int(top))
            return all(t[int(x)] == c for x, c in self.prefix.items())
        s = self.expand(top)
        return all(s.coefficient(x.numerator, x.denominator) == c for x, c in self.prefix.items())


def _prefix(*pairs) -> dict:
    return {Fraction(e): Fraction(c) for e, c in pairs}


_Q = parse_quotient

# blocks a..e carry a printed prefix; for e the q^2 coefficient is not printed and
# the ellipsis starts after q^3, so only the printed exponents are stored
_ENTRIES = [
    NamedForm("a", _Q("eta(q)*eta(q^6)^6/(eta(q^2)^2*eta(q^3)^3)"),
              _prefix((1, 1), (2, -1), (3, 1), (4, 1)), "Gamma_1(6), weight 1", "weight-1 blocks, a"),
    NamedForm("b", _Q("eta(q^2)*eta(q^3)^6/(eta(q)^2*eta(q^6)^3)"),
              _prefix((0, 1), (1, 2), (2, 4), (3, 2)), "Gamma_1(6), weight 1", "weight-1 blocks, b"),
    NamedForm("c", _Q("eta(q^2)^6*eta(q^3)/(eta(q)^3*eta(q^6)^2)"),
              _prefix((0, 1), (1, 3), (2, 3), (3, 3)), "Gamma_1(6), weight 1", "weight-1 blocks, c"),
    NamedForm("d", _Q("eta(q)^6*eta(q^6)/(eta(q^2)^3*eta(q^3)^2)"),
              _prefix((0, 1), (1, -6), (2, 12), (3, -6)), "Gamma_1(6), weight 1", "weight-1 blocks, d"),
    NamedForm("e", _Q("eta(q)^2*eta(q^3)^2/(eta(q^2)*eta(q^6))"),
              _prefix((0, 1), (1, -2), (3, -2)), "Gamma_1(12), weight 1", "weight-1 blocks, e"),
    NamedForm("t", _Q("eta(q)^8*eta(q^4)^4/eta(q^2)^12"), {}, "M_0(Gamma_1(4) cap Gamma_0(8))", "t-family, t"),
    NamedForm("(t+1)/2", _Q("eta(q)^4*eta(q^4)^14/(eta(q^2)^14*eta(q^8)^4)"), {},
              "M_0(Gamma_1(4) cap Gamma_0(8))", "t-family, (t+1)/2"),
    NamedForm("(t+1)/2t", _Q("eta(q^4)^10/(eta(q)^4*eta(q^2)^2*eta(q^8)^4)"), {},
              "M_0(Gamma_1(4) cap Gamma_0(8))", "t-family, (t+1)/(2t)"),
    NamedForm("4(t+1)/(1-t)", _Q("eta(q^4)^12/(eta(q^2)^4*eta(q^8)^8)"), {},
              "M_0(Gamma_1(4) cap Gamma_0(8))", "t-family, 4(t+1)/(1-t)"),
    NamedForm("sqrt(t)", _Q("eta(q)^4*eta(q^4)^2/eta(q^2)^6"), {}, "M_0(Gamma_1(16))", "t-family, sqrt(t)"),
    NamedForm("sqrt((t+1)/2)", _Q("eta(q)^2*eta(q^4)^7/(eta(q^2)^7*eta(q^8)^2)"), {},
              "M_0(Gamma_1(16))", "t-family, sqrt((t+1)/2)"),
    NamedForm("E_a", _Q("eta(q^2)^6*eta(q^4)^4/eta(q)^4"), {}, "M_3(Gamma_1(4) cap Gamma_0(8))",
              "t-family, E_a", level=8, nebentypus=-4),
    NamedForm("E_b", _Q("eta(q^2)^8*eta(q^8)^4/eta(q^4)^6"), {}, "M_3(Gamma_1(4) cap Gamma_0(8))",
              "t-family, E_b", level=8, nebentypus=-4),
    NamedForm("H1", _Q("cbrt(eta(q^2)^12*eta(q^4)^14/eta(q)^8)"), {},
              "non-congruence subgroup of Gamma_0(16)", "worked example, H1"),
    NamedForm("H2", _Q("cbrt(eta(q)^8*eta(q^4)^22/eta(q^2)^12)"), {},
              "non-congruence subgroup of Gamma_0(16)", "worked example, H2"),
    NamedForm("eta(q^4)^6", _Q("eta(q^4)^6"), _prefix((1, 1), (5, -6), (9, 9)), "S_3(Gamma_0(16), (-4|.))",
              "worked example, level-16 eta-product", level=16, nebentypus=-4),
    NamedForm("f", _Q("eta(q^4)^6"),
              _prefix((1, 1), (5, 6), (13, 10), (17, 30), (25, 11), (29, -42), (37, -70), (41, -18), (49, 49)),
              "S_3(Gamma_0(144), (-4|.))", "worked example, newform f", level=144, nebentypus=-4, twist=-3),
]

_ALIASES = {
    "(t+1)/(2t)": "(t+1)/2t",
    "√t": "sqrt(t)",
    "√((t+1)/2)": "sqrt((t+1)/2)",
    "4(t+1)/(1−t)": "4(t+1)/(1-t)",
    "H₁": "H1",
    "H₂": "H2",
}

CATALOG = {f.name: f for f in _ENTRIES}


def block(name: str) -> NamedForm:
    key = _ALIASES.get(name, name)
    try:
        return CATALOG[key]
    except KeyError:
        raise UnknownName(name) from None


def names() -> list[str]:
    return list(CATALOG)


# -- characters and twists -----------------------------------------------------------


def kronecker_character(D: int) -> Callable[[int], int]:
    """``n -> (D | n)``; for D = -3 this is the Legendre character modulo 3."""
    return lambda n: kronecker(D, n)


def legendre(p: int) -> Callable[[int], int]:
    return lambda n: kronecker(n, p)


def twist(c: CoefficientTable, m: int, chi: Callable[[int], int], form_id: str | None = None) -> CoefficientTable:
    """Coefficient at n becomes ``chi(n mod m) * a_n``."""
    data = {n: chi(n % m) * x for n, x in c.items()}
    return CoefficientTable(form_id or f"{c.form_id} x chi_{m}", c.mu, data, c.max_n)


def newform_f(T: int) -> CoefficientTable:
    """Twist of eta(q^4)^6 by the Legendre character mod 3, coefficients a_1..a_T."""
    if T < 2:
        raise ValueError("T must be at least 2")
    base = CoefficientTable.from_series("eta(q^4)^6", expand(_Q("eta(q^4)^6"), T + 1), mu=1)
    return twist(base, 3, legendre(3), form_id="f")


def chi_f(p: int) -> int:
    """Nebentypus of f as a character mod 144: the nontrivial character mod 4."""
    return block("f").chi(p)


# -- t-family identities -------------------------------------------------------------


def t_family_identities(T: int = 50) -> dict[str, tuple[FracSeries, FracSeries]]:
    """Both sides of each closed form to ``O(q^T)``: rational function of t vs eta-quotient."""
    t = block("t").expand(T + 2)
    one = FracSeries.one(None)
    half = Fraction(1, 2)
    tp1 = t + one
    pairs = {
        "(t+1)/2": (tp1 * half, block("(t+1)/2").expand(T)),
        "(t+1)/2t": (tp1 * invert(t * 2), block("(t+1)/2t").expand(T)),
        "4(t+1)/(1-t)": (tp1 * 4 * invert(one - t), block("4(t+1)/(1-t)").expand(T)),
        "sqrt(t)": (nth_root(t, 2), block("sqrt(t)").expand(T)),
        "sqrt((t+1)/2)": (nth_root(tp1 * half, 2), block("sqrt((t+1)/2)").expand(T)),
        "E_b": (t * 2 * invert(tp1) * block("E_a").expand(T + 2), block("E_b").expand(T)),
    }
    return {k: (a.truncate(T), b.truncate(T)) for k, (a, b) in pairs.items()}


# -- reference tables ------------------------------------------------------------------


@dataclass(frozen=True)
class FigureEntry:
    tuple: TupleSpec
    label: str
    label_exponents: tuple  # ((block name, exponent), ...)

    def label_quotient(self) -> EtaQuotient:
        q = EtaQuotient()
        for name, e in self.label_exponents:
            q = q.combine(block(name).quotient.scale(e))
        return q

    @property
    def mismatch(self) -> bool:
        return self.label_quotient() != self.tuple.to_eta()


@dataclass(frozen=True)
class FigureRow:
    figure: int
    row: int
    h1: FigureEntry
    h2: FigureEntry
    group_label: str

    @property
    def bases(self) -> tuple[int, ...]:
        return self.h1.tuple.bases

    @property
    def mismatch(self) -> bool:
        return self.h1.mismatch or self.h2.mismatch


def _entry(bases, exps, label, *lab):
    return FigureEntry(TupleSpec(bases, exps), label, tuple((n, Fraction(e)) for n, e in lab))


_F = Fraction
_B6, _B8 = BASES[6], BASES[8]

_FIGURES = {
    1: ("subgroups of Gamma_1(12) (Verrill et al., Table 14)", [
        (_entry(_B6, (4, 7, -4, 11), "(cbrt(b/d)) acd", ("b", _F(1, 3)), ("d", _F(-1, 3)), ("a", 1), ("c", 1), ("d", 1)),
         _entry(_B6, (-4, 11, 4, 7), "(cbrt(b/d))^2 acd", ("b", _F(2, 3)), ("d", _F(-2, 3)), ("a", 1), ("c", 1), ("d", 1))),
        (_entry(_B6, (13, -2, -7, 14), "(cbrt(b/c)) acd", ("b", _F(1, 3)), ("c", _F(-1, 3)), ("a", 1), ("c", 1), ("d", 1)),
         _entry(_B6, (14, -7, -2, 13), "(cbrt(b/c))^2 acd", ("b", _F(2, 3)), ("c", _F(-2, 3)), ("a", 1), ("c", 1), ("d", 1))),
    ]),
    2: ("subgroups of Gamma_0(8) cap Gamma_1(4) (Verrill et al., Table 13)", [
        (_entry(_B8, (-8, 20, 2, 4), "cbrt((t+1)/2) E_b", ("(t+1)/2", _F(1, 3)), ("E_b", 1)),
         _entry(_B8, (-4, 22, -8, 8), "cbrt((t+1)/2)^2 E_b", ("(t+1)/2", _F(2, 3)), ("E_b", 1))),
        (_entry(_B8, (-4, 6, 16, 0), "t^(1/3) E_a", ("t", _F(1, 3)), ("E_a", 1)),
         _entry(_B8, (4, -6, 20, 0), "t^(2/3) E_a", ("t", _F(2, 3)), ("E_a", 1))),
        (_entry(_B8, (4, 10, -4, 8), "cbrt((t+1)/2t) E_b", ("(t+1)/2t", _F(1, 3)), ("E_b", 1)),
         _entry(_B8, (8, -4, 10, 4), "cbrt((t+1)/2t)^2 E_b", ("(t+1)/2t", _F(2, 3)), ("E_b", 1))),
        (_entry(_B8, (0, 20, -6, 4), "cbrt(4(t+1)/(1-t)) E_b", ("4(t+1)/(1-t)", _F(1, 3)), ("E_b", 1)),
         _entry(_B8, (0, 16, 6, -4), "cbrt(4(t+1)/(1-t))^2 E_b", ("4(t+1)/(1-t)", _F(2, 3)), ("E_b", 1))),
    ]),
    3: ("subgroups of Gamma_1(12) forming AS-D bases", [
        (_entry(_B6, (-8, 13, 8, 5), "(cbrt(e/b)) abc", ("e", _F(1, 3)), ("b", _F(-1, 3)), ("a", 1), ("b", 1), ("c", 1)),
         _entry(_B6, (8, 5, -8, 13), "(cbrt(e/b))^2 ace", ("e", _F(2, 3)), ("b", _F(-2, 3)), ("a", 1), ("c", 1), ("e", 1))),
    ]),
    4: ("subgroups of Gamma_0(16) cap Gamma_1(4) forming AS-D bases", [
        (_entry(_B8, (-2, 23, -13, 10), "((t+1)/2t)^(1/6) E_b", ("(t+1)/2t", _F(1, 6)), ("E_b", 1)),
         _entry(_B8, (-10, 19, 7, 2), "((t+1)/2t)^(5/6) E_b", ("(t+1)/2t", _F(5, 6)), ("E_b", 1))),
        (_entry(_B8, (8, -12, 22, 0), "sqrt(t) E_a", ("sqrt(t)", 1), ("E_a", 1)),
         _entry(_B8, (-8, 12, 14, 0), "sqrt(t)^5 E_a", ("sqrt(t)", 5), ("E_a", 1))),
        (_entry(_B8, (0, -8, 30, -4), "(4(t+1)/(1-t))^(8/3) E_b", ("4(t+1)/(1-t)", _F(8, 3)), ("E_b", 1)),
         _entry(_B8, (0, 8, 6, 4), "t^(-2/3) E_b", ("t", _F(-2, 3)), ("E_b", 1))),
        (_entry(_B8, (2, 17, -11, 10), "((t+1)/2)^(1/6) E_a", ("(t+1)/2", _F(1, 6)), ("E_a", 1)),
         _entry(_B8, (10, -11, 17, 2), "((t+1)/2)^(5/6) E_a", ("(t+1)/2", _F(5, 6)), ("E_a", 1))),
    ]),
}


def figures(which: int) -> list[FigureRow]:
    if which not in _FIGURES:
        raise UnknownName(f"figure {which}")
    label, rows = _FIGURES[which]
    return [FigureRow(which, i + 1, h1, h2, label) for i, (h1, h2) in enumerate(rows)]


def match_candidates() -> list[NamedForm]:
    """Integral weight-3 eta-products from the catalog, tried as congruence partners."""
    return [f for f in _ENTRIES if f.twist is None and f.quotient.is_integral() and f.weight == 3]


# -- the worked example -----------------------------------------------------------------


@lru_cache(maxsize=8)
def worked_example_tables(nbound: int = 500) -> tuple[CoefficientTable, CoefficientTable]:
    return block("H1").table(nbound), block("H2").table(nbound)


def ligozat_factor() -> EtaQuotient:
    """The weight-0 factor relating H1, H2 to the second row of the Gamma_0(8) table."""
    return _Q("eta(q^2)^6/(eta(q)^4*eta(q^4)^2)")
