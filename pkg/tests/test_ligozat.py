import json
from fractions import Fraction

import pytest

from asdeta.eta import NonIntegralExponents, ScaleNotDividingLevel, parse_quotient
from asdeta.ligozat import (
    NotCoprime,
    Verdict,
    character_eval,
    check_ligozat,
    kronecker,
    report_json,
    squarefree_part,
)

FACTOR = "eta(q^2)^6/(eta(q)^4*eta(q^4)^2)"


def primes_below(n):
    return [p for p in range(3, n) if all(p % d for d in range(2, p))]


class TestKronecker:
    @pytest.mark.parametrize("p", primes_below(200))
    def test_legendre_by_euler_criterion(self, p):
        for a in range(-30, 60):
            expected = 0 if a % p == 0 else (1 if pow(a, (p - 1) // 2, p) == 1 else -1)
            assert kronecker(a, p) == expected

    def test_at_two(self):
        # (a|2) depends on a mod 8
        assert [kronecker(a, 2) for a in (1, 3, 5, 7, 4)] == [1, -1, -1, 1, 0]

    def test_multiplicative_in_the_bottom(self):
        for a in (-4, -3, 5, 8, 12):
            for m in range(1, 30):
                for n in range(1, 30):
                    assert kronecker(a, m * n) == kronecker(a, m) * kronecker(a, n)

    def test_negative_bottom(self):
        assert kronecker(-1, -1) == -1
        assert kronecker(1, 0) == 1 and kronecker(2, 0) == 0

    def test_squarefree_part(self):
        assert squarefree_part(12) == 3
        assert squarefree_part(-50) == -2
        assert squarefree_part(Fraction(1, 4)) == 1


class TestCriterion:
    def test_level_16_passes(self):
        r = check_ligozat(parse_quotient(FACTOR), 16)
        assert r.verdict is Verdict.GAMMA0
        assert (r.sum_delta, r.sum_codelta, r.sum_exponents) == (0, -24, 0)
        assert r.even_exponents

    def test_level_8_fails_condition_two(self):
        r = check_ligozat(parse_quotient(FACTOR), 8)
        assert r.verdict is Verdict.FAILS
        assert r.cond_delta and r.cond_weight0 and not r.cond_codelta
        assert r.sum_codelta == -12

    def test_mod_8_variant(self):
        eq = parse_quotient("eta(q^4)^2*eta(q^8)^4/(eta(q)^4*eta(q^2)^2)")
        assert check_ligozat(eq, 8).verdict is Verdict.FAILS
        assert check_ligozat(eq, 8, modulus=8).verdict is Verdict.GAMMA0_CAP_GAMMA6
        assert check_ligozat(parse_quotient(FACTOR), 8, modulus=8).verdict is Verdict.FAILS

    def test_nonzero_weight_fails(self):
        assert not check_ligozat(parse_quotient("eta(q)^24"), 1).passed

    def test_character(self):
        r = check_ligozat(parse_quotient("eta(q^4)^4*eta(q^6)^3/(eta(q)^4*eta(q^2)^3)"), 12)
        assert r.passed
        assert r.character_discriminant == 3
        assert all(character_eval(r, a) == kronecker(3, a) for a in (1, 5, 7, 11, 13))
        with pytest.raises(NotCoprime):
            character_eval(r, 3)

    def test_errors(self):
        with pytest.raises(NonIntegralExponents):
            check_ligozat(parse_quotient("cbrt(eta(q))"), 8)
        with pytest.raises(ScaleNotDividingLevel):
            check_ligozat(parse_quotient("eta(q^16)"), 8)
        with pytest.raises(ValueError):
            check_ligozat(parse_quotient(FACTOR), 16, modulus=12)

    def test_json(self):
        d = json.loads(report_json(check_ligozat(parse_quotient(FACTOR), 16)))
        assert d["verdict"] == "ModularFunctionGamma0N"
        assert d["terms"] == [[1, -4], [2, 6], [4, -2]]
