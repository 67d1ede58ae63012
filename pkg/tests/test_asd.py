import math
import random
from fractions import Fraction

import pytest

from asdeta.asd import (
    BadPrime,
    Case,
    CoefficientTable,
    InsufficientCoefficients,
    asd_check,
    case1_scan,
    case2_scan,
    centered,
    prime_report,
    ratio_scan,
    residue,
    twist_detect,
    vp,
)
from asdeta.catalog import block, newform_f

PRIMES = [5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]


def table(coeffs, max_n=None, name="t"):
    return CoefficientTable(name, 1, coeffs, max_n or max(coeffs))


@pytest.fixture(scope="module")
def eta46():
    return block("eta(q^4)^6").table(500)


class TestArithmetic:
    def test_vp(self):
        assert vp(Fraction(50, 3), 5) == 2
        assert vp(Fraction(1, 27), 3) == -3
        assert vp(0, 7) == math.inf

    def test_residue_of_fraction(self):
        assert residue(Fraction(1, 3), 25) * 3 % 25 == 1
        assert centered(24, 25) == -1
        assert centered(12, 25) == 12

    def test_residue_needs_unit_denominator(self):
        with pytest.raises(ValueError):
            residue(Fraction(1, 5), 25)


class TestScans:
    def test_multiplicative_sequence_is_case_one(self):
        # a_n = 6^(v) for n = 5^v m behaves like a Hecke eigenvalue 6 at p = 5
        t = table({n: (6 ** vp(n, 5) if n % 2 else 0) for n in range(1, 101)})
        assert case1_scan(t, 5, 100) == 6
        assert prime_report(t, None, 5, 100).case is Case.ONE

    def test_skipped_nonunits(self):
        t = table({1: 1, 2: 5, 3: 1, 5: 3, 10: 7, 15: 3}, max_n=15)
        s = ratio_scan(t, t, 5, 15)
        assert s.skipped == 1 and s.witnesses == 2

    def test_witness_minimum(self):
        t = table({1: 1, 5: 4}, max_n=9)
        assert case1_scan(t, 5, 9, witness_min=2) is None
        assert case1_scan(t, 5, 9, witness_min=1) == 4

    def test_swapped_pair_is_case_two(self):
        # a_{5n} = 2 b_n and b_{5n} = 3 a_n, while neither ratio a_{5n}/a_n nor b_{5n}/b_n is constant
        b_low = {1: 1, 2: 2, 3: 3, 4: 4}
        a = table({**{n: 1 for n in b_low}, **{5 * n: 2 * v for n, v in b_low.items()}}, max_n=20)
        b = table({**b_low, **{5 * n: 3 for n in b_low}}, max_n=20)
        assert case1_scan(a, 5, 20) is None
        c2 = case2_scan(a, b, 5, 20)
        assert (c2.ab, c2.ba, c2.cp_sq) == (2, 3, 6)
        assert c2.alpha_sq == centered(2 * pow(3, -1, 25), 25)
        r = prime_report(a, b, 5, 20)
        assert r.case is Case.TWO and not r.degenerate

    def test_zero_constants_are_degenerate_case_two(self):
        a = table({1: 1, 2: 1, 3: 1, 4: 1}, max_n=20)
        b = table({1: 1, 2: 2, 3: 1, 4: 2}, max_n=20)
        r = prime_report(a, b, 5, 20)
        assert r.case is Case.TWO and r.degenerate and r.label() == "CaseTwo(degenerate)"

    def test_random_tables_do_not_match(self):
        rng = random.Random(7)
        for _ in range(20):
            a = table({n: rng.randint(-10**6, 10**6) for n in range(1, 501)})
            b = table({n: rng.randint(-10**6, 10**6) for n in range(1, 501)})
            assert prime_report(a, b, 5, 500).case is Case.NONE

    def test_eigenform_against_itself(self, eta46):
        for p in PRIMES:
            r = prime_report(eta46, eta46, p, 500)
            assert r.case is Case.ONE
            assert (r.constant - eta46[p]) % (p * p) == 0

    def test_not_enough_coefficients(self, eta46):
        with pytest.raises(InsufficientCoefficients):
            ratio_scan(eta46, eta46, 5, 600)


class TestAsdCheck:
    @staticmethod
    def chi(p):
        return 1 if p % 4 == 1 else -1

    def test_eigenform_satisfies_its_own_relation(self, eta46):
        for p in PRIMES:
            assert asd_check(eta46, eta46, self.chi, 3, p, 500).ok

    def test_perturbation_is_caught(self, eta46):
        bad = eta46.with_coefficient(65, eta46[65] + 1)
        res = asd_check(bad, eta46, self.chi, 3, 5, 500)
        assert not res.ok and res.witness == 13

    def test_wrong_cp_fails(self, eta46):
        res = asd_check(eta46, {5: 6}, self.chi, 3, 5, 500)
        assert not res.ok and res.witness == 1

    def test_bad_prime(self, eta46):
        with pytest.raises(BadPrime):
            asd_check(eta46, eta46, self.chi, 3, 7, 500, bad_modulus=14)


class TestTwistDetect:
    def test_f_is_the_minus_three_twist(self, eta46):
        f = newform_f(50)
        pat = twist_detect(eta46, f, [p for p in PRIMES if p < 50])
        assert pat is not None and pat.discriminant == -3

    def test_not_a_twist(self, eta46):
        assert twist_detect(eta46, {p: 2 for p in PRIMES}, PRIMES) is None
