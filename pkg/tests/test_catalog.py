from fractions import Fraction

import pytest

from asdeta.asd import CoefficientTable, case1_scan, case2_scan
from asdeta.catalog import (
    UnknownName,
    block,
    chi_f,
    figures,
    kronecker_character,
    legendre,
    ligozat_factor,
    names,
    newform_f,
    t_family_identities,
    twist,
    worked_example_tables,
)
from asdeta.eta import parse_quotient

F_PRINTED = {1: 1, 5: 6, 13: 10, 17: 30, 25: 11, 29: -42, 37: -70, 41: -18, 49: 49}


class TestBlocks:
    @pytest.mark.parametrize("name", names())
    def test_printed_prefixes(self, name):
        assert block(name).prefix_matches()

    def test_b_head(self):
        assert block("b").expand(4).dense(0, 4) == [1, 2, 4, 2]

    def test_e_b_quotient(self):
        assert block("E_b").quotient == parse_quotient("eta(q^2)^8*eta(q^8)^4/eta(q^4)^6")

    def test_aliases_and_unknown(self):
        with pytest.raises(UnknownName):
            block("zeta")

    def test_t_product_identity(self):
        t, u, v = (block(n).expand(50) for n in ("t", "(t+1)/2t", "(t+1)/2"))
        assert not (t * u - v).truncate(50)

    @pytest.mark.parametrize("name", list(t_family_identities(20)))
    def test_t_family(self, name):
        lhs, rhs = t_family_identities(50)[name]
        assert lhs == rhs


class TestNewform:
    def test_printed_expansion(self):
        f = newform_f(49)
        assert {n: int(c) for n, c in f.items()} == F_PRINTED

    def test_support(self):
        f = newform_f(200)
        assert all(f[n] == 0 for n in range(1, 201) if n % 3 == 0 or n % 2 == 0)

    def test_hecke_recurrence(self):
        f = newform_f(200)
        for p in [p for p in range(2, 48) if all(p % d for d in range(2, p))]:
            for n in range(1, 200 // p + 1):
                tail = f[n // p] if n % p == 0 else 0
                assert f[n * p] == f[p] * f[n] - chi_f(p) * p * p * tail

    def test_cm_vanishing(self):
        f = newform_f(50)
        assert all(f[p] == 0 for p in (7, 11, 19, 23, 31, 43, 47))

    def test_nebentypus(self):
        assert [chi_f(p) for p in (2, 3, 5, 7)] == [0, 0, 1, -1]


class TestTwist:
    def test_trivial(self):
        t = block("eta(q^4)^6").table(60)
        assert twist(t, 1, lambda n: 1).items() == t.items()

    def test_double_twist(self):
        t = block("eta(q^4)^6").table(120)
        tt = twist(twist(t, 3, legendre(3)), 3, legendre(3))
        assert tt.items() == [(n, c) for n, c in t.items() if n % 3]

    def test_kronecker_character_matches_legendre(self):
        chi = kronecker_character(-3)
        assert all(chi(n) == legendre(3)(n) for n in range(1, 50))


class TestFigures:
    def test_examples(self):
        r = figures(3)[0]
        assert r.h1.tuple.exponents == (-8, 13, 8, 5) and r.h2.tuple.exponents == (8, 5, -8, 13)
        assert figures(1)[0].h1.tuple.exponents == (4, 7, -4, 11)
        assert figures(4)[1].h1.tuple.exponents == (8, -12, 22, 0)

    def test_all_weight_three(self):
        for k in (1, 2, 3, 4):
            for r in figures(k):
                assert r.h1.tuple.weight() == 3 and r.h2.tuple.weight() == 3

    def test_mismatch_flags(self):
        flagged = {(k, r.row) for k in (1, 2, 3, 4) for r in figures(k) if r.mismatch}
        assert flagged == {(2, 1), (2, 3), (4, 2), (4, 3), (4, 4)}

    def test_figure_two_rows_one_and_three_swap_labels(self):
        r1, _, r3, _ = figures(2)
        assert r1.h1.label_quotient() == r3.h1.tuple.to_eta()
        assert r1.h2.label_quotient() == r3.h2.tuple.to_eta()
        # row 3's labels fit row 1's tuples with h1 and h2 exchanged
        assert r3.h1.label_quotient() == r1.h2.tuple.to_eta()
        assert r3.h2.label_quotient() == r1.h1.tuple.to_eta()

    def test_figure_four_row_four_fits_with_e_b(self):
        r = figures(4)[3]
        swap = block("E_b").quotient / block("E_a").quotient
        assert r.h1.label_quotient() * swap == r.h1.tuple.to_eta()


class TestWorkedExample:
    def test_factorizations(self):
        h1, h2 = (e.tuple.to_eta() for e in (figures(2)[1].h1, figures(2)[1].h2))
        g = ligozat_factor()
        assert block("H1").quotient == g * h2
        assert block("H2").quotient == g.inverse() * h1

    def test_h2_is_sign_twist_of_h1(self):
        a, b = worked_example_tables(200)
        assert all(b[n] == (-1) ** (n + 1) * a[n] for n in range(1, 201))

    def test_scanned_constants(self):
        # regression on the computed table: Case 1 constants at p = 1 mod 12,
        # cross-ratio constants at p = 5 mod 12, zeros at p = 3 mod 4
        a, b = worked_example_tables(500)
        assert [case1_scan(a, p, 500) for p in (13, 37)] == [10, -70]
        assert [case1_scan(b, p, 500) for p in (13, 37)] == [10, -70]
        for p, c in ((5, 6), (17, 30), (29, -42), (41, -18)):
            assert case1_scan(a, p, 500) is None
            c2 = case2_scan(a, b, p, 500)
            assert (c2.ab, c2.ba) == (c, c)
        for p in (7, 11, 19, 23, 31, 43, 47):
            assert case1_scan(a, p, 500) == 0
            assert case2_scan(a, b, p, 500).ab == 0
