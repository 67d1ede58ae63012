"""One test per acceptance criterion; the terminal summary prints PASS/FAIL per criterion."""

import itertools
import os
import random
import time
import warnings
from fractions import Fraction

import pytest

from asdeta.asd import Case, asd_check, case1_scan, case2_scan
from asdeta.catalog import (
    block,
    chi_f,
    figures,
    ligozat_factor,
    newform_f,
    t_family_identities,
    worked_example_tables,
)
from asdeta.eta import BASES, EtaQuotient, divisors, euler_function, gamma0_index, total_cusp_order
from asdeta.ligozat import check_ligozat, kronecker
from asdeta.qseries import FracSeries, invert, nth_root, power
from asdeta.search import SearchConfig, SearchStats, pair_scan, primes_between, search

PRIMES = primes_between(5, 47)
NB = 500


def test_criterion_1_block_prefixes():
    t0 = time.perf_counter()
    printed = {
        "a": [0, 1, -1, 1, 1],
        "b": [1, 2, 4, 2],
        "c": [1, 3, 3, 3],
        "d": [1, -6, 12, -6],
    }
    for name, head in printed.items():
        assert block(name).expand(len(head)).dense(0, len(head)) == head, name
    for name in "abcde":
        assert block(name).prefix_matches(), name
    assert time.perf_counter() - t0 < 1


def test_criterion_2_t_family():
    t0 = time.perf_counter()
    ids = t_family_identities(50)
    assert set(ids) == {"(t+1)/2", "(t+1)/2t", "4(t+1)/(1-t)", "sqrt(t)", "sqrt((t+1)/2)", "E_b"}
    for name, (lhs, rhs) in ids.items():
        assert lhs.precision == rhs.precision == 50, name
        assert lhs == rhs, name
    assert time.perf_counter() - t0 < 5


def test_criterion_3_ligozat():
    g = ligozat_factor()
    assert check_ligozat(g, 16).passed
    r8 = check_ligozat(g, 8)
    assert not r8.passed
    assert r8.cond_delta and r8.cond_weight0 and not r8.cond_codelta
    assert r8.sum_codelta == -12 and r8.sum_codelta % 24 == 12


def test_criterion_4_newform_f():
    f = newform_f(200)
    printed = {1: 1, 5: 6, 13: 10, 17: 30, 25: 11, 29: -42, 37: -70, 41: -18, 49: 49}
    assert {n: int(c) for n, c in f.items() if n < 50} == printed
    # nebentypus: the character mod 4 viewed at level 144, so it vanishes at 2 and 3
    for p in primes_between(2, 47):
        chi = chi_f(p)
        assert chi == (kronecker(-4, p) if p > 3 else 0)
        for n in range(1, 200 // p + 1):
            tail = f[n // p] if n % p == 0 else 0
            assert f[n * p] == f[p] * f[n] - chi * p * p * tail, (p, n)


# the reference constants table, literally
PRINTED_CASE1 = {5: 6, 17: 30, 29: -42, 41: -18}
PRINTED_CASE2 = {7: 0, 11: 0, 19: 0, 23: 0, 31: 0, 43: 0, 47: 0, 13: 10, 37: -70}


def test_criterion_5_worked_example_table():
    t0 = time.perf_counter()
    a, b = worked_example_tables(NB)
    got1 = {}
    for p in PRIMES:
        ca, cb = case1_scan(a, p, NB), case1_scan(b, p, NB)
        got1[p] = ca if ca == cb else None
    got2 = {}
    for p in PRIMES:
        c2 = case2_scan(a, b, p, NB)
        got2[p] = None if c2 is None or c2.ab != c2.ba else c2.ab
    want1 = {p: PRINTED_CASE1.get(p) for p in PRIMES}
    elapsed = time.perf_counter() - t0
    assert elapsed < 120
    bad1 = {p: (got1[p], want1[p]) for p in PRIMES if got1[p] != want1[p]}
    bad2 = {p: (got2[p], v) for p, v in PRINTED_CASE2.items() if got2[p] != v}
    assert not bad1 and not bad2, (
        f"case1_scan (computed, printed): {bad1}; case2_scan (computed, printed): {bad2}"
    )


def test_criterion_6_asd_definition():
    a, b = worked_example_tables(NB)
    f = newform_f(NB)
    for p in PRIMES:
        if p % 12 != 5:
            assert asd_check(a, f, chi_f, 3, p, NB).ok, p
            assert asd_check(b, f, chi_f, 3, p, NB).ok, p
    findings = []
    for p in (p for p in PRIMES if p % 12 == 5):
        s = a.plus(b, 1)
        assert asd_check(s, f, chi_f, 3, p, NB).ok, ("H1+H2", p)
        r = asd_check(a.plus(b, p * p + 1), f, chi_f, 3, p, NB)
        if not r.ok:
            findings.append((p, r.witness, r.valuation, r.required))
    for p, n, v, need in findings:
        msg = (f"FINDING: H1+(p^2+1)H2 fails the ASD relation with f at p={p}: "
               f"first failing n={n}, valuation {v} < required {need}")
        print(msg)
        warnings.warn(msg)
    # the finding is part of the result: freeze it so a change is noticed
    assert findings == [(5, 10, 2, 4)]


def test_criterion_7_figures():
    t0 = time.perf_counter()
    flagged = set()
    for k in (1, 2, 3, 4):
        for row in figures(k):
            for e in (row.h1, row.h2):
                assert e.tuple.to_eta().weight() == 3
            if row.mismatch:
                flagged.add((k, row.row))
            if k in (3, 4):
                cfg = SearchConfig(bases=row.bases)
                pairs = pair_scan([row.h1.tuple, row.h2.tuple], cfg)
                want = {row.h1.tuple.exponents, row.h2.tuple.exponents}
                hit = [p for p in pairs if {p.h1.exponents, p.h2.exponents} == want]
                assert hit, (k, row.row)
                assert all(r.case in (Case.ONE, Case.TWO) for r in hit[0].per_prime)
                assert [r.p for r in hit[0].per_prime] == PRIMES
    assert (4, 2) in flagged
    print(f"label/tuple mismatches flagged: {sorted(flagged)}")
    assert time.perf_counter() - t0 < 15 * 60


def _random_series(rng, T):
    return FracSeries.from_list([Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(T)], trunc=T)


def test_criterion_8_property_suites():
    t0 = time.perf_counter()
    rng = random.Random(20261016)
    T = 16
    for _ in range(30):
        a, b, c = (_random_series(rng, T) for _ in range(3))
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a * b == b * a
        u = a.shift(0) + FracSeries.one(T) * (1 - a[0])  # unit constant term 1
        for n in (2, 3, 5):
            assert power(nth_root(u, n), n).agrees_with(u)
            assert nth_root(power(u, n), n).agrees_with(u)
        assert (u * invert(u)).agrees_with(FracSeries.one(T))
    naive = [1] + [0] * 199
    for n in range(1, 200):
        for i in range(199, n - 1, -1):
            naive[i] -= naive[i - n]
    assert euler_function(200).dense(0, 200) == naive
    for p in (p for p in range(3, 200) if all(p % d for d in range(2, p))):
        for x in range(p):
            leg = 0 if x == 0 else (1 if pow(x, (p - 1) // 2, p) == 1 else -1)
            assert kronecker(x, p) == leg
    for N in (8, 12, 16, 24):
        for _ in range(50):
            terms = {d: rng.randint(-10, 10) for d in divisors(N)}
            terms[1] += sum(terms.values()) % 2
            eq = EtaQuotient(terms)
            assert total_cusp_order(eq, N) == eq.weight() * gamma0_index(N) / 12
    assert time.perf_counter() - t0 < 60


def test_criterion_9_search_rediscovery():
    t0 = time.perf_counter()
    jobs = min(4, os.cpu_count() or 1)
    cfg = SearchConfig(bases=BASES[8], bound=23, prime_max=47, n_bound=500, jobs=jobs)
    stats = SearchStats()
    pairs = search(cfg, stats=stats)
    hit = [p for p in pairs if {p.h1.exponents, p.h2.exponents} == {(-8, 12, 14, 0), (8, -12, 22, 0)}]
    assert hit
    pair = hit[0]
    assert pair.pattern is not None and pair.pattern.modulus == 12
    m = pair.matched_newform
    assert m is not None and (m.name, m.twist, m.strict) == ("eta(q^4)^6", -3, True)
    print(f"search: {stats.enumerated} tuples, {stats.cuspidal} cuspidal, {stats.after_screen} screened pairs, "
          f"{len(pairs)} reported; (H1,H2): {pair.pattern.describe()}, {m.describe()}")
    assert time.perf_counter() - t0 < 30 * 60
