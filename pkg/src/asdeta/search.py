"""Search for pairs of cube-rooted eta-quotients of weight 3 with ASD-basis behaviour.

Pipeline: enumerate exponent tuples -> keep those whose cube is a cusp form ->
screen every pair prime by prime on exact residues mod p^2 -> confirm the
survivors on exact coefficient tables -> unbounded-denominator filter ->
infer the p mod m pattern -> look for a matching congruence newform.

The screening is exact, not a heuristic: the coefficients of a cube root of an
integral eta-quotient lie in Z[1/3], so reducing mod p^2 for p >= 5 loses
nothing the scans look at.  Residues of ``prod_k (1 - q^k)^(j/3)`` are
precomputed once per prime, and each candidate is a product of four of them,
done with batched FFT convolutions.
"""

from __future__ import annotations

import itertools
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

from .asd import (
    FUNDAMENTAL_DISCRIMINANTS,
    Case,
    CoefficientTable,
    PrimeReport,
    asd_check,
    centered,
    prime_report,
    residue,
    vp,
)
from .catalog import NamedForm, kronecker_character, match_candidates
from .eta import BASES, EtaQuotient, TupleSpec, euler_function, expand, is_cuspidal
from .ligozat import kronecker
from .qseries import invert, nth_root

def primes_between(lo: int, hi: int) -> list[int]:
    return [p for p in range(max(lo, 2), hi + 1) if all(p % d for d in range(2, int(p**0.5) + 1))]


@dataclass(frozen=True)
class SearchConfig:
    bases: tuple[int, ...] = BASES[8]
    bound: int = 23
    weight_sum: int = 18
    prime_max: int = 47
    n_bound: int = 500
    denominator_filter: bool = True
    witness_min: int = 2
    cusp_filter: bool = True
    filter_window: int = 60
    filter_threshold: int = 1
    root: int = 3
    jobs: int = 1

    def __post_init__(self):
        if self.bound < 1:
            raise ValueError("exponent bound must be at least 1")
        object.__setattr__(self, "bases", tuple(self.bases))

    @property
    def level(self) -> int:
        return math.lcm(*self.bases)

    @property
    def primes(self) -> list[int]:
        # primes dividing the level or 6 are excluded
        return [p for p in primes_between(5, self.prime_max) if self.level % p]


# -- enumeration -------------------------------------------------------------------------


def enumerate_tuples(cfg: SearchConfig) -> Iterator[TupleSpec]:
    """Every integer tuple with components in [-B, B] summing to ``weight_sum``, lexicographically."""
    B, k = cfg.bound, len(cfg.bases)
    for head in itertools.product(range(-B, B + 1), repeat=k - 1):
        last = cfg.weight_sum - sum(head)
        if -B <= last <= B:
            yield TupleSpec(cfg.bases, head + (last,), cfg.root)


def cube_is_cuspidal(t: TupleSpec) -> bool:
    cube = EtaQuotient(zip(t.bases, t.exponents))
    return is_cuspidal(cube, math.lcm(*t.bases))


# -- unbounded denominators ---------------------------------------------------------------


@dataclass(frozen=True)
class FilterResult:
    keep: bool
    max_exponent: int
    profile: tuple[int, ...]  # p-adic denominator exponent of a_1, a_2, ...
    reason: str


def denominator_filter(t: TupleSpec, T: int = 60, p: int = 3, threshold: int = 1) -> FilterResult:
    """Keep a candidate whose p-power denominators exceed ``threshold`` and still grow
    over the second half of the first T coefficients."""
    eq = t.to_eta()
    s = expand(eq, eq.leading_exponent() + T).canonicalize()
    lead = s.valuation() if s else 0
    profile = tuple(max(0, -vp(s[lead + i], p)) if s[lead + i] else 0 for i in range(T))
    top = max(profile, default=0)
    half = len(profile) // 2
    growing = max(profile[half:], default=0) > max(profile[:half], default=0)
    if top <= threshold:
        return FilterResult(False, top, profile, f"{p}-adic denominators bounded by {p}^{top}")
    if not growing:
        return FilterResult(False, top, profile, "denominator exponent plateaus over the window")
    return FilterResult(True, top, profile, f"{p}-adic denominators reach {p}^{top} and keep growing")


# -- residue engine ----------------------------------------------------------------------------


@lru_cache(maxsize=4)
def _exact_root_powers(nlen: int, root: int):
    """``E^(1/root)`` and ``E^(-1/root)`` to ``O(q^nlen)`` with ``E = prod (1 - q^k)``."""
    e = euler_function(nlen)
    plus = nth_root(e, root)
    minus = nth_root(invert(e), root)
    return plus.dense(0, nlen), minus.dense(0, nlen)


def _nfft(nlen: int) -> int:
    n = 1
    while n < 2 * nlen:
        n *= 2
    return n


def _mulmod(fa: np.ndarray, fb: np.ndarray, m: int, nlen: int, nfft: int) -> np.ndarray:
    x = np.fft.irfft(fa * fb, nfft, axis=-1)[..., :nlen]
    r = np.rint(x)
    if np.abs(x - r).max(initial=0.0) > 0.25:
        raise ArithmeticError("FFT convolution lost integrality; reduce the coefficient range")
    out = r.astype(np.int64) % m
    out[out > m // 2] -= m
    return out


class ResidueEngine:
    """Residues mod p^2 of the unit parts ``prod_delta E(q^delta)^(j_delta/root)``."""

    def __init__(self, bases: Sequence[int], bound: int, nlen: int, p: int, root: int = 3):
        self.bases, self.bound, self.nlen, self.p, self.root = tuple(bases), bound, nlen, p, root
        self.m = p * p
        self.nfft = _nfft(nlen)
        plus, minus = _exact_root_powers(nlen, root)
        m = self.m
        base = {1: np.array([residue(c, m) for c in plus], dtype=np.int64),
                -1: np.array([residue(c, m) for c in minus], dtype=np.int64)}
        self.spectra = []
        for delta in self.bases:
            arrs = np.zeros((2 * bound + 1, nlen), dtype=np.int64)
            arrs[bound, 0] = 1
            for sign in (1, -1):
                b = np.zeros(nlen, dtype=np.int64)
                b[::delta] = base[sign][: len(b[::delta])]
                b[b > m // 2] -= m
                fb = np.fft.rfft(b, self.nfft)
                cur = arrs[bound]
                for j in range(1, bound + 1):
                    cur = _mulmod(np.fft.rfft(cur, self.nfft), fb, m, nlen, self.nfft)
                    arrs[bound + sign * j] = cur
            self.spectra.append(np.fft.rfft(arrs, self.nfft, axis=1))

    def unit_residues(self, exps: np.ndarray, chunk: int = 1024) -> np.ndarray:
        """Rows of ``exps`` (K x len(bases)) -> K x nlen residues in [0, p^2)."""
        exps = np.asarray(exps, dtype=np.int64)
        if exps.size and np.abs(exps).max() > self.bound:
            raise ValueError(f"exponents exceed the engine bound {self.bound}")
        out = np.empty((len(exps), self.nlen), dtype=np.int64)
        B = self.bound
        for lo in range(0, len(exps), chunk):
            block = exps[lo: lo + chunk]
            acc = self.spectra[0][block[:, 0] + B]
            cur = None
            for i in range(1, len(self.bases)):
                cur = _mulmod(acc, self.spectra[i][block[:, i] + B], self.m, self.nlen, self.nfft)
                if i + 1 < len(self.bases):
                    acc = np.fft.rfft(cur, self.nfft, axis=1)
            if cur is None:
                cur = np.rint(np.fft.irfft(acc, self.nfft, axis=1)[:, : self.nlen]).astype(np.int64)
            out[lo: lo + len(block)] = cur % self.m
        return out


def _coefficient_residues(unit: np.ndarray, lam: np.ndarray, mu: int, n_bound: int) -> np.ndarray:
    """Place unit-part residues on the grid: ``a_n = U[(n - lam)/mu]`` for n = 0..n_bound."""
    K = len(unit)
    out = np.zeros((K, n_bound + 1), dtype=np.int64)
    n = np.arange(n_bound + 1)
    for i in range(K):
        k, rem = np.divmod(n - lam[i], mu)
        ok = (rem == 0) & (k >= 0) & (k < unit.shape[1])
        out[i, ok] = unit[i, k[ok]]
    return out


def _residue_task(args):
    bases, bound, root, n_bound, p, exps, lam, mu = args
    engine = _engine(bases, bound, n_bound + 1, p, root)
    unit = engine.unit_residues(exps)
    return p, _coefficient_residues(unit, lam, mu, n_bound)


@lru_cache(maxsize=32)
def _engine(bases, bound, nlen, p, root):
    return ResidueEngine(bases, bound, nlen, p, root)


# -- pair screening -----------------------------------------------------------------------------


def _screen_prime(A: np.ndarray, p: int, n_bound: int, wmin: int):
    """Pair conditions at one prime for the K candidates whose residues are the rows of A.

    Returns ``(ok, nondeg)``: K x K boolean matrices; the diagonal is the self-pair.
    """
    m = p * p
    idx = np.array([n for n in range(1, n_bound // p + 1) if n % p], dtype=np.int64)
    K = len(A)
    if len(idx) == 0:
        z = np.zeros((K, K), dtype=bool)
        return z, z
    S = A[:, idx] % m
    R = A[:, idx * p] % m
    U = (S % p) != 0
    counts = U.sum(axis=1)
    first = np.argmax(U, axis=1)
    inv = np.zeros(m, dtype=np.int64)
    for x in range(1, m):
        if x % p:
            inv[x] = pow(x, -1, m)
    rows = np.arange(K)
    s0inv = inv[S[rows, first]]
    # case 1 for each candidate
    k1 = R[rows, first] * s0inv % m
    c1 = (((R - k1[:, None] * S) % m == 0) | ~U).all(axis=1) & (counts >= wmin)
    c1nz = c1 & (k1 != 0)
    # half[a, b]: a_{np} == K b_n on the units of b
    half = np.zeros((K, K), dtype=bool)
    half_unit = np.zeros((K, K), dtype=bool)
    for b in range(K):
        if counts[b] < wmin:
            continue
        ub = U[b]
        Kab = R[:, first[b]] * s0inv[b] % m
        good = ((R[:, ub] - Kab[:, None] * S[b, ub][None, :]) % m == 0).all(axis=1)
        half[:, b] = good
        half_unit[:, b] = good & (Kab % p != 0)
    case2 = half & half.T
    ok = (c1[:, None] & c1[None, :]) | case2
    nondeg = (c1nz[:, None] & c1nz[None, :]) | (half_unit & half_unit.T)
    np.fill_diagonal(ok, c1)
    np.fill_diagonal(nondeg, c1nz)
    return ok, nondeg


# -- results ------------------------------------------------------------------------------------


@dataclass
class Pattern:
    modulus: int
    case_one: tuple[int, ...]  # residues mod `modulus` assigned to Case 1

    def describe(self) -> str:
        if self.modulus == 1:
            return "Case 1 at every prime" if self.case_one else "Case 2 at every prime"
        if not self.case_one:
            return "Case 2 at every prime"
        res = ", ".join(map(str, self.case_one))
        return f"Case 1 iff p = {res} mod {self.modulus}"


@dataclass
class NewformMatch:
    name: str
    twist: int | None  # discriminant D of the quadratic twist, None for none
    strict: bool  # Case 2 constants matched with alpha = 1 where alpha^2 = 1

    def describe(self) -> str:
        t = "" if self.twist is None else f" twisted by ({self.twist}|.)"
        return f"{self.name}{t}" + ("" if self.strict else " (squares only)")


@dataclass
class CandidatePair:
    h1: TupleSpec
    h2: TupleSpec
    per_prime: list[PrimeReport]
    pattern: Pattern | None = None
    matched_newform: NewformMatch | None = None
    filter_evidence: dict = field(default_factory=dict)

    @property
    def is_self_pair(self) -> bool:
        return self.h1 == self.h2

    def key(self):
        return (self.h1.exponents, self.h2.exponents)

    def to_json(self) -> dict:
        return {
            "h1": list(self.h1.exponents),
            "h2": list(self.h2.exponents),
            "bases": list(self.h1.bases),
            "per_prime": [r.to_json() for r in self.per_prime],
            "pattern": None if self.pattern is None else
            {"modulus": self.pattern.modulus, "case_one": list(self.pattern.case_one),
             "text": self.pattern.describe()},
            "matched_newform": None if self.matched_newform is None else
            {"name": self.matched_newform.name, "twist": self.matched_newform.twist,
             "strict": self.matched_newform.strict},
        }


def infer_pattern(reports: Sequence[PrimeReport], max_modulus: int = 24, support: int = 2) -> Pattern | None:
    """Smallest m <= max_modulus for which Case 1 vs Case 2 depends only on p mod m.

    Every residue class that occurs must hold at least ``support`` scanned primes;
    otherwise any split is "explained" by a modulus isolating single primes.
    """
    labels = {r.p: r.case is Case.ONE for r in reports}
    if not labels or any(r.case is Case.NONE for r in reports):
        return None
    for m in range(1, max_modulus + 1):
        classes: dict[int, list[bool]] = {}
        for p, v in labels.items():
            classes.setdefault(p % m, []).append(v)
        if all(len(set(v)) == 1 and len(v) >= support for v in classes.values()):
            return Pattern(m, tuple(sorted(k for k, v in classes.items() if v[0])))
    return None


def pair_reports(a: CoefficientTable, b: CoefficientTable, primes: Iterable[int], n_bound: int,
                 witness_min: int = 2) -> list[PrimeReport]:
    return [prime_report(a, b, p, n_bound, witness_min) for p in primes]


# -- newform matching -------------------------------------------------------------------------


def _case_matches(r: PrimeReport, c: int, strict: bool) -> bool:
    m = r.p * r.p
    if r.case is Case.ONE:
        return (c - r.constant) % m == 0 and (c - r.constant_b) % m == 0
    if r.case is Case.TWO:
        c2 = r.case2
        if (c * c - c2.cp_sq) % m:
            return False
        if strict and c2.alpha_sq is not None and c2.alpha_sq % m == 1:
            return (c - c2.ab) % m == 0
        return True
    return False


def match_newform(pair: CandidatePair, candidates: Sequence[NamedForm] | None = None,
                  max_twist: int = 24) -> NewformMatch | None:
    """First catalog eta-product (or quadratic twist) whose c_p fit every scanned prime.

    A Case 2 prime only determines c_p^2; where alpha^2 = 1 the strict test also
    fixes alpha = 1 so that c_p must equal a_{np}/b_n.  Strict matches win.
    """
    if candidates is None:
        candidates = match_candidates()
    if not candidates or not pair.per_prime:
        return None
    pmax = max(r.p for r in pair.per_prime)
    twists = [None] + [D for D in FUNDAMENTAL_DISCRIMINANTS if abs(D) <= max_twist]
    loose = None
    for form in candidates:
        table = form.table(pmax)
        for D in twists:
            cs = {r.p: int(table[r.p]) * (1 if D is None else kronecker(D, r.p)) for r in pair.per_prime}
            if all(_case_matches(r, cs[r.p], True) for r in pair.per_prime):
                return NewformMatch(form.name, D, True)
            if loose is None and all(_case_matches(r, cs[r.p], False) for r in pair.per_prime):
                loose = NewformMatch(form.name, D, False)
    return loose


def newform_table(match: NewformMatch, T: int) -> tuple[CoefficientTable, callable]:
    """Coefficient table and nebentypus (as a character at primes) of a matched form."""
    from .catalog import block, twist as twist_table

    form = block(match.name)
    table = form.table(T)
    if match.twist is None:
        return table, form.chi
    D = match.twist
    t = twist_table(table, abs(D), kronecker_character(D), form_id=f"{form.name} x ({D}|.)")

    def chi(p):
        return form.chi(p) * kronecker(D, p) ** 2

    return t, chi


def verify_pair(pair: CandidatePair, a: CoefficientTable, b: CoefficientTable, n_bound: int,
                k: int = 3) -> dict[int, bool]:
    """ASD check of the basis each prime report implies, against the matched newform."""
    if pair.matched_newform is None:
        raise ValueError("pair has no matched newform")
    f, chi = newform_table(pair.matched_newform, n_bound)
    out = {}
    for r in pair.per_prime:
        p = r.p
        if r.case is Case.TWO and not r.degenerate:
            m = p * p
            # alpha = (a_{np}/b_n) / c_p
            alpha = centered(r.case2.ab * pow(int(f[p]) % m, -1, m), m)
            basis = [a.plus(b, alpha)]
        else:
            basis = [a] if a is b else [a, b]
        out[p] = all(asd_check(h, f, chi, k, p, n_bound).ok for h in basis)
    return out


# -- the search ------------------------------------------------------------------------------


@dataclass
class SearchStats:
    enumerated: int = 0
    cuspidal: int = 0
    screened_pairs: int = 0
    after_screen: int = 0
    after_filter: int = 0
    dropped_by_filter: list = field(default_factory=list)


def _progress(msg: str, quiet: bool):
    if not quiet:
        print(msg, file=sys.stderr, flush=True)


def screen_pairs(tuples: Sequence[TupleSpec], cfg: SearchConfig, quiet: bool = True) -> list[tuple[int, int]]:
    """Index pairs (i <= j) of candidates satisfying Case 1 or Case 2 at every prime,
    with at least one prime where the constants are nonzero."""
    primes = cfg.primes
    L = [t.to_eta().leading_exponent() for t in tuples]
    classes: dict[Fraction, list[int]] = {}
    for i, x in enumerate(L):
        classes.setdefault(x - math.floor(x), []).append(i)
    exps = np.array([t.exponents for t in tuples], dtype=np.int64)
    # the engine must cover every exponent handed in, even beyond the enumeration bound
    bound = max(cfg.bound, int(np.abs(exps).max(initial=0)))
    lam = np.array([int(x * x.denominator) for x in L], dtype=np.int64)
    mu_of = np.array([x.denominator for x in L], dtype=np.int64)

    alive = {c: np.ones((len(ix), len(ix)), dtype=bool) for c, ix in classes.items()}
    seen = {c: np.zeros((len(ix), len(ix)), dtype=bool) for c, ix in classes.items()}
    pool = ProcessPoolExecutor(cfg.jobs) if cfg.jobs > 1 else None
    try:
        step = max(cfg.jobs, 1)
        for lo in range(0, len(primes), step):
            wave = primes[lo: lo + step]
            # residues only for candidates that still have a partner
            active = {}
            for c, ix in classes.items():
                live = np.flatnonzero(alive[c].any(axis=1))
                if len(live):
                    active[c] = live
            tasks = []
            for c, live in active.items():
                ids = np.array(classes[c])[live]
                mu = int(mu_of[ids[0]])
                for p in wave:
                    tasks.append((c, (cfg.bases, bound, cfg.root, cfg.n_bound, p, exps[ids], lam[ids], mu)))
            n_active = sum(len(v) for v in active.values())
            _progress(f"  primes {wave}: {n_active} live candidates in {len(active)} classes", quiet)
            if pool is not None:
                results = list(pool.map(_residue_task, [t for _, t in tasks], chunksize=1))
            else:
                results = [_residue_task(t) for _, t in tasks]
            for (c, _), (p, A) in zip(tasks, results):
                live = active[c]
                ok, nondeg = _screen_prime(A, p, cfg.n_bound, cfg.witness_min)
                sub = np.ix_(live, live)
                alive[c][sub] &= ok
                seen[c][sub] |= nondeg & ok
                dead = np.setdiff1d(np.arange(len(classes[c])), live)
                alive[c][dead, :] = False
                alive[c][:, dead] = False
    finally:
        if pool is not None:
            pool.shutdown()
    out = []
    for c, ix in classes.items():
        good = np.triu(alive[c] & seen[c])
        for i, j in zip(*np.nonzero(good)):
            out.append((ix[i], ix[j]))
    return sorted(out)


@lru_cache(maxsize=4096)
def _table_for(t: TupleSpec, n_bound: int) -> CoefficientTable:
    eq = t.to_eta()
    L = eq.leading_exponent()
    mu = L.denominator
    s = expand(eq, Fraction(n_bound + 1, mu))
    return CoefficientTable.from_series(str(t), s, mu=mu)


def candidate_table(t: TupleSpec, n_bound: int) -> CoefficientTable:
    """Exact coefficient table of the cube root, memoized (shared by every pair)."""
    return _table_for(t, n_bound)


def _confirm_task(args):
    t1, t2, primes, n_bound, wmin = args
    a = candidate_table(t1, n_bound)
    b = a if t1 == t2 else candidate_table(t2, n_bound)
    return pair_reports(a, b, primes, n_bound, wmin)


def pair_scan(candidates: Sequence[TupleSpec], cfg: SearchConfig, quiet: bool = True,
              stats: SearchStats | None = None) -> list[CandidatePair]:
    """Pairs (including a form with itself) falling in Case 1 or Case 2 at every prime."""
    cands = sorted(set(candidates), key=lambda t: (t.bases, t.exponents))
    idx_pairs = screen_pairs(cands, cfg, quiet)
    if stats is not None:
        stats.screened_pairs = len(cands) * (len(cands) + 1) // 2
        stats.after_screen = len(idx_pairs)
    _progress(f"  {len(idx_pairs)} pairs survive screening; confirming on exact tables", quiet)
    args = [(cands[i], cands[j], tuple(cfg.primes), cfg.n_bound, cfg.witness_min) for i, j in idx_pairs]
    if cfg.jobs > 1 and len(args) > 1:
        with ProcessPoolExecutor(cfg.jobs) as pool:
            reports = list(pool.map(_confirm_task, args, chunksize=1))
    else:
        reports = [_confirm_task(a) for a in args]
    out = []
    for (i, j), rep in zip(idx_pairs, reports):
        if all(r.case is not Case.NONE for r in rep):
            pair = CandidatePair(cands[i], cands[j], rep)
            pair.pattern = infer_pattern(rep)
            out.append(pair)
    return out


def search(cfg: SearchConfig, quiet: bool = True, stats: SearchStats | None = None,
           newform_candidates: Sequence[NamedForm] | None = None) -> list[CandidatePair]:
    stats = stats if stats is not None else SearchStats()
    tuples = list(enumerate_tuples(cfg))
    stats.enumerated = len(tuples)
    if cfg.cusp_filter:
        tuples = [t for t in tuples if cube_is_cuspidal(t)]
    stats.cuspidal = len(tuples)
    _progress(f"{stats.enumerated} tuples, {stats.cuspidal} with cuspidal cube; screening pairs", quiet)
    pairs = pair_scan(tuples, cfg, quiet, stats)
    if cfg.denominator_filter:
        verdicts: dict[TupleSpec, FilterResult] = {}
        for pair in pairs:
            for t in (pair.h1, pair.h2):
                if t not in verdicts:
                    verdicts[t] = denominator_filter(t, cfg.filter_window, 3, cfg.filter_threshold)
        stats.dropped_by_filter = sorted(str(t) for t, v in verdicts.items() if not v.keep)
        kept = []
        for pair in pairs:
            v1, v2 = verdicts[pair.h1], verdicts[pair.h2]
            pair.filter_evidence = {"h1": v1.reason, "h2": v2.reason}
            if v1.keep and v2.keep:
                kept.append(pair)
        pairs = kept
    stats.after_filter = len(pairs)
    for pair in pairs:
        pair.matched_newform = match_newform(pair, newform_candidates)
    _progress(f"{len(pairs)} candidate pairs", quiet)
    return pairs
