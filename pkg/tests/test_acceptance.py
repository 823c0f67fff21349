"""Acceptance suite: one test per criterion.

Language checks are exact (automaton equality). Brute-force oracles are
independent of the compiler: they work on explicit prefixes of the words.
"""
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from fibauto import abelian as ab
from fibauto import automata as au
from fibauto.compiler import CompileEnv, compile, adder_checks
from fibauto.enumeration import (equal_on_strings, evaluate, linrep_from_dfa, monoid_closure,
                                 read_linrep, value_range)
from fibauto.numeration import adder_dfa, fib, fib_bundle, lucas, to_zeckendorf
from fibauto.words import builtin_words, prefix, word_at

from conftest import HEAVY

DATA = Path(__file__).parent / "data"
F = prefix(builtin_words()["F"], 5000)


@pytest.fixture(scope="module")
def env():
    return CompileEnv()


def run(env, pred):
    dfa, log = compile(pred, env)
    print(log)
    return dfa, log


def lang(pattern, tracks=("n",)):
    return au.regex_dfa(pattern, tracks)


def everything(tracks=("n",)):
    return au.restrict(au.true_dfa(tracks))


def values(dfa, max_len=25):
    return sorted(au.accepted_tuples(dfa, max_len))


def linrep(env, pred, param="n"):
    dfa, _ = run(env, pred)
    return linrep_from_dfa(dfa, param)


# --- predicates ------------------------------------------------------------------

ULT_PERIODIC = "En p >= 1 & Ai i >= n => F[i] = F[i+p]"
FOURTH_POWERS = "(n > 0) & Ei At t < 3*n => F[i+t] = F[i+t+n]"
SQUARES = "(n > 0) & Ei At t < n => F[i+t] = F[i+t+n]"
CUBES = "(n > 0) & Ei At t < 2*n => F[i+t] = F[i+t+n]"
ANTISQUARES = "n > 0 & Ei Ak k < n => F[i+k] != F[i+k+n]"
PALINDROMES = "Ei Aj j < n => F[i+j] = F[i+n-1-j]"
ONE_PALINDROME = ("Ei (At t < n => F[i+t] = F[i+n-1-t]) & "
                  "Aj (As s < n => F[j+s] = F[j+n-1-s]) => Au u < n => F[i+u] = F[j+u]")
EVEN = "Ei n = 2*i"
PREFIX_PALINDROMES = "Ai i < n => F[i] = F[n-1-i]"
ANTIPALINDROMES = ("(n > 0) & (Aj j < n => F[i+j] != F[i+n-1-j]) & "
                   "(Ak k < i => Ej j < n & F[k+j] != F[i+j])")
LEAST_PERIODS = ("n >= 1 & Ei,j i+n+1 <= j & (At (i <= t & t+n <= j) => F[t] = F[t+n]) & "
                 "Am (1 <= m & m < n) => ~At (i <= t & t+m <= j) => F[t] = F[t+m]")
SMALLEST_PERIOD = ("n >= 1 & p >= 1 & (Ei At t+p < n => F[i+t] = F[i+t+p]) & "
                   "Ai Aq (q >= 1 & At t+q < n => F[i+t] = F[i+t+q]) => q >= p")
NOT_QUASIPERIOD = "n >= 1 & ~Ai Ej (i < j+n & j <= i) & At t < n => F[t] = F[j+t]"


def unbordered(v):
    return (f"(Aj{v} (j{v} >= 1 & 2*j{v} <= n) => "
            f"Et{v} t{v} < j{v} & F[{v}+t{v}] != F[{v}+n-j{v}+t{v}])")


UNBORDERED = f"Ei {unbordered('i')}"
TWO_UNBORDERED = (f"Ei,k {unbordered('i')} & {unbordered('k')} & (Em m < n & F[i+m] != F[k+m]) & "
                  f"Au {unbordered('u')} => ((Al l < n => F[u+l] = F[i+l]) | "
                  f"(Al l < n => F[u+l] = F[k+l]))")
UNBORDERED_REVERSAL = (f"Ai,k ({unbordered('i')} & {unbordered('k')}) => "
                       "((At t < n => F[i+t] = F[k+t]) | (At t < n => F[i+t] = F[k+n-1-t]))")
RECURRENT = "Ai Aj Ek k > j & At t < n => F[i+t] = F[k+t]"
UNIFORMLY_RECURRENT = "Ai El Aj Es (j <= s & s+n <= j+l) & Ap p < n => F[s+p] = F[i+p]"


def linearly_recurrent(c, window=True):
    bound = f"s+n <= j+{c}*n" if window else f"s <= j+{c}*n"
    return f"Ai Aj Es (j <= s & {bound}) & Ap p < n => F[s+p] = F[i+p]"


LYNDON_AT_I = ("Aj (1 <= j & j < n) => Et t < n-j & (Au u < t => F[i+u] = F[i+j+u]) & "
               "F[i+t] < F[i+j+t]")
LYNDON = f"n >= 1 & Ei {LYNDON_AT_I}"
LYNDON_CONJUGATE = (f"Ai ({LYNDON_AT_I}) => Em m <= n & (At t+m < n => F[i+t] = F[m+t]) & "
                    "(At t < m => F[i+n-m+t] = F[t])")
ALMOST_COMMUTATIVE = ("(i > j) & (j >= 2) & (At (j <= t & t < i) => F[t] = F[t-j]) & "
                      "(As s+3 <= j => F[s] = F[s+i-j]) & (F[j-2] = F[i-1]) & (F[j-1] = F[i-2])")
PREFIX_POWER = ("n >= 1 & Ed (0 < d & d < n) & (At t+d < n => F[t] = F[t+d]) & "
                "(At t < d => F[n-d+t] = F[t])")
MINIMAL_FORBIDDEN = ("n >= 1 & ~(Ek (At t < n => F[k+t] = F[i+t]) & F[k+n] != F[i+n]) & "
                     "(Ek (At t+1 < n => F[k+t] = F[i+1+t]) & F[k+n-1] != F[i+n]) & "
                     "(Al l < i => Es s < n & F[l+s] != F[i+s])")
ROTE_XXXR = "Ei At t < n => R[i+t] = R[i+t+n] & R[i+t] = R[i+3*n-1-t]"
ROTE_SQUARES = "(n >= 1) & Ei Aj j < n => R[i+j] = R[i+j+n]"
ROTE_ANTIPAL_PREFIX = "Aj j < n => R[j] != R[n-1-j]"
ROTE_MIRROR = "Ai Ej At t < n => R[i+t] = R[j+n-1-t]"
V_SQUARES = "(n >= 1) & Ei Aj j < n => V[i+j] = V[i+j+n]"
V_CUBES = "(n >= 1) & Ei Aj j < 2*n => V[i+j] = V[i+j+n]"
V_OVERLAPS = "(n >= 1) & Ei Aj j <= n => V[i+j] = V[i+j+n]"
V_RECURRENT = ("Ai Ej (j > i) & Ak Au (k >= 1 & j = i+k & u >= i & u < n+i) => "
               "V[u] = V[u+k]")
SUBWORD_COMPLEXITY = "Aj j < i => Et t < n & F[i+t] != F[j+t]"
SQUARE_OCCURRENCES = "(j >= 1) & (i+2*j <= n) & At t < j => F[i+t]=F[i+j+t]"
MAXIMAL_REPETITIONS = (
    "i <= j & j < n & Ep (p >= 1 & 2*p <= j+1-i) & (Ak k+i+p <= j => F[i+k] = F[i+k+p]) & "
    "(i >= 1 => Aq (q >= 1 & q <= p) => El l+i+q <= j+1 & F[i-1+l] != F[i-1+l+q]) & "
    "(j+1 <= n-1 => Ar (r >= 1 & r <= p) => Em m+r+i <= j+1 & F[i+m] != F[i+m+r])")
PALINDROMIC_SHIFTS = (
    "i < n & At t < n => (i+t < n & i <= t => F[i+t] = F[i+n-1-t]) & "
    "(i+t < n & t < i => F[i+t] = F[i-1-t]) & "
    "(i+t >= n & i <= t => F[i+t-n] = F[i+n-1-t]) & "
    "(i+t >= n & t < i => F[i+t-n] = F[i-1-t])")


# --- oracles ---------------------------------------------------------------------

def least_period(w):
    for p in range(1, len(w) + 1):
        if all(w[k] == w[k + p] for k in range(len(w) - p)):
            return p
    return 0


def square_occurrences(n):
    w = F[:n]
    return sum(1 for j in range(1, n // 2 + 1) for i in range(n - 2 * j + 1)
               if w[i:i + j] == w[i + j:i + 2 * j])


# --- criteria --------------------------------------------------------------------

@pytest.mark.criterion(1, "adder oracle for x, y < 300, z < 600")
def test_adder_oracle():
    xs, ys, zs = np.meshgrid(np.arange(300), np.arange(300), np.arange(600), indexing="ij")
    xs, ys, zs = xs.ravel(), ys.ravel(), zs.ravel()
    width = len(to_zeckendorf(599))
    digits = np.array([[int(c) for c in to_zeckendorf(v).rjust(width, "0")] for v in range(600)])
    for dfa in (adder_dfa(), au.restrict(adder_dfa())):
        states = np.full(xs.shape, dfa.initial, dtype=np.int64)
        for t in range(width):
            cols = (digits[xs, t] << 2) | (digits[ys, t] << 1) | digits[zs, t]
            states = dfa.trans[states, cols]
        accepted = dfa.accepting[states].astype(bool)
        assert np.array_equal(accepted, xs + ys == zs)


@pytest.mark.criterion(2, "adder self-checks on the Fibonacci bundle")
def test_adder_self_checks():
    results = adder_checks(fib_bundle())
    assert [name for name, _ in results] == [
        "totality", "uniqueness", "associativity", "identity", "successor"]
    assert all(ok for _, ok in results), results


@pytest.mark.criterion(3, "f is not ultimately periodic")
def test_not_ultimately_periodic(env):
    dfa, log = run(env, ULT_PERIODIC)
    assert au.is_empty(dfa)
    assert log.records[-1].states == 2
    assert log.records[-2].states == 2


@pytest.mark.criterion(4, "f has no fourth powers")
def test_no_fourth_powers(env):
    dfa, log = run(env, FOURTH_POWERS)
    assert au.is_empty(dfa)
    assert log.records[-1].states == 2


@pytest.mark.criterion(5, "square, cube and antisquare orders")
def test_power_orders(env):
    squares, log = run(env, SQUARES)
    assert au.equivalent(squares, lang("10*"))
    assert squares.log_size() == 3
    assert au.equivalent(run(env, CUBES)[0], lang("1000*"))
    anti, _ = run(env, ANTISQUARES)
    assert au.is_finite(anti)
    assert values(anti) == [(1,), (2,), (4,)]


@pytest.mark.criterion(6, "palindromes")
def test_palindromes(env):
    assert au.equivalent(run(env, PALINDROMES)[0], everything())
    one, _ = run(env, ONE_PALINDROME)
    assert au.equivalent(one, run(env, EVEN)[0])
    assert au.equivalent(run(env, PREFIX_PALINDROMES)[0], lang("ε+1+10(10)*(0+01)"))
    # oracle: prefix palindromes have lengths F_i - 2
    pal = {n for n in range(200) if F[:n] == F[:n][::-1]}
    assert pal == {fib(i) - 2 for i in range(3, 14) if fib(i) - 2 < 200}


@pytest.mark.criterion(7, "antipalindromes")
def test_antipalindromes(env):
    dfa, _ = run(env, ANTIPALINDROMES)
    assert dfa.tracks == ("i", "n")
    assert au.equivalent(dfa, au.finite_dfa([(0, 2), (1, 2), (3, 4), (4, 4)], ("i", "n")))


@pytest.mark.criterion(8, "least periods")
def test_least_periods(env):
    assert au.equivalent(run(env, LEAST_PERIODS)[0], lang("10⁺"))
    rel, _ = run(env, SMALLEST_PERIOD)
    assert rel.tracks == ("n", "p")
    for j in range(2, 13):
        lo, hi = lucas(j) - 1, lucas(j + 1) - 2
        rep = "10" + "01" * ((j - 2) // 2) if j % 2 == 0 else "100" + "10" * ((j - 3) // 2)
        assert to_zeckendorf(lo) == rep
        for n in (lo, hi):
            assert rel.accepts_values(n, fib(j))
            assert not rel.accepts_values(n, fib(j) + 1)
    # oracle: smallest least period among the length-n factors
    for n in range(1, 40):
        best = min(least_period(F[i:i + n]) for i in range(400))
        got = [p for p in range(1, n + 1) if rel.accepts_values(n, p)]
        assert got == [best]


@pytest.mark.criterion(9, "quasiperiods")
def test_quasiperiods(env):
    dfa, _ = run(env, NOT_QUASIPERIOD)
    assert au.equivalent(dfa, lang("1(01)*(ε+0)"))


@pytest.mark.criterion(10, "unbordered factors")
def test_unbordered(env):
    assert au.equivalent(run(env, UNBORDERED)[0], lang("ε+10*"))
    assert au.equivalent(run(env, TWO_UNBORDERED)[0], lang("10*"))
    rev, _ = run(env, UNBORDERED_REVERSAL)
    assert au.equivalent(rev, run(env, "~(n = 1)")[0])


@pytest.mark.criterion(11, "recurrence, uniform and linear recurrence")
def test_recurrence(env):
    assert au.equivalent(run(env, RECURRENT)[0], everything())
    assert au.equivalent(run(env, UNIFORMLY_RECURRENT)[0], everything())
    assert au.equivalent(run(env, linearly_recurrent(4))[0], everything())
    c3, _ = run(env, linearly_recurrent(3))
    assert not au.equivalent(c3, everything())
    # reading the bound on the start position only, C = 3 already suffices
    assert au.equivalent(run(env, linearly_recurrent(3, window=False))[0], everything())


@pytest.mark.criterion(12, "Lyndon factors")
def test_lyndon(env):
    assert au.equivalent(run(env, LYNDON)[0], lang("10*"))
    assert au.equivalent(run(env, LYNDON_CONJUGATE)[0], run(env, "~(n = 1)")[0])


@pytest.mark.criterion(13, "finite Fibonacci words")
def test_finite_words(env):
    ac, _ = run(env, ALMOST_COMMUTATIVE)
    assert ac.tracks == ("i", "j")
    assert au.equivalent(ac, lang("[1,0][0,1][0,0]⁺", ("i", "j")))
    powers, _ = run(env, PREFIX_POWER)
    assert au.equivalent(powers, lang("10010*"))
    # oracle: prefixes that are proper powers
    def is_power(w):
        return any(len(w) % d == 0 and w == w[:d] * (len(w) // d) for d in range(1, len(w)))
    assert [n for n in range(1, 300) if is_power(F[:n])] == [
        v for (v,) in values(powers, 12) if v < 300]
    mfw, _ = run(env, MINIMAL_FORBIDDEN)
    assert au.equivalent(mfw, lang("[1,1]([0,0][1,1])*(ε+[0,0])", ("i", "n")))


@pytest.mark.criterion(14, "Rote-Fibonacci word")
def test_rote(env):
    dfa, log = run(env, ROTE_XXXR)
    assert values(dfa) == [(0,)] and au.is_finite(dfa)
    assert log.peak < 10_000
    assert au.equivalent(run(env, ROTE_SQUARES)[0], lang("1+100(000)*"))
    assert au.equivalent(run(env, ROTE_ANTIPAL_PREFIX)[0], lang("ε+1(010101)*0(010+101000)"))
    assert au.equivalent(run(env, ROTE_MIRROR)[0], everything())


@pytest.mark.criterion(15, "Thue-Morse-Fibonacci word")
def test_tmf(env):
    assert au.equivalent(run(env, V_SQUARES)[0], lang("101+10*"))
    cubes, _ = run(env, V_CUBES)
    assert values(cubes) == [(1,)]
    v = prefix(builtin_words()["V"], 3000)
    found = {tuple(v[i:i + 3]) for i in range(len(v) - 2) if v[i] == v[i + 1] == v[i + 2]}
    assert found == {(0, 0, 0), (1, 1, 1)}
    assert au.equivalent(run(env, V_OVERLAPS)[0], lang("1(00)*"))


@pytest.mark.heavy
@pytest.mark.criterion(15, "Thue-Morse-Fibonacci recurrence (substituted predicate)")
def test_tmf_recurrence(env):
    assert HEAVY
    assert au.equivalent(run(env, V_RECURRENT)[0], everything())


@pytest.mark.criterion(16, "enumeration fixtures")
def test_enumeration_fixtures(env):
    r6 = read_linrep(DATA / "rank6_n_plus_1.linrep")
    r10 = read_linrep(DATA / "rank10_n_plus_1.linrep")
    assert (r6.rank, r10.rank) == (6, 10)
    for n in range(201):
        assert evaluate(r6, n) == n + 1
        assert evaluate(r10, n) == n + 1
    assert equal_on_strings(r6, r10, 16)
    ours = linrep(env, SUBWORD_COMPLEXITY)
    assert equal_on_strings(ours, r6)
    # the untransposed matrices do not compute n+1
    printed = read_linrep(DATA / "rank6_untransposed.linrep")
    assert [evaluate(printed, n) for n in range(5)] != [1, 2, 3, 4, 5]


@pytest.mark.criterion(17, "square occurrences in the finite Fibonacci words")
def test_square_occurrences(env):
    r = linrep(env, SQUARE_OCCURRENCES)
    for n in range(3, 21):
        b = evaluate(r, "1" + "0" * (n - 1))
        expect = (Fraction(4, 5) * n * fib(n + 1) - Fraction(2, 5) * (n + 6) * fib(n)
                  - 4 * fib(n - 1) + n + 1)
        assert b == expect, n
    for n in range(1, 9):
        assert evaluate(r, "1" + "0" * (n - 1)) == square_occurrences(fib(n + 1))


@pytest.mark.criterion(18, "maximal repetitions")
def test_maximal_repetitions(env):
    r = linrep(env, MAXIMAL_REPETITIONS)
    for n in range(5, 21):
        assert evaluate(r, fib(n)) == 2 * fib(n - 2) - 3
    diff = read_linrep(DATA / "rank12_mr_difference.linrep")
    closure = monoid_closure(diff)
    assert closure.complete and len(closure) == 61
    assert value_range(diff, closure) == {0, 1}


@pytest.mark.criterion(19, "palindromic shifts of prefixes")
def test_palindromic_shifts(env):
    r = linrep(env, PALINDROMIC_SHIFTS)
    closure = monoid_closure(r)
    assert closure.complete and len(closure) == 151
    assert value_range(r, closure) == {0, 1, 2}
    for i in range(3, 16):
        assert (evaluate(r, fib(i)) == 0) == (i % 3 == 0)


@pytest.mark.criterion(20, "abelian squares and the zero-count relation")
def test_abelian(env):
    assert ab.verify_fab()
    assert ab.verify_zc(ab.zc_automaton())
    fab = ab.fab_dfao()
    for n in range(40):
        for i in range(40):
            for j in range(40):
                assert word_at(fab, n, i, j) == ab.fab_brute(n, i, j, F)
    assert au.equivalent(ab.abelian_square_orders(), everything())
    r = ab.distinct_square_count()
    table = [1, 3, 5, 1, 9, 5, 5, 15, 3, 13, 13, 5, 25, 9, 15, 25, 1, 27, 19, 11]
    assert [evaluate(r, n) for n in range(1, 21)] == table
    fenv = ab.fab_env()
    assert au.equivalent(run(fenv, ab.SINGLE_SQUARE)[0], lang("1+(100)*101"))
    assert au.equivalent(run(fenv, ab.MOST_SQUARES)[0], lang("10*"))
    for k in range(2, 16):
        assert evaluate(r, fib(k)) == 2 * fib(k) - 1


BATTERY = [ULT_PERIODIC, FOURTH_POWERS, SQUARES, CUBES, ANTISQUARES, PALINDROMES,
           ONE_PALINDROME, PREFIX_PALINDROMES, ANTIPALINDROMES, LEAST_PERIODS, SMALLEST_PERIOD,
           NOT_QUASIPERIOD, UNBORDERED, TWO_UNBORDERED, UNBORDERED_REVERSAL, RECURRENT,
           UNIFORMLY_RECURRENT, linearly_recurrent(3), linearly_recurrent(4), LYNDON,
           LYNDON_CONJUGATE, ALMOST_COMMUTATIVE, PREFIX_POWER, MINIMAL_FORBIDDEN, ROTE_XXXR,
           ROTE_SQUARES, ROTE_ANTIPAL_PREFIX, ROTE_MIRROR, V_SQUARES, V_CUBES, V_OVERLAPS,
           SUBWORD_COMPLEXITY, SQUARE_OCCURRENCES, MAXIMAL_REPETITIONS, PALINDROMIC_SHIFTS]


def battery_transcript():
    env = CompileEnv(use_cache=False)
    out = []
    for pred in BATTERY:
        dfa, log = compile(pred, env)
        out.append("\n".join(log.lines(timing=False)))
        out.append(au.to_text(dfa))
    fenv = ab.fab_env(env=CompileEnv(use_cache=False))
    for pred in (ab.SQUARE_ORDERS, ab.DISTINCT_SQUARES, ab.SINGLE_SQUARE):
        dfa, log = compile(pred, fenv)
        out.append("\n".join(log.lines(timing=False)))
        out.append(au.to_text(dfa))
    return "\n".join(out).encode()


@pytest.mark.criterion(21, "determinism of automata and logs")
def test_determinism():
    first = battery_transcript()
    second = battery_transcript()
    assert first == second
