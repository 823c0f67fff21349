from itertools import product as iproduct

import pytest

from fibauto import automata as au
from fibauto.compiler import CompileEnv, compile, compile_atom, compile_term, decide
from fibauto.errors import CompileError, StateLimitExceeded
from fibauto.logic import (And, Compare, ConstMultiple, Constant, Difference, Exists,
                           ForAll, Iff, Implies, LetterEq, Not, Or, Sum, Variable, parse,
                           parse_term)
from fibauto.numeration import eq_dfa
from fibauto.words import builtin_words, prefix

WORDS = {k: prefix(w, 400) for k, w in builtin_words().items()}


@pytest.fixture(scope="module")
def env():
    return CompileEnv()


# --- brute-force evaluator over word prefixes --------------------------------------

def term_value(t, a):
    if isinstance(t, Variable):
        return a[t.name]
    if isinstance(t, Constant):
        return t.value
    if isinstance(t, Sum):
        l, r = term_value(t.left, a), term_value(t.right, a)
        return None if l is None or r is None else l + r
    if isinstance(t, Difference):
        l, r = term_value(t.left, a), term_value(t.right, a)
        return None if l is None or r is None or l < r else l - r
    if isinstance(t, ConstMultiple):
        v = term_value(t.term, a)
        return None if v is None else t.coefficient * v
    raise TypeError(t)


def letter(w, a):
    k = term_value(w.indices[0], a)
    return None if k is None else WORDS[w.word][k]


def holds(f, a, bound):
    if isinstance(f, Compare):
        l, r = term_value(f.left, a), term_value(f.right, a)
        if l is None or r is None:
            return False
        return {"=": l == r, "!=": l != r, "<": l < r, "<=": l <= r, ">": l > r,
                ">=": l >= r}[f.op]
    if isinstance(f, LetterEq):
        l = letter(f.left, a)
        r = f.right if isinstance(f.right, int) else letter(f.right, a)
        if l is None or r is None:
            return False
        return {"=": l == r, "!=": l != r, "<": l < r}[f.op]
    if isinstance(f, Not):
        return not holds(f.body, a, bound)
    if isinstance(f, And):
        return holds(f.left, a, bound) and holds(f.right, a, bound)
    if isinstance(f, Or):
        return holds(f.left, a, bound) or holds(f.right, a, bound)
    if isinstance(f, Implies):
        return not holds(f.left, a, bound) or holds(f.right, a, bound)
    if isinstance(f, Iff):
        return holds(f.left, a, bound) == holds(f.right, a, bound)
    if isinstance(f, (Exists, ForAll)):
        test = any if isinstance(f, Exists) else all
        return test(holds(f.body, {**a, **dict(zip(f.vars, vals))}, bound)
                    for vals in iproduct(range(bound), repeat=len(f.vars)))
    raise TypeError(f)


BATTERY = [
    # (predicate, value bound for free variables, quantifier range)
    ("x + y = 7", 30, 0),
    ("2*x = y + 1", 40, 0),
    ("x - y = 3", 40, 0),
    ("F[x] = F[y]", 40, 0),
    ("F[x + 1] != R[y]", 40, 0),
    ("V[2*x] = 1 & x < y", 40, 0),
    ("At t < n => F[i+t] = F[i+t+n]", 20, 40),
    ("Et t < n & F[i+t] != F[i+n-1-t]", 20, 40),
    ("n >= 1 & At t < n => F[t] = F[n-1-t]", 60, 60),
    ("Aj j < i => Et t < n & F[i+t] != F[j+t]", 15, 30),
    ("Ek k <= i & 3*k = i + n", 25, 60),
    ("Aj (j >= 1 & 2*j <= n) => Et t < j & F[t] != F[n-j+t]", 40, 40),
]


@pytest.mark.parametrize("text, bound, qrange", BATTERY)
def test_semantics_against_brute_force(env, text, bound, qrange):
    f = parse(text)
    dfa, _ = compile(f, env)
    for vals in iproduct(range(bound), repeat=dfa.num_tracks):
        a = dict(zip(dfa.tracks, vals))
        assert dfa.accepts_values(*vals) == holds(f, a, qrange), (text, a)


def least_period(w):
    return next(p for p in range(1, len(w) + 1)
                if all(w[k] == w[k + p] for k in range(len(w) - p)))


def test_least_period_relation_against_brute_force(env):
    # p is a period of f[i..i+n-1]
    f = WORDS["F"]
    period, _ = compile("p >= 1 & At t+p < n => F[i+t] = F[i+t+p]", env)
    least, _ = compile("p >= 1 & (At t+p < n => F[i+t] = F[i+t+p]) & "
                       "Aq (q >= 1 & q < p) => Et t+q < n & F[i+t] != F[i+t+q]", env)
    for i in range(12):
        for n in range(1, 25):
            lp = least_period(f[i:i + n])
            for p in range(1, 26):
                assert period.accepts_values(i, n, p) == (p >= lp and all(
                    f[i + k] == f[i + k + p] for k in range(n - p)))
                assert least.accepts_values(i, n, p) == (p == lp)


def test_forall_is_not_exists_not(env):
    a, _ = compile("Ai i < n => F[i] = F[i+n]", env)
    b, _ = compile("~Ei i < n & F[i] != F[i+n]", env)
    assert au.equivalent(a, b)


def test_terms():
    s = compile_term(parse_term("i + n"))
    assert s.accepts_values(4, 2, 6) or s.tracks == ("#r", "i", "n")
    assert s.accepts_values(*[{"i": 4, "n": 2, "#r": 6}[t] for t in s.tracks])
    zero = compile_term(parse_term("0"))
    assert zero.tracks == ("#r",) and au.accepted_tuples(zero, 5) == [(0,)]
    triple = compile_term(parse_term("3 * n"))
    for v in range(200):
        vals = {"n": v, "#r": 3 * v}
        assert triple.accepts_values(*[vals[t] for t in triple.tracks])
        vals["#r"] += 1
        assert not triple.accepts_values(*[vals[t] for t in triple.tracks])


def test_atoms(env):
    d = compile_atom(parse("F[i] = F[i + p]"), env)
    assert d.log_size() == 12
    assert decide("F[0] = 0", env)
    assert decide("R[2] = 1", env)


def test_compiled_logs(env):
    dfa, log = compile("(n > 0) & Ei At t < n => F[i+t] = F[i+t+n]", env)
    assert au.equivalent(dfa, au.regex_dfa("10*", ("n",)))
    assert log.records[-1].states == 3
    assert log.lines(timing=False)[-1] == "overall time"
    first = log.lines()[0]
    assert first.startswith("n > 0 with ") and first.endswith("ms")
    assert all(line.startswith(" " * k) for k, line in enumerate(log.lines()[:-1]))
    assert log.peak >= max(r.states for r in log.records) - 1


def test_cube_state_count(env):
    dfa, log = compile("(n > 0) & Ei At t < 2*n => F[i+t] = F[i+t+n]", env)
    assert log.records[-1].states == 5


def test_decide(env):
    assert decide("Ax x = x", env)
    assert not decide("E n n < 0", env)
    assert decide("Ai Ej At t < n => F[i+t] = F[j+n-1-t]".replace("Ai", "An Ai"), env)
    assert not decide("En n > 0 & Ei At t < 3*n => F[i+t]=F[i+t+n]", env)


def test_result_tracks_sorted(env):
    dfa, _ = compile("z < a & m = 1", env)
    assert dfa.tracks == ("a", "m", "z")


def test_custom_relations(env):
    local = CompileEnv()
    local.add_relation("same", eq_dfa())
    assert local.relations["same"].tracks == ("x", "y")
    d, _ = compile("same(i + 1, j)", local)
    assert d.accepts_values(3, 4) and not d.accepts_values(3, 3)
    with pytest.raises(CompileError):
        compile("same(i)", local)
    with pytest.raises(CompileError):
        compile("nope(i, j)", local)
    with pytest.raises(CompileError):
        compile("G[i] = 0", local)
    with pytest.raises(CompileError):
        local.add_relation("F", eq_dfa())


def test_state_cap():
    small = CompileEnv(max_states=20, use_cache=False)
    with pytest.raises(StateLimitExceeded):
        compile("(n > 0) & Ei At t < n => F[i+t] = F[i+t+n]", small)


def test_deterministic_output():
    text = "Ei Aj j < n => F[i+j] = F[i+n-1-j]"
    runs = []
    for _ in range(2):
        dfa, log = compile(text, CompileEnv(use_cache=False))
        runs.append((au.to_text(dfa), log.lines(timing=False)))
    assert runs[0] == runs[1]
