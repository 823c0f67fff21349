"""Compile first-order predicates to automata over their free variables.

Every AST node is compiled bottom-up to a minimal DFA whose tracks are the
node's free variables (sorted by name). Quantifiers project, pad-close,
determinize and minimize; connectives take minimized products; negation
complements within the valid representations.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import time
from typing import Callable, Optional

import numpy as np

from . import automata as au
from .automata import Dfa, budget, current_budget
from .errors import CompileError, StateLimitExceeded, VerificationError
from .logic import (And, Compare, ConstMultiple, Constant, Custom, Difference, Exists, ForAll,
                    Iff, Implies, LetterEq, Not, Or, Sum, Variable, WordIndex, format_formula,
                    free_variables, parse)
from .numeration import NumerationBundle, compare_dfa, fib_bundle
from .words import WordDef, builtin_words

_LETTER_OPS = {
    "=": lambda a, b: a == b, "!=": lambda a, b: a != b,
    "<": lambda a, b: a < b, "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b, ">=": lambda a, b: a >= b,
}


@dataclass
class LogRecord:
    text: str
    states: int
    ms: int


@dataclass
class CompileLog:
    records: list = field(default_factory=list)
    peak: int = 0
    total_ms: int = 0

    def lines(self, timing: bool = True) -> list[str]:
        out = []
        for k, r in enumerate(self.records):
            t = f", in {r.ms}ms" if timing else ""
            out.append(" " * k + f"{r.text} with {r.states} states{t}")
        out.append(f"overall time: {self.total_ms}ms" if timing else "overall time")
        return out

    def __str__(self):
        return "\n".join(self.lines())


@dataclass
class CompileEnv:
    """Name registries plus the numeration bundle and resource options."""

    words: dict = field(default_factory=builtin_words)
    relations: dict = field(default_factory=dict)
    numsys: NumerationBundle = field(default_factory=fib_bundle)
    max_states: int = 2_000_000
    timeout: Optional[float] = None
    log_sink: Optional[Callable[[str], None]] = None
    use_cache: bool = True
    _cache: dict = field(default_factory=dict, repr=False)
    _rel_cache: dict = field(default_factory=dict, repr=False)

    @property
    def universe(self):
        return self.numsys.universe

    def add_word(self, name, dfao_or_def):
        if name in self.words or name in self.relations:
            raise CompileError(f"name {name!r} is already defined")
        wd = dfao_or_def if isinstance(dfao_or_def, WordDef) else WordDef(name, dfao_or_def)
        self.words[name] = wd
        self._cache.clear()
        return wd

    def add_relation(self, name, dfa: Dfa, replace_existing=False):
        if not replace_existing and (name in self.relations or name in self.words):
            raise CompileError(f"name {name!r} is already defined")
        self.relations[name] = dfa
        self._cache.clear()

    def set_numsys(self, bundle: NumerationBundle):
        self.numsys = bundle
        self._cache.clear()
        self._rel_cache.clear()

    # cached building blocks
    def order(self, op: str) -> Dfa:
        key = ("cmp", op)
        if key not in self._rel_cache:
            self._rel_cache[key] = self._build_order(op)
        return self._rel_cache[key]

    def _build_order(self, op):
        u = self.universe
        lt = au.rename(self.numsys.order, dict(zip(self.numsys.order.tracks, ("x", "y"))))
        eq = compare_dfa("=", u)
        if op == "<":
            return lt
        if op == ">":
            return au.rename(lt, {"x": "y", "y": "x"})
        if op == "=":
            return eq
        if op == "!=":
            return au.complement(eq)
        if op == "<=":
            return au.product(lt, eq, "or")
        if op == ">=":
            return au.rename(au.product(lt, eq, "or"), {"x": "y", "y": "x"})
        raise CompileError(f"unknown comparison {op!r}")

    def adder(self) -> Dfa:
        key = ("add",)
        if key not in self._rel_cache:
            a = self.numsys.adder
            self._rel_cache[key] = au.rename(a, dict(zip(a.tracks, ("x", "y", "z"))))
        return self._rel_cache[key]

    def constant(self, c: int) -> Dfa:
        key = ("const", c)
        if key not in self._rel_cache:
            self._rel_cache[key] = self._build_constant(c)
        return self._rel_cache[key]

    def _build_constant(self, c):
        u = self.universe
        if c < 0:
            return au.false_dfa(("x",), u)
        rep = self.numsys.encode(c)
        L = len(rep)
        # state 0 loops on leading zeros, state i + 1 has read i + 1 digits, L + 1 is dead
        trans = np.full((L + 2, 2), L + 1, dtype=np.int32)
        trans[0, 0] = 0
        prev = 0
        for i, ch in enumerate(rep):
            nxt = i + 1
            if int(ch) == 0 and prev == 0:
                raise ValueError("representation has a leading zero")
            trans[prev, int(ch)] = nxt
            prev = nxt
        acc = np.zeros(L + 2, dtype=np.uint8)
        acc[prev] = 1
        d = Dfa(("x",), trans, acc, 0, False, u)
        return au.restrict(d)

    def multiple(self, c: int) -> Dfa:
        """Relation y = c * x over tracks (x, y)."""
        key = ("mul", c)
        if key in self._rel_cache:
            return self._rel_cache[key]
        if c == 0:
            res = au.product(au.true_dfa(("x",), self.universe),
                             au.rename(self.constant(0), {"x": "y"}), "and")
        elif c == 1:
            res = self.order("=")
        else:
            half = self.multiple(c // 2)
            add = self.adder()
            # y = 2 * (c // 2) * x (+ x when c is odd)
            u = au.rename(half, {"y": "#u"})
            dbl = au.exists(au.product(u, au.rename(add, {"x": "#u", "y": "#u", "z": "#v"}),
                                       "and"), "#u")
            if c % 2:
                res = au.exists(au.product(dbl, au.rename(add, {"x": "#v", "y": "x", "z": "y"}),
                                           "and"), "#v")
            else:
                res = au.rename(dbl, {"#v": "y"})
        self._rel_cache[key] = res
        return res


def default_env(**kw) -> CompileEnv:
    return CompileEnv(**kw)


# --- alpha-equivalence keys --------------------------------------------------

def _alpha_key(f):
    """Formula with free variables renamed to $0, $1, ... (first occurrence)
    and bound variables to %depth; returns (key, free variable order)."""
    free = free_variables(f)
    fmap = {v: f"${i}" for i, v in enumerate(free)}

    def term(t, env):
        if isinstance(t, Variable):
            return Variable(env.get(t.name, fmap.get(t.name, t.name)))
        if isinstance(t, Constant):
            return t
        if isinstance(t, Sum):
            return Sum(term(t.left, env), term(t.right, env))
        if isinstance(t, Difference):
            return Difference(term(t.left, env), term(t.right, env))
        if isinstance(t, ConstMultiple):
            return ConstMultiple(t.coefficient, term(t.term, env))
        raise TypeError(t)

    def idx(w, env):
        return WordIndex(w.word, tuple(term(t, env) for t in w.indices))

    def walk(x, env, depth):
        if isinstance(x, Compare):
            return Compare(term(x.left, env), x.op, term(x.right, env))
        if isinstance(x, LetterEq):
            r = idx(x.right, env) if isinstance(x.right, WordIndex) else x.right
            return LetterEq(idx(x.left, env), x.op, r)
        if isinstance(x, Custom):
            return Custom(x.name, tuple(term(t, env) for t in x.args))
        if isinstance(x, Not):
            return Not(walk(x.body, env, depth))
        if isinstance(x, (And, Or, Implies, Iff)):
            return type(x)(walk(x.left, env, depth), walk(x.right, env, depth))
        if isinstance(x, (Exists, ForAll)):
            env2 = dict(env)
            names = []
            for k, v in enumerate(x.vars):
                env2[v] = f"%{depth + k}"
                names.append(env2[v])
            return type(x)(tuple(names), walk(x.body, env2, depth + len(x.vars)))
        raise TypeError(x)

    return walk(f, {}, 0), free


def _postorder(f):
    out = []

    def walk(x):
        if isinstance(x, Not):
            walk(x.body)
        elif isinstance(x, (And, Or, Implies, Iff)):
            walk(x.left)
            walk(x.right)
        elif isinstance(x, (Exists, ForAll)):
            walk(x.body)
        out.append(x)
    walk(f)
    return out


# --- the compiler ---------------------------------------------------------------

class _Compiler:
    def __init__(self, env: CompileEnv, log: CompileLog):
        self.env = env
        self.log = log
        self.fresh_count = 0

    def fresh(self):
        name = f"#{self.fresh_count}"
        self.fresh_count += 1
        return name

    def record(self, node, dfa, ms):
        rec = LogRecord(format_formula(node), dfa.log_size(), ms)
        self.log.records.append(rec)
        if self.env.log_sink:
            k = len(self.log.records) - 1
            self.env.log_sink(" " * k + f"{rec.text} with {rec.states} states, in {rec.ms}ms")

    def compile(self, f) -> Dfa:
        cache_key = None
        if self.env.use_cache:
            cache_key, free = _alpha_key(f)
            hit = self.env._cache.get(cache_key)
            if hit is not None:
                dfa, states, peak = hit
                # a cache hit reports the peak of the original work and obeys the cap
                bud = current_budget()
                if peak > bud.max_states:
                    raise StateLimitExceeded(bud.max_states)
                bud.note(peak)
                back = {f"${i}": v for i, v in enumerate(free)}
                res = au.rename(dfa, back) if back else dfa
                for node, n in zip(_postorder(f), states):
                    rec = LogRecord(format_formula(node), n, 0)
                    self.log.records.append(rec)
                    if self.env.log_sink:
                        k = len(self.log.records) - 1
                        self.env.log_sink(" " * k + f"{rec.text} with {n} states, in 0ms")
                return res
        start = len(self.log.records)
        bud = current_budget()
        outer_peak, bud.peak = bud.peak, 0
        try:
            res = self._compile_node(f)
            peak = bud.peak
        finally:
            bud.peak = max(outer_peak, bud.peak)
        if cache_key is not None:
            _, free = _alpha_key(f)
            to_canon = {v: f"${i}" for i, v in enumerate(free)}
            states = [r.states for r in self.log.records[start:]]
            canon = au.rename(res, to_canon) if to_canon else res
            self.env._cache[cache_key] = (canon, states, peak)
        return res

    def _compile_node(self, f) -> Dfa:
        if isinstance(f, (Compare, LetterEq, Custom)):
            t0 = time.perf_counter()
            res = self.atom(f)
            self.record(f, res, _ms(t0))
            return res
        if isinstance(f, Not):
            body = self.compile(f.body)
            t0 = time.perf_counter()
            res = au.complement(body)
            self.record(f, res, _ms(t0))
            return res
        if isinstance(f, (And, Or, Implies, Iff)):
            left = self.compile(f.left)
            right = self.compile(f.right)
            t0 = time.perf_counter()
            op = {And: "and", Or: "or", Implies: "implies", Iff: "iff"}[type(f)]
            res = au.product(left, right, op)
            self.record(f, res, _ms(t0))
            return res
        if isinstance(f, (Exists, ForAll)):
            body = self.compile(f.body)
            t0 = time.perf_counter()
            universal = isinstance(f, ForAll)
            cur = au.complement(body) if universal else body
            for v in reversed(f.vars):
                cur = au.exists(cur, v)
            res = au.complement(cur) if universal else cur
            self.record(f, res, _ms(t0))
            return res
        raise CompileError(f"cannot compile {f!r}")

    # atoms -------------------------------------------------------------------
    def atom(self, f) -> Dfa:
        defs = []           # (dfa, fresh track) in creation order
        memo = {}
        if isinstance(f, Compare):
            lt = self.term(f.left, defs, memo)
            rt = self.term(f.right, defs, memo)
            base = au.rename(self.env.order(f.op), {"x": lt, "y": rt})
        elif isinstance(f, LetterEq):
            base = self.letter_relation(f, defs, memo)
        elif isinstance(f, Custom):
            rel = self.env.relations.get(f.name)
            if rel is None:
                raise CompileError(f"unknown relation {f.name!r}")
            if rel.num_tracks != len(f.args):
                raise CompileError(f"relation {f.name!r} takes {rel.num_tracks} arguments, "
                                   f"got {len(f.args)}")
            if rel.universe != self.env.universe:
                raise CompileError(f"relation {f.name!r} uses another numeration system")
            tracks = [self.term(a, defs, memo) for a in f.args]
            base = au.rename(rel, dict(zip(rel.tracks, tracks)))
            if not base.canonical:
                base = au.restrict(base)
        else:
            raise CompileError(f"not an atom: {f!r}")
        return self.close(base, defs)

    def close(self, acc: Dfa, defs) -> Dfa:
        """Conjoin term definitions outermost first, projecting fresh tracks early."""
        remaining = list(reversed(defs))
        fresh = {t for _, t in defs}
        for i, (d, _) in enumerate(remaining):
            acc = au.product(acc, d, "and")
            still = set()
            for d2, _ in remaining[i + 1:]:
                still.update(d2.tracks)
            for t in [t for t in acc.tracks if t in fresh and t not in still]:
                acc = au.exists(acc, t)
        return acc

    def term(self, t, defs, memo) -> str:
        """Track name carrying the value of t; appends defining relations."""
        if isinstance(t, Variable):
            if t.name.startswith("#"):
                raise CompileError("variable names may not start with '#'")
            return t.name
        if t in memo:
            return memo[t]
        value = _const_value(t)
        if value is not None:
            r = self.fresh()
            defs.append((au.rename(self.env.constant(value), {"x": r}), r))
        elif isinstance(t, (Sum, Difference)):
            a = self.term(t.left, defs, memo)
            b = self.term(t.right, defs, memo)
            r = self.fresh()
            add = self.env.adder()
            if isinstance(t, Sum):
                mapping = {"x": a, "y": b, "z": r}
            else:
                mapping = {"x": r, "y": b, "z": a}
            defs.append((au.rename(add, mapping), r))
        elif isinstance(t, ConstMultiple):
            a = self.term(t.term, defs, memo)
            r = self.fresh()
            defs.append((au.rename(self.env.multiple(t.coefficient), {"x": a, "y": r}), r))
        else:
            raise CompileError(f"not a term: {t!r}")
        memo[t] = r
        return r

    def letter_relation(self, f: LetterEq, defs, memo) -> Dfa:
        parts = []
        for side in (f.left, f.right):
            if not isinstance(side, WordIndex):
                continue
            wd = self.env.words.get(side.word)
            if wd is None:
                raise CompileError(f"unknown word {side.word!r}")
            if wd.arity != len(side.indices):
                raise CompileError(f"word {side.word!r} takes {wd.arity} indices, "
                                   f"got {len(side.indices)}")
            tracks = tuple(self.term(ix, defs, memo) for ix in side.indices)
            parts.append((wd.dfao, tracks))
        test = _LETTER_OPS[f.op]
        if isinstance(f.right, WordIndex):
            pred = lambda outs: test(outs[0], outs[1])
        else:
            lit = f.right
            pred = lambda outs: test(outs[0], lit)
        return dfao_relation(parts, pred, self.env.universe)


def _ms(t0):
    return int(round((time.perf_counter() - t0) * 1000))


def _const_value(t):
    if isinstance(t, Constant):
        return t.value
    if isinstance(t, Sum):
        a, b = _const_value(t.left), _const_value(t.right)
        return None if a is None or b is None else a + b
    if isinstance(t, Difference):
        a, b = _const_value(t.left), _const_value(t.right)
        return None if a is None or b is None else a - b
    if isinstance(t, ConstMultiple):
        a = _const_value(t.term)
        return None if a is None else t.coefficient * a
    return None


def dfao_relation(parts, predicate, universe=au.FIB_UNIVERSE) -> Dfa:
    """DFA over the union of index tracks accepting when predicate(outputs) holds.

    ``parts`` lists (dfao, tracks) pairs; a track name may repeat, within
    one part or across parts. DFAOs are first made stable under leading
    zero columns so padded inputs give the same letters.
    """
    parts = [(d.zero_stable(), tuple(tr)) for d, tr in parts]
    names = sorted({t for _, tr in parts for t in tr})
    K = len(names)
    pos = {n: i for i, n in enumerate(names)}
    cols = np.arange(1 << K, dtype=np.int64)
    maps = []
    for d, tr in parts:
        k = len(tr)
        m = np.zeros(1 << K, dtype=np.int64)
        for j, name in enumerate(tr):
            m |= ((cols >> (K - 1 - pos[name])) & 1) << (k - 1 - j)
        maps.append(m.tolist())
    tables = [d.trans.tolist() for d, _ in parts]
    start = tuple(d.initial for d, _ in parts)
    ids = {start: 0}
    order = [start]
    rows = []
    i = 0
    bud = current_budget()
    while i < len(order):
        cur = order[i]
        row = []
        for c in range(1 << K):
            nxt = tuple(tables[p][cur[p]][maps[p][c]] for p in range(len(parts)))
            j = ids.get(nxt)
            if j is None:
                j = len(order)
                ids[nxt] = j
                order.append(nxt)
                if j >= bud.max_states:
                    raise StateLimitExceeded(bud.max_states)
            row.append(j)
        rows.append(row)
        i += 1
    acc = [1 if predicate(tuple(parts[p][0].output[s[p]] for p in range(len(parts)))) else 0
           for s in order]
    d = Dfa(tuple(names), np.array(rows, dtype=np.int32).reshape(len(order), 1 << K), acc, 0,
            False, universe)
    bud.note(d.num_states)
    return au.restrict(d) if K else au.minimize(d)


# --- public API -------------------------------------------------------------------

def compile(f, env: CompileEnv = None):
    """Compile a formula (AST or text); returns (dfa, log)."""
    env = env or CompileEnv()
    if isinstance(f, str):
        f = parse(f)
    log = CompileLog()
    t0 = time.perf_counter()
    with budget(env.max_states, env.timeout) as bud:
        c = _Compiler(env, log)
        res = c.compile(f)
        log.peak = bud.peak
    log.total_ms = _ms(t0)
    if env.log_sink:
        env.log_sink(f"overall time: {log.total_ms}ms")
    return res, log


def compile_term(t, env: CompileEnv = None, result: str = "#r") -> Dfa:
    """Relation between t's variables and a result track named ``result``."""
    env = env or CompileEnv()
    with budget(env.max_states, env.timeout):
        c = _Compiler(env, CompileLog())
        defs = []
        track = c.term(t, defs, {})
        if not defs:
            return au.rename(env.order("="), {"x": track, "y": result})
        last, r = defs.pop()
        last = au.rename(last, {r: result})
        return c.close(last, defs)


def compile_atom(a, env: CompileEnv = None) -> Dfa:
    env = env or CompileEnv()
    if isinstance(a, str):
        a = parse(a)
    with budget(env.max_states, env.timeout):
        return _Compiler(env, CompileLog()).atom(a)


def decide(f, env: CompileEnv = None) -> bool:
    if isinstance(f, str):
        f = parse(f)
    free = free_variables(f)
    if free:
        raise CompileError(f"formula has free variables: {', '.join(free)}")
    dfa, _ = compile(f, env)
    return bool(dfa.accepting[dfa.initial])


# --- adder self-checks ------------------------------------------------------------

ADDER_CHECKS = (
    ("totality", "Ax,y Ez add(x,y,z)"),
    ("uniqueness", "Ax,y,z,w add(x,y,z) & add(x,y,w) => z = w"),
    ("associativity",
     "Ax,y,z,r,s,t add(x,y,r) & add(r,z,t) & add(y,z,s) => add(x,s,t)"),
    ("identity", "Ax,y add(x,0,y) <=> x = y"),
    ("successor", "Ax,y add(x,1,y) => x < y & ~Ez x < z & z < y"),
)


def adder_checks(bundle: NumerationBundle, max_states=2_000_000, timeout=None):
    """Run the five adder self-checks; returns [(name, passed)]."""
    env = CompileEnv(words={}, numsys=bundle, max_states=max_states, timeout=timeout)
    env.add_relation("add", bundle.raw_adder or bundle.adder)
    return [(name, decide(text, env)) for name, text in ADDER_CHECKS]


def verify_numsys(bundle: NumerationBundle, **kw):
    for name, ok in adder_checks(bundle, **kw):
        if not ok:
            raise VerificationError(f"numeration system {bundle.name!r} fails the {name} check")
    return True
