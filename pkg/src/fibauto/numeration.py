"""Zeckendorf numeration and the built-in relation automata.

Digit strings are plain ``str`` objects over "01", most significant digit
first. The least significant position has weight F_2 = 1.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .automata import (FIB_UNIVERSE, Dfa, TupleWord, Universe, from_text, minimize, restrict,
                       to_text, true_dfa)
from .errors import ParseError, VerificationError


@lru_cache(maxsize=None)
def fib(n: int) -> int:
    """F_n with F_0 = 0, F_1 = 1, extended by F_{-1} = 1."""
    if n < 0:
        return (-1) ** (n + 1) * fib(-n)
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def lucas(n: int) -> int:
    return fib(n - 1) + fib(n + 1)


def to_zeckendorf(n: int) -> str:
    if n < 0:
        raise ValueError("only naturals have a representation")
    if n == 0:
        return ""
    k = 2
    while fib(k + 1) <= n:
        k += 1
    digits = []
    for i in range(k, 1, -1):
        if fib(i) <= n:
            digits.append("1")
            n -= fib(i)
        else:
            digits.append("0")
    return "".join(digits)


def from_digits(w: Sequence) -> int:
    """Value of a digit string, canonical or not: sum of a_i F_{n+2-i}."""
    digits = [int(d) for d in w]
    n = len(digits)
    return sum(d * fib(n + 1 - i) for i, d in enumerate(digits))


def is_canonical(w: Sequence) -> bool:
    s = "".join(str(int(d)) for d in w)
    return not s.startswith("0") and "11" not in s


def encode_tuple(values: Sequence[int], encode=to_zeckendorf) -> TupleWord:
    reps = [encode(v) for v in values]
    width = max((len(r) for r in reps), default=0)
    reps = [r.rjust(width, "0") for r in reps]
    cols = tuple(tuple(int(r[i]) for r in reps) for i in range(width))
    return TupleWord(cols, len(values))


def decode_tuple(w: TupleWord, decode=from_digits) -> tuple[int, ...]:
    return tuple(decode(w.track(i)) for i in range(w.track_count))


# adder transitions, row by row; columns [x,y,z] in lexicographic order
_ADDER_TABLE = (
    (0, 0, 0, 0, 0, 0, 0, 0),
    (1, 2, 3, 1, 3, 1, 0, 3),
    (4, 5, 6, 4, 6, 4, 7, 6),
    (0, 8, 0, 0, 0, 0, 0, 0),
    (5, 0, 4, 5, 4, 5, 6, 4),
    (0, 0, 0, 0, 0, 0, 9, 0),
    (2, 10, 1, 2, 1, 2, 3, 1),
    (8, 11, 0, 8, 0, 8, 0, 0),
    (3, 1, 0, 3, 0, 3, 0, 0),
    (0, 0, 5, 0, 5, 0, 4, 5),
    (0, 0, 9, 0, 9, 0, 12, 9),
    (6, 4, 7, 6, 7, 6, 13, 7),
    (10, 14, 2, 10, 2, 10, 1, 2),
    (0, 15, 0, 0, 0, 0, 0, 0),
    (0, 0, 0, 0, 0, 0, 16, 0),
    (0, 3, 0, 0, 0, 0, 0, 0),
    (0, 0, 0, 0, 0, 0, 5, 0),
)
_ADDER_ACCEPTING = (1, 7, 11)


def adder_dfa() -> Dfa:
    """The raw 17-state Fibonacci adder over tracks (x, y, z): x + y = z.

    State 0 is the dead state and state 1 is initial; the machine also
    works on non-canonical inputs.
    """
    acc = np.zeros(17, dtype=np.uint8)
    acc[list(_ADDER_ACCEPTING)] = 1
    return Dfa(("x", "y", "z"), np.array(_ADDER_TABLE, dtype=np.int32), acc, 1, False,
               FIB_UNIVERSE)


# 0: equal so far, 1: first track smaller, 2: first track larger
_COMPARE_TRANS = ((0, 1, 2, 0), (1, 1, 1, 1), (2, 2, 2, 2))
_COMPARE_ACCEPT = {
    "<": (1,), "<=": (0, 1), "=": (0,), "!=": (1, 2), ">": (2,), ">=": (0, 2),
}


def compare_dfa(op: str, universe: Universe = FIB_UNIVERSE,
                tracks: tuple[str, str] = ("x", "y")) -> Dfa:
    """Radix-order comparison of two padded canonical tracks.

    Valid for any numeration system whose canonical representations have
    no leading zeros and whose radix order matches integer order.
    """
    if op not in _COMPARE_ACCEPT:
        raise ValueError(f"unknown comparison {op!r}")
    acc = np.zeros(3, dtype=np.uint8)
    acc[list(_COMPARE_ACCEPT[op])] = 1
    raw = Dfa(tracks, np.array(_COMPARE_TRANS, dtype=np.int32), acc, 0, False, universe)
    return restrict(raw)


def less_than_dfa() -> Dfa:
    return compare_dfa("<")


def leq_dfa() -> Dfa:
    return compare_dfa("<=")


def eq_dfa() -> Dfa:
    return compare_dfa("=")


def neq_dfa() -> Dfa:
    return compare_dfa("!=")


def gt_dfa() -> Dfa:
    return compare_dfa(">")


def geq_dfa() -> Dfa:
    return compare_dfa(">=")


def canonical_dfa(k: int, universe: Universe = FIB_UNIVERSE) -> Dfa:
    """Tuples over k tracks whose every track is a valid representation."""
    if k < 1:
        raise ValueError("need at least one track")
    names = ("x", "y", "z") if k <= 3 else tuple(f"x{i}" for i in range(k))
    return true_dfa(names[:k], universe)


# --- numeration bundles ----------------------------------------------------------

def universe_from_dfa(name: str, canon: Dfa) -> Universe:
    """Universe built from a 1-track DFA of the valid digit strings."""
    if canon.num_tracks != 1:
        raise VerificationError("canonical-language automaton must have one track")
    m = minimize(canon)
    trans = tuple((int(r[0]), int(r[1])) for r in m.trans)
    acc = tuple(bool(x) for x in m.accepting)
    if not acc[m.initial] or trans[m.initial][0] != m.initial:
        raise VerificationError("canonical language must contain ε and be closed "
                                "under leading zeros")
    dead = -1
    for s, (t0, t1) in enumerate(trans):
        if not acc[s] and t0 == s and t1 == s:
            dead = s
    return Universe(name, trans, acc, m.initial, dead)


@dataclass
class NumerationBundle:
    """Adder, order and canonical-language automata for one numeration system.

    ``adder`` and ``order`` are restricted to valid representations; the
    raw adder (possibly accepting non-canonical input) is kept as given.
    """

    name: str
    adder: Dfa
    order: Dfa
    canonical: Dfa
    universe: Universe
    raw_adder: Dfa = None
    _counts: dict = field(default_factory=dict, repr=False)

    def encode(self, n: int) -> str:
        if self.universe == FIB_UNIVERSE:
            return to_zeckendorf(n)
        return self._radix_encode(n)

    def decode(self, w) -> int:
        if self.universe == FIB_UNIVERSE:
            return from_digits(w)
        return self._radix_decode("".join(str(int(d)) for d in w).lstrip("0"))

    def encode_tuple(self, values):
        return encode_tuple(values, self.encode)

    # radix enumeration of the valid language: n-th word in radix order
    def _suffix_counts(self, length):
        # counts[s][l] = accepted strings of length l from universe state s
        u = self.universe
        ns = len(u.trans)
        key = length
        if key in self._counts:
            return self._counts[key]
        counts = [[0] * (length + 1) for _ in range(ns)]
        for s in range(ns):
            counts[s][0] = 1 if u.accepting[s] else 0
        for l in range(1, length + 1):
            for s in range(ns):
                counts[s][l] = counts[u.trans[s][0]][l - 1] + counts[u.trans[s][1]][l - 1]
        self._counts[key] = counts
        return counts

    def _count_with_lead(self, L):
        u = self.universe
        if L == 0:
            return 1
        counts = self._suffix_counts(L)
        return counts[u.trans[u.initial][1]][L - 1]

    def _radix_encode(self, n):
        u = self.universe
        L = 0
        while n >= self._count_with_lead(L):
            n -= self._count_with_lead(L)
            L += 1
            if L > 10000:
                raise ValueError("numeration system has too few representations")
        if L == 0:
            return ""
        counts = self._suffix_counts(L)
        s = u.trans[u.initial][1]
        out = ["1"]
        for rem in range(L - 1, 0, -1):
            c0 = counts[u.trans[s][0]][rem - 1]
            if n < c0:
                out.append("0")
                s = u.trans[s][0]
            else:
                n -= c0
                out.append("1")
                s = u.trans[s][1]
        return "".join(out)

    def _radix_decode(self, w):
        u = self.universe
        L = len(w)
        n = sum(self._count_with_lead(l) for l in range(L))
        if L == 0:
            return n
        counts = self._suffix_counts(L)
        s = u.trans[u.initial][1]
        for i, ch in enumerate(w[1:], start=1):
            rem = L - i
            if ch == "1":
                n += counts[u.trans[s][0]][rem - 1]
                s = u.trans[s][1]
            else:
                s = u.trans[s][0]
        return n

    def to_text(self) -> str:
        parts = [f"numsys {self.name}",
                 "[adder]", to_text(self.raw_adder or self.adder),
                 "[order]", to_text(self.order),
                 "[canonical]", to_text(self.canonical)]
        return "\n".join(parts)

    def write_file(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_text())


def make_bundle(name: str, adder: Dfa, order: Dfa, canonical: Dfa) -> NumerationBundle:
    universe = universe_from_dfa(name, canonical)
    def adopt(d):
        return Dfa(d.tracks, d.trans, d.accepting, d.initial, False, universe)
    canon = restrict(adopt(canonical))
    raw = adopt(adder)
    return NumerationBundle(name, restrict(raw), restrict(adopt(order)), canon, universe, raw)


def fib_bundle() -> NumerationBundle:
    return NumerationBundle("fib", restrict(adder_dfa()), less_than_dfa(),
                            canonical_dfa(1), FIB_UNIVERSE, adder_dfa())


def bundle_from_text(text: str) -> NumerationBundle:
    lines = text.splitlines()
    name = None
    sections = {}
    current = None
    offsets = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if current is None and line.startswith("numsys ") and name is None:
            name = line.split()[1]
            continue
        if line in ("[adder]", "[order]", "[canonical]"):
            current = line[1:-1]
            sections[current] = []
            offsets[current] = lineno
            continue
        if current is None:
            if line and not line.startswith("#"):
                raise ParseError("expected a numsys header or a section", line=lineno)
            continue
        sections[current].append(raw)
    if name is None:
        raise ParseError("missing numsys header")
    for sec in ("adder", "order", "canonical"):
        if sec not in sections:
            raise ParseError(f"missing [{sec}] section")

    def parse(sec, universes):
        try:
            return from_text("\n".join(sections[sec]), universes)
        except ParseError as exc:
            if exc.line is not None:
                raise ParseError(str(exc).split(": ", 1)[1], line=exc.line + offsets[sec]) from None
            raise
    placeholder = {name: Universe(name, FIB_UNIVERSE.trans, FIB_UNIVERSE.accepting)}
    canon = parse("canonical", placeholder)
    universes = {name: universe_from_dfa(name, canon)}
    adder = parse("adder", universes)
    order = parse("order", universes)
    for label, d, k in (("adder", adder, 3), ("order", order, 2)):
        if not isinstance(d, Dfa) or d.num_tracks != k:
            raise VerificationError(f"{label} automaton must be a DFA with {k} tracks")
    return make_bundle(name, adder, order, canon)


def read_bundle(path) -> NumerationBundle:
    with open(path, encoding="utf-8") as fh:
        return bundle_from_text(fh.read())
