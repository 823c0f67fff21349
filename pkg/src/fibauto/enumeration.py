"""Linear representations of counting functions.

A representation (u, M0, M1, v) computes b(n) = u M_{a1} ... M_{at} v over
the digits a1..at of the representation of n. Entries are Python ints so
evaluation is exact; the monoid closure uses int64 with an overflow guard.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from . import automata as au
from .automata import Dfa
from .errors import CompileError, FibautoError, ParseError
from .numeration import to_zeckendorf


@dataclass(frozen=True, eq=False)
class LinearRepresentation:
    u: tuple
    m0: tuple
    m1: tuple
    v: tuple

    def __post_init__(self):
        d = len(self.u)
        object.__setattr__(self, "u", tuple(int(x) for x in self.u))
        object.__setattr__(self, "v", tuple(int(x) for x in self.v))
        for name in ("m0", "m1"):
            m = tuple(tuple(int(x) for x in row) for row in getattr(self, name))
            if len(m) != d or any(len(row) != d for row in m):
                raise ValueError(f"{name} must be {d}x{d}")
            object.__setattr__(self, name, m)
        if len(self.v) != d:
            raise ValueError("u and v must have the same length")

    @property
    def rank(self) -> int:
        return len(self.u)

    def matrix(self, digit) -> tuple:
        return self.m1 if int(digit) else self.m0

    def __eq__(self, other):
        return (isinstance(other, LinearRepresentation) and self.u == other.u
                and self.m0 == other.m0 and self.m1 == other.m1 and self.v == other.v)

    def __hash__(self):
        return hash((self.u, self.m0, self.m1, self.v))

    # text block: rank d / u ... / M0 rows / M1 rows / v ...
    def to_text(self) -> str:
        lines = [f"rank {self.rank}", "u " + " ".join(map(str, self.u)), "M0"]
        lines += [" ".join(map(str, row)) for row in self.m0]
        lines.append("M1")
        lines += [" ".join(map(str, row)) for row in self.m1]
        lines.append("v " + " ".join(map(str, self.v)))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "LinearRepresentation":
        rows = [(n, ln.split("#", 1)[0].split()) for n, ln in enumerate(text.splitlines(), 1)]
        rows = [(n, p) for n, p in rows if p]
        it = iter(rows)
        try:
            n, p = next(it)
            if p[0] != "rank" or len(p) != 2:
                raise ParseError("expected 'rank <d>'", line=n)
            d = int(p[1])
            n, p = next(it)
            if p[0] != "u" or len(p) != d + 1:
                raise ParseError(f"expected 'u' followed by {d} entries", line=n)
            u = [int(x) for x in p[1:]]
            mats = []
            for label in ("M0", "M1"):
                n, p = next(it)
                if p != [label]:
                    raise ParseError(f"expected {label}", line=n)
                m = []
                for _ in range(d):
                    n, p = next(it)
                    if len(p) != d:
                        raise ParseError(f"matrix row needs {d} entries", line=n)
                    m.append([int(x) for x in p])
                mats.append(m)
            n, p = next(it)
            if p[0] != "v" or len(p) != d + 1:
                raise ParseError(f"expected 'v' followed by {d} entries", line=n)
            v = [int(x) for x in p[1:]]
        except StopIteration:
            raise ParseError("truncated linear representation") from None
        except ValueError as exc:
            raise ParseError(f"bad number ({exc})", line=n) from None
        extra = next(it, None)
        if extra is not None:
            raise ParseError("trailing data after v", line=extra[0])
        return cls(u, mats[0], mats[1], v)


def read_linrep(path) -> LinearRepresentation:
    with open(path, encoding="utf-8") as fh:
        return LinearRepresentation.from_text(fh.read())


def write_linrep(r: LinearRepresentation, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(r.to_text())


def linrep_from_dfa(dfa: Dfa, param: str) -> LinearRepresentation:
    """Representation counting, for each n, the accepted assignments of the
    other tracks when track ``param`` carries n.

    Only live states are kept. Counted variables may need more digits than
    n; those witnesses are folded into u by summing over prefixes whose
    param digits are all zero, counting each tuple once by its shortest
    encoding. Raises if some n has infinitely many witnesses.
    """
    if param not in dfa.tracks:
        raise CompileError(f"parameter {param!r} is not a track of the automaton")
    if int(dfa.trans[dfa.initial, 0]) != dfa.initial:
        dfa = au.pad_closure(dfa)
    k = dfa.num_tracks
    p = dfa.tracks.index(param)
    shift = k - 1 - p
    live = dfa.live_states()
    q0 = dfa.initial
    states = [s for s in range(dfa.num_states) if live[s] or s == q0]
    index = {s: i for i, s in enumerate(states)}
    d = len(states)
    m = [[[0] * d for _ in range(d)] for _ in range(2)]
    trans = dfa.trans
    for s in states:
        row = trans[s]
        for c in range(1 << k):
            t = int(row[c])
            if t in index and live[t]:
                m[(c >> shift) & 1][index[s]][index[t]] += 1
    # first padding column: param digit 0 and not the all-zero column
    n0 = [r[:] for r in m[0]]
    i0 = index[q0]
    z = int(trans[q0, 0])
    if z in index and live[z]:
        n0[i0][index[z]] -= 1
    u = [0] * d
    u[i0] = 1
    c = n0[i0][:]
    steps = 0
    while any(c):
        u = [a + b for a, b in zip(u, c)]
        c = _vec_mat(c, m[0])
        steps += 1
        if steps > d + 1:
            raise FibautoError("count not finite: some n has infinitely many witnesses")
    v = [1 if dfa.accepting[s] else 0 for s in states]
    return LinearRepresentation(u, m[0], m[1], v)


def _vec_mat(x, mat):
    d = len(x)
    out = [0] * d
    for i, xi in enumerate(x):
        if xi:
            row = mat[i]
            for j in range(d):
                if row[j]:
                    out[j] += xi * row[j]
    return out


def evaluate_digits(r: LinearRepresentation, digits) -> int:
    x = list(r.u)
    for ch in digits:
        x = _vec_mat(x, r.matrix(ch))
    return sum(a * b for a, b in zip(x, r.v))


def evaluate(r: LinearRepresentation, n, encode=to_zeckendorf) -> int:
    """Value at n (an int, encoded canonically) or at a digit string."""
    digits = encode(n) if isinstance(n, int) else n
    return evaluate_digits(r, digits)


@dataclass
class MonoidClosure:
    elements: list
    complete: bool
    cap: int

    def __len__(self):
        return len(self.elements)

    @property
    def outcome(self) -> str:
        return "closed" if self.complete else f"not closed within cap {self.cap}"


_LIMIT = 1 << 31


def monoid_closure(r: LinearRepresentation, cap: int = 100_000) -> MonoidClosure:
    """Breadth-first closure of {I} under right multiplication by M0 and M1."""
    d = r.rank
    gens = [np.array(r.m0, dtype=np.int64), np.array(r.m1, dtype=np.int64)]
    ident = np.eye(d, dtype=np.int64)
    seen = {ident.tobytes()}
    elements = [ident]
    queue = deque([ident])
    while queue:
        a = queue.popleft()
        for g in gens:
            if np.abs(a).max(initial=0) >= _LIMIT or np.abs(g).max(initial=0) >= _LIMIT:
                raise OverflowError("matrix entries too large for the closure")
            b = a @ g
            key = b.tobytes()
            if key in seen:
                continue
            if len(elements) >= cap:
                return MonoidClosure(elements, False, cap)
            seen.add(key)
            elements.append(b)
            queue.append(b)
    return MonoidClosure(elements, True, cap)


def value_range(r: LinearRepresentation, closure) -> set:
    elements = closure.elements if isinstance(closure, MonoidClosure) else closure
    if isinstance(closure, MonoidClosure) and not closure.complete:
        raise FibautoError("monoid closure is incomplete; the value range is unknown")
    u = np.array(r.u, dtype=object)
    v = np.array(r.v, dtype=object)
    return {int(u.dot(np.array(m, dtype=object)).dot(v)) for m in elements}


def equal_on_strings(r1: LinearRepresentation, r2: LinearRepresentation,
                     length_bound: int = None) -> bool:
    """Whether u μ(x) v agree for every binary string x with |x| <= bound."""
    if length_bound is None:
        length_bound = r1.rank + r2.rank
    reps = []
    for r in (r1, r2):
        reps.append([np.array(r.u, dtype=np.int64)[None, :],
                     np.array(r.m0, dtype=np.int64), np.array(r.m1, dtype=np.int64),
                     np.array(r.v, dtype=np.int64)])
    for length in range(length_bound + 1):
        vals = [rep[0].dot(rep[3]) for rep in reps]
        if not np.array_equal(vals[0], vals[1]):
            return False
        if length == length_bound:
            break
        for rep in reps:
            x, m0, m1 = rep[0], rep[1], rep[2]
            big = x.dtype != object and np.abs(x).max(initial=0) >= _LIMIT
            if big or x.dtype == object:
                x = x.astype(object)
                m0o, m1o = m0.astype(object), m1.astype(object)
                rep[0] = np.concatenate([x.dot(m0o), x.dot(m1o)])
                rep[3] = rep[3].astype(object)
            else:
                rep[0] = np.concatenate([x @ m0, x @ m1])
    return True
