"""Multi-track automata over binary digit columns.

A column over k tracks is stored as an integer in [0, 2**k); the bit for
track i (0-based, in the automaton's track order) is ``(c >> (k-1-i)) & 1``.
So the first track is the most significant bit and integer order on
columns is lexicographic order on bit tuples.

Every automaton lives inside a *universe*: the pad-closed single-track
language of valid digit strings (for Fibonacci, the words avoiding 11),
applied independently to each track. Complement and every boolean
product are taken relative to that universe, so "all n" means "all valid
representations".
"""
from __future__ import annotations

from contextlib import contextmanager
import contextvars
from dataclasses import dataclass
import time
from typing import Callable, Iterable, Sequence, Union

import numpy as np

from . import kernels
from .errors import ParseError

Column = tuple[int, ...]


@dataclass(frozen=True)
class Universe:
    """Total single-track DFA of the valid digit strings (pad-closed)."""

    name: str
    trans: tuple[tuple[int, int], ...]
    accepting: tuple[bool, ...]
    initial: int = 0
    dead: int = -1

    def arrays(self):
        return (np.array(self.trans, dtype=np.int32).reshape(-1, 2),
                np.array(self.accepting, dtype=np.uint8))


# state 0: last digit 0 (or nothing read), 1: last digit 1, 2: saw 11
FIB_UNIVERSE = Universe("fib", ((0, 1), (0, 2), (2, 2)), (True, True, False), 0, 2)


@dataclass(frozen=True)
class TupleWord:
    """A word of k-bit columns encoding a k-tuple of naturals in lockstep."""

    columns: tuple[Column, ...]
    track_count: int

    def __post_init__(self):
        for col in self.columns:
            if len(col) != self.track_count:
                raise ValueError("all columns must share the track count")
            if any(b not in (0, 1) for b in col):
                raise ValueError("column entries must be bits")

    def __len__(self):
        return len(self.columns)

    def track(self, i) -> str:
        return "".join(str(col[i]) for col in self.columns)

    def __str__(self):
        if self.track_count == 1:
            return "".join(str(c[0]) for c in self.columns)
        return "".join("[" + ",".join(map(str, c)) + "]" for c in self.columns)


def column_index(bits: Sequence[int]) -> int:
    c = 0
    for b in bits:
        c = (c << 1) | int(b)
    return c


def column_bits(c: int, k: int) -> Column:
    return tuple((c >> (k - 1 - i)) & 1 for i in range(k))


def format_column(c: int, k: int) -> str:
    return ",".join(map(str, column_bits(c, k))) if k else "-"


# --- resource accounting -----------------------------------------------------

@dataclass
class Budget:
    """State cap, optional deadline and the running peak of raw state counts."""

    max_states: int = 2_000_000
    deadline: float = 0.0
    peak: int = 0

    def note(self, n):
        if n > self.peak:
            self.peak = n


_budget: contextvars.ContextVar = contextvars.ContextVar("fibauto_budget", default=None)


def current_budget() -> Budget:
    b = _budget.get()
    if b is None:
        b = Budget()
        _budget.set(b)
    return b


@contextmanager
def budget(max_states=2_000_000, timeout=None):
    deadline = time.monotonic() + timeout if timeout else 0.0
    b = Budget(max_states=max_states, deadline=deadline)
    token = _budget.set(b)
    try:
        yield b
    finally:
        _budget.reset(token)


# --- automaton types ---------------------------------------------------------

def _as_trans(trans, k):
    arr = np.ascontiguousarray(np.asarray(trans, dtype=np.int32))
    if arr.ndim != 2 or arr.shape[1] != (1 << k):
        raise ValueError(f"transition table must have shape (n, {1 << k})")
    return arr


@dataclass(frozen=True, eq=False)
class Dfa:
    """Total DFA over k named tracks.

    ``canonical`` records that the language is known to lie inside the
    universe; products use it to skip redundant universe tracking.
    """

    tracks: tuple[str, ...]
    trans: np.ndarray
    accepting: np.ndarray
    initial: int = 0
    canonical: bool = False
    universe: Universe = FIB_UNIVERSE

    def __post_init__(self):
        object.__setattr__(self, "tracks", tuple(self.tracks))
        if len(set(self.tracks)) != len(self.tracks):
            raise ValueError("track names must be distinct")
        object.__setattr__(self, "trans", _as_trans(self.trans, len(self.tracks)))
        acc = np.ascontiguousarray(np.asarray(self.accepting, dtype=np.uint8))
        if acc.shape != (self.trans.shape[0],):
            raise ValueError("accepting mask must have one entry per state")
        object.__setattr__(self, "accepting", acc)
        n = self.trans.shape[0]
        if n == 0 or not 0 <= self.initial < n:
            raise ValueError("initial state out of range")
        if self.trans.size and (self.trans.min() < 0 or self.trans.max() >= n):
            raise ValueError("transition target out of range")

    @property
    def num_states(self) -> int:
        return int(self.trans.shape[0])

    @property
    def num_tracks(self) -> int:
        return len(self.tracks)

    @property
    def ncols(self) -> int:
        return 1 << len(self.tracks)

    def step(self, state: int, column: Sequence[int]) -> int:
        return int(self.trans[state, column_index(column)])

    def run(self, word) -> int:
        s = self.initial
        for col in _columns_of(word, self.num_tracks):
            s = int(self.trans[s, col])
        return s

    def accepts(self, word) -> bool:
        return bool(self.accepting[self.run(word)])

    def accepts_values(self, *values: int) -> bool:
        from .numeration import encode_tuple
        if len(values) == 1 and isinstance(values[0], (tuple, list)):
            values = tuple(values[0])
        if len(values) != self.num_tracks:
            raise ValueError(f"expected {self.num_tracks} values")
        if not values:
            return bool(self.accepting[self.initial])
        return self.accepts(encode_tuple(list(values)))

    def live_states(self) -> np.ndarray:
        """Mask of states that are reachable and can reach acceptance."""
        co = kernels.coreachable(self.trans, self.accepting).astype(bool)
        return co & _reachable_mask(self.trans, self.initial)

    def log_size(self) -> int:
        """Size as reported in compile logs: live states plus initial plus one sink."""
        live = self.live_states()
        live[self.initial] = True
        return int(live.sum()) + 1

    def is_empty(self) -> bool:
        return is_empty(self)

    def __repr__(self):
        return f"Dfa(tracks={self.tracks}, states={self.num_states})"


@dataclass(frozen=True, eq=False)
class Nfa:
    """NFA over named tracks; ``trans`` has shape (n, 2**k, w), -1 padded."""

    tracks: tuple[str, ...]
    trans: np.ndarray
    accepting: np.ndarray
    initial: frozenset
    canonical: bool = False
    universe: Universe = FIB_UNIVERSE

    def __post_init__(self):
        object.__setattr__(self, "tracks", tuple(self.tracks))
        arr = np.ascontiguousarray(np.asarray(self.trans, dtype=np.int32))
        if arr.ndim != 3 or arr.shape[1] != (1 << len(self.tracks)):
            raise ValueError("NFA transitions must have shape (n, 2**k, w)")
        object.__setattr__(self, "trans", arr)
        object.__setattr__(self, "accepting",
                           np.ascontiguousarray(np.asarray(self.accepting, dtype=np.uint8)))
        object.__setattr__(self, "initial", frozenset(int(s) for s in self.initial))

    @property
    def num_states(self) -> int:
        return int(self.trans.shape[0])

    def accepts(self, word) -> bool:
        cur = set(self.initial)
        for col in _columns_of(word, len(self.tracks)):
            cur = {int(t) for s in cur for t in self.trans[s, col] if t >= 0}
        return any(self.accepting[s] for s in cur)


@dataclass(frozen=True, eq=False)
class Dfao:
    """Total DFA with an output letter (a small integer) on every state."""

    tracks: tuple[str, ...]
    trans: np.ndarray
    output: tuple[int, ...]
    initial: int = 0
    universe: Universe = FIB_UNIVERSE

    def __post_init__(self):
        object.__setattr__(self, "tracks", tuple(self.tracks))
        if len(set(self.tracks)) != len(self.tracks):
            raise ValueError("track names must be distinct")
        object.__setattr__(self, "trans", _as_trans(self.trans, len(self.tracks)))
        object.__setattr__(self, "output", tuple(int(x) for x in self.output))
        if len(self.output) != self.trans.shape[0]:
            raise ValueError("output must be defined for every state")
        n = self.trans.shape[0]
        if not 0 <= self.initial < n:
            raise ValueError("initial state out of range")
        if self.trans.size and (self.trans.min() < 0 or self.trans.max() >= n):
            raise ValueError("transition target out of range")

    @property
    def num_states(self) -> int:
        return int(self.trans.shape[0])

    @property
    def num_tracks(self) -> int:
        return len(self.tracks)

    def run(self, word) -> int:
        s = self.initial
        for col in _columns_of(word, self.num_tracks):
            s = int(self.trans[s, col])
        return s

    def output_on(self, word) -> int:
        return self.output[self.run(word)]

    def alphabet(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.output)))

    def zero_stable(self) -> "Dfao":
        """Equivalent DFAO whose initial state ignores leading all-zero columns.

        Outputs only change on canonical inputs, which never start with an
        all-zero column, so this does not alter the generated sequence.
        """
        if int(self.trans[self.initial, 0]) == self.initial:
            return self
        n = self.num_states
        row = self.trans[self.initial].copy()
        row[0] = n
        trans = np.vstack([self.trans, row[None, :]])
        return Dfao(self.tracks, trans, self.output + (self.output[self.initial],), n, self.universe)

    def __repr__(self):
        return f"Dfao(tracks={self.tracks}, states={self.num_states})"


def _columns_of(word, k) -> Iterable[int]:
    if isinstance(word, TupleWord):
        if word.track_count != k and not (k == 0 and not word.columns):
            raise ValueError(f"word has {word.track_count} tracks, automaton has {k}")
        return [column_index(c) for c in word.columns]
    if isinstance(word, str):
        if k != 1:
            raise ValueError("string input only valid for single-track automata")
        return [int(ch) for ch in word]
    out = []
    for col in word:
        if isinstance(col, int):
            out.append(col)
        else:
            if len(col) != k:
                raise ValueError("column arity mismatch")
            out.append(column_index(col))
    return out


def _reachable_mask(trans, initial):
    n = trans.shape[0]
    seen = np.zeros(n, dtype=bool)
    seen[initial] = True
    frontier = np.array([initial])
    while frontier.size:
        nxt = np.unique(trans[frontier].ravel())
        nxt = nxt[~seen[nxt]]
        seen[nxt] = True
        frontier = nxt
    return seen


# --- constructors --------------------------------------------------------------

def true_dfa(tracks: Sequence[str] = (), universe: Universe = FIB_UNIVERSE) -> Dfa:
    """Every valid tuple over the given tracks."""
    base = Dfa((), np.zeros((1, 1), dtype=np.int32), [1], 0, True, universe)
    if not tracks:
        return base
    return product(base, Dfa(tuple(tracks), np.zeros((1, 1 << len(tracks)), dtype=np.int32),
                             [1], 0, False, universe), "and")


def false_dfa(tracks: Sequence[str] = (), universe: Universe = FIB_UNIVERSE) -> Dfa:
    k = len(tracks)
    return Dfa(tuple(tracks), np.zeros((1, 1 << k), dtype=np.int32), [0], 0, True, universe)


# --- boolean products ---------------------------------------------------------

BOOLEAN_OPS = {
    "and": 0b1000,
    "or": 0b1110,
    "implies": 0b1011,
    "iff": 0b1001,
    "xor": 0b0110,
    "diff": 0b0100,   # a and not b
    "not_a": 0b0011,
}


def _op_code(combine) -> int:
    if isinstance(combine, str):
        try:
            return BOOLEAN_OPS[combine]
        except KeyError:
            raise ValueError(f"unknown boolean op {combine!r}") from None
    if isinstance(combine, int):
        return combine & 0xF
    code = 0
    for x in (0, 1):
        for y in (0, 1):
            if combine(bool(x), bool(y)):
                code |= 1 << (2 * x + y)
    return code


def _projection_map(sub_tracks, union_tracks):
    """For each column over union_tracks, the column over sub_tracks."""
    K = len(union_tracks)
    k = len(sub_tracks)
    cols = np.arange(1 << K, dtype=np.int64)
    out = np.zeros(1 << K, dtype=np.int64)
    pos = {name: i for i, name in enumerate(union_tracks)}
    for j, name in enumerate(sub_tracks):
        u = pos[name]
        out |= ((cols >> (K - 1 - u)) & 1) << (k - 1 - j)
    return np.ascontiguousarray(out.astype(np.int32))


def _dead_mask(a):
    return np.ascontiguousarray(1 - kernels.coreachable(a.trans, a.accepting), dtype=np.uint8)


def product(a: Dfa, b: Dfa, combine: Union[str, int, Callable] = "and",
            minimal: bool = True) -> Dfa:
    """Boolean combination of two DFAs aligned by track name.

    The result works over the sorted union of the track names and accepts
    w iff w is valid in the universe and combine(a accepts, b accepts).
    """
    if a.universe != b.universe:
        raise ValueError("automata come from different numeration systems")
    op = _op_code(combine)
    union = tuple(sorted(set(a.tracks) | set(b.tracks)))
    K = len(union)
    f00, f01, f10 = op & 1, (op >> 1) & 1, (op >> 2) & 1
    sa, sb = set(a.tracks), set(b.tracks)
    shifts = []
    for i, name in enumerate(union):
        if name in sa and name in sb:
            skip = a.canonical and b.canonical and not f00
        elif name in sa:
            skip = a.canonical and not f00 and not f01
        else:
            skip = b.canonical and not f00 and not f10
        if not skip:
            shifts.append(K - 1 - i)
    ctrans, cacc = a.universe.arrays()
    bud = current_budget()
    trans, acc = kernels.product(
        a.trans, a.accepting, a.initial, _projection_map(a.tracks, union), _dead_mask(a),
        b.trans, b.accepting, b.initial, _projection_map(b.tracks, union), _dead_mask(b),
        1 << K, op, ctrans, cacc, a.universe.initial, a.universe.dead,
        np.array(shifts, dtype=np.int32), bud.max_states, bud.deadline)
    bud.note(trans.shape[0])
    res = Dfa(union, trans, acc, 0, True, a.universe)
    return minimize(res) if minimal else res


def intersect(a: Dfa, b: Dfa) -> Dfa:
    return product(a, b, "and")


def union(a: Dfa, b: Dfa) -> Dfa:
    return product(a, b, "or")


def complement(a: Dfa) -> Dfa:
    """Complement within the universe: valid words that a rejects."""
    return product(a, true_dfa((), a.universe), "not_a")


def restrict(a: Dfa) -> Dfa:
    """Intersect with the universe over a's own tracks."""
    if a.canonical:
        return a
    return product(a, true_dfa((), a.universe), "and")


# --- projection, pad closure, determinization -------------------------------

def project(a: Dfa, track: str) -> Nfa:
    """Erase one track; the result is an NFA over the remaining tracks."""
    if track not in a.tracks:
        raise KeyError(f"unknown track {track!r}")
    k = a.num_tracks
    i = a.tracks.index(track)
    s = k - 1 - i
    rest = tuple(t for t in a.tracks if t != track)
    cols = np.arange(1 << (k - 1), dtype=np.int64)
    low = cols & ((1 << s) - 1)
    high = cols >> s
    c0 = (high << (s + 1)) | low
    c1 = c0 | (1 << s)
    trans3 = np.stack([a.trans[:, c0], a.trans[:, c1]], axis=2)
    return Nfa(rest, trans3, a.accepting, frozenset([a.initial]), a.canonical, a.universe)


def _as_nfa(a: Dfa) -> Nfa:
    return Nfa(a.tracks, a.trans[:, :, None], a.accepting, frozenset([a.initial]),
               a.canonical, a.universe)


def pad_closure(a):
    """Make acceptance invariant under leading all-zero columns.

    Every state reachable from an initial state by all-zero columns becomes
    initial. For a DFA the result is determinized and minimized again.
    """
    if isinstance(a, Dfa):
        return minimize(determinize(pad_closure(_as_nfa(a))))
    seen = set(a.initial)
    stack = list(a.initial)
    while stack:
        s = stack.pop()
        for t in a.trans[s, 0]:
            t = int(t)
            if t >= 0 and t not in seen:
                seen.add(t)
                stack.append(t)
    return Nfa(a.tracks, a.trans, a.accepting, frozenset(seen), a.canonical, a.universe)


def determinize(a: Nfa) -> Dfa:
    """Subset construction; the empty subset serves as the dead state."""
    bud = current_budget()
    live = kernels.coreachable(a.trans, a.accepting)
    init = np.array(sorted(a.initial), dtype=np.int32)
    trans, acc = kernels.determinize(a.trans, a.accepting, init, live,
                                     bud.max_states, bud.deadline)
    bud.note(trans.shape[0])
    return Dfa(a.tracks, trans, acc, 0, a.canonical, a.universe)


def minimize(a: Dfa) -> Dfa:
    """Hopcroft minimization; states renumbered breadth-first from the initial state."""
    trans, acc = kernels.minimize(a.trans, a.accepting, a.initial)
    return Dfa(a.tracks, trans, acc, 0, a.canonical, a.universe)


def exists(a: Dfa, track: str) -> Dfa:
    """Existential quantification of one track (project, pad-close, determinize, minimize)."""
    if track not in a.tracks:
        return a
    return minimize(determinize(pad_closure(project(a, track))))


def forall(a: Dfa, track: str) -> Dfa:
    if track not in a.tracks:
        return a
    return complement(exists(complement(a), track))


def rename(a: Union[Dfa, Dfao], mapping: dict) -> Union[Dfa, Dfao]:
    """Rename tracks; mapping two tracks to one name takes the diagonal.

    Tracks missing from the mapping keep their name. The result's tracks
    are sorted by name.
    """
    new_names = [mapping.get(t, t) for t in a.tracks]
    out_tracks = tuple(sorted(set(new_names)))
    K = len(out_tracks)
    k = len(a.tracks)
    pos = {name: i for i, name in enumerate(out_tracks)}
    cols = np.arange(1 << K, dtype=np.int64)
    old = np.zeros(1 << K, dtype=np.int64)
    for j, name in enumerate(new_names):
        old |= ((cols >> (K - 1 - pos[name])) & 1) << (k - 1 - j)
    trans = a.trans[:, old]
    if isinstance(a, Dfao):
        return Dfao(out_tracks, trans, a.output, a.initial, a.universe)
    merged = len(out_tracks) < k
    res = Dfa(out_tracks, trans, a.accepting, a.initial, a.canonical, a.universe)
    if merged or tuple(new_names) != out_tracks:
        return minimize(res)
    return res


def reorder(a: Dfa, tracks: Sequence[str]) -> Dfa:
    """Same automaton with columns laid out in the given track order (no renumbering)."""
    tracks = tuple(tracks)
    if sorted(tracks) != sorted(a.tracks):
        raise ValueError("reorder needs a permutation of the tracks")
    k = len(tracks)
    pos = {name: i for i, name in enumerate(tracks)}
    cols = np.arange(1 << k, dtype=np.int64)
    old = np.zeros(1 << k, dtype=np.int64)
    for j, name in enumerate(a.tracks):
        old |= ((cols >> (k - 1 - pos[name])) & 1) << (k - 1 - j)
    return Dfa(tracks, a.trans[:, old], a.accepting, a.initial, a.canonical, a.universe)


# --- queries -----------------------------------------------------------------

def is_empty(a: Dfa) -> bool:
    reach = _reachable_mask(a.trans, a.initial)
    return not bool((a.accepting.astype(bool) & reach).any())


def accepts(a, w) -> bool:
    return a.accepts(w)


def equivalent(a: Dfa, b: Dfa) -> bool:
    """Language equality after aligning tracks by name."""
    if a.universe != b.universe:
        return False
    return is_empty(product(restrict(a), restrict(b), "xor", minimal=False))


def enumerate_words(a: Dfa, max_len: int) -> list[TupleWord]:
    """Accepted words of length <= max_len whose first column is not all zero."""
    k = a.num_tracks
    m = 1 << k
    co = kernels.coreachable(a.trans, a.accepting).astype(bool)
    out = []
    # breadth-first by length keeps the listing in radix order
    layer = [((), a.initial)]
    for length in range(max_len + 1):
        nxt = []
        for word, s in layer:
            if a.accepting[s]:
                out.append(TupleWord(tuple(column_bits(c, k) for c in word), k))
            if length == max_len:
                continue
            for c in range(m):
                if not word and c == 0:
                    continue
                t = int(a.trans[s, c])
                if co[t]:
                    nxt.append((word + (c,), t))
        layer = nxt
        if not layer:
            break
    return out


def accepted_tuples(a: Dfa, max_len: int) -> list[tuple[int, ...]]:
    from .numeration import decode_tuple
    return [decode_tuple(w) for w in enumerate_words(a, max_len)]


def is_finite(a: Dfa) -> bool:
    """True iff finitely many tuples are accepted (leading zeros not counted)."""
    live = a.live_states()
    if not live[a.initial]:
        return True
    n = a.num_states
    m = a.ncols
    # walk the live graph, ignoring the initial all-zero self loop
    color = [0] * n
    stack = [(a.initial, 0)]
    color[a.initial] = 1
    while stack:
        s, c = stack.pop()
        if c == m:
            color[s] = 2
            continue
        stack.append((s, c + 1))
        if s == a.initial and c == 0:
            t = int(a.trans[s, 0])
            if t == s:
                continue
        t = int(a.trans[s, c])
        if not live[t]:
            continue
        if color[t] == 1:
            return False
        if color[t] == 0:
            color[t] = 1
            stack.append((t, 0))
    return True


# --- text format and DOT -------------------------------------------------------

def to_text(a: Union[Dfa, Dfao], track_order: Sequence[str] = None) -> str:
    if track_order is not None:
        if isinstance(a, Dfao):
            raise ValueError("reordering is only supported for DFAs")
        a = reorder(a, track_order)
    k = a.num_tracks
    lines = [f"tracks {k}" + "".join(" " + t for t in a.tracks),
             f"numsys {a.universe.name}",
             f"states {a.num_states}",
             f"initial {a.initial}"]
    if isinstance(a, Dfao):
        for s, out in enumerate(a.output):
            lines.append(f"output {s} {out}")
    else:
        lines.append("accepting" + "".join(f" {s}" for s in np.flatnonzero(a.accepting)))
    for s in range(a.num_states):
        row = a.trans[s]
        for c in range(1 << k):
            lines.append(f"t {s} {format_column(c, k)} {int(row[c])}")
    return "\n".join(lines) + "\n"


def write_file(a, path, track_order=None):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(to_text(a, track_order))


def from_text(text: str, universes: dict = None):
    """Parse the line-oriented automaton format; returns a Dfa or Dfao."""
    universes = universes or {"fib": FIB_UNIVERSE}
    tracks = None
    numsys = None
    count = None
    initial = None
    accepting = None
    outputs = {}
    edges = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        key = parts[0]
        try:
            if key == "tracks":
                k = int(parts[1])
                names = parts[2:]
                if len(names) != k:
                    raise ParseError(f"expected {k} track names", line=lineno)
                tracks = tuple(names)
            elif key == "numsys":
                numsys = parts[1]
                if numsys not in universes:
                    raise ParseError(f"unknown numeration system {numsys!r}", line=lineno)
            elif key == "states":
                count = int(parts[1])
                if count < 1:
                    raise ParseError("need at least one state", line=lineno)
            elif key == "initial":
                initial = int(parts[1])
            elif key == "accepting":
                accepting = [int(x) for x in parts[1:]]
            elif key == "output":
                if len(parts) != 3:
                    raise ParseError("output line needs a state and a letter", line=lineno)
                st = int(parts[1])
                if st in outputs:
                    raise ParseError(f"duplicate output for state {st}", line=lineno)
                outputs[st] = int(parts[2])
            elif key == "t":
                if len(parts) != 4:
                    raise ParseError("transition line needs: t <from> <bits> <to>", line=lineno)
                if tracks is None or count is None:
                    raise ParseError("transition before tracks/states header", line=lineno)
                src, dst = int(parts[1]), int(parts[3])
                bits = [] if parts[2] == "-" else parts[2].split(",")
                if len(bits) != len(tracks):
                    raise ParseError(f"column has {len(bits)} entries, expected {len(tracks)}",
                                     line=lineno)
                if any(b not in ("0", "1") for b in bits):
                    raise ParseError("column entries must be 0 or 1", line=lineno)
                for st in (src, dst):
                    if not 0 <= st < count:
                        raise ParseError(f"undeclared state {st}", line=lineno)
                col = column_index([int(b) for b in bits])
                if (src, col) in edges:
                    raise ParseError(f"duplicate transition from {src} on {parts[2]}", line=lineno)
                edges[(src, col)] = dst
            else:
                raise ParseError(f"unknown directive {key!r}", line=lineno)
        except (IndexError, ValueError) as exc:
            raise ParseError(f"malformed line ({exc})", line=lineno) from None
    if tracks is None or count is None or initial is None:
        raise ParseError("missing tracks, states or initial header")
    if not 0 <= initial < count:
        raise ParseError(f"initial state {initial} undeclared")
    universe = universes[numsys or "fib"]
    k = len(tracks)
    m = 1 << k
    missing = any((s, c) not in edges for s in range(count) for c in range(m))
    n = count + (1 if missing else 0)
    trans = np.full((n, m), count, dtype=np.int32)
    for (s, c), t in edges.items():
        trans[s, c] = t
    if outputs:
        if accepting is not None:
            raise ParseError("a file cannot have both accepting and output lines")
        for s in range(count):
            if s not in outputs:
                raise ParseError(f"state {s} has no output")
        bad = [s for s in outputs if not 0 <= s < count]
        if bad:
            raise ParseError(f"output for undeclared state {bad[0]}")
        out = [outputs[s] for s in range(count)] + ([0] if missing else [])
        return Dfao(tracks, trans, out, initial, universe)
    acc = np.zeros(n, dtype=np.uint8)
    for s in accepting or []:
        if not 0 <= s < count:
            raise ParseError(f"accepting state {s} undeclared")
        acc[s] = 1
    return Dfa(tracks, trans, acc, initial, False, universe)


def read_file(path, universes=None):
    with open(path, encoding="utf-8") as fh:
        return from_text(fh.read(), universes)


def to_dot(a: Union[Dfa, Dfao], name: str = "A") -> str:
    k = a.num_tracks
    lines = [f"digraph {name} {{", "  rankdir=LR;", "  init [shape=point];",
             f"  init -> q{a.initial};"]
    for s in range(a.num_states):
        if isinstance(a, Dfao):
            lines.append(f'  q{s} [shape=circle, label="q{s}/{a.output[s]}"];')
        else:
            shape = "doublecircle" if a.accepting[s] else "circle"
            lines.append(f'  q{s} [shape={shape}, label="q{s}"];')
    for s in range(a.num_states):
        groups = {}
        for c in range(1 << k):
            groups.setdefault(int(a.trans[s, c]), []).append(c)
        for t, cs in sorted(groups.items()):
            if k == 1:
                label = ",".join(str(c) for c in cs)
            else:
                label = ", ".join("[" + format_column(c, k) + "]" for c in cs)
            lines.append(f'  q{s} -> q{t} [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# --- regular-expression summaries ----------------------------------------------

def _column_label(c, k):
    if k == 1:
        return str(c)
    return "[" + format_column(c, k) + "]"


def to_regex(a: Dfa) -> str:
    """Regular expression for the accepted words without leading zero columns.

    State elimination over the live part of the automaton; intended for
    small automata (the summaries printed by the CLI).
    """
    k = a.num_tracks
    live = a.live_states()
    if not live[a.initial]:
        return "∅"
    states = [s for s in range(a.num_states) if live[s]]
    # node ids: 'S' start, 'E' end, plus live states; the start copies the
    # initial state's edges except the all-zero column
    edges = {}

    def add(p, q, r):
        if (p, q) in edges:
            edges[(p, q)] = _alt(edges[(p, q)], r)
        else:
            edges[(p, q)] = r

    for s in states:
        for c in range(1 << k):
            t = int(a.trans[s, c])
            if live[t]:
                add(s, t, _column_label(c, k))
                if s == a.initial and c != 0:
                    add("S", t, _column_label(c, k))
        if a.accepting[s]:
            add(s, "E", "")
    if a.accepting[a.initial]:
        add("S", "E", "")
    for s in states:
        loop = edges.pop((s, s), None)
        star = _star(loop) if loop is not None else ""
        ins = [(p, r) for (p, q), r in edges.items() if q == s and p != s]
        outs = [(q, r) for (p, q), r in edges.items() if p == s and q != s]
        for (p, _), in zip(ins):
            pass
        for p, r1 in ins:
            del edges[(p, s)]
        for q, r2 in outs:
            del edges[(s, q)]
        for p, r1 in ins:
            for q, r2 in outs:
                add(p, q, _cat(_cat(r1, star), r2))
    r = edges.get(("S", "E"))
    if r is None:
        return "∅"
    return r if r else "ε"


def _needs_parens_cat(r):
    depth = 0
    for ch in r:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch == "+" and depth == 0:
            return True
    return False


def _cat(r1, r2):
    if r1 == "":
        return r2
    if r2 == "":
        return r1
    a = f"({r1})" if _needs_parens_cat(r1) else r1
    b = f"({r2})" if _needs_parens_cat(r2) else r2
    return a + b


def _alt(r1, r2):
    if r1 == r2:
        return r1
    x = r1 if r1 else "ε"
    y = r2 if r2 else "ε"
    return f"{x}+{y}"


def _is_atom(r):
    if len(r) == 1:
        return True
    if r.startswith("[") and r.endswith("]") and r.count("[") == 1:
        return True
    if r.startswith("(") and r.endswith(")"):
        depth = 0
        for i, ch in enumerate(r):
            depth += ch == "("
            depth -= ch == ")"
            if depth == 0 and i < len(r) - 1:
                return False
        return True
    return False


def _star(r):
    if r == "":
        return ""
    return (r if _is_atom(r) else f"({r})") + "*"


# --- regex-defined languages (test and CLI convenience) -------------------------

class _RegexParser:
    """Tiny regex parser: alternation '+', concatenation, postfix '*' / '⁺',
    parentheses, 'ε', digits and bracketed columns like [0,1]."""

    def __init__(self, text, k):
        self.s = text.replace(" ", "")
        self.i = 0
        self.k = k
        self.states = 0
        self.eps = {}
        self.edges = {}

    def new(self):
        self.states += 1
        return self.states - 1

    def peek(self):
        return self.s[self.i] if self.i < len(self.s) else None

    def parse(self):
        frag = self.alt()
        if self.i != len(self.s):
            raise ParseError(f"unexpected {self.s[self.i]!r} in pattern", position=self.i)
        return frag

    def alt(self):
        f = self.cat()
        while self.peek() == "+" and not self._is_postfix_plus():
            self.i += 1
            g = self.cat()
            s, e = self.new(), self.new()
            self.eps.setdefault(s, []).extend([f[0], g[0]])
            self.eps.setdefault(f[1], []).append(e)
            self.eps.setdefault(g[1], []).append(e)
            f = (s, e)
        return f

    def _is_postfix_plus(self):
        return False

    def cat(self):
        frags = []
        while self.peek() is not None and self.peek() not in "+)":
            frags.append(self.postfix())
        if not frags:
            s = self.new()
            return (s, s)
        f = frags[0]
        for g in frags[1:]:
            self.eps.setdefault(f[1], []).append(g[0])
            f = (f[0], g[1])
        return f

    def postfix(self):
        f = self.atom()
        while self.peek() in ("*", "⁺", "^"):
            ch = self.peek()
            if ch == "^":
                if self.s[self.i:self.i + 2] != "^+":
                    raise ParseError("expected ^+", position=self.i)
                self.i += 2
            else:
                self.i += 1
            s, e = self.new(), self.new()
            self.eps.setdefault(s, []).append(f[0])
            self.eps.setdefault(f[1], []).extend([f[0], e])
            if ch == "*":
                self.eps[s].append(e)
            f = (s, e)
        return f

    def atom(self):
        ch = self.peek()
        if ch == "(":
            self.i += 1
            f = self.alt()
            if self.peek() != ")":
                raise ParseError("missing )", position=self.i)
            self.i += 1
            return f
        if ch == "ε":
            self.i += 1
            s = self.new()
            return (s, s)
        if ch == "[":
            j = self.s.index("]", self.i)
            bits = [int(b) for b in self.s[self.i + 1:j].split(",")]
            self.i = j + 1
            if len(bits) != self.k:
                raise ParseError("column arity mismatch in pattern", position=self.i)
            return self.sym(column_index(bits))
        if ch in ("0", "1") and self.k == 1:
            self.i += 1
            return self.sym(int(ch))
        raise ParseError(f"unexpected {ch!r} in pattern", position=self.i)

    def sym(self, c):
        s, e = self.new(), self.new()
        self.edges.setdefault((s, c), []).append(e)
        return (s, e)


def regex_dfa(pattern: str, tracks: Sequence[str], universe: Universe = FIB_UNIVERSE) -> Dfa:
    """DFA for 0*·L(pattern) within the universe, over the given tracks (in order).

    Patterns describe words without leading zeros, as in "10*" or
    "[1,0][0,1][0,0]⁺"; leading all-zero columns are added implicitly.
    """
    tracks = tuple(tracks)
    k = len(tracks)
    p = _RegexParser(pattern, k)
    start, end = p.parse()
    m = 1 << k

    def closure(states):
        seen = set(states)
        stack = list(states)
        while stack:
            s = stack.pop()
            for t in p.eps.get(s, []):
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return frozenset(seen)

    init = closure([start])
    ids = {init: 0}
    order = [init]
    rows = []
    i = 0
    while i < len(order):
        cur = order[i]
        row = []
        for c in range(m):
            nxt = closure([t for s in cur for t in p.edges.get((s, c), [])])
            if nxt not in ids:
                ids[nxt] = len(order)
                order.append(nxt)
            row.append(ids[nxt])
        rows.append(row)
        i += 1
    acc = [1 if end in S else 0 for S in order]
    d = Dfa(tracks, np.array(rows, dtype=np.int32).reshape(len(order), m), acc, 0, False, universe)
    # prepend 0*: a fresh initial state looping on the zero column
    row0 = d.trans[0].copy()
    row0[0] = d.num_states
    trans = np.vstack([d.trans, row0[None, :]])
    acc2 = np.append(d.accepting, d.accepting[0])
    d = Dfa(tracks, trans, acc2, d.num_states, False, universe)
    d = minimize(determinize(pad_closure(_as_nfa(d))))
    return restrict(d) if not d.canonical else d


def finite_dfa(tuples: Iterable[Sequence[int]], tracks: Sequence[str]) -> Dfa:
    """DFA accepting exactly the given tuples (with leading-zero padding)."""
    from .numeration import encode_tuple
    tracks = tuple(tracks)
    words = []
    for t in tuples:
        w = encode_tuple(list(t)) if tracks else TupleWord((), 0)
        words.append(w)
    parts = []
    for w in words:
        parts.append("(" + (str(w) if len(w) else "ε") + ")")
    if not parts:
        return false_dfa(tracks)
    if not tracks:
        return true_dfa(())
    return regex_dfa("+".join(parts), tracks)
