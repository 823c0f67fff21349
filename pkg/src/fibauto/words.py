"""Built-in Fibonacci-automatic words and loading of user DFAOs."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .automata import FIB_UNIVERSE, Dfao, read_file
from .errors import CompileError, ParseError
from .numeration import encode_tuple, to_zeckendorf


@dataclass(frozen=True)
class WordDef:
    """A named automatic sequence; multi-track DFAOs index with several arguments."""

    name: str
    dfao: Dfao

    @property
    def alphabet(self) -> tuple[int, ...]:
        return self.dfao.alphabet()

    @property
    def arity(self) -> int:
        return self.dfao.num_tracks

    def __getitem__(self, n):
        return word_at(self, n)


def _dfao(rows, outputs, initial=0):
    # rows use None for transitions that cannot occur on canonical input;
    # they are routed to an appended sink with output 0
    n = len(rows)
    sink_needed = any(t is None for row in rows for t in row)
    trans = [[n if t is None else t for t in row] for row in rows]
    outs = list(outputs)
    if sink_needed:
        trans.append([n] * len(rows[0]))
        outs.append(0)
    return Dfao(("n",), np.array(trans, dtype=np.int32), outs, initial, FIB_UNIVERSE)


def fibonacci_dfao() -> Dfao:
    """q0/0 and q1/1; q1 never reads 1 on canonical input."""
    return _dfao([(0, 1), (0, None)], [0, 1])


def rote_dfao() -> Dfao:
    # states in order: a, b1, a1, b0, b, a0, a2, b2; b reads 0 into a (this
    # is what h(b) = a gives and what the known prefix of the word requires)
    a, b1, a1, b0, b, a0, a2, b2 = range(8)
    rows = [
        (a, b1),
        (a1, None),
        (a0, b0),
        (a0, None),
        (a, None),
        (a2, b),
        (a1, b2),
        (a2, None),
    ]
    return _dfao(rows, [0, 0, 1, 0, 1, 0, 1, 1])


def tmf_dfao() -> Dfao:
    """Parity of the number of 1s in the representation."""
    return _dfao([(0, 1), (1, 0)], [0, 1])


def builtin_words() -> dict[str, WordDef]:
    return {
        "F": WordDef("F", fibonacci_dfao()),
        "R": WordDef("R", rote_dfao()),
        "V": WordDef("V", tmf_dfao()),
    }


def word_at(w, *index: int, encode=None) -> int:
    """Letter of the word at the given index (one index per track)."""
    dfao = w.dfao if isinstance(w, WordDef) else w
    if len(index) == 1 and isinstance(index[0], (tuple, list)):
        index = tuple(index[0])
    if len(index) != dfao.num_tracks:
        raise ValueError(f"word takes {dfao.num_tracks} indices")
    if dfao.num_tracks == 1 and encode is None:
        return dfao.output_on(to_zeckendorf(index[0]))
    word = encode_tuple(list(index), encode) if encode else encode_tuple(list(index))
    return dfao.output_on(word)


def prefix(w, n: int) -> list[int]:
    return [word_at(w, i) for i in range(n)]


def load_word(name: str, path, registry: dict = None, arity: int = 1,
              universes: dict = None) -> WordDef:
    """Read a DFAO file and register it under ``name``."""
    if registry is not None and name in registry:
        raise CompileError(f"word {name!r} is already defined")
    a = read_file(path, universes)
    if not isinstance(a, Dfao):
        raise ParseError(f"{path}: a word needs a DFAO file (output lines)")
    if arity is not None and a.num_tracks != arity:
        raise ParseError(f"{path}: expected a {arity}-track DFAO, got {a.num_tracks} tracks")
    wd = WordDef(name, a)
    if registry is not None:
        registry[name] = wd
    return wd
