"""Tokenizer, parser and formatter for the first-order predicate language.

Grammar, loosest binding first::

    formula  := imp ('<=>' imp)*                 left associative
    imp      := or ('=>' imp)?                   right associative
    or       := and ('|' and)*
    and      := unary ('&' unary)*
    unary    := '~' unary | quant | atom
    quant    := ('E' | 'A') vars formula         body extends maximally right
    atom     := '(' formula ')' | term cmp term | index cmp (index | letter)
              | name '(' term, ... ')'
    index    := word '[' term ']' ('[' term ']')*
    term     := prod (('+' | '-') prod)*
    prod     := factor ('*' factor)*             one side must be a literal
    factor   := natural | variable | '(' term ')'

A quantifier may be fused with its first variable (``Ei`` is ``E i``);
further variables follow after commas (``Ei,j``) or, for the spaced form,
as juxtaposed names (``E i j``).
"""
from __future__ import annotations

from dataclasses import dataclass
import re
from typing import Union

from .errors import ParseError


# --- AST ---------------------------------------------------------------------

@dataclass(frozen=True)
class Variable:
    name: str


@dataclass(frozen=True)
class Constant:
    value: int


@dataclass(frozen=True)
class Sum:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Difference:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class ConstMultiple:
    coefficient: int
    term: "Term"


Term = Union[Variable, Constant, Sum, Difference, ConstMultiple]


@dataclass(frozen=True)
class WordIndex:
    word: str
    indices: tuple


@dataclass(frozen=True)
class Compare:
    left: Term
    op: str
    right: Term


@dataclass(frozen=True)
class LetterEq:
    """Comparison of a word letter with another letter or with a literal."""

    left: WordIndex
    op: str
    right: Union[WordIndex, int]


@dataclass(frozen=True)
class Custom:
    name: str
    args: tuple


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    vars: tuple
    body: "Formula"


@dataclass(frozen=True)
class ForAll:
    vars: tuple
    body: "Formula"


Formula = Union[Compare, LetterEq, Custom, Not, And, Or, Implies, Iff, Exists, ForAll]

COMPARE_OPS = ("=", "!=", "<", "<=", ">", ">=")
FLIP = {"=": "=", "!=": "!=", "<": ">", "<=": ">=", ">": "<", ">=": "<="}


# --- tokens ------------------------------------------------------------------

@dataclass(frozen=True)
class Token:
    kind: str       # 'ident', 'num', 'op', 'end'
    text: str
    pos: int


_UNICODE = {"∃": "E", "∀": "A", "¬": "~", "∧": "&", "∨": "|", "≠": "!=", "≤": "<=",
            "≥": ">=", "⇒": "=>", "→": "=>", "⇔": "<=>", "↔": "<=>", "−": "-"}
_TOKEN_RE = re.compile(r"\s*(?:(?P<ident>[A-Za-z_][A-Za-z0-9_']*)|(?P<num>\d+)|"
                       r"(?P<op><=>|=>|<=|>=|!=|[~&|=<>+\-*()\[\],]))")


def tokenize(text: str) -> list[Token]:
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _UNICODE:
            sym = _UNICODE[ch]
            kind = "ident" if sym in ("E", "A") else "op"
            tokens.append(Token(kind, sym, i))
            i += 1
            continue
        m = _TOKEN_RE.match(text, i)
        if not m or m.end() == i:
            raise ParseError(f"unexpected character {ch!r}", position=i)
        kind = m.lastgroup
        tokens.append(Token(kind, m.group(kind), m.start(kind)))
        i = m.end()
    return tokens


# --- parser ------------------------------------------------------------------

class _Parser:
    def __init__(self, tokens, text_len):
        self.toks = list(tokens)
        end = text_len if text_len is not None else (
            self.toks[-1].pos + len(self.toks[-1].text) if self.toks else 0)
        self.toks.append(Token("end", "", end))
        self.i = 0

    def peek(self, k=0) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def at(self, text, k=0):
        t = self.peek(k)
        return t.kind == "op" and t.text == text

    def expect(self, text):
        t = self.next()
        if t.kind != "op" or t.text != text:
            found = t.text or "end of input"
            raise ParseError(f"expected {text!r}, found {found!r}", position=t.pos)
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        return ParseError(msg, position=tok.pos)

    # formulas
    def formula(self):
        left = self.implication()
        while self.at("<=>"):
            self.next()
            left = Iff(left, self.implication())
        return left

    def implication(self):
        left = self.disjunction()
        if self.at("=>"):
            self.next()
            return Implies(left, self.implication())
        return left

    def disjunction(self):
        left = self.conjunction()
        while self.at("|"):
            self.next()
            left = Or(left, self.conjunction())
        return left

    def conjunction(self):
        left = self.unary()
        while self.at("&"):
            self.next()
            left = And(left, self.unary())
        return left

    def unary(self):
        if self.at("~"):
            self.next()
            return Not(self.unary())
        if self._is_quantifier():
            return self.quantifier()
        t = self.peek()
        if t.kind == "ident" and len(t.text) > 1 and t.text[0] in "EA" and self.at("(", 1):
            # either a relation call or a fused quantifier with a parenthesized body
            save = self.i
            try:
                return self.atom()
            except ParseError:
                self.i = save
                return self.quantifier()
        return self.atom()

    def _is_quantifier(self):
        t = self.peek()
        if t.kind != "ident" or t.text[0] not in "EA":
            return False
        nxt = self.peek(1)
        if len(t.text) == 1:
            return nxt.kind == "ident"
        if nxt.kind == "op" and nxt.text in ("[", "(") + COMPARE_OPS + ("+", "-", "*"):
            return False
        return True

    def quantifier(self):
        t = self.next()
        kind = t.text[0]
        names = []
        if len(t.text) > 1:
            names.append(t.text[1:])
            fused = True
        else:
            names.append(self._var_name())
            fused = False
        while True:
            if self.at(","):
                self.next()
                names.append(self._var_name())
            elif (not fused and self.peek().kind == "ident" and self.peek(1).kind == "ident"
                  and not self._looks_like_quantifier(self.peek())):
                names.append(self.next().text)
            else:
                break
        if len(set(names)) != len(names):
            raise self.error("variable quantified twice in one block", t)
        # "E i j (body)": a last name followed by '(' is a variable unless it
        # turns out to be a relation call
        if (not fused and self.peek().kind == "ident" and self.at("(", 1)
                and not self._looks_like_quantifier(self.peek())):
            save = self.i
            self.next()
            try:
                body = self.formula()
                return (Exists if kind == "E" else ForAll)(tuple(names) + (self.toks[save].text,),
                                                           body)
            except ParseError:
                self.i = save
        body = self.formula()
        return (Exists if kind == "E" else ForAll)(tuple(names), body)

    @staticmethod
    def _looks_like_quantifier(tok):
        return tok.text[0] in "EA"

    def _var_name(self):
        t = self.next()
        if t.kind != "ident":
            raise ParseError(f"expected a variable name, found {t.text or 'end of input'!r}",
                             position=t.pos)
        return t.text

    def atom(self):
        t = self.peek()
        if self.at("("):
            save = self.i
            try:
                self.next()
                f = self.formula()
                self.expect(")")
                nxt = self.peek()
                if not (nxt.kind == "op" and nxt.text in COMPARE_OPS + ("+", "-", "*")):
                    return f
            except ParseError:
                pass
            self.i = save
            return self.comparison()
        if t.kind == "ident" and self.at("[", 1):
            return self.letter_comparison()
        if t.kind == "ident" and self.at("(", 1):
            name = self.next().text
            self.next()
            args = [self.term()]
            while self.at(","):
                self.next()
                args.append(self.term())
            self.expect(")")
            return Custom(name, tuple(args))
        if t.kind == "end":
            raise self.error("unexpected end of input")
        # a letter literal on the left of a letter comparison
        lit = self._try_letter_literal()
        if lit is not None:
            return lit
        return self.comparison()

    def _try_letter_literal(self):
        save = self.i
        neg = False
        if self.at("-"):
            neg = True
            self.next()
        if self.peek().kind == "num" and self.peek(1).kind == "op" \
                and self.peek(1).text in COMPARE_OPS \
                and self.peek(2).kind == "ident" and self.at("[", 3):
            value = int(self.next().text)
            op = self.next().text
            idx = self.word_index()
            return LetterEq(idx, FLIP[op], -value if neg else value)
        self.i = save
        return None

    def comparison(self):
        left = self.term()
        t = self.next()
        if t.kind != "op" or t.text not in COMPARE_OPS:
            raise ParseError(f"expected a comparison, found {t.text or 'end of input'!r}",
                             position=t.pos)
        right = self.term()
        return Compare(left, t.text, right)

    def word_index(self):
        name = self.next().text
        idx = []
        while self.at("["):
            self.next()
            idx.append(self.term())
            self.expect("]")
        return WordIndex(name, tuple(idx))

    def letter_comparison(self):
        left = self.word_index()
        t = self.next()
        if t.kind != "op" or t.text not in COMPARE_OPS:
            raise ParseError(f"expected a comparison, found {t.text or 'end of input'!r}",
                             position=t.pos)
        if self.peek().kind == "ident" and self.at("[", 1):
            right = self.word_index()
        else:
            neg = False
            if self.at("-"):
                self.next()
                neg = True
            num = self.next()
            if num.kind != "num":
                raise ParseError("expected a letter literal or a word indexing",
                                 position=num.pos)
            right = -int(num.text) if neg else int(num.text)
        return LetterEq(left, t.text, right)

    # terms
    def term(self):
        left = self.product()
        while self.at("+") or self.at("-"):
            op = self.next().text
            right = self.product()
            left = Sum(left, right) if op == "+" else Difference(left, right)
        return left

    def product(self):
        left = self.factor()
        while self.at("*"):
            star = self.next()
            right = self.factor()
            if isinstance(left, Constant):
                left = ConstMultiple(left.value, right)
            elif isinstance(right, Constant):
                left = ConstMultiple(right.value, left)
            else:
                raise ParseError("multiplication needs a literal coefficient", position=star.pos)
        return left

    def factor(self):
        t = self.next()
        if t.kind == "num":
            return Constant(int(t.text))
        if t.kind == "ident":
            if self.at("[") or self.at("("):
                raise ParseError(f"{t.text!r} cannot be used inside an arithmetic term",
                                 position=t.pos)
            return Variable(t.text)
        if t.kind == "op" and t.text == "(":
            inner = self.term()
            self.expect(")")
            return inner
        raise ParseError(f"expected a term, found {t.text or 'end of input'!r}", position=t.pos)


def parse(source) -> Formula:
    """Parse a predicate given as text or as a token list."""
    if isinstance(source, str):
        tokens = tokenize(source)
        p = _Parser(tokens, len(source))
    else:
        p = _Parser(source, None)
    if p.peek().kind == "end":
        raise p.error("empty formula")
    f = p.formula()
    if p.peek().kind != "end":
        raise p.error(f"unexpected {p.peek().text!r}")
    return f


def parse_term(text: str) -> Term:
    p = _Parser(tokenize(text), len(text))
    t = p.term()
    if p.peek().kind != "end":
        raise p.error(f"unexpected {p.peek().text!r}")
    return t


# --- formatting --------------------------------------------------------------

def format_term(t: Term) -> str:
    if isinstance(t, Variable):
        return t.name
    if isinstance(t, Constant):
        return str(t.value)
    if isinstance(t, (Sum, Difference)):
        op = "+" if isinstance(t, Sum) else "-"
        right = format_term(t.right)
        if isinstance(t.right, (Sum, Difference)):
            right = f"({right})"
        return f"{format_term(t.left)} {op} {right}"
    if isinstance(t, ConstMultiple):
        inner = format_term(t.term)
        if not isinstance(t.term, (Variable, Constant)):
            inner = f"({inner})"
        return f"{t.coefficient} * {inner}"
    raise TypeError(f"not a term: {t!r}")


def _format_index(w: WordIndex) -> str:
    return w.word + "".join(f"[{format_term(i)}]" for i in w.indices)


_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4, Not: 5}
_SYMBOL = {Iff: "<=>", Implies: "=>", Or: "|", And: "&"}


def _prec(f):
    if isinstance(f, (Exists, ForAll)):
        return 0
    return _PREC.get(type(f), 6)


def _fmt(f) -> tuple[str, bool]:
    """Text plus whether it ends in an unparenthesized quantifier."""
    if isinstance(f, Compare):
        return f"{format_term(f.left)} {f.op} {format_term(f.right)}", False
    if isinstance(f, LetterEq):
        right = _format_index(f.right) if isinstance(f.right, WordIndex) else str(f.right)
        return f"{_format_index(f.left)} {f.op} {right}", False
    if isinstance(f, Custom):
        return f"{f.name}(" + ", ".join(format_term(a) for a in f.args) + ")", False
    if isinstance(f, Not):
        text, open_end = _fmt(f.body)
        if _prec(f.body) < 5 and not isinstance(f.body, (Exists, ForAll)):
            return f"~({text})", False
        return "~" + text, open_end
    if isinstance(f, (Exists, ForAll)):
        q = "E" if isinstance(f, Exists) else "A"
        body, _ = _fmt(f.body)
        return f"{q}{','.join(f.vars)} {body}", True
    if type(f) in _SYMBOL:
        p = _PREC[type(f)]
        right_assoc = isinstance(f, Implies)
        lt, lopen = _fmt(f.left)
        lp = _prec(f.left)
        if lopen or (lp <= p if right_assoc else lp < p):
            lt = f"({lt})"
        rt, ropen = _fmt(f.right)
        rp = _prec(f.right)
        if isinstance(f.right, (Exists, ForAll)):
            pass
        elif rp < p or (rp == p and not right_assoc):
            rt, ropen = f"({rt})", False
        return f"{lt} {_SYMBOL[type(f)]} {rt}", ropen
    raise TypeError(f"not a formula: {f!r}")


def format_formula(f) -> str:
    if isinstance(f, (Variable, Constant, Sum, Difference, ConstMultiple)):
        return format_term(f)
    return _fmt(f)[0]


format = format_formula


# --- variables ---------------------------------------------------------------

def term_variables(t: Term) -> list[str]:
    out = []

    def walk(x):
        if isinstance(x, Variable):
            if x.name not in out:
                out.append(x.name)
        elif isinstance(x, (Sum, Difference)):
            walk(x.left)
            walk(x.right)
        elif isinstance(x, ConstMultiple):
            walk(x.term)
    walk(t)
    return out


def free_variables(f) -> tuple[str, ...]:
    """Free variables in order of first occurrence."""
    out = []

    def add(names, bound):
        for n in names:
            if n not in bound and n not in out:
                out.append(n)

    def walk(x, bound):
        if isinstance(x, Compare):
            add(term_variables(x.left) + term_variables(x.right), bound)
        elif isinstance(x, LetterEq):
            for idx in (x.left, x.right):
                if isinstance(idx, WordIndex):
                    for t in idx.indices:
                        add(term_variables(t), bound)
        elif isinstance(x, Custom):
            for t in x.args:
                add(term_variables(t), bound)
        elif isinstance(x, Not):
            walk(x.body, bound)
        elif isinstance(x, (And, Or, Implies, Iff)):
            walk(x.left, bound)
            walk(x.right, bound)
        elif isinstance(x, (Exists, ForAll)):
            walk(x.body, bound | set(x.vars))
        else:
            raise TypeError(f"not a formula: {x!r}")
    walk(f, frozenset())
    return tuple(out)
