from hypothesis import given, settings, strategies as st
import pytest

from fibauto.errors import ParseError
from fibauto.logic import (And, Compare, ConstMultiple, Constant, Custom, Difference, Exists,
                           ForAll, Iff, Implies, LetterEq, Not, Or, Sum, Variable, WordIndex,
                           format_formula, free_variables, parse, parse_term, tokenize)

x, y, i, n, p = (Variable(v) for v in "xyinp")


def test_tokenize_log_line():
    toks = [t.text for t in tokenize("Ei At t < n => F[i + t] = F[i + t + n]")]
    # "Ei" and "At" are single identifiers to the scanner; the parser splits them
    assert toks == ["Ei", "At", "t", "<", "n", "=>", "F", "[", "i", "+", "t", "]",
                    "=", "F", "[", "i", "+", "t", "+", "n", "]"]


def test_tokenize_edge_cases():
    assert tokenize("") == []
    with pytest.raises(ParseError) as exc:
        tokenize("x $ y")
    assert exc.value.position == 2


def test_unicode_operators():
    assert parse("∀x ∃y x ≤ y") == parse("Ax Ey x <= y")


def test_quantifier_scope_and_precedence():
    f = parse("p >= 1 & Ai i >= n => F[i] = F[i + p]")
    expect = And(Compare(p, ">=", Constant(1)),
                 ForAll(("i",), Implies(Compare(i, ">=", n),
                                        LetterEq(WordIndex("F", (i,)), "=",
                                                 WordIndex("F", (Sum(i, p),))))))
    assert f == expect


def test_connective_precedence():
    a, b, c, d = (Compare(Variable(v), "=", Constant(1)) for v in "abcd")
    assert parse("a = 1 & b = 1 => c = 1 | d = 1") == Implies(And(a, b), Or(c, d))
    assert parse("a = 1 => b = 1 => c = 1") == Implies(a, Implies(b, c))
    assert parse("a = 1 & b = 1 & c = 1") == And(And(a, b), c)
    assert parse("~a = 1 <=> b = 1") == Iff(Not(a), b)


def test_terms():
    assert parse("x = x") == Compare(x, "=", x)
    assert parse_term("3 * n") == ConstMultiple(3, n)
    assert parse_term("i + n - 1") == Difference(Sum(i, n), Constant(1))
    with pytest.raises(ParseError):
        parse_term("x * y")


def test_multi_variable_quantifiers_and_custom():
    f = parse("Ei,j zc(i + 1, j)")
    assert f == Exists(("i", "j"), Custom("zc", (Sum(i, Constant(1)), Variable("j"))))
    assert parse("E i j i < j") == parse("Ei,j i < j")
    assert free_variables(parse("Ei i < n & F[n] = 1")) == ("n",)


def test_letter_literal_and_multi_index():
    f = parse("fab[n][i][i+n] != 0")
    assert f == LetterEq(WordIndex("fab", (n, i, Sum(i, n))), "!=", 0)


def test_syntax_errors_carry_positions():
    for bad in ["x = ", "(x = 1", "Ei", "x = 1 &", "F[x = 1"]:
        with pytest.raises(ParseError):
            parse(bad)
    with pytest.raises(ParseError) as exc:
        parse("x = 1 y")
    assert exc.value.position == 6


# --- random ASTs -----------------------------------------------------------------

NAMES = ["i", "j", "n", "t"]
terms = st.recursive(
    st.one_of(st.sampled_from(NAMES).map(Variable), st.integers(0, 20).map(Constant)),
    lambda s: st.one_of(st.builds(Sum, s, s), st.builds(Difference, s, s),
                        st.builds(ConstMultiple, st.integers(2, 5), s)),
    max_leaves=4)
atoms = st.one_of(
    st.builds(Compare, terms, st.sampled_from(["=", "!=", "<", "<=", ">", ">="]), terms),
    st.builds(LetterEq, st.builds(WordIndex, st.just("F"), terms.map(lambda t: (t,))),
              st.sampled_from(["=", "!="]),
              st.one_of(st.integers(0, 1),
                        st.builds(WordIndex, st.just("R"), terms.map(lambda t: (t,))))),
    st.builds(Custom, st.just("zc"), st.tuples(terms, terms)))
formulas = st.recursive(
    atoms,
    lambda s: st.one_of(
        st.builds(Not, s), st.builds(And, s, s), st.builds(Or, s, s),
        st.builds(Implies, s, s), st.builds(Iff, s, s),
        st.builds(Exists, st.lists(st.sampled_from(NAMES), min_size=1, max_size=2,
                                   unique=True).map(tuple), s),
        st.builds(ForAll, st.lists(st.sampled_from(NAMES), min_size=1, max_size=2,
                                   unique=True).map(tuple), s)),
    max_leaves=8)


@settings(max_examples=1000, deadline=None)
@given(formulas)
def test_format_parse_round_trip(f):
    assert parse(format_formula(f)) == f


@settings(max_examples=200, deadline=None)
@given(formulas)
def test_format_is_stable(f):
    text = format_formula(f)
    assert format_formula(parse(text)) == text


def test_round_trip_on_log_predicate():
    text = "p >= 1 & Ai i >= n => F[i] = F[i + p]"
    assert format_formula(parse(text)) == text
