from hypothesis import given, strategies as st
import pytest

from fibauto import automata as au
from fibauto.errors import ParseError
from fibauto.numeration import (adder_dfa, bundle_from_text, canonical_dfa, compare_dfa,
                                encode_tuple, decode_tuple, fib, fib_bundle, from_digits,
                                is_canonical, lucas, to_zeckendorf)

nat = st.integers(min_value=0, max_value=10**6)


def test_fib_and_lucas():
    assert [fib(n) for n in range(10)] == [0, 1, 1, 2, 3, 5, 8, 13, 21, 34]
    assert [lucas(n) for n in range(8)] == [2, 1, 3, 4, 7, 11, 18, 29]


def test_small_representations():
    assert [to_zeckendorf(n) for n in range(9)] == [
        "", "1", "10", "100", "101", "1000", "1001", "1010", "10000"]


@given(nat)
def test_zeckendorf_round_trip(n):
    w = to_zeckendorf(n)
    assert is_canonical(w)
    assert from_digits(w) == n
    assert from_digits("000" + w) == n


@given(st.text(alphabet="01", max_size=30))
def test_canonical_iff_no_adjacent_ones(w):
    assert is_canonical(w) == ("11" not in w and not w.startswith("0"))


@given(st.lists(nat, min_size=1, max_size=4))
def test_tuple_encoding(values):
    w = encode_tuple(values)
    assert decode_tuple(w) == tuple(values)
    assert all(is_canonical(w.track(i).lstrip("0")) for i in range(len(values)))


@given(st.integers(0, 3000), st.integers(0, 3000))
def test_adder_against_integers(x, y):
    add = adder_dfa()
    assert add.accepts_values(x, y, x + y)
    assert not add.accepts_values(x, y, x + y + 1)


@pytest.mark.parametrize("op, fn", [("<", int.__lt__), ("<=", int.__le__), ("=", int.__eq__),
                                    ("!=", int.__ne__), (">", int.__gt__), (">=", int.__ge__)])
def test_comparisons(op, fn):
    d = compare_dfa(op)
    for x in range(40):
        for y in range(40):
            assert d.accepts_values(x, y) == fn(x, y)


def test_canonical_dfa_accepts_only_canonical():
    c = canonical_dfa(1)
    for n in range(64):
        w = format(n, "b")
        assert c.accepts(w) == ("11" not in w)


def test_bundle_round_trip():
    b = fib_bundle()
    again = bundle_from_text(b.to_text())
    assert au.equivalent(again.adder, b.adder)
    assert [again.encode(n) for n in range(30)] == [b.encode(n) for n in range(30)]


def test_bundle_missing_section():
    text = fib_bundle().to_text()
    broken = text[:text.index("[order]")]
    with pytest.raises(ParseError):
        bundle_from_text(broken)
