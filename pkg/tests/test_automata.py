from itertools import product as iproduct

from hypothesis import given, settings, strategies as st
import numpy as np
import pytest

from fibauto import automata as au
from fibauto.automata import Dfa, TupleWord
from fibauto.errors import StateLimitExceeded
from fibauto.numeration import adder_dfa, compare_dfa, encode_tuple, is_canonical


@st.composite
def random_dfa(draw, tracks=("x", "y")):
    n = draw(st.integers(1, 6))
    m = 1 << len(tracks)
    trans = draw(st.lists(st.lists(st.integers(0, n - 1), min_size=m, max_size=m),
                          min_size=n, max_size=n))
    acc = draw(st.lists(st.booleans(), min_size=n, max_size=n))
    return Dfa(tracks, np.array(trans), np.array(acc, dtype=np.uint8), 0)


def words(k, max_len):
    for length in range(max_len + 1):
        for cols in iproduct(range(1 << k), repeat=length):
            yield cols


def valid(cols, k):
    return all(is_canonical("".join(str((c >> (k - 1 - i)) & 1) for c in cols).lstrip("0"))
               for i in range(k))


@settings(max_examples=60, deadline=None)
@given(random_dfa())
def test_minimize_preserves_language(a):
    m = au.minimize(a)
    assert m.num_states <= a.num_states
    for w in words(2, 4):
        assert a.accepts(w) == m.accepts(w)


@settings(max_examples=60, deadline=None)
@given(random_dfa(), random_dfa(), st.sampled_from(["and", "or", "xor"]))
def test_product_semantics(a, b, op):
    fn = {"and": lambda p, q: p and q, "or": lambda p, q: p or q, "xor": lambda p, q: p != q}[op]
    c = au.product(a, b, op)
    for w in words(2, 4):
        assert c.accepts(w) == (valid(w, 2) and fn(a.accepts(w), b.accepts(w)))


@settings(max_examples=40, deadline=None)
@given(random_dfa())
def test_complement_is_relative_to_universe(a):
    c = au.complement(a)
    for w in words(2, 4):
        assert c.accepts(w) == (valid(w, 2) and not a.accepts(w))
    assert au.equivalent(au.complement(c), a)


def test_product_aligns_tracks_by_name():
    lt = compare_dfa("<")
    swapped = au.rename(compare_dfa(">"), {"x": "y", "y": "x"})
    assert au.equivalent(lt, swapped)


def test_exists_over_adder():
    # Ez x + z = y  <=>  x <= y
    d = au.exists(au.rename(adder_dfa(), {"y": "z", "z": "y"}), "z")
    assert au.equivalent(d, compare_dfa("<="))


def test_forall():
    # Ay x <= y holds only for x = 0
    d = au.forall(compare_dfa("<="), "y")
    assert au.accepted_tuples(d, 10) == [(0,)]


def test_regex_and_to_regex_round_trip():
    for pattern in ["10*", "ε+1(01)*(ε+0)", "1+100(000)*", "[1,0][0,1][0,0]*"]:
        tracks = ("x", "y") if "[" in pattern else ("n",)
        d = au.regex_dfa(pattern, tracks)
        again = au.regex_dfa(au.to_regex(d), tracks)
        assert au.equivalent(d, again)


def test_finite_dfa_and_enumeration():
    d = au.finite_dfa([(1, 2), (4, 4), (0, 7)], ("i", "n"))
    assert au.is_finite(d)
    assert sorted(au.accepted_tuples(d, 10)) == [(0, 7), (1, 2), (4, 4)]
    assert not au.is_finite(au.regex_dfa("10*", ("n",)))


def test_text_round_trip(tmp_path):
    a = adder_dfa()
    path = tmp_path / "add.txt"
    au.write_file(a, path)
    b = au.read_file(path)
    assert au.equivalent(a, b)
    assert au.to_text(b) == au.to_text(a)


def test_dot_has_single_initial_arrow():
    dot = au.to_dot(adder_dfa(), "add")
    assert dot.count("init ->") == 1
    assert dot.startswith("digraph add")


def test_log_size_counts_sink():
    assert au.false_dfa(("n",)).log_size() == 2
    assert au.regex_dfa("10*", ("n",)).log_size() == 3


def test_state_cap_is_enforced():
    d = au.regex_dfa("(0+1)*1(0+1)(0+1)(0+1)(0+1)", ("n",))
    with au.budget(max_states=3):
        with pytest.raises(StateLimitExceeded):
            au.product(d, au.regex_dfa("(10)*", ("n",)), "and")


def test_tuple_word_tracks():
    w = encode_tuple([3, 5])
    assert isinstance(w, TupleWord)
    assert (w.track(0), w.track(1)) == ("0100", "1000")
    assert str(w) == "[0,1][1,0][0,0][0,0]"
