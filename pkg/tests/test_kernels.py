from hypothesis import given, settings, strategies as st
import numpy as np
import pytest

from fibauto import _pykernels, kernels
from fibauto import automata as au
from fibauto.compiler import CompileEnv, compile

BACKENDS = kernels.available_backends()
needs_both = pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled kernels not built")


def impl(name):
    return kernels._BACKENDS[name]


@st.composite
def tables(draw, cols=4, max_states=8):
    n = draw(st.integers(1, max_states))
    trans = draw(st.lists(st.lists(st.integers(0, n - 1), min_size=cols, max_size=cols),
                          min_size=n, max_size=n))
    acc = draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))
    return np.array(trans, dtype=np.int32), np.array(acc, dtype=np.uint8)


@st.composite
def nfa_tables(draw, cols=2, max_states=6, width=2):
    n = draw(st.integers(1, max_states))
    cell = st.lists(st.integers(-1, n - 1), min_size=width, max_size=width)
    trans = draw(st.lists(st.lists(cell, min_size=cols, max_size=cols), min_size=n, max_size=n))
    acc = draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))
    return np.array(trans, dtype=np.int32), np.array(acc, dtype=np.uint8)


def test_python_backend_always_available():
    assert "python" in BACKENDS
    with kernels.using_backend("python"):
        assert kernels.backend_name() == "python"
    with pytest.raises(ValueError):
        kernels.set_backend("fortran")


@needs_both
@settings(max_examples=100, deadline=None)
@given(tables())
def test_minimize_parity(t):
    trans, acc = t
    a = impl("cython").minimize(trans, acc, 0)
    b = _pykernels.minimize(trans, acc, 0)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


@needs_both
@settings(max_examples=100, deadline=None)
@given(tables())
def test_coreachable_parity(t):
    trans, acc = t
    assert np.array_equal(np.asarray(impl("cython").coreachable(trans, acc), dtype=bool),
                          np.asarray(_pykernels.coreachable(trans, acc), dtype=bool))


@needs_both
@settings(max_examples=100, deadline=None)
@given(nfa_tables())
def test_determinize_parity(t):
    trans, acc = t
    live = _pykernels.coreachable(trans, acc)
    init = np.array([0], dtype=np.int32)
    a = impl("cython").determinize(trans, acc, init, live, 10_000, 0.0)
    b = _pykernels.determinize(trans, acc, init, live, 10_000, 0.0)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


PREDICATES = [
    "(n > 0) & Ei At t < n => F[i+t] = F[i+t+n]",
    "Ai i < n => F[i] = F[n-1-i]",
    "(n >= 1) & Ei Aj j < n => R[i+j] = R[i+j+n]",
    "x + 2*y = z & V[x] != V[z]",
]


@needs_both
@pytest.mark.parametrize("pred", PREDICATES)
def test_end_to_end_parity(pred):
    out = {}
    for name in ("cython", "python"):
        with kernels.using_backend(name):
            dfa, log = compile(pred, CompileEnv(use_cache=False))
        out[name] = (au.to_text(dfa), log.lines(timing=False), log.peak)
    assert out["cython"] == out["python"]


def test_environment_forces_fallback():
    import os
    import subprocess
    import sys
    env = {**os.environ, "FIBAUTO_PURE_PYTHON": "1"}
    out = subprocess.run([sys.executable, "-c",
                          "from fibauto import kernels; print(kernels.backend_name())"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
