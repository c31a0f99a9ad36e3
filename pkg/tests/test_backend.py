import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from heatba import _backend, _pycore

compiled = pytest.mark.skipif(not _backend.COMPILED, reason="compiled core not built")


def _vals(seed, n):
    r = np.random.default_rng(seed)
    return r.normal(size=n) + 1j * r.normal(size=n)


@compiled
@given(seed=st.integers(0, 10_000), n=st.integers(3, 200))
def test_interval_oscillation_agrees(seed, n):
    from heatba import _core
    vals = _vals(seed, n)
    r = np.random.default_rng(seed + 1)
    lo = r.integers(0, n - 1, 20)
    hi = np.minimum(n - 1, lo + r.integers(1, n, 20))
    for a, b in zip(_core.interval_oscillation(vals, lo, hi), _pycore.interval_oscillation(vals, lo, hi)):
        assert np.allclose(a, b, rtol=1e-12, atol=1e-12)


@compiled
@given(seed=st.integers(0, 10_000), n=st.integers(2, 120), p=st.sampled_from([1.5, 2.0, 3.0]),
       circle=st.booleans())
def test_besov_rows_agree(seed, n, p, circle):
    from heatba import _core
    vals = _vals(seed, n)
    h = 1.0 / n
    assert np.allclose(_core.besov_rows(vals, h, p, int(circle)), _pycore.besov_rows(vals, h, p, circle),
                       rtol=1e-12, atol=0)


@compiled
@given(seed=st.integers(0, 10_000), periodic=st.booleans(), y=st.floats(1e-3, 5.0))
def test_pl_convolve_agrees(seed, periodic, y):
    from heatba import _core
    vals = _vals(seed, 65)
    if periodic:
        vals[-1] = vals[0]
    xs = np.random.default_rng(seed).uniform(-3, 3, 17)
    offsets = np.linspace(-2, 2, 41)
    kw = np.stack([np.exp(-offsets ** 2), offsets * (1 + 0.5j)]).astype(np.complex128)
    args = (vals.real.copy(), vals.imag.copy(), -1.0, 2.0 / 64, int(periodic), xs, y, offsets, kw)
    a = _core.pl_convolve(*args)
    b = _pycore.pl_convolve(*args)
    assert np.allclose(a, b, rtol=1e-12, atol=1e-12)


def test_pure_python_switch():
    code = ("import heatba, numpy as np\n"
            "from heatba import fixtures as FX, extension as E\n"
            "u = FX.gaussian(0.5, (-16, 16, 513))\n"
            "print(heatba.BACKEND, repr(complex(E.mu_at(u, 0.3, 0.2))))\n")
    outs = {}
    for flag in ("0", "1"):
        env = dict(os.environ, HEATBA_PURE_PYTHON=flag)
        res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                             check=True)
        name, value = res.stdout.split(maxsplit=1)
        outs[flag] = (name, complex(value.strip()))
    assert outs["1"][0] == "numpy"
    assert outs["0"][0] == ("cython" if _backend.COMPILED else "numpy")
    assert abs(outs["0"][1] - outs["1"][1]) < 1e-13


def test_thread_cap(monkeypatch):
    monkeypatch.setenv("HEATBA_THREADS", "1")
    assert _backend.threads() == 1
    monkeypatch.setenv("HEATBA_THREADS", "junk")
    assert _backend.threads() >= 1
