import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from heatba import extension as E
from heatba import fixtures as FX
from heatba import io
from heatba.funcspace import SampledFunction


@given(seed=st.integers(0, 1000), n=st.integers(2, 40), complex_=st.booleans(),
       policy=st.sampled_from(["constant-extend", "periodic"]))
def test_function_round_trip(tmp_path_factory, seed, n, complex_, policy):
    r = np.random.default_rng(seed)
    s = r.normal(size=n) + (1j * r.normal(size=n) if complex_ else 0)
    if policy == "periodic":
        s[-1] = s[0]
    u = SampledFunction(s, -1.5, 2.25, policy)
    path = tmp_path_factory.mktemp("io") / "u.csv"
    io.write_function(path, u)
    back = io.read_function(path)
    assert back.policy == policy
    assert np.array_equal(back.samples, u.samples)
    assert (back.x_min, back.x_max, back.n) == (u.x_min, u.x_max, u.n)


def test_read_plain_csv(tmp_path):
    p = tmp_path / "plain.csv"
    p.write_text("x,u\n0,1\n0.5,2\n1.0,3\n")
    u = io.read_function(p)
    assert u.policy == "constant-extend" and u.is_real and u.n == 3
    p.write_text("# policy=periodic\n0,1\n0.5,2\n1.0,1\n")
    assert io.read_function(p).policy == "periodic"
    assert io.read_function(p, "constant-extend").policy == "constant-extend"


@pytest.mark.parametrize("text,msg", [
    ("0,1\n1,2\n3,4\n", "uniform"),
    ("0,1,2,3\n1,2,3,4\n", "columns"),
    ("0,1\n", "two samples"),
    ("0,1\n1,2,3\n", "ragged"),
    ("0,1\n1,abc\n", "could not convert"),
])
def test_read_errors(tmp_path, text, msg):
    p = tmp_path / "bad.csv"
    p.write_text(text)
    with pytest.raises(ValueError, match=msg):
        io.read_function(p)


def test_read_rejects_explicit_handle(tmp_path):
    p = tmp_path / "u.csv"
    p.write_text("# policy=explicit-handle\n0,1\n1,1\n")
    with pytest.raises(ValueError, match="policy"):
        io.read_function(p)


def test_read_config(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text("# comment\np = 3\nhalf-plane=lower  # trailing\n\ngrid=-1,1,9,0.01,1,8\n")
    assert io.read_config(p) == {"p": "3", "half_plane": "lower", "grid": "-1,1,9,0.01,1,8"}
    p.write_text("novalue\n")
    with pytest.raises(ValueError, match="key=value"):
        io.read_config(p)


def test_config_hash_is_order_free():
    assert io.config_hash({"a": 1, "b": 0.5}) == io.config_hash({"b": 0.5, "a": 1})
    assert io.config_hash({"a": 1}) != io.config_hash({"a": 2})
    assert len(io.config_hash({})) == 16


def test_write_field_lower_plane(tmp_path):
    grid = E.Grid(np.array([0.0, 1.0]), np.array([0.5, 2.0]), "lower")
    fld = E.HalfPlaneField(grid.x, grid.y, np.array([[1 + 2j, 3], [4, 5j]]), "lower", "F")
    path = io.write_field(tmp_path / "f.csv", fld, {"k": 1})
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# content=F config=") and "lower" in lines[0]
    assert lines[1] == "x,y,re,im"
    assert lines[2] == "0.0,-0.5,1.0,2.0"
    assert len(lines) == 6


def test_shipped_data_loads():
    from importlib.resources import files
    data = files("heatba") / "data"
    names = sorted(p.name for p in data.iterdir() if p.name.endswith(".csv"))
    assert "sin01.csv" in names
    for name in names:
        u = io.read_function(data / name)
        ref = FX.get(name[:-4])
        assert np.array_equal(u.samples, ref.samples)
        assert u.policy == ref.policy
