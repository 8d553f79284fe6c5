import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from brachistochrone.curves import (
    Mesh,
    circle_curve,
    curve_from_samples,
    line_curve,
    load_curve_csv,
    make_mesh,
    save_curve_csv,
)
from brachistochrone.cycloid_solver import BrachProblem, sample_solution, solve
from brachistochrone.errors import ArgumentError, CurveFormatError


def test_uniform_mesh():
    m = make_mesh(8, 1.0, 1.0)
    assert np.allclose(m.nodes, np.arange(9) / 8, rtol=0, atol=1e-16)


def test_graded_mesh_nodes():
    assert make_mesh(8, 1.0, 2.0).nodes[1] == 0.015625
    assert make_mesh(100, 2.0, 3.0).nodes[50] == 0.25
    m = make_mesh(64, 3.0)
    assert m.q == 3.0 and m.nodes[0] == 0.0 and m.nodes[-1] == 3.0
    assert np.all(np.diff(m.nodes) > 0)


@pytest.mark.parametrize("n,b,q", [(7, 1.0, 3.0), (8.5, 1.0, 3.0), (8, 0.0, 3.0), (8, -1.0, 3.0), (8, 1.0, 0.9)])
def test_mesh_preconditions(n, b, q):
    with pytest.raises(ArgumentError):
        make_mesh(n, b, q)


def test_refined_mesh_contains_nodes():
    m = make_mesh(16, 2.0)
    r = m.refined()
    assert r.n == 32
    assert np.allclose(r.nodes[::2], m.nodes, rtol=1e-15, atol=0)


def test_from_nodes_validation():
    with pytest.raises(ArgumentError):
        Mesh.from_nodes([0.0, 1.0])
    with pytest.raises(ArgumentError):
        Mesh.from_nodes([0.1, 0.5, 1.0])
    with pytest.raises(ArgumentError):
        Mesh.from_nodes([0.0, 0.5, 0.5, 1.0])


def test_line_curve():
    m = make_mesh(8, 1.0, 1.0)
    c = line_curve(1.0, 1.0, m)
    assert c.values[4] == 0.5
    assert np.all(c.slopes[1:] == 1.0) and math.isnan(c.slopes[0])
    c2 = line_curve(2.0, 1.0, make_mesh(8, 2.0))
    assert np.all(c2.slopes[1:] == 0.5)
    c3 = line_curve(1.0, 3.0, m)
    assert c3.values[-1] == 3.0


def test_line_mismatched_mesh():
    with pytest.raises(ArgumentError):
        line_curve(2.0, 1.0, make_mesh(8, 1.0))


def test_circle_curve():
    m = make_mesh(8, 1.0, 1.0)
    c = circle_curve(1.0, 1.0, m)
    assert c.values[-1] == 1.0
    assert c.values[4] == pytest.approx(math.sqrt(0.75), rel=1e-15)
    g, dg = c.evaluate(np.array([0.5]))
    assert dg[0] == pytest.approx(0.5 / math.sqrt(0.75), rel=1e-15)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.05, 20.0), st.floats(0.05, 20.0))
def test_circle_reaches_endpoint(b, beta):
    c = circle_curve(b, beta, make_mesh(8, b))
    assert c.values[-1] == pytest.approx(beta, rel=1e-12)
    assert c.values[0] == 0.0


def test_circle_slope_blows_up_at_origin():
    first = [circle_curve(1.0, 1.0, make_mesh(n, 1.0)).slopes[1] for n in (16, 64, 256, 1024)]
    assert all(b > a for a, b in zip(first, first[1:]))
    assert first[-1] > 1e4


def test_central_differences_are_second_order():
    # away from t = 0 the error drops by ~4 when the mesh doubles
    errs = []
    for n in (64, 128, 256):
        exact = circle_curve(1.0, 1.0, make_mesh(n, 1.0, 1.0))
        sampled = curve_from_samples(exact.mesh, exact.values, 1.0)
        sel = (exact.t >= 0.2) & (exact.t <= 0.8)
        errs.append(np.max(np.abs(sampled.slopes[sel] - exact.slopes[sel])))
    assert errs[0] / errs[1] >= 3.5
    assert errs[1] / errs[2] >= 3.5


def test_piecewise_linear_evaluation_uses_cell():
    m = make_mesh(8, 1.0, 1.0)
    vals = np.sqrt(m.nodes)
    vals[-1] = 1.0
    c = curve_from_samples(m, vals, 1.0)
    t = np.array([0.25, 0.25])
    _, s = c.evaluate(t, where=np.array([0.2, 0.3]))
    left = (vals[2] - vals[1]) / 0.125
    right = (vals[3] - vals[2]) / 0.125
    assert s[0] == pytest.approx(left) and s[1] == pytest.approx(right)


def test_csv_round_trip(tmp_path):
    m = make_mesh(32, 1.0)
    c = line_curve(1.0, 1.0, m)
    path = tmp_path / "line.csv"
    save_curve_csv(c, path)
    raw = path.read_bytes()
    assert raw.startswith(b"t,gamma\n") and b"\r" not in raw
    back = load_curve_csv(path, 1.0, 1.0)
    assert np.array_equal(back.t, c.t)
    assert np.array_equal(back.values, c.values)
    assert np.allclose(back.slopes[1:], 1.0, rtol=1e-12)
    assert back.kind == "file:line.csv"


def test_csv_round_trip_cycloid_bits(tmp_path):
    s = solve(BrachProblem(1.3, 0.4))
    c = sample_solution(s, make_mesh(50, 1.3))
    save_curve_csv(c, tmp_path / "c.csv")
    back = load_curve_csv(tmp_path / "c.csv", 1.3, 0.4)
    assert np.array_equal(back.values, c.values)


def _write(path, rows, header="t,gamma"):
    path.write_text(header + "\n" + "\n".join(rows) + "\n")
    return path


@pytest.mark.parametrize(
    "rows,row,match",
    [
        (["0,0.1", "0.5,0.5", "1,1"], 0, "gamma\\(0\\)"),
        (["0,0", "0.5,0", "1,1"], 1, "not positive"),
        (["0,0", "0.5,-0.2", "1,1"], 1, "not positive"),
        (["0,0", "0.5,0.5", "0.4,0.7", "1,1"], 2, "increasing"),
        (["0,0", "0.5,0.5", "1,0.9"], 2, "expected beta"),
        (["0,0", "0.5,0.5", "0.9,1"], 2, "expected b"),
        (["0,0", "0.5,abc", "1,1"], 1, "unparseable"),
        (["0,0", "0.5,0.5,3", "1,1"], 1, "2 fields"),
        (["0,0", "0.5,nan", "1,1"], 1, "non-finite"),
    ],
)
def test_csv_errors_name_row(tmp_path, rows, row, match):
    path = _write(tmp_path / "bad.csv", rows)
    with pytest.raises(CurveFormatError, match=match) as exc:
        load_curve_csv(path, 1.0, 1.0)
    assert exc.value.row == row


def test_csv_bad_header(tmp_path):
    with pytest.raises(CurveFormatError, match="header"):
        load_curve_csv(_write(tmp_path / "h.csv", ["0,0", "1,1"], header="x,y"), 1.0, 1.0)


def test_csv_too_short(tmp_path):
    with pytest.raises(CurveFormatError):
        load_curve_csv(_write(tmp_path / "s.csv", ["0,0", "1,1"]), 1.0, 1.0)


def test_boundary_tolerance(tmp_path):
    # a 1e-10 mismatch is accepted, 1e-8 is not
    ok = load_curve_csv(_write(tmp_path / "a.csv", ["1e-10,0", "0.5,0.5", "1,1.0000000001"]), 1.0, 1.0)
    assert ok.t[0] == 0.0
    with pytest.raises(CurveFormatError):
        load_curve_csv(_write(tmp_path / "b.csv", ["0,1e-8", "0.5,0.5", "1,1"]), 1.0, 1.0)


def test_curves_are_immutable():
    c = line_curve(1.0, 1.0, make_mesh(8, 1.0))
    with pytest.raises(ValueError):
        c.values[1] = 3.0
    with pytest.raises(AttributeError):
        c.beta = 2.0
