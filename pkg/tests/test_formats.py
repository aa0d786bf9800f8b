import io
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from homeo1 import formats
from homeo1.curves import circle, slope_function
from homeo1.induced import induced_map_profile
from homeo1.mapcatalog import catalog
from homeo1.verifier import axis_sequence

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@given(finite)
def test_fmt_keeps_twelve_digits(x):
    y = formats.parse_num(formats.fmt(x))
    assert y == pytest.approx(x, rel=1e-11, abs=0)


def test_fmt_non_finite():
    assert formats.fmt(math.inf) == "inf" and formats.fmt(-math.inf) == "-inf"
    assert math.isnan(formats.parse_num(formats.fmt(math.nan)))


def test_curve_csv_round_trip(res):
    c = circle((0.2, 0.1), 0.7)
    ts = np.linspace(0, 6, 25)
    text = formats.to_text(formats.write_curve_csv, c, ts, slope_function(c, ts, res))
    data = formats.read_curve_csv(io.StringIO(text))
    assert list(data) == ["t", "x", "y", "slope"]
    pts = np.array([c(t) for t in ts])
    assert np.allclose(data["x"], pts[:, 0], atol=1e-11)
    assert np.allclose(data["y"], pts[:, 1], atol=1e-11)


def test_profile_csv_round_trip(res):
    prof = induced_map_profile(catalog("rot:20"), (0.1, 0.1), 12, res)
    back = formats.read_profile_csv(io.StringIO(formats.to_text(formats.write_profile_csv, prof)))
    assert len(back) == 12
    for a, b in zip(prof, back):
        assert b.output.exists
        assert b.output.theta == pytest.approx(a.output.theta, abs=1e-11)


def test_sequence_csv_round_trip():
    s = axis_sequence()
    back = formats.read_sequence_csv(io.StringIO(formats.to_text(formats.write_sequence_csv, s)))
    assert len(back) == len(s)
    assert back.limit_dir == s.limit_dir
    for a, b in zip(s.entries, back.entries):
        assert b.p.x == pytest.approx(a.p.x, rel=1e-11)


@pytest.mark.parametrize("text", ["x,y,theta\n1,0,0\n", "a,b\n", "x,y,theta\nlimit,0,0,0\n1,0,0\n"])
def test_sequence_csv_rejects_malformed(text):
    with pytest.raises(ValueError):
        formats.read_sequence_csv(io.StringIO(text))


def test_dumps_is_deterministic():
    obj = {"b": [1.0 / 3, math.inf], "a": {"z": np.float64(2.5), "y": np.int64(3)}}
    assert formats.dumps(obj) == formats.dumps(obj)
    assert formats.dumps(obj).index('"b"') < formats.dumps(obj).index('"a"')
    assert '"inf"' in formats.dumps(obj) and "0.333333333333" in formats.dumps(obj)


def test_svg_round_trip():
    cv = formats.SvgCanvas((0, 1, 0, 2), title="t")
    pts = np.array([[0, 0], [1, 1], [0.5, 2]])
    cv.polyline(pts, cls="curve", closed=True)
    cv.point(0.25, 0.75)
    cv.meta = {"k": [1, 2]}
    out = formats.read_svg(cv.render())
    assert out["version"] == "1.1"
    assert np.allclose(out["polylines"][0]["points"], pts)
    assert out["polylines"][0]["closed"] and out["markers"] == [(0.25, 0.75)]
    assert out["metadata"] == {"k": [1, 2]}
    assert cv.render() == cv.render()
