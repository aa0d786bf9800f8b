import math

import pytest
from hypothesis import given, strategies as st

from homeo1.projgeom import (
    INF,
    Orientation,
    ProjDir,
    ResolutionParams,
    circular_mean,
    cyclic_order,
    dir_from_slope,
    dir_from_vector,
    proj_distance,
)

angles = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False)
# keep triples well separated so DEGENERATE never triggers by accident
spread = st.floats(min_value=1e-6, max_value=math.pi - 1e-6)


def test_dir_from_slope_examples():
    assert dir_from_slope(0).theta == 0.0
    assert dir_from_slope(INF).theta == math.pi / 2
    assert dir_from_slope(1).theta == pytest.approx(math.pi / 4)
    assert dir_from_slope(-1).theta == pytest.approx(3 * math.pi / 4)


def test_slope_of_vertical_is_inf():
    assert ProjDir(math.pi / 2).slope == INF
    assert ProjDir(-math.pi / 2).slope == INF


def test_theta_wraps_into_half_open_interval():
    assert ProjDir(math.pi).theta == 0.0
    assert ProjDir(-0.1).theta == pytest.approx(math.pi - 0.1)
    assert dir_from_vector(-1.0, -1.0).theta == pytest.approx(math.pi / 4)


def test_proj_distance_examples():
    assert proj_distance(ProjDir(0), ProjDir(0)) == 0
    assert proj_distance(ProjDir(0), ProjDir(math.pi / 2)) == pytest.approx(math.pi / 2)
    assert proj_distance(ProjDir(0.1), ProjDir(math.pi - 0.1)) == pytest.approx(0.2)


def test_cyclic_order_examples():
    q = math.pi / 4
    assert cyclic_order(ProjDir(0), ProjDir(q), ProjDir(2 * q)) is Orientation.CCW
    assert cyclic_order(ProjDir(0), ProjDir(2 * q), ProjDir(q)) is Orientation.CW
    assert cyclic_order(ProjDir(q), ProjDir(q), ProjDir(2 * q)) is Orientation.DEGENERATE


@given(angles, angles, angles)
def test_proj_distance_is_a_metric(a, b, c):
    A, B, C = ProjDir(a), ProjDir(b), ProjDir(c)
    assert 0 <= proj_distance(A, B) <= math.pi / 2 + 1e-15
    assert proj_distance(A, B) == proj_distance(B, A)
    assert proj_distance(A, C) <= proj_distance(A, B) + proj_distance(B, C) + 1e-12


@given(angles, spread, spread, angles)
def test_cyclic_order_offset_invariant(a, db, dc, off):
    if abs(db - dc) < 1e-6:
        return
    A, B, C = ProjDir(a), ProjDir(a + db), ProjDir(a + dc)
    before = cyclic_order(A, B, C)
    after = cyclic_order(A.rotated(off), B.rotated(off), C.rotated(off))
    assert before is after


@given(angles, spread, spread)
def test_cyclic_order_swap_reverses(a, db, dc):
    if abs(db - dc) < 1e-6:
        return
    A, B, C = ProjDir(a), ProjDir(a + db), ProjDir(a + dc)
    o1, o2 = cyclic_order(A, B, C), cyclic_order(A, C, B)
    assert {o1, o2} == {Orientation.CW, Orientation.CCW}


def test_circular_mean_across_the_seam():
    m = circular_mean([ProjDir(0.01), ProjDir(math.pi - 0.01)])
    assert proj_distance(m, ProjDir(0)) < 1e-12


def test_resolution_params_validation():
    with pytest.raises(ValueError):
        ResolutionParams(h_grid=(1e-6, 1e-4))
    with pytest.raises(ValueError):
        ResolutionParams(dir_tolerance=0)
    r = ResolutionParams().with_overrides(tail_length=12)
    assert r.tail_length == 12 and ResolutionParams(**r.as_dict()) == r
