import math

import pytest
from hypothesis import given, settings, strategies as st

from homeo1.curves import graph_curve, line_through
from homeo1.errors import BadSandwich, DegenerateSequence
from homeo1.induced import PTPoint
from homeo1.mapcatalog import catalog
from homeo1.projgeom import Point2, ProjDir
from homeo1.sequences import (
    DirectionSequence,
    converges_along_line,
    converges_along_line_sandwich,
    is_transverse,
    property_c_check,
    pushforward_sequence,
)
from homeo1.verdict import Status

O = (0.0, 0.0)
N = range(1, 41)
WIDTHS = (0.3, 0.1, 0.05)

CASES = {
    "parabola": ([(1 / n, 1 / n**2) for n in N], True),
    "cubic_left": ([(-1 / n, -1 / n**3) for n in N], True),
    "diagonal": ([(1 / n, 1 / n) for n in N], False),
    "alternating": ([(1 / n, (-1) ** n / n) for n in N], False),
    "fixed_slope": ([(1 / n, 0.5 / n) for n in N], False),
    "spiral": ([(math.cos(n) / n, math.sin(n) / n) for n in N], False),
}


def bounding_pair(w, curved=False):
    """Curves through 0 whose tangents sit at angles +w and -w from the x axis."""
    if curved:
        plus = graph_curve(lambda x: math.tan(w) * x + x * x, name="upper")
        minus = graph_curve(lambda x: -math.tan(w) * x + x * x, name="lower")
    else:
        plus = line_through(O, ProjDir(w), name="upper")
        minus = line_through(O, ProjDir(-w), name="lower")
    return plus, minus


@pytest.mark.parametrize("case", sorted(CASES))
@pytest.mark.parametrize("curved", [False, True])
def test_sandwich_agrees_with_chord_test(res, case, curved):
    pts, expected = CASES[case]
    chord = converges_along_line(pts, O, ProjDir(0), res).passed
    sandwich = all(
        converges_along_line_sandwich(pts, O, ProjDir(0), *bounding_pair(w, curved), res).passed
        for w in WIDTHS
    )
    assert chord == sandwich == expected


def test_sandwich_needs_straddling_curves(res):
    pts, _ = CASES["parabola"]
    a = line_through(O, ProjDir(0.1))
    b = line_through(O, ProjDir(0.2))
    with pytest.raises(BadSandwich):
        converges_along_line_sandwich(pts, O, ProjDir(0), a, b, res)


def test_too_short_or_receding_sequences(res):
    with pytest.raises(DegenerateSequence):
        converges_along_line([(1 / n, 0) for n in range(1, 10)], O, ProjDir(0), res)
    with pytest.raises(DegenerateSequence):
        converges_along_line([(n, 0) for n in N], O, ProjDir(0), res)


def rigid(p, angle, shift):
    c, s = math.cos(angle), math.sin(angle)
    return (c * p[0] - s * p[1] + shift[0], s * p[0] + c * p[1] + shift[1])


def axis_like(slope_angle):
    xs = [1 / ((2 * k + 1) * math.pi) for k in N]
    return DirectionSequence(tuple(PTPoint.of(x, 0, slope_angle) for x in xs), O, ProjDir(0))


def moved(seq, angle, shift):
    ents = tuple(PTPoint(Point2(*rigid(e.p, angle, shift)), e.dir.rotated(angle)) for e in seq.entries)
    return DirectionSequence(ents, Point2(*rigid(seq.limit_point, angle, shift)),
                             seq.limit_dir.rotated(angle))


@settings(max_examples=25, deadline=None)
@given(st.floats(0, 2 * math.pi), st.floats(-3, 3), st.floats(-3, 3), st.sampled_from(sorted(CASES)))
def test_chord_test_is_rigid_motion_invariant(res, angle, dx, dy, case):
    pts, expected = CASES[case]
    moved_pts = [rigid(p, angle, (dx, dy)) for p in pts]
    v = converges_along_line(moved_pts, (dx, dy), ProjDir(angle), res)
    assert v.passed == expected


@settings(max_examples=25, deadline=None)
@given(st.floats(0, 2 * math.pi), st.floats(-3, 3), st.floats(-3, 3))
def test_transversality_is_rigid_motion_invariant(res, angle, dx, dy):
    assert is_transverse(moved(axis_like(math.pi / 4), angle, (dx, dy)), res).passed
    # directions 1/k -> 0 approach the limit line
    xs = [1 / ((2 * k + 1) * math.pi) for k in N]
    neg = DirectionSequence(tuple(PTPoint.of(x, 0, math.atan(1 / k)) for k, x in zip(N, xs)), O, ProjDir(0))
    assert not is_transverse(moved(neg, angle, (dx, dy)), res).passed


def test_mixed_subsequences_are_flagged(res):
    xs = [1 / ((2 * k + 1) * math.pi) for k in N]
    ents = tuple(PTPoint.of(x, 0, math.pi / 4 if k % 2 else math.atan(1 / k)) for k, x in zip(N, xs))
    v = is_transverse(DirectionSequence(ents, O, ProjDir(0)), res)
    assert v.status is Status.FAIL and "MIXED" in v.flags


def test_pushforward_by_rotation_rotates(res):
    seq = axis_like(math.pi / 4)
    img = pushforward_sequence(catalog("rot:30"), seq, res)
    assert img.limit_dir.theta == pytest.approx(math.pi / 6)
    assert all(e.dir.theta == pytest.approx(math.pi / 4 + math.pi / 6) for e in img.entries)
    assert property_c_check(catalog("rot:30"), [seq], res).passed


def test_w_destroys_transversality(res):
    v = property_c_check(catalog("W"), [axis_like(math.pi / 4)], res)
    assert v.status is Status.FAIL
    assert v.residuals["min_dir_gap"] < res.dir_tolerance
