import functools
import math
from dataclasses import replace

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st
from shapely.geometry import LinearRing, LineString

from homeo1.curves import ParamCurve
from homeo1.errors import InsufficientPoints, NotConvergent
from homeo1.induced import PTPoint
from homeo1.interpolation import (
    ARC_ORDER,
    _assemble,
    _construct_from,
    _gamma_value_and_slope,
    build_closure,
    build_xi,
    construct_closed_c1,
    gamma_segment,
    normalize_and_extract,
    polyline_self_intersections,
    sample_closed,
    validate_construction,
)
from homeo1.projgeom import Point2, ProjDir
from homeo1.sequences import DirectionSequence
from homeo1.verdict import Status

N = range(1, 41)


def parabola_seq(angle=0.0, shift=(0.0, 0.0)):
    c, s = math.cos(angle), math.sin(angle)
    ents = []
    for n in N:
        x, y = 1 / n, 1 / n**2
        p = Point2(c * x - s * y + shift[0], s * x + c * y + shift[1])
        ents.append(PTPoint(p, ProjDir(math.atan(2 / n) + angle)))
    return DirectionSequence(tuple(ents), Point2(*shift), ProjDir(angle), "parabola")


@pytest.fixture(scope="module")
def built(res):
    seq = parabola_seq()
    ns = normalize_and_extract(seq, 8, res)
    return seq, ns, _construct_from(ns)


@functools.lru_cache(maxsize=None)
def symbolic_gamma():
    t, xk, yk, mk, x1, y1, m1 = sp.symbols("t x_k y_k m_k x_1 y_1 m_1", real=True)
    L = xk - x1
    c = (yk - y1) / L
    right_s = (2 * t - xk - x1) / L
    right = right_s * (L * mk / (2 * sp.pi) * sp.sin(2 * sp.pi * (t - xk) / L) + yk) + (1 - right_s) * (c * (t - xk) + yk)
    left_s = (2 * t - xk - x1) / (x1 - xk)
    left = left_s * (L * m1 / (2 * sp.pi) * sp.sin(2 * sp.pi * (t - x1) / L) + y1) + (1 - left_s) * (c * (t - x1) + y1)
    syms = (t, xk, yk, mk, x1, y1, m1)
    return [(sp.lambdify(syms, e), sp.lambdify(syms, sp.diff(e, t))) for e in (left, right)]


@settings(max_examples=40, deadline=None)
@given(st.floats(0.2, 1.0), st.floats(0.01, 0.9), st.floats(0, 1), st.floats(0, 1),
       st.floats(0, 2), st.floats(0, 2), st.floats(0, 1))
def test_gamma_slope_is_the_derivative_of_gamma(xk, frac, yk, y1, mk, m1, u):
    x1 = xk * frac
    t = x1 + u * (xk - x1)
    (lv, ld), (rv, rd) = symbolic_gamma()
    val, der = _gamma_value_and_slope(t, xk, yk, mk, x1, y1, m1)
    fv, fd = (rv, rd) if t >= 0.5 * (xk + x1) else (lv, ld)
    args = (t, xk, yk, mk, x1, y1, m1)
    assert val == pytest.approx(fv(*args), abs=1e-12)
    assert der == pytest.approx(fd(*args), abs=1e-9)


def test_gamma_endpoints_and_midpoint():
    left, right = (0.5, 0.25, 1.0), (1 / 3, 1 / 9, 2 / 3)
    seg = gamma_segment(0, left, right)
    for (x, y, m) in (left, right):
        assert seg.eval_fn(x)[1] == pytest.approx(y, abs=1e-15)
        assert seg.deriv(x)[1] == pytest.approx(m, abs=1e-14)
    mid = 0.5 * (left[0] + right[0])
    chord = (left[1] - right[1]) / (left[0] - right[0])
    assert seg.eval_fn(mid)[1] == pytest.approx(right[1] + chord * (mid - right[0]), abs=1e-15)
    assert seg.deriv(mid)[1] == pytest.approx(2 * chord, abs=1e-14)


def test_extracted_points_are_monotone(built):
    _, ns, _ = built
    xs = [e[0] for e in ns.entries]
    ys = [e[1] for e in ns.entries]
    ms = [e[2] for e in ns.entries]
    assert all(a > b for a, b in zip(xs, xs[1:]))
    assert all(a >= b for a, b in zip(ms, ms[1:]))
    assert all(y1 / x1 > y2 / x2 for (x1, y1), (x2, y2) in zip(zip(xs, ys), zip(xs[1:], ys[1:])))


def test_construction_passes_validation(built, res):
    _, ns, c = built
    v = validate_construction(c, ns, res)
    assert v.passed, (v.witness, v.reason, v.residuals)
    assert v.residuals["position_error"] <= 1e-9
    assert v.residuals["direction_error"] <= 1e-6


def test_shapely_sees_a_simple_ring(built):
    _, _, c = built
    pts = sample_closed(c)
    assert LinearRing(pts).is_simple
    assert polyline_self_intersections(pts) == []


def test_wrong_slope_is_caught(built, res):
    _, ns, c = built
    x, y, m = ns.entries[3]
    bad = replace(ns, entries=ns.entries[:3] + ((x, y, m + 0.5),) + ns.entries[4:])
    v = validate_construction(c, bad, res)
    assert v.status is Status.FAIL
    assert v.residuals["direction_error"] > 1e-6


def test_lowered_top_arc_is_caught(built, res):
    _, ns, c = built
    xi = build_xi(ns)
    alpha, beta, delta = build_closure(ns, xi)
    drop = 0.9 * beta.eval_fn(0.0)[1]
    low = ParamCurve(0.0, 1.0, lambda t: Point2(beta.eval_fn(t)[0], beta.eval_fn(t)[1] - drop),
                     beta.deriv, name="beta")
    arcs = {"xi": xi, "alpha": alpha, "beta": low, "delta": delta}
    broken = _assemble([arcs[k] for k in ARC_ORDER], ns.frame, "broken", dict(c.meta))
    v = validate_construction(broken, ns, res)
    assert v.status is Status.FAIL
    assert not LinearRing(sample_closed(broken)).is_simple


@pytest.mark.parametrize("angle,shift", [(1.0, (0, 0)), (2.5, (0.3, -1.2)), (-0.4, (5, 5))])
def test_frame_invariance(res, angle, shift):
    seq = parabola_seq(angle, shift)
    ns = normalize_and_extract(seq, 8, res)
    c = construct_closed_c1(seq, 8, res)
    assert validate_construction(c, ns, res).passed
    # the same normalized data as the unmoved sequence
    base = normalize_and_extract(parabola_seq(), 8, res)
    assert np.allclose(np.array(ns.entries), np.array(base.entries), atol=1e-12)
    assert LinearRing(sample_closed(c)).is_simple


def test_rejections(res):
    with pytest.raises(InsufficientPoints):
        normalize_and_extract(parabola_seq(), 41, res)
    xs = [1 / ((2 * k + 1) * math.pi) for k in N]
    transverse = DirectionSequence(tuple(PTPoint.of(x, 0, math.pi / 4) for x in xs), (0, 0), ProjDir(0))
    with pytest.raises(NotConvergent):
        normalize_and_extract(transverse, 8, res)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(-6, 6), st.integers(-6, 6)), min_size=4, max_size=9, unique=True))
def test_sweep_agrees_with_shapely(raw):
    pts = np.array(raw, dtype=float) + np.random.default_rng(len(raw)).normal(0, 1e-3, (len(raw), 2))
    ring = LinearRing(pts)
    ours = polyline_self_intersections(pts)
    assert (not ours) == ring.is_simple
    line = LineString(pts)
    assert (not polyline_self_intersections(pts, closed=False)) == line.is_simple
