import math

import numpy as np
import pytest

from homeo1.errors import ConstraintViolation
from homeo1.mapcatalog import (
    base_name,
    bump_g,
    bump_q,
    bump_w,
    catalog,
    compose,
    conjugate,
    invert,
    map_P,
    support_balls,
)

NAMES = ["identity", "rot:30", "G", "H", "Hinv", "Q", "W", "P:8", "corner_shear"]


def sample_points(n=1000, radius=4.0, seed=7):
    rng = np.random.default_rng(seed)
    r = radius * np.sqrt(rng.random(n))
    a = 2 * np.pi * rng.random(n)
    return np.column_stack([r * np.cos(a), r * np.sin(a)])


def near_p_supports(n=400, seed=11):
    rng = np.random.default_rng(seed)
    out = []
    for c, rad in support_balls(8):
        for _ in range(n // 8):
            s, a = rad * math.sqrt(rng.random()), 2 * math.pi * rng.random()
            out.append((c.x + s * math.cos(a), s * math.sin(a)))
    return np.array(out)


@pytest.mark.parametrize("name", NAMES)
def test_inverse_round_trip(name):
    f = catalog(name)
    pts = sample_points()
    if name.startswith("P:"):
        pts = np.vstack([pts, near_p_supports()])
    for p in pts:
        scale = max(1.0, math.hypot(*p))
        for a, b in ((f.inverse(f.forward(p)), p), (f.forward(f.inverse(p)), p)):
            assert math.hypot(a[0] - b[0], a[1] - b[1]) <= 1e-9 * scale, (name, p)


def test_g_off_one():
    g = bump_g()
    # exp(1 - 1/(1 - s^2)) at s = (4 - 5)/3 gives exp(-1/8)
    assert g(1.0) == pytest.approx(1.0 + 0.5 * math.exp(-0.125), rel=1e-14)
    assert g(0.5) == 1.0 and g(2.0) == 1.0 and g(-3.0) == 1.0


def test_q_certificate():
    q = bump_q()
    assert q(0.0) == 1.0
    h = 1e-7
    assert (q(h) - q(-h)) / (2 * h) == pytest.approx(1.0, abs=1e-8)
    ts = np.linspace(-0.5, 0.5, 20001)
    vals = np.array([q(t) for t in ts])
    ders = np.array([q.deriv(t) for t in ts])
    assert vals.min() > 0
    assert (vals - ts * ders).min() > 0
    assert q.certificate["margin"] > 0


def test_q_with_unit_half_width_is_rejected():
    with pytest.raises(ConstraintViolation):
        bump_q(half_width=1.0)


def test_w_endpoints():
    w = bump_w()
    assert (w(0.0), w(1.0), w(0.5)) == (0.0, 1.0, 0.5)
    assert w.deriv(0.0) == 0.0 and w.deriv(1.0) == 0.0


def test_p_supports_are_disjoint_and_shrink():
    balls = support_balls(8)
    for (c1, r1), (c2, r2) in zip(balls, balls[1:]):
        assert r2 < r1 and c1.x - r1 > c2.x + r2
    f = map_P(8)
    pts = sample_points(2000, radius=1.0, seed=3)
    for p in pts:
        inside = any((p[0] - c.x) ** 2 + p[1] ** 2 < r * r for c, r in balls)
        if not inside:
            assert tuple(f.forward(p)) == (p[0], p[1])


def test_p_moves_points_in_every_ball():
    f = map_P(8)
    for c, r in support_balls(8):
        # a point on a steep ray from the centre, inside the blend region
        p = (c.x + 0.2 * r * math.cos(1.4), 0.2 * r * math.sin(1.4))
        q = f.forward(p)
        assert math.hypot(q[0] - p[0], q[1] - p[1]) > 0


def test_simple_invariants():
    pts = sample_points(200)
    G, Q, W = catalog("G"), catalog("Q"), catalog("W")
    for x, y in pts:
        gx, gy = G.forward((x, y))
        assert abs(gx * y - gy * x) <= 1e-12 * (1 + x * x + y * y)  # rays kept
        assert Q.forward((x, y))[0] == x  # vertical lines kept
        if math.hypot(x, y) >= 1:
            assert tuple(W.forward((x, y))) == (x, y)


def test_names_of_combinators():
    G, H = catalog("G"), catalog("H")
    assert compose(G, H).name == "G*H"
    assert invert(G).name == "inv(G)"
    assert conjugate(G, 30).name == "conj30(G)"
    assert base_name("P:8") == "P" and base_name("rot:30") == "rot"


def test_unknown_map():
    with pytest.raises((KeyError, ValueError)):
        catalog("nosuch")
