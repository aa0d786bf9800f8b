"""Explicit plane homeomorphisms with forward and inverse evaluators.

Closed-form inverses are used for G, H and rotations; Q, W and the bumps of
P are inverted by bisection on a monotone scalar equation, run until the
bracket stops shrinking in floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConstraintViolation, RootNotBracketed
from .projgeom import Point2

MapFn = Callable[[tuple[float, float]], Point2]

CERT_POINTS = 4096


@dataclass(frozen=True)
class BumpSpec:
    name: str
    value: Callable[[float], float]
    deriv: Callable[[float], float]
    support: tuple[float, float]
    baseline: float
    certificate: dict = field(default_factory=dict, compare=False)

    def __call__(self, t: float) -> float:
        return self.value(t)


@dataclass(frozen=True)
class PlaneMap:
    name: str
    forward: MapFn
    inverse: MapFn
    known_nondiff_points: tuple[Point2, ...] = ()
    orientation_preserving: bool = True
    meta: dict = field(default_factory=dict, compare=False)

    def __call__(self, p) -> Point2:
        return self.forward(p)


def _exp_bump(s: float) -> float:
    """exp(1 - 1/(1 - s^2)) on (-1, 1), zero elsewhere; equals 1 at s = 0."""
    if abs(s) >= 1.0:
        return 0.0
    return math.exp(1.0 - 1.0 / (1.0 - s * s))


def _exp_bump_deriv(s: float) -> float:
    if abs(s) >= 1.0:
        return 0.0
    d = 1.0 - s * s
    return _exp_bump(s) * (-2.0 * s / (d * d))


def _certify_continuity(spec_name: str, value, deriv, lo: float, hi: float) -> float:
    """Lipschitz-consistency check of value against derivative on a grid; returns max |deriv|."""
    ts = np.linspace(lo, hi, CERT_POINTS)
    vals = np.array([value(float(t)) for t in ts])
    ders = np.array([deriv(float(t)) for t in ts])
    if not (np.all(np.isfinite(vals)) and np.all(np.isfinite(ders))):
        raise ConstraintViolation(f"{spec_name}: non-finite samples")
    dt = ts[1] - ts[0]
    bound = np.maximum(np.abs(ders[1:]), np.abs(ders[:-1])) * dt
    jumps = np.abs(np.diff(vals))
    # second-order slack for curvature between samples
    if np.any(jumps > bound * 1.05 + 50 * dt * dt + 1e-12):
        raise ConstraintViolation(f"{spec_name}: value jumps inconsistent with derivative")
    return float(np.abs(ders).max())


def bump_g() -> BumpSpec:
    """Smooth positive g with g = 1 off [1/2, 2] and g(1) != 1."""

    def s_of(t: float) -> float:
        return (4.0 * t - 5.0) / 3.0

    def value(t: float) -> float:
        if t <= 0.5 or t >= 2.0:
            return 1.0
        return 1.0 + 0.5 * _exp_bump(s_of(t))

    def deriv(t: float) -> float:
        if t <= 0.5 or t >= 2.0:
            return 0.0
        return 0.5 * _exp_bump_deriv(s_of(t)) * 4.0 / 3.0

    _certify_continuity("g", value, deriv, 0.0, 2.5)
    if value(1.0) == 1.0:
        raise ConstraintViolation("g(1) must differ from 1")
    return BumpSpec("g", value, deriv, (0.5, 2.0), 1.0, {"g(1)": value(1.0)})


def bump_q(half_width: float = 0.5) -> BumpSpec:
    """q(t) = 1 + t b(t/half_width) with b the unit exponential bump.

    Certifies q(0) = 1, q'(0) = 1, q > 0 and q(t) > t q'(t) on a grid over the
    support; off the support both sides of the inequality are exactly 1 > 0.
    ``half_width = 1`` fails the certificate.
    """
    a = float(half_width)
    if not 0 < a <= 1:
        raise ValueError("half_width must lie in (0, 1]")

    def value(t: float) -> float:
        return 1.0 + t * _exp_bump(t / a)

    def deriv(t: float) -> float:
        return _exp_bump(t / a) + (t / a) * _exp_bump_deriv(t / a)

    lo, hi = -a + 1e-6, a - 1e-6
    ts = np.linspace(lo, hi, CERT_POINTS)
    q = np.array([value(float(t)) for t in ts])
    dq = np.array([deriv(float(t)) for t in ts])
    margin = float((q - ts * dq).min())
    if margin <= 0.0:
        raise ConstraintViolation(f"q(t) > t q'(t) fails: minimum margin {margin:.4g}")
    if q.min() <= 0.0:
        raise ConstraintViolation("q must be positive")
    _certify_continuity("q", value, deriv, -1.2, 1.2)
    cert = {"margin": margin, "q_min": float(q.min()), "q_max": float(q.max())}
    return BumpSpec("q", value, deriv, (-a, a), 1.0, cert)


def bump_w() -> BumpSpec:
    """w(t) = t^2 (3 - 2t): a C1 diffeomorphism of [0, 1] with flat ends."""

    def value(t: float) -> float:
        t = min(max(t, 0.0), 1.0)
        return t * t * (3.0 - 2.0 * t)

    def deriv(t: float) -> float:
        if t <= 0.0 or t >= 1.0:
            return 0.0
        return 6.0 * t * (1.0 - t)

    _certify_continuity("w", value, deriv, 0.0, 1.0)
    return BumpSpec("w", value, deriv, (0.0, 1.0), 0.0)


def bisect_increasing(fn: Callable[[float], float], target: float, lo: float, hi: float) -> float:
    """Root of fn(x) = target for increasing fn on [lo, hi], to floating-point resolution."""
    flo, fhi = fn(lo) - target, fn(hi) - target
    if flo > 0 or fhi < 0:
        raise RootNotBracketed(f"[{lo}, {hi}] does not bracket {target}")
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    for _ in range(2000):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = fn(mid) - target
        if fm == 0:
            return mid
        if fm < 0:
            lo = mid
        else:
            hi = mid
    return lo if abs(fn(lo) - target) <= abs(fn(hi) - target) else hi


# ------------------------------------------------------------------ maps

ORIGIN = Point2(0.0, 0.0)


def identity() -> PlaneMap:
    f = lambda p: Point2(float(p[0]), float(p[1]))  # noqa: E731
    return PlaneMap("identity", f, f)


def rotation(deg: float) -> PlaneMap:
    a = math.radians(deg)
    c, s = math.cos(a), math.sin(a)

    def fwd(p):
        return Point2(c * p[0] - s * p[1], s * p[0] + c * p[1])

    def inv(p):
        return Point2(c * p[0] + s * p[1], -s * p[0] + c * p[1])

    return PlaneMap(f"rot:{deg:g}", fwd, inv, meta={"angle": a})


def map_G(g: BumpSpec | None = None) -> PlaneMap:
    g = g or bump_g()
    gv = g.value

    def fwd(p):
        x, y = float(p[0]), float(p[1])
        if x == 0.0:
            return Point2(x, y)
        k = gv(y / x)
        return Point2(x * k, y * k)

    def inv(p):
        x, y = float(p[0]), float(p[1])
        if x == 0.0:
            return Point2(x, y)
        k = gv(y / x)
        return Point2(x / k, y / k)

    return PlaneMap("G", fwd, inv, (ORIGIN,), meta={"bump": g})


def map_H() -> PlaneMap:
    def fwd(p):
        x, y = float(p[0]), float(p[1])
        r = math.hypot(x, y)
        return Point2(r * x, r * y)

    def inv(p):
        x, y = float(p[0]), float(p[1])
        r = math.hypot(x, y)
        if r == 0.0:
            return Point2(0.0, 0.0)
        s = 1.0 / math.sqrt(r)
        return Point2(x * s, y * s)

    return PlaneMap("H", fwd, inv, (ORIGIN,))


def map_Hinv() -> PlaneMap:
    h = map_H()
    return PlaneMap("Hinv", h.inverse, h.forward, (ORIGIN,))


def map_Q(q: BumpSpec | None = None) -> PlaneMap:
    q = q or bump_q()
    qv = q.value
    # strict bracket from the certified range of q
    q_lo = q.certificate["q_min"] * 0.99
    q_hi = q.certificate["q_max"] * 1.01

    def fwd(p):
        x, y = float(p[0]), float(p[1])
        if y == 0.0:
            return Point2(x, y)
        return Point2(x, y * qv(x / y))

    def height(x: float, y: float) -> float:
        return 0.0 if y == 0.0 else y * qv(x / y)

    def inv(p):
        x, yy = float(p[0]), float(p[1])
        if yy == 0.0:
            return Point2(x, 0.0)
        lo, hi = sorted((yy / q_hi, yy / q_lo))
        return Point2(x, bisect_increasing(lambda y: height(x, y), yy, lo, hi))

    return PlaneMap("Q", fwd, inv, (ORIGIN,), meta={"bump": q})


def signed_polar(x: float, y: float) -> tuple[float, float]:
    """(r, theta) with theta in [0, pi) and signed r."""
    r = math.hypot(x, y)
    th = math.atan2(y, x)
    if th < 0.0:
        th += math.pi
        r = -r
    if th >= math.pi:
        th -= math.pi
        r = -r
    return r, th


def map_W(w: BumpSpec | None = None) -> PlaneMap:
    w = w or bump_w()
    wv = w.value
    pi = math.pi

    def angle(th: float, ar: float) -> float:
        wr = wv(ar)
        return pi * wv(th / pi) * (1.0 - wr) + th * wr

    def fwd(p):
        x, y = float(p[0]), float(p[1])
        r, th = signed_polar(x, y)
        ar = abs(r)
        if ar >= 1.0 or ar == 0.0:
            return Point2(x, y)
        a = angle(th, ar)
        return Point2(r * math.cos(a), r * math.sin(a))

    def inv(p):
        x, y = float(p[0]), float(p[1])
        r, a = signed_polar(x, y)
        ar = abs(r)
        if ar >= 1.0 or ar == 0.0:
            return Point2(x, y)
        th = bisect_increasing(lambda t: angle(t, ar), a, 0.0, pi)
        return Point2(r * math.cos(th), r * math.sin(th))

    return PlaneMap("W", fwd, inv, (ORIGIN,), meta={"bump": w})


def _transition(R: float) -> float:
    """Smooth step: 1 for R <= 1/2, 0 for R >= 1."""
    if R <= 0.5:
        return 1.0
    if R >= 1.0:
        return 0.0
    a = math.exp(-1.0 / (1.0 - R))
    b = math.exp(-1.0 / (R - 0.5))
    return a / (a + b)


# R|transition'(R)| peaks near 6, so monotone rays need amplitude < 1/6
P_AMPLITUDE = 0.12


def _bump_k(u: float) -> float:
    """Radial factor of the base map: != 1 only for x/y in (1/8, 1/2), i.e. slopes in (2, 8)."""
    if u <= 0.125 or u >= 0.5:
        return 1.0
    return 1.0 + P_AMPLITUDE * _exp_bump((2.0 * u - 0.625) / 0.375)


def base_P0() -> PlaneMap:
    """Identity on every line through the origin with slope in [-1, 1], not the identity
    on the steep pencil (slopes 2..8); scales each ray by a constant factor."""

    def fwd(p):
        x, y = float(p[0]), float(p[1])
        if y == 0.0:
            return Point2(x, y)
        k = _bump_k(x / y)
        return Point2(x * k, y * k)

    def inv(p):
        x, y = float(p[0]), float(p[1])
        if y == 0.0:
            return Point2(x, y)
        k = _bump_k(x / y)
        return Point2(x / k, y / k)

    return PlaneMap("P0", fwd, inv, (ORIGIN,))


def _rho_radius(R: float, k: float) -> float:
    return R * (1.0 + _transition(R) * (k - 1.0))


def _certify_rho() -> float:
    """Radius map of the blend must be strictly increasing for the largest factor."""
    Rs = np.linspace(0.0, 1.0, 8 * CERT_POINTS)
    kmax = 1.0 + P_AMPLITUDE
    vals = np.array([_rho_radius(float(R), kmax) for R in Rs])
    step = float(np.diff(vals).min())
    if step <= 0.0:
        raise ConstraintViolation("blended bump is not monotone along rays")
    return step


def rho_fwd(p) -> Point2:
    x, y = float(p[0]), float(p[1])
    R = math.hypot(x, y)
    if R >= 1.0 or y == 0.0:
        return Point2(x, y)
    k = _bump_k(x / y)
    s = 1.0 + _transition(R) * (k - 1.0)
    return Point2(x * s, y * s)


def rho_inv(p) -> Point2:
    x, y = float(p[0]), float(p[1])
    Rp = math.hypot(x, y)
    if Rp >= 1.0 or y == 0.0:
        return Point2(x, y)
    k = _bump_k(x / y)
    if k == 1.0:
        return Point2(x, y)
    R = bisect_increasing(lambda t: _rho_radius(t, k), Rp, Rp / k * (1.0 - 1e-12), Rp)
    s = R / Rp
    return Point2(x * s, y * s)


def support_balls(n_max: int) -> list[tuple[Point2, float]]:
    return [(Point2(2.0**-n, 0.0), 2.0 ** -(n + 2)) for n in range(1, n_max + 1)]


def map_P(n_max: int = 8) -> PlaneMap:
    if not 1 <= n_max <= 40:
        raise ValueError("n_max must lie in 1..40")
    _certify_rho()
    balls = support_balls(n_max)

    def which(x: float, y: float) -> int:
        if x <= 0.0 or x > 0.625 or abs(y) >= 0.125:
            return -1
        for i, (c, rad) in enumerate(balls):
            if (x - c.x) ** 2 + y * y < rad * rad:
                return i
        return -1

    def apply(p, fn):
        x, y = float(p[0]), float(p[1])
        i = which(x, y)
        if i < 0:
            return Point2(x, y)
        c, rad = balls[i]
        q = fn(((x - c.x) / rad, y / rad))
        return Point2(c.x + rad * q[0], rad * q[1])

    return PlaneMap(
        f"P:{n_max}",
        lambda p: apply(p, rho_fwd),
        lambda p: apply(p, rho_inv),
        tuple(c for c, _ in balls),
        meta={"balls": balls},
    )


def corner_shear() -> PlaneMap:
    return PlaneMap(
        "corner_shear",
        lambda p: Point2(float(p[0]), float(p[1]) + abs(float(p[0]))),
        lambda p: Point2(float(p[0]), float(p[1]) - abs(float(p[0]))),
        (ORIGIN,),
    )


def compose(f: PlaneMap, g: PlaneMap) -> PlaneMap:
    """f after g."""
    ff, gf, fi, gi = f.forward, g.forward, f.inverse, g.inverse
    return PlaneMap(
        f"{f.name}*{g.name}",
        lambda p: ff(gf(p)),
        lambda p: gi(fi(p)),
        orientation_preserving=f.orientation_preserving == g.orientation_preserving,
        meta={"parts": (f.name, g.name)},
    )


def invert(f: PlaneMap) -> PlaneMap:
    return PlaneMap(f"inv({f.name})", f.inverse, f.forward, (),
                    f.orientation_preserving, meta={"inverse_of": f.name})


def conjugate(f: PlaneMap, deg: float) -> PlaneMap:
    """rot(deg) after f after rot(-deg)."""
    c = compose(rotation(deg), compose(f, rotation(-deg)))
    return PlaneMap(f"conj{deg:g}({f.name})", c.forward, c.inverse,
                    orientation_preserving=f.orientation_preserving,
                    meta={"base": f.name, "angle": deg})


CATALOG_NAMES = ("identity", "rot:<deg>", "G", "H", "Hinv", "Q", "W", "P:<n_max>", "corner_shear")


def base_name(name: str) -> str:
    return name.split(":", 1)[0]


def catalog(name: str) -> PlaneMap:
    """Resolve a CLI map name; raises KeyError for unknown names."""
    name = name.strip()
    simple = {
        "identity": identity,
        "G": map_G,
        "H": map_H,
        "Hinv": map_Hinv,
        "Q": map_Q,
        "W": map_W,
        "corner_shear": corner_shear,
    }
    if name in simple:
        return simple[name]()
    head, _, arg = name.partition(":")
    try:
        if head == "rot" and arg:
            return rotation(float(arg))
        if head == "P" and arg:
            return map_P(int(arg))
    except ValueError as exc:
        raise KeyError(f"bad map argument in {name!r}: {exc}") from None
    raise KeyError(f"unknown map {name!r}; known: {', '.join(CATALOG_NAMES)}")
