"""Parameterized plane curves and secant-based tangent estimation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import BadWitness, CoincidentPoints
from .projgeom import (
    Point2,
    ProjDir,
    ResolutionParams,
    circular_mean,
    dir_from_vector,
    proj_distance,
)
from .tails import tail_decay, upper_envelope
from .verdict import Verdict

Evaluator = Callable[[float], Point2]
Derivative = Callable[[float], tuple[float, float]]

# a missing tangent counts as disproved (not merely unverified) above this many slope tolerances
STABLE_DISAGREEMENT = 10.0
# step multipliers tried in turn by tangent_at
REFINE_SCALES = (1.0, 1e-2, 1e-4)
# smallest secant step relative to the size of t0 and c(t0); below it chords are rounding noise
STEP_FLOOR = 1e-10


@dataclass(frozen=True)
class ParamCurve:
    a: float
    b: float
    eval_fn: Evaluator
    deriv: Optional[Derivative] = None
    closed: bool = False
    segments: tuple["ParamCurve", ...] = ()
    name: str = "curve"
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.b > self.a:
            raise ValueError("curve domain must be a nondegenerate interval")

    @property
    def period(self) -> float:
        return self.b - self.a

    def normalize(self, t: float) -> float:
        if self.closed:
            return self.a + (t - self.a) % self.period
        return t

    def contains(self, t: float) -> bool:
        return self.closed or self.a <= t <= self.b

    def __call__(self, t: float) -> Point2:
        return self.eval_fn(self.normalize(t))

    def sample(self, n: int) -> np.ndarray:
        ts = np.linspace(self.a, self.b, n)
        return np.array([self.eval_fn(float(t)) for t in ts])


@dataclass(frozen=True)
class SlopeEstimate:
    dir: Optional[ProjDir]
    residual: float
    exists: bool

    @property
    def theta(self) -> float:
        return math.nan if self.dir is None else self.dir.theta


def secant_dir(c: ParamCurve, t0: float, h: float) -> ProjDir:
    if not (c.contains(t0) and c.contains(t0 + h)):
        raise ValueError(f"secant endpoints {t0}, {t0 + h} outside the domain")
    p, q = c(t0), c(t0 + h)
    dx, dy = q[0] - p[0], q[1] - p[1]
    if dx == 0.0 and dy == 0.0:
        raise CoincidentPoints(f"chord from t={t0} with h={h} is degenerate")
    return dir_from_vector(dx, dy)


def _signed_gap(d: float) -> float:
    d = math.fmod(d, math.pi)
    if d > math.pi / 2:
        d -= math.pi
    elif d < -math.pi / 2:
        d += math.pi
    return d


def _richardson(hs: list[float], thetas: list[float]) -> list[float]:
    """Remove the first-order term of theta(h) ~ theta0 + a*h from consecutive chord pairs."""
    if len(hs) < 2:
        return thetas
    return [(h1 * t2 - h2 * t1) / (h1 - h2) for h1, h2, t1, t2 in zip(hs, hs[1:], thetas, thetas[1:])]


def tangent_at(c: ParamCurve, t0: float, r: ResolutionParams, scale: float = 1.0) -> SlopeEstimate:
    """Tangent line at ``c(t0)``; retries with finer steps when the secants disagree.

    Features smaller than the step grid (deep bumps of P) would otherwise read
    as missing tangents, while a genuine corner disagrees at every scale. The
    estimate with the smallest residual is reported when none agrees.
    ``scale`` shrinks every step, for probes close to a suspected singular
    parameter.
    """
    best = None
    for refine in REFINE_SCALES:
        est = _tangent_at_scale(c, t0, r, scale * refine)
        if est.exists:
            return est
        if best is None or est.residual < best.residual:
            best = est
    return best


def _tangent_at_scale(c: ParamCurve, t0: float, r: ResolutionParams, scale: float) -> SlopeEstimate:
    """Secants on both sides over the step grid, all steps multiplied by ``scale``.

    One-sided chord directions are Richardson-extrapolated in pairs of
    consecutive steps; the tangent exists when all extrapolated directions
    from both sides agree within ``slope_tolerance``. The analytic
    derivative is used instead when the curve carries one.
    """
    if c.deriv is not None:
        dx, dy = c.deriv(c.normalize(t0))
        if dx != 0.0 or dy != 0.0:
            return SlopeEstimate(dir_from_vector(dx, dy), 0.0, True)
    p0 = c(t0)
    floor = STEP_FLOOR * max(abs(t0), abs(p0[0]), abs(p0[1]))
    scale = max(scale, floor / r.h_grid[-1])
    dirs: list[ProjDir] = []
    for sign in (1.0, -1.0):
        hs, thetas = [], []
        for h in r.h_grid:
            step = sign * h * scale
            if not c.contains(t0 + step):
                continue
            try:
                d = secant_dir(c, t0, step)
            except CoincidentPoints:
                return SlopeEstimate(None, math.inf, False)
            # unwrap onto the branch of the first chord
            th = d.theta if not thetas else thetas[0] + _signed_gap(d.theta - thetas[0])
            hs.append(h)
            thetas.append(th)
        dirs.extend(ProjDir(t) for t in _richardson(hs, thetas))
    if not dirs:
        return SlopeEstimate(None, math.inf, False)
    mean = circular_mean(dirs)
    residual = max(proj_distance(d, mean) for d in dirs)
    if residual <= r.slope_tolerance:
        return SlopeEstimate(mean, residual, True)
    return SlopeEstimate(None, residual, False)


def slope_function(c: ParamCurve, ts: Sequence[float], r: ResolutionParams) -> list[SlopeEstimate]:
    return [tangent_at(c, float(t), r) for t in ts]


def _missing(where: str, residual: float, r: ResolutionParams) -> Verdict:
    if residual > STABLE_DISAGREEMENT * r.slope_tolerance:
        return Verdict.fail(f"no tangent at {where}", r, reason="secant directions disagree",
                            tangent_residual=residual)
    return Verdict.inconclusive(f"tangent residual {residual:.3g} above tolerance at {where}", r,
                                tangent_residual=residual)


def tail_parameters(c: ParamCurve, t0: float, r: ResolutionParams, side: int) -> list[float]:
    """Geometric parameter tail approaching ``t0`` from one side ([] if that side is off-domain)."""
    if c.closed:
        room = 0.5 * c.period
    else:
        room = (c.b - t0) if side > 0 else (t0 - c.a)
    if room <= 0:
        return []
    start = min(r.tail_start, 0.5 * room)
    return [t0 + side * start * r.tail_ratio**k for k in range(r.tail_length)]


def c1_surrogate(c: ParamCurve, t0: float, r: ResolutionParams) -> Verdict:
    """Tangent lines exist near ``t0`` and converge to the tangent at ``t0``.

    On each side the deviation from the tangent at ``t0`` is measured along a
    geometric parameter tail and must converge in the sense of
    :func:`tails.tail_decay`. The largest deviation over the deeper halves is
    the reported oscillation amplitude.
    """
    base = tangent_at(c, t0, r)
    if not base.exists:
        return _missing(f"t={t0:.6g}", base.residual, r)
    overall = amplitude = 0.0
    exponent = math.inf
    worst_t = t0
    converged = True
    sides = 0
    for side in (1, -1):
        ts = tail_parameters(c, t0, r, side)
        if not ts:
            continue
        sides += 1
        gaps = []
        for t in ts:
            dist = abs(t - t0)
            scale = min(1.0, dist * r.h_rel / r.h_grid[0])
            est = tangent_at(c, t, r, scale=scale)
            if not est.exists:
                return _missing(f"t={t:.6g} (tail of {t0:.6g})", est.residual, r)
            gaps.append(proj_distance(est.dir, base.dir))
        decay = tail_decay([abs(t - t0) for t in ts], upper_envelope(gaps), r)
        overall = max(overall, max(gaps))
        half = len(gaps) // 2
        k = half + int(np.argmax(gaps[half:]))
        if decay.deep_max >= amplitude:
            amplitude, worst_t = decay.deep_max, ts[k]
        exponent = min(exponent, decay.exponent)
        converged &= decay.converges
    if not sides:
        return Verdict.inconclusive("no room for a parameter tail", r)
    residuals = {"oscillation": amplitude, "tail_max": overall, "tangent_residual": base.residual,
                 "decay_exponent": exponent}
    if converged:
        return Verdict.ok(r, **residuals)
    return Verdict.fail(f"slope oscillation near t={t0:.6g} (worst at t={worst_t:.6g})", r,
                        reason="tangent lines do not converge", **residuals)


def image_curve(f, c: ParamCurve) -> ParamCurve:
    fwd = f.forward
    ev = c.eval_fn
    return ParamCurve(c.a, c.b, lambda t: fwd(ev(t)), None, c.closed,
                      name=f"{getattr(f, 'name', 'f')}({c.name})")


# ---------------------------------------------------------------- catalog


def graph_curve(fn: Callable[[float], float], dfn: Optional[Callable[[float], float]] = None,
                a: float = -1.0, b: float = 1.0, name: str = "graph") -> ParamCurve:
    deriv = None if dfn is None else (lambda t: (1.0, dfn(t)))
    return ParamCurve(a, b, lambda t: Point2(t, fn(t)), deriv, name=name)


def line_through(p: Sequence[float], d: ProjDir, half_length: float = 1.0, name: str = "line") -> ParamCurve:
    ux, uy = d.vector()
    px, py = float(p[0]), float(p[1])
    return ParamCurve(-half_length, half_length, lambda t: Point2(px + t * ux, py + t * uy),
                      lambda t: (ux, uy), name=name)


def circle(center: Sequence[float], radius: float, name: str = "circle") -> ParamCurve:
    cx, cy = float(center[0]), float(center[1])
    return ParamCurve(
        0.0, 2 * math.pi,
        lambda t: Point2(cx + radius * math.cos(t), cy + radius * math.sin(t)),
        lambda t: (-radius * math.sin(t), radius * math.cos(t)),
        closed=True, name=name,
    )


def _x2sin(t: float) -> float:
    return 0.0 if t == 0.0 else t * t * math.sin(1.0 / t)


def _dx2sin(t: float) -> float:
    return 0.0 if t == 0.0 else 2 * t * math.sin(1.0 / t) - math.cos(1.0 / t)


def _x3sin(t: float) -> float:
    return 0.0 if t == 0.0 else t**3 * math.sin(1.0 / t)


def _dx3sin(t: float) -> float:
    return 0.0 if t == 0.0 else 3 * t * t * math.sin(1.0 / t) - t * math.cos(1.0 / t)


def x2sin1x(a: float = -0.5, b: float = 0.5, analytic: bool = True) -> ParamCurve:
    """Graph of x^2 sin(1/x), extended by 0: differentiable everywhere, not C1 at 0."""
    return graph_curve(_x2sin, _dx2sin if analytic else None, a, b, name="x2sin1x")


def x3sin1x(a: float = -0.5, b: float = 0.5, analytic: bool = True) -> ParamCurve:
    return graph_curve(_x3sin, _dx3sin if analytic else None, a, b, name="x3sin1x")


# ------------------------------------------------------- shared tangents


def locate(c: ParamCurve, p: Sequence[float], samples: int = 4001) -> tuple[float, float]:
    """Parameter of the point of ``c`` closest to ``p`` and the distance to it."""
    px, py = float(p[0]), float(p[1])
    ts = np.linspace(c.a, c.b, samples)
    pts = np.array([c.eval_fn(float(t)) for t in ts])
    d2 = (pts[:, 0] - px) ** 2 + (pts[:, 1] - py) ** 2
    i = int(np.argmin(d2))
    lo, hi = ts[max(i - 1, 0)], ts[min(i + 1, samples - 1)]

    def dist(t: float) -> float:
        q = c.eval_fn(t)
        return math.hypot(q[0] - px, q[1] - py)

    if hi > lo:
        res = minimize_scalar(dist, bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-15 * max(1.0, abs(hi)), "maxiter": 500})
        t_best = float(res.x)
        if dist(t_best) <= dist(float(ts[i])):
            return t_best, dist(t_best)
    return float(ts[i]), dist(float(ts[i]))


def accumulation_tangent_check(c1: ParamCurve, c2: ParamCurve, p: Sequence[float],
                               intersections: Sequence[Sequence[float]], r: ResolutionParams,
                               on_curve_tol: float = 1e-9) -> Verdict:
    """Curves meeting at points accumulating on ``p`` must share their tangent at ``p``."""
    p = Point2(float(p[0]), float(p[1]))
    pts = [Point2(float(q[0]), float(q[1])) for q in intersections]
    norms = [(q - p).norm() for q in pts]
    if len(pts) < 3:
        raise BadWitness("an accumulating family needs at least three intersection points")
    if any(n == 0.0 for n in norms) or any(b >= a for a, b in zip(norms, norms[1:])):
        raise BadWitness("intersections must be distinct from p with strictly shrinking distance")
    for q in pts:
        for c in (c1, c2):
            _, d = locate(c, q)
            if d > on_curve_tol:
                raise BadWitness(f"{q} is not on {c.name} (distance {d:.3g})")
    dirs = []
    for c in (c1, c2):
        t, d = locate(c, p)
        if d > on_curve_tol:
            raise BadWitness(f"limit point {p} is not on {c.name}")
        est = tangent_at(c, t, r)
        if not est.exists:
            return _missing(f"{p} on {c.name}", est.residual, r)
        dirs.append(est.dir)
    gap = proj_distance(dirs[0], dirs[1])
    if gap <= r.dir_tolerance:
        return Verdict.ok(r, tangent_gap=gap)
    return Verdict.fail(f"tangents at {tuple(p)} differ", r, tangent_gap=gap)
