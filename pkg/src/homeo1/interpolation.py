"""Simple closed C1 curves through a sequence of points with prescribed tangents.

The input is a direction sequence whose points and directions both converge
to a limit (p, l). After an affine normalization (p at the origin, l along
the x-axis, points in the closed first quadrant) a subsequence is extracted
and joined by explicit sinusoid blends; three more arcs close it up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .curves import ParamCurve, c1_surrogate
from .errors import InsufficientPoints, NotConvergent
from .projgeom import Point2, ProjDir, ResolutionParams, dir_from_slope, dir_from_vector, proj_distance
from .sequences import DirectionSequence, converges_along_line
from .tails import tail_decay, upper_envelope
from .verdict import Verdict, combine

YMAX_SAMPLES = 4096
SWEEP_SAMPLES = 2048
ARC_ORDER = ("xi", "delta", "beta", "alpha")


@dataclass(frozen=True)
class Frame:
    """p ↦ S R(-angle) (p - origin), with S = diag(sx, sy)."""

    origin: Point2
    angle: float
    sx: int = 1
    sy: int = 1

    def _rot(self, x: float, y: float, a: float) -> tuple[float, float]:
        c, s = math.cos(a), math.sin(a)
        return c * x - s * y, s * x + c * y

    def vec_to(self, v) -> tuple[float, float]:
        x, y = self._rot(v[0], v[1], -self.angle)
        return self.sx * x, self.sy * y

    def vec_from(self, v) -> tuple[float, float]:
        return self._rot(self.sx * v[0], self.sy * v[1], self.angle)

    def to(self, p) -> Point2:
        return Point2(*self.vec_to((p[0] - self.origin.x, p[1] - self.origin.y)))

    def back(self, q) -> Point2:
        x, y = self.vec_from(q)
        return Point2(x + self.origin.x, y + self.origin.y)

    def dir_to(self, d: ProjDir) -> ProjDir:
        return dir_from_vector(*self.vec_to(d.vector()))

    def dir_from(self, d: ProjDir) -> ProjDir:
        return dir_from_vector(*self.vec_from(d.vector()))


@dataclass(frozen=True)
class NormalizedSequence:
    entries: tuple[tuple[float, float, float], ...]
    frame: Frame
    source_index: tuple[int, ...] = ()

    @property
    def xs(self) -> list[float]:
        return [e[0] for e in self.entries]


def _chord_slope(a, b) -> float:
    return (a[1] - b[1]) / (a[0] - b[0])


def normalize_and_extract(seq: DirectionSequence, want: int,
                          r: ResolutionParams | None = None) -> NormalizedSequence:
    """Normalize the frame, then greedily keep points with shrinking norms, x, slopes and chord slopes."""
    r = r or ResolutionParams()
    if want < 1:
        raise ValueError("want must be positive")
    if len(seq) < want:
        raise InsufficientPoints(f"{len(seq)} entries, {want} wanted")
    n = len(seq)
    rr = r.with_overrides(tail_length=min(r.tail_length, n))
    try:
        along = converges_along_line(seq.points, seq.limit_point, seq.limit_dir, rr)
    except Exception as e:  # noqa: BLE001 - any degeneracy means the hypothesis is not met
        raise NotConvergent(f"points do not converge to the limit: {e}") from e
    if not along.passed:
        raise NotConvergent("points do not converge along the limit line")
    norms = [(e.p - seq.limit_point).norm() for e in seq.entries]
    gaps = [proj_distance(e.dir, seq.limit_dir) for e in seq.entries]
    if not tail_decay(norms, upper_envelope(gaps), rr).converges:
        raise NotConvergent("directions do not converge to the limit line")

    base = Frame(seq.limit_point, seq.limit_dir.theta)
    raw = []
    for i, e in enumerate(seq.entries):
        x, y = base.to(e.p)
        if x == 0.0:
            continue
        raw.append((i, x, y, math.tan(base.dir_to(e.dir).theta)))
    if not raw:
        raise InsufficientPoints("every entry lies on the normal line")
    sx = 1 if sum(x > 0 for _, x, _, _ in raw) * 2 >= len(raw) else -1
    raw = [t for t in raw if sx * t[1] > 0]
    sy = 1 if sum(y >= 0 for _, _, y, _ in raw) * 2 >= len(raw) else -1
    raw = [t for t in raw if sy * t[2] >= 0]
    frame = Frame(base.origin, base.angle, sx, sy)
    pts = []
    for i, x, y, m in raw:
        q = frame.to(seq.entries[i].p)
        pts.append((i, q.x, max(q.y, 0.0), sx * sy * m))

    flat = [t for t in pts if t[2] == 0.0]
    if len(flat) >= want:
        pool, slopes = flat, False
    else:
        pool, slopes = [t for t in pts if t[2] > 0.0], True
    chosen: list[tuple[int, float, float, float]] = []
    for t in pool:
        if chosen:
            last = chosen[-1]
            if not (math.hypot(t[1], t[2]) < math.hypot(last[1], last[2]) and t[1] < last[1]):
                continue
            if abs(t[3]) > abs(last[3]):
                continue
            if slopes:
                if not t[2] / t[1] < last[2] / last[1]:
                    continue
                if len(chosen) >= 2 and not _chord_slope(last[1:], t[1:]) < _chord_slope(chosen[-2][1:], last[1:]):
                    continue
        chosen.append(t)
        if len(chosen) == want:
            break
    if len(chosen) < want:
        raise InsufficientPoints(f"only {len(chosen)} entries survive the monotonicity filters, {want} wanted")
    return NormalizedSequence(tuple((x, y, m) for _, x, y, m in chosen), frame,
                              tuple(i for i, *_ in chosen))


def _gamma_value_and_slope(t: float, xk: float, yk: float, mk: float,
                           x1: float, y1: float, m1: float) -> tuple[float, float]:
    L = xk - x1
    c = (yk - y1) / L
    if t >= 0.5 * (xk + x1):
        s = (2 * t - xk - x1) / L
        ph = 2 * math.pi * (t - xk) / L
        val = s * ((L * mk / (2 * math.pi)) * math.sin(ph) + yk) + (1 - s) * (c * (t - xk) + yk)
        der = mk * (s * math.cos(ph) + math.sin(ph) / math.pi) + 2 * (1 - s) * c
    else:
        s = (2 * t - xk - x1) / (x1 - xk)
        ph = 2 * math.pi * (t - x1) / L
        val = s * ((L * m1 / (2 * math.pi)) * math.sin(ph) + y1) + (1 - s) * (c * (t - x1) + y1)
        der = m1 * (s * math.cos(ph) - math.sin(ph) / math.pi) + 2 * (1 - s) * c
    return val, der


def gamma_segment(k: int, left: Sequence[float], right: Sequence[float]) -> ParamCurve:
    """Graph segment t ↦ (t, γ_k(t)) on [x_{k+1}, x_k]; ``left`` is (x_k, y_k, m_k)."""
    xk, yk, mk = (float(v) for v in left)
    x1, y1, m1 = (float(v) for v in right)
    if not x1 < xk:
        raise ValueError("segment needs x_{k+1} < x_k")
    args = (xk, yk, mk, x1, y1, m1)

    def ev(t: float) -> Point2:
        return Point2(t, _gamma_value_and_slope(t, *args)[0])

    def dv(t: float) -> tuple[float, float]:
        return (1.0, _gamma_value_and_slope(t, *args)[1])

    return ParamCurve(x1, xk, ev, dv, name=f"gamma_{k}", meta={"k": k, "left": left, "right": right})


def _data_with_anchors(ns: NormalizedSequence) -> list[tuple[float, float, float]]:
    x1, y1, _ = ns.entries[0]
    return [(x1 + 1.0, y1, 0.0), *ns.entries, (0.0, 0.0, 0.0)]


def build_xi(ns: NormalizedSequence) -> ParamCurve:
    """ξ on [0, x_0]; the last segment runs from the final point down to (0, 0) with slope 0."""
    data = _data_with_anchors(ns)
    segs = tuple(gamma_segment(k, data[k], data[k + 1]) for k in range(len(data) - 1))
    lefts = np.array([s.b for s in segs])  # decreasing

    def find(t: float) -> ParamCurve:
        # segment k covers [x_{k+1}, x_k]; the rightmost match wins at junctions
        k = int(np.searchsorted(-lefts, -t, side="right")) - 1
        return segs[min(max(k, 0), len(segs) - 1)]

    def ev(t: float) -> Point2:
        return Point2(0.0, 0.0) if t == 0.0 else find(t).eval_fn(t)

    def dv(t: float) -> tuple[float, float]:
        return find(t).deriv(t)

    return ParamCurve(0.0, data[0][0], ev, dv, segments=segs, name="xi",
                      meta={"junctions": tuple(d[0] for d in data)})


def _segment_max(seg: ParamCurve) -> float:
    ts = np.linspace(seg.a, seg.b, YMAX_SAMPLES)
    ys = np.array([seg.eval_fn(float(t))[1] for t in ts])
    i = int(np.argmax(ys))
    lo, hi = ts[max(i - 1, 0)], ts[min(i + 1, YMAX_SAMPLES - 1)]
    res = minimize_scalar(lambda t: -seg.eval_fn(t)[1], bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-14})
    return max(float(ys[i]), -float(res.fun))


def y_max_of(xi: ParamCurve) -> float:
    """1 + max γ_k, from dense samples refined around the best sample of each segment."""
    return 1.0 + max(_segment_max(s) for s in xi.segments)


def build_closure(ns: NormalizedSequence, xi: ParamCurve | None = None) -> tuple[ParamCurve, ParamCurve, ParamCurve]:
    xi = xi or build_xi(ns)
    x0, y0, _ = _data_with_anchors(ns)[0]
    ymax = y_max_of(xi)
    ra = ymax - y0 / 2
    rd = ymax - y0
    pi = math.pi
    alpha = ParamCurve(
        0.0, 1.0,
        lambda t: Point2(ra * math.cos(pi * (t + 0.5)), ra * (1 + math.sin(pi * (t + 0.5)))),
        lambda t: (-ra * pi * math.sin(pi * (t + 0.5)), ra * pi * math.cos(pi * (t + 0.5))),
        name="alpha", meta={"y_max": ymax})
    beta = ParamCurve(0.0, 1.0, lambda t: Point2(x0 * (1 - t), 2 * ymax - y0), lambda t: (-x0, 0.0),
                      name="beta", meta={"y_max": ymax})
    delta = ParamCurve(
        0.0, 1.0,
        lambda t: Point2(rd * math.cos(pi * (t - 0.5)) + x0, rd * math.sin(pi * (t - 0.5)) + ymax),
        lambda t: (-pi * rd * math.sin(pi * (t - 0.5)), pi * rd * math.cos(pi * (t - 0.5))),
        name="delta", meta={"y_max": ymax})
    return alpha, beta, delta


def _assemble(arcs: Sequence[ParamCurve], frame: Frame, name: str, meta: dict) -> ParamCurve:
    """Closed curve on [0, len(arcs)) running through ``arcs`` in order, mapped back by ``frame``."""
    n = len(arcs)

    def local(t: float) -> tuple[ParamCurve, float, float]:
        i = min(int(math.floor(t)), n - 1)
        arc = arcs[i]
        return arc, arc.a + (t - i) * arc.period, arc.period

    def ev(t: float) -> Point2:
        arc, s, _ = local(t)
        return frame.back(arc.eval_fn(s))

    def dv(t: float) -> tuple[float, float]:
        arc, s, scale = local(t)
        dx, dy = arc.deriv(s)
        return frame.vec_from((dx * scale, dy * scale))

    return ParamCurve(0.0, float(n), ev, dv, closed=True, segments=tuple(arcs), name=name, meta=meta)


def construct_closed_c1(seq: DirectionSequence, want: int, r: ResolutionParams | None = None) -> ParamCurve:
    ns = normalize_and_extract(seq, want, r)
    return _construct_from(ns, name=f"closed_c1({seq.name})")


def _construct_from(ns: NormalizedSequence, name: str = "closed_c1") -> ParamCurve:
    xi = build_xi(ns)
    alpha, beta, delta = build_closure(ns, xi)
    arcs = {"xi": xi, "alpha": alpha, "beta": beta, "delta": delta}
    meta = {"normalized": ns, "y_max": alpha.meta["y_max"], "arc_order": ARC_ORDER}
    return _assemble([arcs[k] for k in ARC_ORDER], ns.frame, name, meta)


# ------------------------------------------------------------------ checks


def polyline_self_intersections(pts: np.ndarray, closed: bool = True, tol: float = 0.0) -> list[tuple[int, int]]:
    """Pairs of non-adjacent polyline segments that cross or touch, by an x-sorted sweep."""
    a = np.asarray(pts, dtype=float)
    b = np.roll(a, -1, axis=0) if closed else a[1:]
    a = a if closed else a[:-1]
    n = len(a)
    xlo, xhi = np.minimum(a[:, 0], b[:, 0]), np.maximum(a[:, 0], b[:, 0])
    ylo, yhi = np.minimum(a[:, 1], b[:, 1]), np.maximum(a[:, 1], b[:, 1])
    order = np.argsort(xlo, kind="stable")
    sorted_lo = xlo[order]
    ends = np.searchsorted(sorted_lo, xhi[order] + tol, side="right")
    hits = []
    for pos in range(n):
        cand = order[pos + 1:ends[pos]]
        if not len(cand):
            continue
        i = order[pos]
        cand = cand[(ylo[cand] <= yhi[i] + tol) & (yhi[cand] >= ylo[i] - tol)]
        diff = np.abs(cand - i)
        keep = diff > 1
        if closed:
            keep &= diff < n - 1
        cand = cand[keep]
        for j in cand:
            if _segments_meet(a[i], b[i], a[j], b[j], tol):
                hits.append((int(min(i, j)), int(max(i, j))))
    return sorted(hits)


def _orient(p, q, s) -> float:
    return (q[0] - p[0]) * (s[1] - p[1]) - (q[1] - p[1]) * (s[0] - p[0])


def _segments_meet(p1, p2, q1, q2, tol: float) -> bool:
    d1, d2 = _orient(q1, q2, p1), _orient(q1, q2, p2)
    d3, d4 = _orient(p1, p2, q1), _orient(p1, p2, q2)
    if ((d1 > tol and d2 < -tol) or (d1 < -tol and d2 > tol)) and \
            ((d3 > tol and d4 < -tol) or (d3 < -tol and d4 > tol)):
        return True

    def on(p, q, s, d):
        return abs(d) <= tol and min(p[0], q[0]) - tol <= s[0] <= max(p[0], q[0]) + tol and \
            min(p[1], q[1]) - tol <= s[1] <= max(p[1], q[1]) + tol

    return on(q1, q2, p1, d1) or on(q1, q2, p2, d2) or on(p1, p2, q1, d3) or on(p1, p2, q2, d4)


def sample_closed(c: ParamCurve, per_arc: int = SWEEP_SAMPLES) -> np.ndarray:
    """Samples of each arc (left-closed) in order, so the polyline closes up without duplicates."""
    n = len(c.segments) or 1
    ts = np.concatenate([i + np.arange(per_arc) / per_arc for i in range(n)])
    return np.array([c.eval_fn(float(t)) for t in ts])


def _region_violations(arcs: dict[str, ParamCurve], x0: float, ymax: float) -> list[str]:
    """Arcs whose interior samples leave their region (endpoints are junctions, checked elsewhere)."""
    bad = []
    for name, arc in arcs.items():
        ts = np.linspace(arc.a, arc.b, SWEEP_SAMPLES + 2)[1:-1]
        p = np.array([arc.eval_fn(float(t)) for t in ts])
        x, y = p[:, 0], p[:, 1]
        if name == "xi":
            ok = ((x > 0) & (x < x0) & (y <= ymax - 1)).all()
        elif name == "alpha":
            ok = (x < 0).all()
        elif name == "beta":
            ok = (y > ymax).all()
        else:
            ok = (x > x0).all()
        if not ok:
            bad.append(name)
    return bad


def validate_construction(c: ParamCurve, ns: NormalizedSequence, r: ResolutionParams,
                          pos_tol: float = 1e-9, dir_tol: float = 1e-6) -> Verdict:
    """Interpolation, C1 at every junction, region containment and a simplicity sweep."""
    arcs = dict(zip(ARC_ORDER, c.segments))
    xi = arcs["xi"]
    frame = ns.frame
    x0 = xi.b
    ymax = float(c.meta["y_max"])
    out: list[Verdict] = []

    pos_err = dir_err = 0.0
    for x, y, m in ns.entries:
        u = x / x0  # composite parameter of ξ(x)
        q = c(u)
        target = frame.back((x, y))
        pos_err = max(pos_err, math.hypot(q[0] - target[0], q[1] - target[1]))
        dir_err = max(dir_err, proj_distance(dir_from_vector(*c.deriv(u)), frame.dir_from(dir_from_slope(m))))
    if pos_err <= pos_tol and dir_err <= dir_tol:
        out.append(Verdict.ok(r, position_error=pos_err, direction_error=dir_err))
    else:
        out.append(Verdict.fail("interpolated points", r, reason="tangent or position mismatch",
                                position_error=pos_err, direction_error=dir_err))

    jv = js = 0.0
    for s0, s1 in zip(xi.segments, xi.segments[1:]):
        x = s0.a
        jv = max(jv, abs(s0.eval_fn(x)[1] - s1.eval_fn(x)[1]))
        js = max(js, abs(s0.deriv(x)[1] - s1.deriv(x)[1]))
    closure = [xi.deriv(0.0), xi.deriv(x0)] + [arcs[k].deriv(t) for k in ("alpha", "beta", "delta") for t in (0.0, 1.0)]
    closure_slope = max(abs(dy / dx) if dx else math.inf for dx, dy in closure)
    ok = jv <= 1e-12 and js <= 1e-12 and closure_slope <= 1e-9
    res = {"junction_value": jv, "junction_slope": js, "closure_slope": closure_slope}
    out.append(Verdict.ok(r, **res) if ok else
               Verdict.fail("junctions", r, reason="junction mismatch", **res))

    numeric = ParamCurve(c.a, c.b, c.eval_fn, None, closed=True, name=c.name)
    # composite parameters of every junction, with the length of the shorter neighbouring piece
    xs = [j / x0 for j in xi.meta["junctions"]]
    pieces = [(xs[-1], xs[-2] - xs[-1])]  # origin: ξ's last segment vs α
    pieces += [(xs[k], min(xs[k - 1] - xs[k], xs[k] - xs[k + 1])) for k in range(1, len(xs) - 1)]
    pieces += [(1.0, xs[0] - xs[1]), (2.0, 1.0), (3.0, 1.0)]
    c1 = []
    for t, room in pieces:
        local = r.with_overrides(tail_start=min(r.tail_start, 0.1 * room))
        v = c1_surrogate(numeric, t, local)
        if not v.passed:
            v = Verdict(v.status, v.residuals, local, witness=f"junction at t={t:.6g}",
                        reason=v.reason or "not C1")
        c1.append(v)
    out.append(combine(c1, r))

    bad = _region_violations(arcs, x0, ymax)
    out.append(Verdict.ok(r) if not bad else
               Verdict.fail(",".join(bad), r, reason="arc leaves its region"))

    hits = polyline_self_intersections(sample_closed(c))
    out.append(Verdict.ok(r, crossings=0.0) if not hits else
               Verdict.fail(f"segments {hits[0]}", r, reason="sampled self-intersection",
                            crossings=float(len(hits))))
    v = combine(out, r)
    if v.passed:
        merged: dict[str, float] = {}
        for w in out:
            merged.update(w.residuals)
        v = Verdict.ok(r, **merged)
    return v
