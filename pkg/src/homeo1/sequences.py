"""Convergence along lines, transverse sequences and their pushforwards."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .curves import ParamCurve, locate, tangent_at
from .errors import BadSandwich, DegenerateSequence, MissingTangent
from .induced import PTPoint, induced_dir
from .mapcatalog import PlaneMap
from .projgeom import Point2, ProjDir, ResolutionParams, dir_from_vector, proj_distance
from .tails import lower_envelope, tail_decay, upper_envelope
from .verdict import Verdict

SANDWICH_SHRINK = 0.7


@dataclass(frozen=True)
class DirectionSequence:
    entries: tuple[PTPoint, ...]
    limit_point: Point2
    limit_dir: ProjDir
    name: str = "sequence"
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        ents = tuple(self.entries)
        if not ents:
            raise DegenerateSequence("a direction sequence needs at least one entry")
        lp = Point2(float(self.limit_point[0]), float(self.limit_point[1]))
        if any((e.p - lp).norm() == 0.0 for e in ents):
            raise DegenerateSequence("entries must be distinct from the limit point")
        object.__setattr__(self, "entries", ents)
        object.__setattr__(self, "limit_point", lp)

    @property
    def points(self) -> list[Point2]:
        return [e.p for e in self.entries]

    @property
    def limit(self) -> PTPoint:
        return PTPoint(self.limit_point, self.limit_dir)

    def __len__(self) -> int:
        return len(self.entries)


def _tail_norms(points: Sequence[Sequence[float]], p: Point2, r: ResolutionParams) -> list[float]:
    norms = [math.hypot(q[0] - p.x, q[1] - p.y) for q in points]
    if len(norms) < r.tail_length:
        raise DegenerateSequence(f"{len(norms)} points, need at least tail_length={r.tail_length}")
    if any(n == 0.0 for n in norms):
        raise DegenerateSequence("points must be distinct from the limit point")
    tail = norms[-r.tail_length:]
    if not tail[-1] < tail[0]:
        raise DegenerateSequence("points do not approach the limit point over the tail")
    return norms


def converges_along_line(points: Sequence[Sequence[float]], p: Sequence[float], l: ProjDir,
                         r: ResolutionParams) -> Verdict:
    """Chord directions from ``p`` to the points tend to ``l``."""
    p = Point2(float(p[0]), float(p[1]))
    norms = _tail_norms(points, p, r)
    gaps = [proj_distance(dir_from_vector(q[0] - p.x, q[1] - p.y), l) for q in points]
    decay = tail_decay(norms, upper_envelope(gaps), r)
    res = {"chord_gap": decay.deep_max, "final_chord_gap": gaps[-1], "exponent": decay.exponent}
    if decay.converges:
        return Verdict.ok(r, **res)
    worst = len(gaps) - r.tail_length + int(np.argmax(gaps[-r.tail_length:]))
    return Verdict.fail(f"point {worst}", r, reason="chord directions do not approach the line", **res)


def _signed_offset(d: ProjDir, l: ProjDir) -> float:
    """Angle from l to d in (-pi/2, pi/2]."""
    s = math.fmod(d.theta - l.theta, math.pi)
    if s > math.pi / 2:
        s -= math.pi
    elif s <= -math.pi / 2:
        s += math.pi
    return s


class _SideProbe:
    """A curve through p seen as a graph over the line l, near p."""

    def __init__(self, c: ParamCurve, p: Point2, l: ProjDir, r: ResolutionParams):
        t, dist = locate(c, p)
        if dist > 1e-9:
            raise BadSandwich(f"{c.name} does not pass through {tuple(p)}")
        est = tangent_at(c, t, r)
        if not est.exists:
            raise BadSandwich(f"{c.name} has no tangent at {tuple(p)}")
        self.offset = _signed_offset(est.dir, l)
        self.c, self.t, self.p = c, t, p
        self.ux, self.uy = l.vector()

    def uv(self, q) -> tuple[float, float]:
        dx, dy = q[0] - self.p.x, q[1] - self.p.y
        return dx * self.ux + dy * self.uy, -dx * self.uy + dy * self.ux

    def height(self, u: float) -> float | None:
        """v-coordinate of the curve above ``u`` on the branch through p (None if not found)."""
        c, t0 = self.c, self.t
        h = 1e-6 * max(1.0, c.period)
        lo_t = t0 - h if c.contains(t0 - h) else t0
        hi_t = t0 + h if c.contains(t0 + h) else t0
        du_dt = (self.uv(c(hi_t))[0] - self.uv(c(lo_t))[0]) / (hi_t - lo_t)
        if du_dt == 0.0:
            return None
        guess = u / du_dt

        def f(t):
            return self.uv(c(t))[0] - u

        for grow in (1.5, 3.0, 6.0):
            lo, hi = sorted((t0, t0 + grow * guess))
            if not c.closed:
                lo, hi = max(lo, c.a), min(hi, c.b)
            if hi <= lo:
                continue
            flo, fhi = f(lo), f(hi)
            if flo == 0.0:
                return self.uv(c(lo))[1]
            if flo * fhi < 0:
                return self.uv(c(brentq(f, lo, hi, xtol=1e-15)))[1]
        return None


def converges_along_line_sandwich(points: Sequence[Sequence[float]], p: Sequence[float], l: ProjDir,
                                  gamma_plus: ParamCurve, gamma_minus: ParamCurve,
                                  r: ResolutionParams) -> Verdict:
    """Independent oracle: tail points eventually sit between two curves straddling ``l``."""
    p = Point2(float(p[0]), float(p[1]))
    sides = [_SideProbe(c, p, l, r) for c in (gamma_plus, gamma_minus)]
    if not sides[0].offset * sides[1].offset < 0:
        raise BadSandwich("the tangents of the bounding curves do not straddle the line")
    norms = _tail_norms(points, p, r)
    tail = list(range(len(points) - r.tail_length, len(points)))
    inside = []
    for i in tail:
        u, v = sides[0].uv(points[i])
        hs = [s.height(u) for s in sides]
        inside.append(all(h is not None for h in hs) and min(hs) <= v <= max(hs))
    radius = norms[tail[0]]
    min_count = max(3, r.tail_length // 4)
    best_radius = None
    while True:
        idx = [k for k, i in enumerate(tail) if norms[i] <= radius]
        if len(idx) < min_count:
            break
        if all(inside[k] for k in idx):
            best_radius = radius
            break
        radius *= SANDWICH_SHRINK
    outside = sum(not x for x in inside)
    if best_radius is not None:
        v = Verdict.ok(r, outside_count=float(outside))
        v.details["disk_radius"] = best_radius
        return v
    last_out = tail[max(k for k, x in enumerate(inside) if not x)]
    return Verdict.fail(f"point {last_out}", r, reason="tail leaves every shrinking sandwich sector",
                        outside_count=float(outside))


def is_transverse(seq: DirectionSequence, r: ResolutionParams) -> Verdict:
    """Points converge along the limit line while the directions stay away from it.

    "No convergent subsequence" is read at finite depth: the directions in the
    tail must keep a gap of at least ``dir_tolerance`` from the limit line and
    their running minimum must not decay toward it. A failing sequence whose
    gaps do not all decay is flagged MIXED.
    """
    along = converges_along_line(seq.points, seq.limit_point, seq.limit_dir, r)
    if not along.passed:
        return Verdict.fail(seq.name, r, reason="points do not converge along the limit line",
                            **along.residuals)
    norms = [(e.p - seq.limit_point).norm() for e in seq.entries]
    gaps = [proj_distance(e.dir, seq.limit_dir) for e in seq.entries]
    tail_gaps = gaps[-r.tail_length:]
    min_gap = min(tail_gaps)
    some = tail_decay(norms, lower_envelope(gaps), r)
    res = {"min_dir_gap": min_gap, "final_dir_gap": gaps[-1], "chord_gap": along.residuals["chord_gap"]}
    if min_gap >= r.dir_tolerance and not some.converges:
        return Verdict.ok(r, **res)
    every = tail_decay(norms, upper_envelope(gaps), r)
    flags = () if every.converges else ("MIXED",)
    reason = ("directions approach the limit line along a subsequence" if flags
              else "directions approach the limit line")
    return Verdict.fail(seq.name, r, reason=reason, flags=flags, **res)


def pushforward_sequence(f: PlaneMap, seq: DirectionSequence, r: ResolutionParams) -> DirectionSequence:
    entries = []
    for i, e in enumerate(seq.entries):
        est = induced_dir(f, e.p, e.dir, r)
        if not est.exists:
            raise MissingTangent(f"no image tangent at entry {i} of {seq.name}", index=i,
                                 residual=est.residual)
        entries.append(PTPoint(f.forward(e.p), est.dir))
    lim = induced_dir(f, seq.limit_point, seq.limit_dir, r)
    if not lim.exists:
        raise MissingTangent(f"no image tangent at the limit of {seq.name}", residual=lim.residual)
    return DirectionSequence(tuple(entries), f.forward(seq.limit_point), lim.dir,
                             name=f"{f.name}({seq.name})")


def property_c_check(f: PlaneMap, batteries: Sequence[DirectionSequence], r: ResolutionParams) -> Verdict:
    """Every battery sequence must stay transverse after pushing forward by ``f``."""
    worst: dict[str, float] = {}
    for seq in batteries:
        img = pushforward_sequence(f, seq, r)
        v = is_transverse(img, r)
        if not v.passed:
            return Verdict.fail(seq.name, r, reason=f"image not transverse: {v.reason}",
                                flags=v.flags, **v.residuals)
        for k, val in v.residuals.items():
            worst[k] = min(worst.get(k, val), val) if k == "min_dir_gap" else max(worst.get(k, val), val)
    return Verdict.ok(r, **worst)
