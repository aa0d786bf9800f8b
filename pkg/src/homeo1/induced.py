"""Induced maps on projective tangent spaces, estimated through straight-line probes."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .curves import SlopeEstimate, image_curve, line_through, tangent_at
from .errors import DegenerateSequence, MissingTangent
from .mapcatalog import PlaneMap
from .projgeom import (
    Orientation,
    Point2,
    ProjDir,
    ResolutionParams,
    cyclic_order,
    proj_distance,
)
from .tails import tail_decay, upper_envelope
from .verdict import Verdict


@dataclass(frozen=True)
class PTPoint:
    p: Point2
    dir: ProjDir

    @classmethod
    def of(cls, x: float, y: float, theta: float) -> "PTPoint":
        return cls(Point2(float(x), float(y)), ProjDir(theta))


@dataclass(frozen=True)
class DirMapSample:
    input_dir: ProjDir
    output: SlopeEstimate


def induced_dir(f: PlaneMap, p: Sequence[float], d: ProjDir, r: ResolutionParams) -> SlopeEstimate:
    """Tangent at f(p) of the image of the straight line through p with direction d."""
    line = line_through(p, d)
    return tangent_at(image_curve(f, line), 0.0, r)


def induced_map_profile(f: PlaneMap, p: Sequence[float], n_samples: int,
                        r: ResolutionParams) -> list[DirMapSample]:
    if n_samples < 3:
        raise ValueError("need at least three sample directions")
    out = []
    for i in range(n_samples):
        d = ProjDir(math.pi * i / n_samples)
        out.append(DirMapSample(d, induced_dir(f, p, d, r)))
    return out


def homeo_surrogate(profile: Sequence[DirMapSample], r: ResolutionParams) -> Verdict:
    """Bijective and cyclic-order monotone at the sampled directions."""
    for i, s in enumerate(profile):
        if not s.output.exists:
            raise MissingTangent(f"no image tangent for input direction {s.input_dir.theta:.6g}",
                                 index=i, residual=s.output.residual)
    outs = [s.output.dir for s in profile]
    n = len(outs)
    min_sep = math.inf
    for i in range(n):
        for j in range(i + 1, n):
            min_sep = min(min_sep, proj_distance(outs[i], outs[j]))
    if min_sep <= r.dir_tolerance / 10:
        return Verdict.fail("two input directions share an image", r,
                            reason="not injective at sample resolution", min_separation=min_sep)
    orders = {cyclic_order(outs[i], outs[(i + 1) % n], outs[(i + 2) % n]) for i in range(n)}
    if len(orders) != 1 or Orientation.DEGENERATE in orders:
        return Verdict.fail("consecutive triples change cyclic order", r,
                            reason="not monotone on the direction circle", min_separation=min_sep)
    v = Verdict.ok(r, min_separation=min_sep)
    v.details["orientation"] = orders.pop().value
    v.details["n_samples"] = n
    return v


def cyclic_triple_preserved(f: PlaneMap, p: Sequence[float], a: ProjDir, b: ProjDir, c: ProjDir,
                            r: ResolutionParams) -> Verdict:
    before = cyclic_order(a, b, c)
    if before is Orientation.DEGENERATE:
        raise ValueError("input directions must be distinct")
    imgs = []
    for i, d in enumerate((a, b, c)):
        est = induced_dir(f, p, d, r)
        if not est.exists:
            raise MissingTangent(f"no image tangent for direction {d.theta:.6g}", index=i,
                                 residual=est.residual)
        imgs.append(est.dir)
    after = cyclic_order(*imgs)
    if f.orientation_preserving:
        expected = before
    else:
        expected = Orientation.CW if before is Orientation.CCW else Orientation.CCW
    if after is expected:
        return Verdict.ok(r)
    return Verdict.fail(f"triple ({a.theta:.4g}, {b.theta:.4g}, {c.theta:.4g})", r,
                        reason=f"order {before.value} became {after.value}")


def bundle_continuity_probe(f: PlaneMap, seq: Sequence[PTPoint], limit: PTPoint,
                            r: ResolutionParams) -> Verdict:
    """Does the induced bundle map carry (p_n, k_n) -> (p, l) to a convergent sequence?"""
    norms = [(e.p - limit.p).norm() for e in seq]
    if any(n == 0 for n in norms) or any(b > a for a, b in zip(norms, norms[1:])):
        raise DegenerateSequence("probe points must approach the limit with shrinking norms")
    at_limit = induced_dir(f, limit.p, limit.dir, r)
    if not at_limit.exists:
        raise MissingTangent("no image tangent at the limit", residual=at_limit.residual)
    gaps, outputs = [], []
    for i, e in enumerate(seq):
        est = induced_dir(f, e.p, e.dir, r)
        if not est.exists:
            raise MissingTangent(f"no image tangent at probe entry {i}", index=i,
                                 residual=est.residual)
        outputs.append(est.dir.theta)
        gaps.append(proj_distance(est.dir, at_limit.dir))
    decay = tail_decay(norms, upper_envelope(gaps), r)
    res = {"tail_gap": decay.deep_max, "final_gap": gaps[-1], "exponent": decay.exponent}
    v = (Verdict.ok(r, **res) if decay.converges else
         Verdict.fail("induced directions stay away from the limit image", r,
                      reason="discontinuity of the induced bundle map", **res))
    v.details["limit_output"] = at_limit.dir.theta
    v.details["outputs"] = outputs
    return v
