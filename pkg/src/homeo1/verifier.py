"""Harness for the three characterizing properties plus per-map differentiability probes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .curves import (
    ParamCurve,
    STABLE_DISAGREEMENT,
    c1_surrogate,
    circle,
    graph_curve,
    image_curve,
    line_through,
    x3sin1x,
)
from .errors import MissingTangent
from .induced import PTPoint, bundle_continuity_probe, homeo_surrogate, induced_map_profile
from .mapcatalog import PlaneMap, base_name, support_balls
from .projgeom import Point2, ProjDir, ResolutionParams
from .sequences import DirectionSequence, is_transverse, property_c_check
from .verdict import Status, Verdict, combine

PROFILE_SAMPLES = 36
PROBE_DIRECTIONS = 16
# log-log slope of |difference quotient| against h at or below which magnitudes blow up
BLOWUP_SLOPE = -0.25


# ------------------------------------------------------------------ battery


def curve_from_spec(spec: dict) -> ParamCurve:
    kind = spec["kind"]
    name = spec.get("name", kind)
    if kind == "line":
        return line_through(spec["point"], ProjDir(spec["theta"]), spec.get("half_length", 1.0), name=name)
    if kind == "circle":
        return circle(spec["center"], spec["radius"], name=name)
    if kind == "poly":
        coeffs = [float(c) for c in spec["coeffs"]]
        dcoeffs = [i * c for i, c in enumerate(coeffs)][1:]
        return graph_curve(lambda x: sum(c * x**i for i, c in enumerate(coeffs)),
                           lambda x: sum(c * x**i for i, c in enumerate(dcoeffs)),
                           spec.get("a", -1.0), spec.get("b", 1.0), name=name)
    if kind == "x3sin1x":
        return x3sin1x(spec.get("a", -0.5), spec.get("b", 0.5))
    raise ValueError(f"unknown curve kind {kind!r}")


@dataclass(frozen=True)
class BatteryCurve:
    name: str
    curve: ParamCurve
    probes: tuple[float, ...]
    spec: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_spec(cls, spec: dict) -> "BatteryCurve":
        return cls(spec["name"], curve_from_spec(spec), tuple(float(t) for t in spec["probes"]), dict(spec))


@dataclass(frozen=True)
class Battery:
    curves: tuple[BatteryCurve, ...]
    sequences: tuple[DirectionSequence, ...]
    points: tuple[Point2, ...]
    directions: int = PROFILE_SAMPLES

    def validate(self, r: ResolutionParams) -> list[str]:
        """Names of battery members that are not genuine inputs (should be empty)."""
        bad = []
        for bc in self.curves:
            if not all(c1_surrogate(bc.curve, t, r).passed for t in bc.probes):
                bad.append(bc.name)
        bad += [s.name for s in self.sequences if not is_transverse(s, r).passed]
        return bad

    def to_json(self) -> dict:
        return {
            "curves": [dict(bc.spec) for bc in self.curves],
            "sequences": [sequence_to_json(s) for s in self.sequences],
            "points": [[p.x, p.y] for p in self.points],
            "directions": self.directions,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Battery":
        return cls(
            tuple(BatteryCurve.from_spec(c) for c in data["curves"]),
            tuple(sequence_from_json(s) for s in data["sequences"]),
            tuple(Point2(float(x), float(y)) for x, y in data["points"]),
            int(data.get("directions", PROFILE_SAMPLES)),
        )


def sequence_to_json(s: DirectionSequence) -> dict:
    return {
        "name": s.name,
        "limit": [s.limit_point.x, s.limit_point.y, s.limit_dir.theta],
        "entries": [[e.p.x, e.p.y, e.dir.theta] for e in s.entries],
    }


def sequence_from_json(d: dict) -> DirectionSequence:
    lx, ly, lt = d["limit"]
    return DirectionSequence(tuple(PTPoint.of(*e) for e in d["entries"]), Point2(lx, ly), ProjDir(lt),
                             name=d.get("name", "sequence"))


def unit_slope_radii(count: int = 40) -> list[float]:
    """1/((2k+1)π), where x² sin(1/x) has slope exactly 1."""
    return [1.0 / ((2 * k + 1) * math.pi) for k in range(1, count + 1)]


def ray_sequence(base_deg: float, offset_deg: float, name: str, count: int = 40) -> DirectionSequence:
    """Points on the ray at ``base_deg`` approaching the origin, directions offset from the ray."""
    a = math.radians(base_deg)
    d = ProjDir(a + math.radians(offset_deg))
    entries = tuple(PTPoint(Point2(rho * math.cos(a), rho * math.sin(a)), d) for rho in unit_slope_radii(count))
    return DirectionSequence(entries, Point2(0.0, 0.0), ProjDir(a), name=name)


def axis_sequence(count: int = 40) -> DirectionSequence:
    return ray_sequence(0.0, 45.0, "ray0_offset45", count)


def mixed_negatives(count: int = 40) -> tuple[DirectionSequence, ...]:
    """Sequences that are not transverse: directions converge to the limit line."""
    radii = unit_slope_radii(count)
    tending = tuple(PTPoint.of(x, 0.0, math.atan(1.0 / k)) for k, x in enumerate(radii, 1))
    along = tuple(PTPoint.of(x, 0.0, 0.0) for x in radii)
    mixed = tuple(PTPoint.of(x, 0.0, math.pi / 4 if k % 2 else math.atan(1.0 / k)) for k, x in enumerate(radii, 1))
    o = Point2(0.0, 0.0)
    return (
        DirectionSequence(tending, o, ProjDir(0.0), name="dirs_tend_to_line"),
        DirectionSequence(along, o, ProjDir(0.0), name="dirs_equal_line"),
        DirectionSequence(mixed, o, ProjDir(0.0), name="mixed_subsequences"),
    )


def _default_curve_specs() -> list[dict]:
    specs: list[dict] = [{
        "name": "x_axis", "kind": "line", "point": [0.0, 0.0], "theta": 0.0,
        "probes": [0.0] + [2.0**-n for n in range(1, 7)],
    }]
    for deg in (30, 60, 90, 120, 150):
        specs.append({"name": f"line_{deg}", "kind": "line", "point": [0.0, 0.0],
                      "theta": math.radians(deg), "probes": [0.0]})
    specs += [
        {"name": "circle", "kind": "circle", "center": [0.0, 0.5], "radius": 0.5,
         "probes": [1.5 * math.pi, 0.25 * math.pi]},
        {"name": "parabola", "kind": "poly", "coeffs": [0.0, 0.0, 1.0], "probes": [0.0, 0.5]},
        {"name": "cubic", "kind": "poly", "coeffs": [0.0, 0.0, 0.0, 1.0], "probes": [0.0]},
        {"name": "x3sin1x", "kind": "x3sin1x", "probes": [0.0]},
        {"name": "horizontal_quarter", "kind": "poly", "coeffs": [0.25], "probes": [0.0, 0.1]},
        {"name": "shifted_parabola", "kind": "poly", "coeffs": [0.0625, -0.5, 1.0], "probes": [0.25]},
    ]
    return specs


def default_battery() -> Battery:
    seqs = [axis_sequence()]
    seqs += [ray_sequence(deg, 45.0, f"ray{deg}_offset45") for deg in (30, 60, 90, 120, 150)]
    seqs += [ray_sequence(deg, 90.0, f"ray{deg}_offset90") for deg in (0, 90)]
    points = (Point2(0.0, 0.0), Point2(0.0, 0.25), Point2(0.125, 0.0), Point2(0.5, 0.5), Point2(0.3, 0.1))
    return Battery(tuple(BatteryCurve.from_spec(s) for s in _default_curve_specs()), tuple(seqs), points)


# --------------------------------------------------------------- properties


def _no_tangent(where: str, residual: float | None, r: ResolutionParams) -> Verdict:
    res = math.inf if residual is None else residual
    if res > STABLE_DISAGREEMENT * r.slope_tolerance:
        return Verdict.fail(where, r, reason="image has no tangent line", tangent_residual=res)
    return Verdict.inconclusive(f"tangent residual {res:.3g} above tolerance at {where}", r,
                                tangent_residual=res)


def check_property_a(f: PlaneMap, b: Battery, r: ResolutionParams) -> Verdict:
    """Images of battery curves pass the C1 surrogate at every probe parameter."""
    out = []
    for bc in b.curves:
        img = image_curve(f, bc.curve)
        for t in bc.probes:
            v = c1_surrogate(img, t, r)
            if not v.passed:
                return Verdict(v.status, v.residuals, r, witness=bc.name,
                               reason=f"at t={t:.6g}: {v.reason or v.witness}", flags=v.flags)
            out.append(v)
    return combine(out, r)


def check_property_b(f: PlaneMap, b: Battery, r: ResolutionParams) -> Verdict:
    """The induced map on directions is a homeomorphism at every battery point."""
    out = []
    for p in b.points:
        profile = induced_map_profile(f, p, b.directions, r)
        try:
            v = homeo_surrogate(profile, r)
        except MissingTangent as e:
            v = _no_tangent(f"point ({p.x:g}, {p.y:g})", e.residual, r)
        if not v.passed:
            if v.status is Status.FAIL:
                v = Verdict.fail(f"point ({p.x:g}, {p.y:g})", r, reason=v.reason or v.witness,
                                 **v.residuals)
            return v
        out.append(v)
    return combine(out, r)


def check_property_c(f: PlaneMap, b: Battery, r: ResolutionParams) -> Verdict:
    try:
        return property_c_check(f, b.sequences, r)
    except MissingTangent as e:
        return _no_tangent(str(e), e.residual, r)


# ------------------------------------------------------------------- probes


@dataclass(frozen=True)
class PushforwardEstimate:
    vector: tuple[float, float]
    residual: float
    infinite: bool
    growth: float  # log-log slope of |quotient| against h

    @property
    def norm(self) -> float:
        return math.hypot(*self.vector)


def pushforward_vector(f: PlaneMap, p: Sequence[float], v: Sequence[float], r: ResolutionParams) -> PushforwardEstimate:
    """Limit of (f(p + h v) - f(p)) / h as h runs down the step grid, extrapolated linearly to h = 0."""
    vx, vy = float(v[0]), float(v[1])
    if vx == 0.0 and vy == 0.0:
        raise ValueError("v must be nonzero")
    px, py = float(p[0]), float(p[1])
    f0 = f.forward((px, py))
    hs = np.array(r.h_grid)
    q = np.array([[(a - b) / h for a, b in zip(f.forward((px + h * vx, py + h * vy)), f0)] for h in hs])
    mags = np.hypot(q[:, 0], q[:, 1])
    growth = float(np.polyfit(np.log(hs), np.log(np.maximum(mags, 1e-300)), 1)[0]) if len(hs) > 1 else 0.0
    if growth <= BLOWUP_SLOPE:
        return PushforwardEstimate((math.inf, math.inf), math.inf, True, growth)
    if len(hs) > 1:
        coef = np.polyfit(hs, q, 1)  # rows: slope, intercept
        limit = coef[1]
        residual = float(np.max(np.hypot(*(np.polyval(coef[:, 0], hs) - q[:, 0],
                                           np.polyval(coef[:, 1], hs) - q[:, 1]))))
    else:
        limit, residual = q[0], 0.0
    return PushforwardEstimate((float(limit[0]), float(limit[1])), residual, False, growth)


def probe_directions(n: int = PROBE_DIRECTIONS) -> list[tuple[float, float]]:
    return [(math.cos(2 * math.pi * i / n), math.sin(2 * math.pi * i / n)) for i in range(n)]


def differentiability_probe(f: PlaneMap, p: Sequence[float], r: ResolutionParams) -> Verdict:
    """Do the pushforwards along 16 unit directions come from one invertible linear map?"""
    dirs = probe_directions()
    ests = [pushforward_vector(f, p, v, r) for v in dirs]
    deg = [round(math.degrees(math.atan2(v[1], v[0])) % 360, 6) for v in dirs]
    details = {"directions": dirs, "vectors": [e.vector for e in ests]}
    for d, e in zip(deg, ests):
        if e.infinite:
            v = Verdict.fail(f"direction {d:g} deg", r, reason="pushforward magnitude blows up",
                             flags=("INFINITE",), growth=e.growth)
            v.details.update(details)
            return v
    V = np.array(dirs)
    Wm = np.array([e.vector for e in ests])
    A, *_ = np.linalg.lstsq(V, Wm, rcond=None)
    errs = np.hypot(*(V @ A - Wm).T)
    fit_error = float(errs.max())
    quotient_residual = max(e.residual for e in ests)
    res = {"fit_error": fit_error, "quotient_residual": quotient_residual}
    details["matrix"] = A.T.tolist()
    worst = deg[int(np.argmax(errs))]
    if fit_error >= r.slope_tolerance or quotient_residual >= r.slope_tolerance:
        v = Verdict.fail(f"direction {worst:g} deg", r, reason="no linear map fits the pushforwards", **res)
    else:
        collapsed = [d for d, e in zip(deg, ests) if e.norm < r.slope_tolerance]
        if collapsed:
            v = Verdict.fail(f"direction {collapsed[0]:g} deg", r, reason="nonzero vectors pushed to zero",
                             flags=("ZERO_COLLAPSE",), **res)
        else:
            v = Verdict.ok(r, **res)
    v.details.update(details)
    return v


# ----------------------------------------------------------- classification


@dataclass
class ProbeResult:
    name: str
    verdict: Verdict
    expected: Status

    @property
    def reproduced(self) -> bool:
        return self.verdict.status is self.expected


@dataclass
class ClassificationReport:
    map_name: str
    properties: dict[str, Verdict]
    probes: list[ProbeResult]
    resolution: ResolutionParams

    @property
    def overall(self) -> Status:
        statuses = [v.status for v in self.properties.values()]
        if Status.FAIL in statuses:
            return Status.FAIL
        if Status.INCONCLUSIVE in statuses:
            return Status.INCONCLUSIVE
        return Status.PASS


def _induced_identity_probe(f: PlaneMap, r: ResolutionParams, tol: float = 1e-6) -> Verdict:
    worst = 0.0
    for s in induced_map_profile(f, (0.0, 0.0), PROFILE_SAMPLES, r):
        if not s.output.exists:
            return _no_tangent("origin", s.output.residual, r)
        d = abs(s.output.theta - s.input_dir.theta)
        worst = max(worst, min(d, math.pi - d))
    if worst <= tol:
        return Verdict.ok(r, max_direction_change=worst)
    return Verdict.fail("origin", r, reason="induced map moves directions", max_direction_change=worst)


def map_probes(f: PlaneMap, r: ResolutionParams) -> list[ProbeResult]:
    """Probes reproducing the known local behaviour of each catalog map."""
    key = base_name(f.name)
    o = (0.0, 0.0)
    P, F = Status.PASS, Status.FAIL
    if key == "G":
        return [ProbeResult("induced_identity_at_origin", _induced_identity_probe(f, r), P),
                ProbeResult("differentiable_at_origin", differentiability_probe(f, o, r), F)]
    if key in ("H", "Hinv"):
        return [ProbeResult("differentiable_at_origin", differentiability_probe(f, o, r), F)]
    if key == "Q":
        seq = [PTPoint.of(0.0, 1.0 / n, 0.0) for n in range(1, 41)]
        return [ProbeResult("bundle_continuity_at_origin",
                            bundle_continuity_probe(f, seq, PTPoint.of(0.0, 0.0, 0.0), r), F)]
    if key == "W":
        prof = homeo_surrogate(induced_map_profile(f, o, PROFILE_SAMPLES, r), r)
        return [ProbeResult("induced_homeomorphism_at_origin", prof, P)]
    if key == "P":
        out = []
        for c, _ in support_balls(int(f.name.split(":")[1]))[:6]:
            out.append(ProbeResult(f"differentiable_at_({c.x:g},0)", differentiability_probe(f, c, r), F))
        out.append(ProbeResult("differentiable_at_(0.3,0.1)", differentiability_probe(f, (0.3, 0.1), r), P))
        return out
    if key in ("identity", "rot"):
        return [ProbeResult("differentiable_at_origin", differentiability_probe(f, o, r), P)]
    if key == "corner_shear":
        return [ProbeResult("differentiable_at_origin", differentiability_probe(f, o, r), F)]
    return []


def classify(f: PlaneMap, b: Battery | None = None, r: ResolutionParams | None = None,
             probes: bool = True) -> ClassificationReport:
    b = b or default_battery()
    r = r or ResolutionParams()
    props = {
        "a": check_property_a(f, b, r),
        "b": check_property_b(f, b, r),
        "c": check_property_c(f, b, r),
    }
    return ClassificationReport(f.name, props, map_probes(f, r) if probes else [], r)


def report_to_dict(rep: ClassificationReport) -> dict[str, Any]:
    """Plain-data form of a report, with keys in a fixed order."""
    def verdict(v: Verdict) -> dict[str, Any]:
        return {
            "status": v.status.value,
            "witness": v.witness,
            "reason": v.reason,
            "flags": list(v.flags),
            "residuals": {k: v.residuals[k] for k in sorted(v.residuals)},
        }

    return {
        "map": rep.map_name,
        "resolution": rep.resolution.as_dict(),
        "properties": {k: verdict(rep.properties[k]) for k in ("a", "b", "c")},
        "probes": [{"name": p.name, "expected": p.expected.value, "reproduced": p.reproduced,
                    **verdict(p.verdict)} for p in rep.probes],
        "overall": rep.overall.value,
    }
