"""Command-line front end: verify, induced, construct, gallery, battery.

Exit codes: 0 PASS, 2 FAIL, 3 INCONCLUSIVE, 1 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import formats
from .curves import slope_function
from .errors import GeometryError, InsufficientPoints, NotConvergent
from .induced import induced_map_profile
from .interpolation import construct_closed_c1, normalize_and_extract, sample_closed, validate_construction
from .mapcatalog import PlaneMap, catalog, support_balls
from .projgeom import ResolutionParams
from .verdict import Status
from .verifier import Battery, classify, default_battery, report_to_dict

EXIT = {Status.PASS: 0, Status.FAIL: 2, Status.INCONCLUSIVE: 3}
USAGE = 1

INT_KEYS = {"tail_length"}
LIST_KEYS = {"h_grid"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with 2, which means FAIL here
        self.print_usage(sys.stderr)
        self.exit(USAGE, f"{self.prog}: error: {message}\n")


def parse_resolution(pairs: Sequence[str], base: dict | None = None) -> ResolutionParams:
    data = ResolutionParams().as_dict()
    data.update(base or {})
    for pair in pairs:
        key, sep, val = pair.partition("=")
        key = key.strip()
        if not sep or key not in data:
            raise UsageError(f"bad resolution override {pair!r}; keys: {', '.join(data)}")
        try:
            if key in INT_KEYS:
                data[key] = int(val)
            elif key in LIST_KEYS:
                data[key] = [float(v) for v in val.split(",")]
            else:
                data[key] = float(val)
        except ValueError as e:
            raise UsageError(f"bad value for {key}: {val!r}") from e
    try:
        return ResolutionParams(**data)
    except (TypeError, ValueError) as e:
        raise UsageError(str(e)) from e


def parse_point(text: str) -> tuple[float, float]:
    try:
        x, y = (float(v) for v in text.split(","))
    except ValueError as e:
        raise UsageError(f"point must look like x,y (got {text!r})") from e
    return x, y


def resolve_map(name: str) -> PlaneMap:
    try:
        return catalog(name)
    except (KeyError, ValueError) as e:
        raise UsageError(f"unknown map {name!r}") from e


def load_battery(spec: str | None) -> Battery:
    if spec in (None, "default"):
        return default_battery()
    path = Path(spec)
    if not path.is_file():
        raise UsageError(f"battery file {spec} does not exist")
    try:
        return Battery.from_json(json.loads(path.read_text()))
    except (KeyError, ValueError, TypeError) as e:
        raise UsageError(f"cannot read battery {spec}: {e}") from e


def _write(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _merge_config(args: argparse.Namespace) -> tuple[argparse.Namespace, dict]:
    """Fill unset flags from the JSON config; flags win."""
    cfg: dict[str, Any] = {}
    if args.config:
        path = Path(args.config)
        if not path.is_file():
            raise UsageError(f"config file {args.config} does not exist")
        try:
            cfg = json.loads(path.read_text())
        except json.JSONDecodeError as e:
            raise UsageError(f"config is not valid JSON: {e}") from e
    for key, val in cfg.items():
        if key != "resolution" and getattr(args, key, None) is None:
            setattr(args, key, val)
    return args, cfg.get("resolution", {})


# ---------------------------------------------------------------- commands


def cmd_verify(args: argparse.Namespace, r: ResolutionParams) -> int:
    if not args.map:
        raise UsageError("--map is required")
    f = resolve_map(args.map)
    rep = classify(f, load_battery(args.battery), r, probes=not args.no_probes)
    _write(formats.dumps(report_to_dict(rep)), args.out)
    return EXIT[rep.overall]


def cmd_induced(args: argparse.Namespace, r: ResolutionParams) -> int:
    if not args.map or not args.point:
        raise UsageError("--map and --point are required")
    f = resolve_map(args.map)
    n = int(args.samples or 36)
    if n < 3:
        raise UsageError("--samples must be at least 3")
    profile = induced_map_profile(f, parse_point(args.point), n, r)
    _write(formats.to_text(formats.write_profile_csv, profile), args.out)
    return 0 if all(s.output.exists for s in profile) else EXIT[Status.INCONCLUSIVE]


def cmd_construct(args: argparse.Namespace, r: ResolutionParams) -> int:
    if not args.points:
        raise UsageError("--points is required")
    path = Path(args.points)
    if not path.is_file():
        raise UsageError(f"points file {args.points} does not exist")
    want = int(args.want or 8)
    try:
        with path.open() as fh:
            seq = formats.read_sequence_csv(fh, name=path.stem)
    except (ValueError, IndexError, GeometryError) as e:
        raise UsageError(f"cannot parse {args.points}: {e}") from e
    try:
        ns = normalize_and_extract(seq, want, r)
    except (NotConvergent, InsufficientPoints) as e:
        print(f"{e.code}: {e}", file=sys.stderr)
        return EXIT[Status.FAIL]
    curve = construct_closed_c1(seq, want, r)
    verdict = validate_construction(curve, ns, r)
    per_arc = int(args.samples or 2048)
    ts = np.concatenate([i + np.arange(per_arc) / per_arc for i in range(len(curve.segments))])
    _write(formats.to_text(formats.write_curve_csv, curve, ts, slope_function(curve, ts, r)), args.out)
    if args.svg:
        pts = sample_closed(curve)
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        canvas = formats.SvgCanvas((lo[0], hi[0], lo[1], hi[1]), title=f"closed C1 curve through {want} points")
        canvas.polyline(pts, cls="curve", closed=True)
        marked = []
        for i in ns.source_index:
            p = seq.entries[i].p
            canvas.point(p.x, p.y)
            marked.append([p.x, p.y, seq.entries[i].dir.theta])
        canvas.meta = {"interpolated_points": marked, "validation": verdict.status.value}
        Path(args.svg).write_text(canvas.render())
    print(f"validation {verdict.status.value}" + (f": {verdict.witness} ({verdict.reason})"
                                                  if not verdict.passed else ""), file=sys.stderr)
    return EXIT[verdict.status]


def _parse_region(text: str | None) -> tuple[float, float, float, float]:
    if not text:
        return (-1.0, 1.0, -1.0, 1.0)
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError as e:
        raise UsageError(f"bad region {text!r}") from e
    if len(vals) != 4 or not (vals[0] < vals[1] and vals[2] < vals[3]):
        raise UsageError("region must be xmin,xmax,ymin,ymax with min < max")
    return vals  # type: ignore[return-value]


def cmd_gallery(args: argparse.Namespace, r: ResolutionParams) -> int:
    if not args.map:
        raise UsageError("--map is required")
    f = resolve_map(args.map)
    x0, x1, y0, y1 = _parse_region(args.region)
    n = int(args.density or 11)
    if n < 2:
        raise UsageError("--density must be at least 2")
    s = np.linspace(0.0, 1.0, 241)
    lines = []
    for x in np.linspace(x0, x1, n):
        lines.append(("grid", np.column_stack([np.full_like(s, x), y0 + s * (y1 - y0)])))
    for y in np.linspace(y0, y1, n):
        lines.append(("grid", np.column_stack([x0 + s * (x1 - x0), np.full_like(s, y)])))
    reach = max(abs(x0), abs(x1), abs(y0), abs(y1))
    for k in range(12):
        a = math.pi * k / 12
        t = (2 * s - 1) * reach
        pts = np.column_stack([t * math.cos(a), t * math.sin(a)])
        inside = (pts[:, 0] >= x0) & (pts[:, 0] <= x1) & (pts[:, 1] >= y0) & (pts[:, 1] <= y1)
        if inside.sum() >= 2:
            lines.append(("pencil", pts[inside]))
    canvas = formats.SvgCanvas((x0, x1, y0, y1), title=f"image of a grid and a line pencil under {f.name}")
    for cls, pts in lines:
        img = np.array([f.forward((float(p[0]), float(p[1]))) for p in pts])
        canvas.polyline(img, stroke="steelblue" if cls == "pencil" else "black", cls=cls)
    if args.map.startswith("P:"):
        th = np.linspace(0, 2 * math.pi, 97)
        for c, rad in support_balls(int(args.map.split(":")[1])):
            canvas.polyline(np.column_stack([c.x + rad * np.cos(th), c.y + rad * np.sin(th)]),
                            stroke="tomato", cls="support")
    canvas.meta = {"map": f.name, "region": [x0, x1, y0, y1], "density": n}
    _write(canvas.render(), args.out)
    return 0


def cmd_battery(args: argparse.Namespace, r: ResolutionParams) -> int:
    _write(formats.dumps(default_battery().to_json()), args.out)
    return 0


COMMANDS = {
    "verify": cmd_verify,
    "induced": cmd_induced,
    "construct": cmd_construct,
    "gallery": cmd_gallery,
    "battery": cmd_battery,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", help="output path (default: standard output)")
    common.add_argument("--resolution", nargs="*", default=[], metavar="KEY=VALUE",
                        help="resolution overrides, e.g. tail_length=30 dir_tolerance=1e-3")
    common.add_argument("--config", help="JSON config; explicit flags take precedence")
    p = _Parser(prog="homeo1", description="Probe plane homeomorphisms for the C1-curve-preserving properties.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    v = sub.add_parser("verify", parents=[common], help="classify a catalog map")
    v.add_argument("--map")
    v.add_argument("--battery", help="'default' or a battery JSON file")
    v.add_argument("--no-probes", action="store_true", help="skip the per-map probes")
    i = sub.add_parser("induced", parents=[common], help="profile of the induced map on directions")
    i.add_argument("--map")
    i.add_argument("--point")
    i.add_argument("--samples", type=int)
    c = sub.add_parser("construct", parents=[common], help="closed C1 curve through a sequence CSV")
    c.add_argument("--points")
    c.add_argument("--want", type=int)
    c.add_argument("--svg")
    c.add_argument("--samples", type=int, help="curve CSV samples per arc (default 2048)")
    g = sub.add_parser("gallery", parents=[common], help="SVG of a grid and a line pencil under a map")
    g.add_argument("--map")
    g.add_argument("--region", help="xmin,xmax,ymin,ymax")
    g.add_argument("--density", type=int)
    sub.add_parser("battery", parents=[common], help="write the default battery as JSON")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_usage(sys.stderr)
        return USAGE
    try:
        args, res_cfg = _merge_config(args)
        r = parse_resolution(args.resolution, res_cfg)
        return COMMANDS[args.command](args, r)
    except UsageError as e:
        print(f"homeo1 {args.command}: {e}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
