"""CSV, SVG and JSON input/output for curves, profiles, sequences and reports."""

from __future__ import annotations

import csv
import io
import json
import math
import xml.etree.ElementTree as ET
from typing import Any, Iterable, Sequence

import numpy as np

from .curves import ParamCurve, SlopeEstimate
from .induced import DirMapSample, PTPoint
from .projgeom import Point2, ProjDir
from .sequences import DirectionSequence

SIG_DIGITS = 12
SVG_NS = "http://www.w3.org/2000/svg"


def fmt(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return f"{x:.{SIG_DIGITS}g}"


def parse_num(s: str) -> float:
    return float(s.strip())  # float() already accepts inf / -inf / nan


# -------------------------------------------------------------------- JSON


def _plain(obj: Any) -> Any:
    """Round floats to 12 significant digits; non-finite values become strings."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return fmt(x) if not math.isfinite(x) else float(fmt(x))
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any) -> str:
    """Deterministic JSON: insertion key order, 12 significant digits, trailing newline."""
    return json.dumps(_plain(obj), indent=2, ensure_ascii=False) + "\n"


# --------------------------------------------------------------------- CSV


def write_curve_csv(fh, c: ParamCurve, ts: Iterable[float], slopes: Sequence[SlopeEstimate] | None = None) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["t", "x", "y"] + (["slope"] if slopes is not None else []))
    for i, t in enumerate(ts):
        p = c(float(t))
        row = [fmt(float(t)), fmt(p[0]), fmt(p[1])]
        if slopes is not None:
            est = slopes[i]
            row.append(fmt(est.dir.slope) if est.exists else "nan")
        w.writerow(row)


def read_curve_csv(fh) -> dict[str, np.ndarray]:
    rows = list(csv.reader(fh))
    head = [h.strip() for h in rows[0]]
    if head[:3] != ["t", "x", "y"]:
        raise ValueError(f"unexpected curve header {head}")
    cols = list(zip(*[[parse_num(v) for v in r] for r in rows[1:] if r]))
    return {h: np.array(col) for h, col in zip(head, cols)} if cols else {h: np.array([]) for h in head}


def write_profile_csv(fh, profile: Sequence[DirMapSample]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["theta_in", "theta_out", "residual", "exists"])
    for s in profile:
        w.writerow([fmt(s.input_dir.theta), fmt(s.output.theta), fmt(s.output.residual),
                    "true" if s.output.exists else "false"])


def read_profile_csv(fh) -> list[DirMapSample]:
    rows = list(csv.reader(fh))
    if [h.strip() for h in rows[0]] != ["theta_in", "theta_out", "residual", "exists"]:
        raise ValueError("unexpected profile header")
    out = []
    for r in rows[1:]:
        if not r:
            continue
        exists = r[3].strip() == "true"
        out_dir = ProjDir(parse_num(r[1])) if exists else None
        out.append(DirMapSample(ProjDir(parse_num(r[0])), SlopeEstimate(out_dir, parse_num(r[2]), exists)))
    return out


def write_sequence_csv(fh, seq: DirectionSequence) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["x", "y", "theta"])
    for e in seq.entries:
        w.writerow([fmt(e.p.x), fmt(e.p.y), fmt(e.dir.theta)])
    w.writerow(["limit", fmt(seq.limit_point.x), fmt(seq.limit_point.y), fmt(seq.limit_dir.theta)])


def read_sequence_csv(fh, name: str = "sequence") -> DirectionSequence:
    rows = [r for r in csv.reader(fh) if r]
    if [h.strip() for h in rows[0]] != ["x", "y", "theta"]:
        raise ValueError("sequence CSV must start with the header x,y,theta")
    entries, limit = [], None
    for r in rows[1:]:
        if r[0].strip() == "limit":
            if limit is not None:
                raise ValueError("more than one limit row")
            limit = tuple(parse_num(v) for v in r[1:4])
        else:
            if limit is not None:
                raise ValueError("the limit row must come last")
            entries.append(PTPoint.of(*(parse_num(v) for v in r[:3])))
    if limit is None:
        raise ValueError("missing limit row")
    return DirectionSequence(tuple(entries), Point2(limit[0], limit[1]), ProjDir(limit[2]), name=name)


def to_text(writer, *args) -> str:
    buf = io.StringIO()
    writer(buf, *args)
    return buf.getvalue()


# --------------------------------------------------------------------- SVG


class SvgCanvas:
    """Minimal SVG 1.1 document in data coordinates (y up)."""

    def __init__(self, bounds: tuple[float, float, float, float], width: int = 600, title: str = ""):
        x0, x1, y0, y1 = bounds
        pad = 0.05 * max(x1 - x0, y1 - y0)
        self.bounds = (x0 - pad, x1 + pad, y0 - pad, y1 + pad)
        self.width = width
        self.title = title
        self.items: list[str] = []
        self.meta: dict[str, Any] = {}
        span = max(self.bounds[1] - self.bounds[0], self.bounds[3] - self.bounds[2])
        self.stroke = span / 400

    def polyline(self, pts: np.ndarray, stroke: str = "black", cls: str = "curve", closed: bool = False) -> None:
        pts = np.asarray(pts, dtype=float)
        pts = pts[np.isfinite(pts).all(axis=1)]
        if len(pts) < 2:
            return
        coords = " ".join(f"{fmt(x)},{fmt(y)}" for x, y in pts)
        tag = "polygon" if closed else "polyline"
        self.items.append(f'<{tag} class="{cls}" points="{coords}" fill="none" stroke="{stroke}" '
                          f'stroke-width="{fmt(self.stroke)}"/>')

    def point(self, x: float, y: float, fill: str = "red", cls: str = "marker") -> None:
        self.items.append(f'<circle class="{cls}" cx="{fmt(x)}" cy="{fmt(y)}" r="{fmt(3 * self.stroke)}" fill="{fill}"/>')

    def render(self) -> str:
        x0, x1, y0, y1 = self.bounds
        w, h = x1 - x0, y1 - y0
        height = max(1, int(round(self.width * h / w)))
        meta = json.dumps(_plain(self.meta), sort_keys=False)
        body = "\n    ".join(self.items)
        return (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="{SVG_NS}" version="1.1" width="{self.width}" height="{height}" '
            f'viewBox="{fmt(x0)} {fmt(-y1)} {fmt(w)} {fmt(h)}">\n'
            f"  <title>{self.title}</title>\n"
            f"  <metadata>{_xml_escape(meta)}</metadata>\n"
            '  <g transform="scale(1,-1)">\n'
            f"    {body}\n"
            "  </g>\n"
            "</svg>\n"
        )


def _xml_escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def read_svg(text: str) -> dict[str, Any]:
    """Polylines, markers and metadata of an SVG written by :class:`SvgCanvas`."""
    root = ET.fromstring(text)
    ns = {"s": SVG_NS}
    lines = []
    for tag in ("polyline", "polygon"):
        for el in root.iter(f"{{{SVG_NS}}}{tag}"):
            pts = [tuple(parse_num(v) for v in pair.split(",")) for pair in el.get("points").split()]
            lines.append({"class": el.get("class"), "points": np.array(pts), "closed": tag == "polygon"})
    markers = [(parse_num(el.get("cx")), parse_num(el.get("cy")))
               for el in root.iter(f"{{{SVG_NS}}}circle")]
    meta_el = root.find("s:metadata", ns)
    meta = json.loads(meta_el.text) if meta_el is not None and meta_el.text else {}
    return {"version": root.get("version"), "polylines": lines, "markers": markers, "metadata": meta}
