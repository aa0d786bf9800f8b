"""Classify every catalog map (plus compositions and conjugates) and print a verdict table.

    python scripts/taxonomy_table.py [--json out.json] [--resolution tail_length=30 ...]
"""

from __future__ import annotations

import argparse
import time
from pathlib import Path

from homeo1 import formats
from homeo1.cli import parse_resolution
from homeo1.mapcatalog import catalog, compose, conjugate, invert
from homeo1.verifier import classify, default_battery, report_to_dict

BASE = ["identity", "rot:30", "G", "H", "Hinv", "Q", "W", "P:8", "corner_shear"]


def maps():
    for name in BASE:
        yield catalog(name), True
    yield compose(catalog("G"), catalog("H")), False
    yield invert(catalog("Q")), False
    yield conjugate(catalog("W"), 30), False


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--json", help="also write the full reports here")
    ap.add_argument("--resolution", nargs="*", default=[], metavar="KEY=VALUE")
    args = ap.parse_args()
    r = parse_resolution(args.resolution)
    battery = default_battery()
    reports = []
    print(f"{'map':<16}{'(a)':<6}{'(b)':<6}{'(c)':<6}{'probes':<10}{'seconds':>8}  first failure")
    for f, probes in maps():
        t0 = time.perf_counter()
        rep = classify(f, battery, r, probes=probes)
        dt = time.perf_counter() - t0
        reports.append(report_to_dict(rep))
        cells = [rep.properties[k].status.value for k in "abc"]
        probe_col = f"{sum(p.reproduced for p in rep.probes)}/{len(rep.probes)}" if probes else "-"
        failing = next((f"({k}) {v.witness}: {v.reason}" for k, v in rep.properties.items() if not v.passed), "")
        print(f"{f.name:<16}" + "".join(f"{c:<6}" for c in cells) + f"{probe_col:<10}{dt:>8.2f}  {failing}")
    if args.json:
        Path(args.json).write_text(formats.dumps(reports))


if __name__ == "__main__":
    main()
