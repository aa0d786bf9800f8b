"""Write SVG figures: catalog maps acting on a grid and a line pencil, and one closed C1 construction.

    python scripts/gallery.py [--out-dir gallery]
"""

from __future__ import annotations

import argparse
import math
from pathlib import Path

from homeo1 import formats
from homeo1.cli import main as cli_main
from homeo1.induced import PTPoint
from homeo1.projgeom import ProjDir
from homeo1.sequences import DirectionSequence

VIEWS = {
    "G": "-1,1,-1,1",
    "H": "-1,1,-1,1",
    "Q": "-1,1,-1,1",
    "W": "-1.2,1.2,-1.2,1.2",
    "P:4": "0,0.7,-0.2,0.2",
    "corner_shear": "-1,1,-1,1",
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="gallery")
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, region in VIEWS.items():
        path = out / f"map_{name.replace(':', '')}.svg"
        cli_main(["gallery", "--map", name, f"--region={region}", "--density", "13", "--out", str(path)])
        print(path)

    ents = tuple(PTPoint.of(1 / n, 1 / n**2, math.atan(2 / n)) for n in range(1, 41))
    seq = DirectionSequence(ents, (0, 0), ProjDir(0), "parabola")
    src = out / "parabola_points.csv"
    src.write_text(formats.to_text(formats.write_sequence_csv, seq))
    code = cli_main(["construct", "--points", str(src), "--want", "8", "--svg", str(out / "closed_c1.svg"),
                     "--out", str(out / "closed_c1.csv"), "--samples", "512"])
    print(out / "closed_c1.svg", "exit", code)


if __name__ == "__main__":
    main()
