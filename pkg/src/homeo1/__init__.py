"""Numerical probes for plane homeomorphisms that preserve C1 curves."""

from .projgeom import INF, Point2, ProjDir, ResolutionParams, dir_from_slope, proj_distance
from .verdict import Status, Verdict

__all__ = ["INF", "Point2", "ProjDir", "ResolutionParams", "Status", "Verdict", "dir_from_slope",
           "proj_distance"]
