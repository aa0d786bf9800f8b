"""Finite-tail convergence tests shared by the sequence and bundle probes.

A finite sequence of distances d_j measured at points with shrinking norms
r_j is accepted as converging to zero when either the deeper half of the
tail is already below the tolerance, or the tail decays like a power of the
norm: log d against log r has slope at least ``trend_exponent`` over the
whole tail and over its deeper half. The second clause rejects sequences
that settle at a positive limit, whose local slope flattens out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .projgeom import ResolutionParams

MIN_NORM_SPAN = 1.5


@dataclass(frozen=True)
class TailDecay:
    converges: bool
    deep_max: float
    exponent: float
    local_exponent: float


def _loglog_slope(r: np.ndarray, d: np.ndarray) -> float:
    if len(r) < 2 or r.max() / r.min() < MIN_NORM_SPAN:
        return 0.0
    lr = np.log(r)
    ld = np.log(np.maximum(d, 1e-300))
    return float(np.polyfit(lr, ld, 1)[0])


def upper_envelope(d: Sequence[float]) -> np.ndarray:
    """max over the remaining tail: U_j = max_{i >= j} d_i."""
    arr = np.asarray(d, dtype=float)
    return np.maximum.accumulate(arr[::-1])[::-1]


def lower_envelope(d: Sequence[float]) -> np.ndarray:
    """running minimum: L_j = min_{i <= j} d_i."""
    return np.minimum.accumulate(np.asarray(d, dtype=float))


def tail_decay(norms: Sequence[float], dists: Sequence[float], r: ResolutionParams) -> TailDecay:
    n = min(r.tail_length, len(norms))
    rr = np.asarray(norms, dtype=float)[-n:]
    dd = np.asarray(dists, dtype=float)[-n:]
    half = n // 2
    deep = dd[half:] if half < n else dd
    deep_max = float(deep.max()) if len(deep) else math.inf
    if deep_max < r.dir_tolerance:
        return TailDecay(True, deep_max, math.inf, math.inf)
    a = _loglog_slope(rr, dd)
    a_loc = _loglog_slope(rr[half:], dd[half:])
    ok = a >= r.trend_exponent and a_loc >= r.trend_exponent
    return TailDecay(ok, deep_max, a, a_loc)
