import math

import numpy as np
import pytest

from homeo1.errors import MissingTangent
from homeo1.induced import (
    PTPoint,
    bundle_continuity_probe,
    cyclic_triple_preserved,
    homeo_surrogate,
    induced_dir,
    induced_map_profile,
)
from homeo1.mapcatalog import PlaneMap, catalog, corner_shear
from homeo1.projgeom import Point2, ProjDir, dir_from_vector, proj_distance


def linear(a, b, c, d):
    det = a * d - b * c
    return PlaneMap(
        "linear",
        lambda p: Point2(a * p[0] + b * p[1], c * p[0] + d * p[1]),
        lambda p: Point2((d * p[0] - b * p[1]) / det, (-c * p[0] + a * p[1]) / det),
        orientation_preserving=det > 0,
    )


@pytest.mark.parametrize("mat", [(1, 1, 0, 1), (2, 0, 0, 0.5), (0, 1, 1, 0)])
def test_linear_maps_act_by_their_matrix(res, mat):
    f = linear(*mat)
    a, b, c, d = mat
    for s in induced_map_profile(f, (0.3, -0.4), 24, res):
        u, v = s.input_dir.vector()
        expect = dir_from_vector(a * u + b * v, c * u + d * v)
        assert proj_distance(s.output.dir, expect) < 1e-9


def test_h_away_from_origin_uses_its_jacobian(res):
    H = catalog("H")
    x, y = 0.6, -0.3
    r = math.hypot(x, y)
    jac = np.array([[r + x * x / r, x * y / r], [x * y / r, r + y * y / r]])
    for s in induced_map_profile(H, (x, y), 18, res):
        w = jac @ np.array(s.input_dir.vector())
        assert proj_distance(s.output.dir, dir_from_vector(*w)) < 1e-8


def test_g_fixes_directions_at_origin(res):
    # G scales each ray by a constant, so lines through 0 stay lines through 0
    G = catalog("G")
    for s in induced_map_profile(G, (0.0, 0.0), 36, res):
        assert proj_distance(s.output.dir, s.input_dir) < 1e-9


def test_homeo_surrogate(res):
    prof = induced_map_profile(linear(1, 2, 0, 1), (0, 0), 36, res)
    v = homeo_surrogate(prof, res)
    assert v.passed and v.details["orientation"] == "CCW"
    flip = induced_map_profile(linear(0, 1, 1, 0), (0, 0), 36, res)
    assert homeo_surrogate(flip, res).details["orientation"] == "CW"


def test_corner_has_no_induced_direction(res):
    est = induced_dir(corner_shear(), (0, 0), ProjDir(0), res)
    assert not est.exists
    with pytest.raises(MissingTangent):
        homeo_surrogate(induced_map_profile(corner_shear(), (0, 0), 12, res), res)


def test_cyclic_triple(res):
    a, b, c = ProjDir(0.1), ProjDir(0.9), ProjDir(2.0)
    assert cyclic_triple_preserved(catalog("rot:40"), (1, 1), a, b, c, res).passed
    assert cyclic_triple_preserved(linear(1, 0, 0, -1), (0, 0), a, b, c, res).passed
    with pytest.raises(ValueError):
        cyclic_triple_preserved(catalog("identity"), (0, 0), a, a, c, res)


def test_bundle_probe_continuous_for_smooth_map(res):
    seq = [PTPoint.of(1 / n, 0, 0.7) for n in range(1, 41)]
    v = bundle_continuity_probe(catalog("rot:30"), seq, PTPoint.of(0, 0, 0.7), res)
    assert v.passed
    assert v.details["limit_output"] == pytest.approx(0.7 + math.pi / 6)
