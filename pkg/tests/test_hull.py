import json

import numpy as np
import pytest

from adslab.errors import ChartExit, NonVertexMarkedPoint, TriangleInequalityViolation, TruncationTooShort
from adslab.hull import (
    MarkedConfig,
    convexity_checks,
    fuchsian_config,
    hull_boundary,
    induced_cone_metric,
    metric_to_json,
    nappe_sign,
    orbit,
    stabilization_report,
    surface_to_json,
    surface_to_off,
    triangle_angles,
)
from adslab import words as W


@pytest.fixture(scope="module")
def built(rho2):
    cache = {}

    def get(geometry, n=1, side=1):
        key = (geometry, n, side)
        if key not in cache:
            c = fuchsian_config(geometry, rho2, side, n)
            s = hull_boundary(c, 4)
            cache[key] = (c, s, induced_cone_metric(s))
        return cache[key]

    return get


def test_nappe_orientation():
    assert nappe_sign("ads", 1) == -1 and nappe_sign("ads", -1) == 1
    assert nappe_sign("mink", 1) == 1
    with pytest.raises(ValueError):
        nappe_sign("ads", 0)


def test_config_validation(rho2):
    with pytest.raises(ValueError):
        MarkedConfig("dS", rho2, 1, [[0, 0, 1]])
    with pytest.raises(ValueError):
        MarkedConfig("ads", rho2, 1, [[2.0, 0, 0]])
    c = fuchsian_config("ads", rho2, 1, 2)
    assert c.n == 2 and c.genus == 2
    with pytest.raises(ValueError):
        c.vertices[0, 0] = 1.0


def test_orbit_size_matches_ball(rho2):
    c = fuchsian_config("ads", rho2, 1, 2)
    cloud = orbit(c, 3)
    assert len(cloud) == 2 * len(W.ball(2, 3).words)
    # Fuchsian images keep the side of the invariant plane
    assert np.all(cloud.chart()[:, 2] < 0)


@pytest.mark.parametrize("geometry", ["ads", "mink"])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_edge_and_triangle_counts(built, geometry, n):
    c, s, m = built(geometry, n)
    assert len(m.edges) == 6 * 2 - 6 + 3 * n
    assert len(m.triangles) == 4 * 2 - 4 + 2 * n
    assert m.euler_characteristic == -2
    assert np.all(m.cone_angles > 2 * np.pi)
    assert m.gauss_bonnet_residual() < 1e-10
    assert s.max_planarity < 1e-9 and s.min_spacelike_margin > 0


@pytest.mark.parametrize("geometry", ["ads", "mink"])
def test_triangulation_independence(built, geometry):
    c, s, m = built(geometry, 2)
    m2 = induced_cone_metric(s, fan="max")
    assert np.max(np.abs(m.cone_angles - m2.cone_angles)) < 1e-9


def test_side_minus_is_the_antipodal_surface(built):
    _, _, mp = built("ads", 1, 1)
    _, _, mm = built("ads", 1, -1)
    assert np.allclose(np.sort(mp.lengths), np.sort(mm.lengths), atol=1e-10)


def test_short_truncation_is_reported(rho2):
    with pytest.raises(TruncationTooShort):
        hull_boundary(fuchsian_config("ads", rho2, 1, 1), 3)


def test_interior_vertex_is_rejected(rho2):
    c = MarkedConfig("ads", rho2, 1, [[0, 0, -0.5], [0.01, 0, -0.8]])
    with pytest.raises(NonVertexMarkedPoint):
        hull_boundary(c, 4)


def test_mink_orbit_leaving_the_chart(rho2):
    # a vertex on the wrong nappe cannot be charted from the future side
    c = MarkedConfig("mink", rho2, 1, [[0, 0, -1.0]])
    with pytest.raises(ChartExit):
        orbit(c, 1)


def test_convexity_reports(built):
    c, s, _ = built("ads", 1)
    r = convexity_checks(c, s)
    assert r.vertex_hull and r.vertex_margin > 0
    assert r.core_disjoint and r.core_margin > 0
    c, s, _ = built("mink", 1)
    r = convexity_checks(c, s)
    assert r.vertex_hull and r.core_disjoint
    assert r.core_margin == pytest.approx(1.0, abs=1e-8)


def test_core_margin_shrinks_towards_the_invariant_plane(rho2):
    margins = []
    for h in (0.3, 1.0, 3.0):
        c = fuchsian_config("ads", rho2, 1, 1, height=h)
        margins.append(convexity_checks(c, hull_boundary(c, 4)).core_margin)
    assert margins[0] > margins[1] > margins[2] > 0


def test_stabilization(rho2):
    rep = stabilization_report(fuchsian_config("ads", rho2, 1, 1), [4, 5])
    assert rep.combinatorics_equal == (True,)
    assert rep.edge_deltas[0] < 1e-10 and rep.angle_deltas[0] < 1e-10
    with pytest.raises(ValueError):
        stabilization_report(fuchsian_config("ads", rho2, 1, 1), [5, 4])


def test_triangle_angles():
    right = triangle_angles(np.array([[1.0, 1.0, np.sqrt(2)]]), "mink")
    assert np.allclose(right, [[np.pi / 4, np.pi / 4, np.pi / 2]])
    # hyperbolic equilateral triangle: cos A = cosh a / (1 + cosh a)
    eq = triangle_angles(np.array([[1.0, 1.0, 1.0]]), "ads")
    assert np.allclose(eq, np.arccos(np.cosh(1) / (1 + np.cosh(1))))
    with pytest.raises(TriangleInequalityViolation):
        triangle_angles(np.array([[1.0, 1.0, 2.5]]), "mink")


def test_serialization(built):
    _, s, m = built("mink", 1)
    json.dumps(surface_to_json(s))
    d = metric_to_json(m)
    assert len(d["lengths"]) == len(d["edges"]) == 9
    off = surface_to_off(s).splitlines()
    assert off[0] == "OFF"
    nv, nf, _ = map(int, off[1].split())
    assert len(off) == 2 + nv + nf
