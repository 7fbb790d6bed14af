import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from adslab.errors import CausallyRelated, ChartUndefined, NonTimelikeVector
from adslab.geometry import (
    G0_BASIS,
    G_BASIS,
    GF_BASIS,
    J22,
    ORIGIN,
    SL2_BASIS,
    AdSIsometry,
    KillingField,
    MinkIsometry,
    ads_distance_homogeneous,
    ads_point,
    apply_isometry,
    chart_velocity,
    cone_coords,
    form22,
    homogeneous,
    isometry_matrix,
    killing_eval,
    killing_velocity,
    mink_distance,
    sl2_to_vec,
    spacelike_distance,
    vec_to_sl2,
)

coef = st.floats(-1.0, 1.0, allow_nan=False)


def _sl2(c):
    return expm(sum(x * E for x, E in zip(c, SL2_BASIS)))


def test_sl2_model_determinant_is_form():
    x = np.array([0.3, -0.2, 0.5, 1.1])
    assert np.isclose(-np.linalg.det(vec_to_sl2(x)), form22(x, x))
    assert np.allclose(sl2_to_vec(vec_to_sl2(x)), x)
    assert np.allclose(vec_to_sl2(ORIGIN), np.eye(2))


@settings(max_examples=40, deadline=None)
@given(st.lists(coef, min_size=6, max_size=6))
def test_isometry_matrix_preserves_form(c):
    M = isometry_matrix(_sl2(c[:3]), _sl2(c[3:]))
    assert np.allclose(M.T @ J22 @ M, J22, atol=1e-10)


def test_lie_bases_are_infinitesimal_isometries():
    for B in G_BASIS:
        assert np.allclose(B.T @ J22 + J22 @ B, 0, atol=1e-14)
    for B in GF_BASIS:
        assert np.allclose(B[:, 3], 0) and np.allclose(B[3], 0)
    # translations of the Poincare algebra
    assert np.allclose(G0_BASIS[3][:3, 3], [1, 0, 0])


def test_diagonal_isometries_fix_origin():
    A = _sl2([0.4, -0.3, 0.7])
    M = isometry_matrix(A, A)
    assert np.allclose(M @ ORIGIN, ORIGIN)


def test_ads_point_normalisation_and_chart():
    p = ads_point([0.1, 0.2, 0.3, 2.0])
    assert np.isclose(form22(p.rep, p.rep), -1)
    assert p.chart_defined and p.in_chart_region
    q = ads_point([0.0, 0.0, 1.0, 0.0])
    assert not q.chart_defined
    with pytest.raises(NonTimelikeVector):
        ads_point([1.0, 0.0, 0.0, 0.0])


def test_apply_isometry_chart_exit():
    # a quarter turn in the (x3, x4) plane sends o to the plane at infinity
    c, s = np.cos(np.pi / 4), np.sin(np.pi / 4)
    g = AdSIsometry(np.array([[c, s], [-s, c]]), np.array([[c, -s], [s, c]]))
    with pytest.raises(ChartUndefined):
        apply_isometry(g, np.zeros(3))


def test_isometry_groups_compose():
    a = AdSIsometry(_sl2([0.1, 0.2, 0.3]), _sl2([0.3, -0.1, 0.0]))
    b = AdSIsometry(_sl2([-0.2, 0.1, 0.5]), _sl2([0.0, 0.4, -0.3]))
    assert np.allclose((a @ b).mat4, a.mat4 @ b.mat4)
    assert np.allclose((a @ a.inverse()).mat4, np.eye(4))
    m = MinkIsometry(isometry_matrix(_sl2([0.2, 0.1, 0.3]), _sl2([0.2, 0.1, 0.3]))[:3, :3], np.array([1.0, 2.0, 0.5]))
    p = np.array([0.3, 0.1, 0.2])
    assert np.allclose(apply_isometry(m.inverse(), apply_isometry(m, p)), p)


@settings(max_examples=30, deadline=None)
@given(st.lists(coef, min_size=6, max_size=6))
def test_ads_distance_invariant(c):
    P = homogeneous(np.array([0.3, 0.0, 0.1]))
    Q = homogeneous(np.array([-0.2, 0.4, 0.0]))
    d0 = ads_distance_homogeneous(P, Q)
    M = isometry_matrix(_sl2(np.array(c[:3]) * 0.5), _sl2(np.array(c[3:]) * 0.5))
    assert np.isclose(ads_distance_homogeneous(M @ P, M @ Q), d0, atol=1e-10)


def test_distance_errors():
    with pytest.raises(CausallyRelated):
        mink_distance(np.zeros(3), np.array([0.0, 0.0, 1.0]))
    with pytest.raises(CausallyRelated):
        spacelike_distance(np.zeros(3), np.array([0.0, 0.0, 0.5]), "ads")
    assert np.isclose(spacelike_distance(np.zeros(3), np.array([3.0, 4.0, 0.0]), "mink"), 5.0)


@pytest.mark.parametrize("geometry", ["ads", "mink"])
def test_killing_velocity_matches_flow(geometry, rng):
    xi = KillingField(geometry, rng.normal(size=6))
    y = np.array([0.1, -0.2, 0.3])
    h = 1e-5
    fwd, bwd = apply_isometry(xi.flow(h), y), apply_isometry(xi.flow(-h), y)
    fd = (fwd - bwd) / (2 * h)
    assert np.allclose(killing_eval(xi, y).vec, fd, atol=1e-8)
    assert np.allclose(killing_velocity(xi.matrix, y[None])[0], fd, atol=1e-8)


def test_chart_velocity_of_scaled_curve():
    X = np.array([0.2, 0.1, 0.3, 2.0])
    # scaling the homogeneous vector does not move the chart point
    assert np.allclose(chart_velocity(X, 5 * X), 0)


def test_cone_coords():
    inside, r = cone_coords([0.0, 0.0, 0.5])
    assert inside and np.isclose(r, 0.5)
    assert cone_coords([1.0, 0.0, 0.5]) == (False, None)
