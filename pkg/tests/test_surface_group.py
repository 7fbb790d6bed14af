import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from adslab.config import Tolerances
from adslab.errors import NewtonDivergence, RankAmbiguous
from adslab.geometry import AD_BASIS, G_BASIS, J21
from adslab import words as W
from adslab.surface_group import (
    Cocycle,
    Representation,
    adjoint,
    as_target,
    build_fuchsian_rep,
    coboundary,
    cocycle_identity_residual,
    conjugation_fit,
    cross_product_iso,
    decide_rank,
    deform_rep,
    group_inverse,
    is_fuchsian,
    lie_coeffs,
    lie_matrix_of,
    mink_cross,
    newton_project,
    random_cocycle,
    relator_defect,
    unit_h1_direction,
    z1_basis,
)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_fuchsian_relation_residual(k):
    rho = build_fuchsian_rep(k)
    assert rho.relation_residual < 1e-11
    assert is_fuchsian(rho)


@pytest.mark.parametrize(
    "k,target,module,expected",
    [
        (2, "G_F", "g_F", (9, 3, 6)),
        (2, "G", "g", (18, 6, 12)),
        (2, "G0", "g0", (18, 6, 12)),
        (2, "G_F", "R21", (9, 3, 6)),
        (3, "G_F", "g_F", (15, 3, 12)),
        (3, "G", "g", (30, 6, 24)),
    ],
)
def test_cohomology_dimensions(k, target, module, expected):
    rho = as_target(build_fuchsian_rep(k), target)
    d = z1_basis(rho, module)
    assert d.dims == expected
    assert d.relator_rank.gap_factor > 1e3
    assert d.coboundary_rank.gap_factor > 1e3


def test_cohomology_spaces_are_nested(rho2):
    d = z1_basis(as_target(rho2, "G"), "g")
    # B1 inside Z1, H1 orthogonal to B1 inside Z1
    assert np.allclose(d.z1 @ (d.z1.T @ d.b1), d.b1, atol=1e-10)
    assert np.allclose(d.h1.T @ d.b1, 0, atol=1e-10)
    assert np.allclose(d.h1.T @ d.h1, np.eye(12), atol=1e-10)


def test_coboundaries_are_cocycles(rho2, rng):
    tau = coboundary(as_target(rho2, "G"), rng.normal(size=6), "g")
    assert relator_defect(as_target(rho2, "G"), tau) < 1e-10


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_cocycle_rule_on_random_words(seed):
    rng = np.random.default_rng(seed)
    rho = as_target(build_fuchsian_rep(2), "G")
    d = z1_basis(rho, "g")
    tau = random_cocycle(rng, rho, d)
    w1 = W.random_word(rng, 2, 3)
    w2 = W.random_word(rng, 2, 3)
    scale = np.linalg.norm(rho.image(w1), 2) ** 2 * np.linalg.norm(tau.flat)
    assert cocycle_identity_residual(rho, tau, w1, w2) < 1e-10 * scale


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_adjoint_is_a_homomorphism(seed):
    rng = np.random.default_rng(seed)
    g = expm(sum(c * B for c, B in zip(0.5 * rng.normal(size=6), G_BASIS)))
    h = expm(sum(c * B for c, B in zip(0.5 * rng.normal(size=6), G_BASIS)))
    assert np.allclose(adjoint("g", g @ h), adjoint("g", g) @ adjoint("g", h), atol=1e-10)
    assert np.allclose(group_inverse("g", g) @ g, np.eye(4), atol=1e-12)


def test_lie_coefficients_roundtrip(rng):
    for module in ("g_F", "g", "g0"):
        c = rng.normal(size={"g_F": 3, "g": 6, "g0": 6}[module])
        assert np.allclose(lie_coeffs(module, lie_matrix_of(module, c)), c)


def test_rank_decision_refuses_near_cutoff():
    with pytest.raises(RankAmbiguous) as e:
        decide_rank([1.0, 0.5, 3e-8], Tolerances())
    assert e.value.cutoff == pytest.approx(1e-8)
    dec = decide_rank([1.0, 0.5, 1e-14])
    assert dec.rank == 2 and dec.gap_factor > 1e7


def test_deformation_stays_on_relation_variety(rho2, rng):
    G = as_target(rho2, "G")
    d = z1_basis(G, "g")
    for step in (1e-2, 1e-1, 0.5):
        rho = deform_rep(rho2, unit_h1_direction(rng, rho2, d), step)
        assert rho.target == "G"
        assert rho.relation_residual < 1e-9
        assert not is_fuchsian(rho)


def test_newton_reports_divergence(rho2):
    bad = np.array(rho2.mats)
    bad[0] = np.diag([3.0, 1 / 3.0, 2.0, 0.5])
    with pytest.raises(NewtonDivergence):
        newton_project("G", 2, bad, max_iter=3)


def test_coboundary_deformation_is_a_conjugation(rho2, rng):
    """Moving along a coboundary only conjugates rho, up to second order."""
    G = as_target(rho2, "G")
    x = rng.normal(size=6)
    x /= np.linalg.norm(x)
    tau = coboundary(G, x, "g")
    res = {t: conjugation_fit(G, deform_rep(rho2, tau, t), "g").residual for t in (1e-4, 1e-5)}
    assert res[1e-5] < 1e-6
    assert res[1e-4] / res[1e-5] == pytest.approx(100, rel=0.05)
    # a unit H1 direction cannot be undone by conjugation
    d = z1_basis(G, "g")
    for step in (1e-3, 1e-5):
        rho_h = deform_rep(rho2, unit_h1_direction(rng, rho2, d), step)
        assert conjugation_fit(G, rho_h, "g").residual > 0.1 * step


def test_cross_product_isomorphism(rho2, rng):
    iso = cross_product_iso(rho2)
    assert iso.condition_number < 10
    v, w = rng.normal(size=3), rng.normal(size=3)
    M = sum(c * A for c, A in zip(iso(v), AD_BASIS))
    assert np.allclose(M @ w, mink_cross(v, w))
    # Minkowski orthogonality of the cross product
    u = mink_cross(v, w)
    assert abs(u @ J21 @ v) < 1e-12 and abs(u @ J21 @ w) < 1e-12
    # equivariance: the module actions agree through the isomorphism
    for g in rho2.mats:
        assert np.allclose(iso.matrix @ adjoint("R21", g), adjoint("g_F", g) @ iso.matrix, atol=1e-10)


def test_representation_is_read_only(rho2):
    with pytest.raises(ValueError):
        rho2.mats[0, 0, 0] = 2.0
    assert Representation("G", 2, rho2.mats, 0.0).to_json()["target"] == "G"


def test_cocycle_shapes():
    c = Cocycle.from_flat("g", 2, np.arange(24.0))
    assert c.values.shape == (4, 6)
    assert np.array_equal(c.flat, np.arange(24.0))
