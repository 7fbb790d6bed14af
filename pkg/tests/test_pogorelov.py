import numpy as np
import pytest

from adslab.errors import IllConditionedFit, NotFuchsian, OutsideCone
from adslab.geometry import GF_BASIS, G0_BASIS, KillingField, killing_velocity, mink_form
from adslab.hull import fuchsian_config
from adslab.pogorelov import (
    DeformationVector,
    cone_samples,
    pogorelov_map,
    pogorelov_matrix,
    psi_cocycle,
    psi_data,
    psi_inverse_killing,
    psi_killing,
    psi_matrix,
    split_radial_lateral,
    transfer_deformation,
)
from adslab.surface_group import (
    Cocycle,
    as_target,
    coboundary,
    cocycle_identity_residual,
    deform_rep,
    lie_coeffs,
    random_cocycle,
    relator_defect,
    unit_h1_direction,
    z1_basis,
)
from adslab import transfer_checks as T
from adslab import words as W


def _cone_point(rng):
    return T._random_cone_point(rng)


def test_split_reconstructs(rng):
    for _ in range(1000):
        p, v = _cone_point(rng), rng.normal(size=3)
        s = split_radial_lateral(p, v)
        assert np.allclose(s.v_r + s.v_l, v, atol=1e-12)
        assert abs(mink_form(s.v_l, p)) < 1e-12 * max(1.0, np.linalg.norm(v))


def test_split_edge_cases():
    p = np.array([0.1, 0.0, 0.5])
    assert np.allclose(split_radial_lateral(p, 2 * p).v_l, 0)
    lateral = np.array([0.0, 1.0, 0.0])
    assert np.allclose(split_radial_lateral(p, lateral).v_r, 0)
    with pytest.raises(OutsideCone):
        split_radial_lateral([1.0, 0.0, 0.5], lateral)


def test_map_on_lateral_and_radial_vectors():
    p = np.array([0.0, 0.0, 0.5])
    lateral = np.array([0.3, -0.2, 0.0])
    assert np.allclose(pogorelov_map(p, lateral), lateral)
    # radial vectors are divided by 1 - <p, p> = 1 + r^2
    assert np.allclose(pogorelov_map(p, [0, 0, 1.0]), [0, 0, 1 / 1.25])
    with pytest.raises(ValueError):
        pogorelov_map(p, lateral, "sideways")


def test_round_trip(rng):
    P = np.array([_cone_point(rng) for _ in range(200)])
    V = rng.normal(size=(200, 3))
    assert np.allclose(pogorelov_map(P, pogorelov_map(P, V, "fwd"), "inv"), V, atol=1e-12)
    M = pogorelov_matrix(P[0])
    assert np.allclose(M @ pogorelov_matrix(P[0], "inv"), np.eye(3))


def test_fuchsian_fields_are_fixed():
    for B in GF_BASIS:
        eta, res = psi_killing(lie_coeffs("g", B))
        assert res < 1e-10
        assert np.allclose(eta.coeffs, lie_coeffs("g0", B), atol=1e-10)


def test_killing_fields_map_to_killing_fields(rng):
    for e in np.eye(6):
        assert psi_killing(e)[1] < 1e-8
        assert psi_inverse_killing(e)[1] < 1e-8
    d = psi_data()
    assert d.residuals.max() < 1e-8 and np.isfinite(d.condition_number)
    # inverse fit recovers the original field
    xi = rng.normal(size=6)
    eta, _ = psi_killing(xi)
    back, _ = psi_inverse_killing(eta)
    assert np.allclose(back.coeffs, xi, atol=1e-9)


def test_psi_block_structure():
    P = psi_matrix()
    half, I = 0.5 * np.eye(3), np.eye(3)
    assert np.allclose(P, np.block([[half, half], [I, -I]]), atol=1e-10)


def test_literal_radial_factor_is_not_killing(rng):
    """Control: dividing the radial part by 1 - r^2 breaks the Killing property."""
    S = cone_samples()
    xi = KillingField("ads", rng.normal(size=6))
    v = killing_velocity(xi.matrix, S)
    r2 = -mink_form(S, S)
    split = [split_radial_lateral(p, w) for p, w in zip(S, v)]
    target = np.array([s.v_r / (1 - r) + s.v_l for s, r in zip(split, r2)]).ravel()
    design = np.column_stack([killing_velocity(B, S).ravel() for B in G0_BASIS])
    c, *_ = np.linalg.lstsq(design, target, rcond=None)
    assert np.linalg.norm(design @ c - target) / np.linalg.norm(target) > 1e-2


def test_degenerate_samples():
    with pytest.raises(IllConditionedFit):
        psi_killing(np.ones(6), cone_samples()[:5])
    p = np.array([0.0, 0.0, 0.5])
    with pytest.raises(IllConditionedFit):
        psi_killing(np.ones(6), np.repeat(p[None], 10, axis=0))


def test_psi_linear(rng):
    a, b = rng.normal(size=6), rng.normal(size=6)
    lhs = psi_killing(2 * a - 3 * b)[0].coeffs
    assert np.allclose(lhs, 2 * psi_killing(a)[0].coeffs - 3 * psi_killing(b)[0].coeffs, atol=1e-9)


def test_psi_maps_coboundaries_to_coboundaries(rho2, rng):
    G = as_target(rho2, "G")
    x = rng.normal(size=6)
    out = psi_cocycle(coboundary(G, x, "g"))
    expected = coboundary(as_target(rho2, "G0"), psi_matrix() @ x, "g0")
    assert np.allclose(out.values, expected.values, atol=1e-8)


def test_psi_cocycle_keeps_the_cocycle_rule(rho2, rng):
    G = as_target(rho2, "G")
    G0 = as_target(rho2, "G0")
    tau = psi_cocycle(random_cocycle(rng, G, z1_basis(G, "g")))
    assert relator_defect(G0, tau) < 1e-9
    for _ in range(5):
        w1, w2 = W.random_word(rng, 2, 3), W.random_word(rng, 2, 3)
        scale = np.linalg.norm(G0.image(w1), 2) ** 2 * np.linalg.norm(tau.flat)
        assert cocycle_identity_residual(G0, tau, w1, w2) < 1e-10 * scale
    with pytest.raises(ValueError):
        psi_cocycle(Cocycle("g0", tau.values))


def test_transfer_of_zero_and_trivial_deformations(rho2, rng):
    c = fuchsian_config("ads", rho2, 1, 2)
    zero = DeformationVector(Cocycle("g", np.zeros((4, 6))), (np.zeros((2, 3)),))
    out = transfer_deformation(c, zero)
    assert np.allclose(out.cocycle.values, 0) and np.allclose(out.velocities[0], 0)

    xi = KillingField("ads", rng.normal(size=6))
    G = as_target(rho2, "G")
    triv = DeformationVector(coboundary(G, -xi.coeffs, "g"), (killing_velocity(xi.matrix, c.vertices),))
    out = transfer_deformation(c, triv)
    eta = KillingField("mink", psi_matrix() @ xi.coeffs)
    assert np.allclose(out.velocities[0], killing_velocity(eta.matrix, c.vertices), atol=1e-8)
    assert np.allclose(out.cocycle.values, coboundary(as_target(rho2, "G0"), -eta.coeffs, "g0").values, atol=1e-8)


def test_transfer_needs_fuchsian_locus(rho2, rng):
    d = z1_basis(as_target(rho2, "G"), "g")
    rho = deform_rep(rho2, unit_h1_direction(rng, rho2, d), 1e-2)
    c = fuchsian_config("ads", rho2, 1, 1).with_rho(rho)
    vec = DeformationVector(Cocycle("g", np.zeros((4, 6))), (np.zeros((1, 3)),))
    with pytest.raises(NotFuchsian):
        transfer_deformation(c, vec)
    with pytest.raises(ValueError):
        transfer_deformation(fuchsian_config("mink", rho2, 1, 1), vec)


def test_transfer_suite_pieces():
    rng = np.random.default_rng(7)
    assert T.killing_fit_residual(rng, 20) < 1e-8
    assert T.equivariance_residual(rng, 20) < 1e-9
    assert T.segment_transfer_residual(rng, 20) < 1e-7
    assert T.automorphicity_residual(rng, 5) < 1e-8
    s = T.transfer_suite(seed=3, trials=10)
    assert s.as_dict()["trials"] == 10
