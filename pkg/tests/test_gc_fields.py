import numpy as np
import pytest

from adslab.errors import DegenerateOperator, NonSpacelike
from adslab.gc_fields import (
    OperatorSample,
    brioschi_curvature,
    convergence_order,
    equidistant_report,
    from_chart_map,
    fuchsian_equidistant_surface,
    fundamental_forms,
    gauss_codazzi_residual,
    hyperbolic_fermi_metric,
    left_right_metrics,
    left_right_metrics_check,
)


def _graph_surface(c=(-0.3, 0.1, 0.2), height=-0.4, half=0.2):
    """Chart graph y3 = height + c0 a^2 + c1 ab + c2 b^2, not equidistant from any plane."""
    c0, c1, c2 = c

    def f(a, b):
        return np.stack([a, b, height + c0 * a**2 + c1 * a * b + c2 * b**2], -1)

    def df(a, b):
        z, o = np.zeros_like(a), np.ones_like(a)
        return np.stack([np.stack([o, z, 2 * c0 * a + c1 * b], -1),
                         np.stack([z, o, c1 * a + 2 * c2 * b], -1)], -2)

    def ddf(a, b):
        z = np.zeros_like(a)
        aa, ab, bb = (np.stack([z, z, z + v], -1) for v in (2 * c0, c1, 2 * c2))
        return np.stack([np.stack([aa, ab], -2), np.stack([ab, bb], -2)], -3)

    return from_chart_map(f, df, ddf, lo=-half, hi=half)


@pytest.mark.parametrize("t", [0.2, 0.5, 1.0])
def test_equidistant_family(t):
    r = equidistant_report(t, 128)
    assert r["metric_residual"] < 1e-12
    assert r["shape_operator_residual"] < 1e-12
    assert r["symmetry_residual"] < 1e-12 and r["j_square_residual"] < 1e-12
    assert r["j_orthogonality_residual"] < 1e-12
    assert r["gauss_residual"] < 1e-5 and r["codazzi_residual"] < 1e-5
    assert 1.8 < r["gauss_convergence_order"] < 2.2
    assert max(r["left_curvature_residual"], r["right_curvature_residual"]) < 1e-4
    assert r["left_right_mismatch"] < 1e-8
    assert r["left_right_vs_hyperbolic"] < 1e-8


def test_core_plane_is_totally_geodesic():
    S = fuchsian_equidistant_surface(0.0)
    A, B, _ = S.grid(16)
    op = fundamental_forms(S, A, B)
    assert np.max(np.abs(op.b)) < 1e-14
    mp, mm = left_right_metrics(op)
    assert np.allclose(mp, op.s) and np.allclose(mm, op.s)


def test_brioschi_on_known_metrics():
    u = np.linspace(-0.2, 0.2, 65)
    A, B = np.meshgrid(u, u, indexing="ij")
    h = u[1] - u[0]
    flat = np.broadcast_to(np.eye(2), A.shape + (2, 2))
    assert np.max(np.abs(brioschi_curvature(np.array(flat), h))) < 1e-12
    K = brioschi_curvature(hyperbolic_fermi_metric(A, B), h)
    assert np.max(np.abs(K + 1)) < 1e-4


def test_generic_surface_satisfies_gauss_and_codazzi():
    S = _graph_surface()
    conv = convergence_order(S, (64, 128))
    assert conv["gauss"][1] < 1e-4 and conv["codazzi"][1] < 1e-4
    assert 1.8 < conv["order"] < 2.2
    # Codazzi refines at second order too on a surface with varying b
    assert 3.5 < conv["codazzi"][0] / conv["codazzi"][1] < 4.5
    lr = left_right_metrics_check(S, 128)
    assert max(lr.curvature_plus, lr.curvature_minus) < 1e-3
    # away from the Fuchsian family the two metrics differ
    assert lr.left_right_mismatch > 1e-2


def test_codazzi_detects_a_wrong_operator():
    S = fuchsian_equidistant_surface(0.5)
    clean = gauss_codazzi_residual(S)

    def bump(a, b):
        out = np.zeros(a.shape + (2, 2))
        out[..., 0, 0] = 0.1 * np.sin(20 * b)
        return out

    bad = gauss_codazzi_residual(S, b_perturbation=bump)
    assert clean.codazzi < 1e-8 < 1e-3 < bad.codazzi


def test_degenerate_operator():
    s = np.eye(2)[None]
    j = np.array([[[0.0, -1.0], [1.0, 0.0]]])
    b = np.array([[[1.0, 0.0], [0.0, -1.0]]])
    with pytest.raises(DegenerateOperator):
        left_right_metrics(OperatorSample(s, b, j, np.zeros((1, 3))))


def test_non_spacelike_surface():
    # a steep graph is timelike in the chart
    S = _graph_surface(c=(3.0, 0.0, 0.0), half=0.5)
    with pytest.raises(NonSpacelike):
        fundamental_forms(S, *S.grid(8)[:2])


def test_parameter_range():
    with pytest.raises(ValueError):
        fuchsian_equidistant_surface(2.0)
