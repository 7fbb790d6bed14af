"""Fundamental forms of smooth spacelike surfaces in AdS^3 and their checks.

A surface is given by a homogeneous lift Y(a, b) in R^{2,2} with analytic
first and second derivatives, sampled on a square grid.  Normalising
X = Y / sqrt(-<Y, Y>) gives

    s_ij = <X_i, X_j>,   II_ij = -<X_ij, N> = -lambda <Y_ij, N>,   b = s^-1 II,

with N the future unit normal, so that b is the derivative of N (b(v) = D_v N).
Curvatures of 2x2 metrics on the grid use the Brioschi formula with second
order finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DegenerateOperator, NonSpacelike
from .geometry import J22, form22


@dataclass
class ParamSurface:
    """Lift callback (a, b arrays) -> (Y (...,4), dY (...,2,4), ddY (...,2,2,4))."""

    lift: Callable
    lo: float = -0.1
    hi: float = 0.1
    resolution: int = 128
    name: str = "surface"
    params: dict = field(default_factory=dict)

    def grid(self, resolution: int | None = None):
        r = resolution or self.resolution
        u = np.linspace(self.lo, self.hi, r)
        A, B = np.meshgrid(u, u, indexing="ij")
        return A, B, u[1] - u[0]

    def chart(self, a, b) -> np.ndarray:
        Y, _, _ = self.lift(np.asarray(a, float), np.asarray(b, float))
        return Y[..., :3] / Y[..., 3:4]


def from_chart_map(f, df, ddf, **kw) -> ParamSurface:
    """Surface from a chart map y(a, b) in the affine chart {x4 = 1} and its derivatives."""

    def lift(a, b):
        y, dy, ddy = f(a, b), df(a, b), ddf(a, b)
        one = np.ones(y.shape[:-1] + (1,))
        Y = np.concatenate([y, one], axis=-1)
        dY = np.concatenate([dy, np.zeros(dy.shape[:-1] + (1,))], axis=-1)
        ddY = np.concatenate([ddy, np.zeros(ddy.shape[:-1] + (1,))], axis=-1)
        return Y, dY, ddY

    return ParamSurface(lift, **kw)


def fuchsian_equidistant_surface(t: float, resolution: int = 128, half_width: float = 0.1) -> ParamSurface:
    """Points at timelike distance t on the past side of the plane {x3 = 0}.

    Fermi coordinates (a, b) on the plane: u = (sinh a cosh b, sinh b, 0, cosh a cosh b),
    and the surface is cos t u + sin t e3.
    """
    if not 0 <= t < np.pi / 2:
        raise ValueError("t must lie in [0, pi/2)")
    ct, st = np.cos(t), np.sin(t)

    def lift(a, b):
        sa, ca, sb, cb = np.sinh(a), np.cosh(a), np.sinh(b), np.cosh(b)
        z = np.zeros_like(a)
        Y = np.stack([ct * sa * cb, ct * sb, st + z, ct * ca * cb], axis=-1)
        Ya = np.stack([ct * ca * cb, z, z, ct * sa * cb], axis=-1)
        Yb = np.stack([ct * sa * sb, ct * cb, z, ct * ca * sb], axis=-1)
        Yaa = np.stack([ct * sa * cb, z, z, ct * ca * cb], axis=-1)
        Yab = np.stack([ct * ca * sb, z, z, ct * sa * sb], axis=-1)
        Ybb = np.stack([ct * sa * cb, ct * sb, z, ct * ca * cb], axis=-1)
        dY = np.stack([Ya, Yb], axis=-2)
        ddY = np.stack([np.stack([Yaa, Yab], axis=-2), np.stack([Yab, Ybb], axis=-2)], axis=-3)
        return Y, dY, ddY

    return ParamSurface(lift, -half_width, half_width, resolution, "equidistant", {"t": t})


def hyperbolic_fermi_metric(a, b) -> np.ndarray:
    """Metric of H^2 in Fermi coordinates: diag(cosh^2 b, 1)."""
    out = np.zeros(np.shape(a) + (2, 2))
    out[..., 0, 0] = np.cosh(b) ** 2
    out[..., 1, 1] = 1.0
    return out


@dataclass
class OperatorSample:
    s: np.ndarray  # (..., 2, 2)
    b: np.ndarray
    j: np.ndarray
    points: np.ndarray  # chart points (..., 3)

    def symmetry_residual(self) -> float:
        sb = self.s @ self.b
        return float(np.max(np.abs(sb - np.swapaxes(sb, -1, -2))))

    def j_square_residual(self) -> float:
        return float(np.max(np.abs(self.j @ self.j + np.eye(2))))

    def j_orthogonality_residual(self) -> float:
        jt = np.swapaxes(self.j, -1, -2)
        return float(np.max(np.abs(jt @ self.s @ self.j - self.s)))


def _time_field(X):
    return np.stack([np.zeros_like(X[..., 0]), np.zeros_like(X[..., 0]), -X[..., 3], X[..., 2]], axis=-1)


def _normal(Y, dY):
    """Future unit normal to the surface inside AdS (orthogonal to Y and both Y_i)."""
    M = np.stack([Y, dY[..., 0, :], dY[..., 1, :]], axis=-2)  # (..., 3, 4)
    # Euclidean vector orthogonal to the three rows, by cofactors
    cof = np.stack([
        (-1) ** k * np.linalg.det(np.delete(M, k, axis=-1)) for k in range(4)
    ], axis=-1)
    N = cof @ J22
    q = form22(N, N)
    if np.any(q >= 0):
        raise NonSpacelike("surface is not spacelike on the grid")
    N = N / np.sqrt(-q)[..., None]
    X = Y / np.sqrt(-form22(Y, Y))[..., None]
    sign = np.where(form22(N, _time_field(X)) < 0, 1.0, -1.0)
    return N * sign[..., None]


def fundamental_forms(surface: ParamSurface, a, b) -> OperatorSample:
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    Y, dY, ddY = surface.lift(a, b)
    q = form22(Y, Y)
    if np.any(q >= 0):
        raise NonSpacelike("lift leaves AdS")
    lam = 1.0 / np.sqrt(-q)
    lam_i = lam[..., None] ** 3 * form22(Y[..., None, :], dY)  # (..., 2)
    X_i = lam_i[..., None] * Y[..., None, :] + lam[..., None, None] * dY
    s = form22(X_i[..., :, None, :], X_i[..., None, :, :])
    if np.any(np.linalg.det(s) <= 0) or np.any(s[..., 0, 0] <= 0):
        raise NonSpacelike("induced form is not positive definite")
    N = _normal(Y, dY)
    II = -lam[..., None, None] * form22(ddY, N[..., None, None, :])
    bmat = np.linalg.solve(s, II)
    det = np.sqrt(np.linalg.det(s))
    jm = np.empty_like(s)
    jm[..., 0, 0] = -s[..., 0, 1]
    jm[..., 0, 1] = -s[..., 1, 1]
    jm[..., 1, 0] = s[..., 0, 0]
    jm[..., 1, 1] = s[..., 0, 1]
    jm /= det[..., None, None]
    return OperatorSample(s, bmat, jm, Y[..., :3] / Y[..., 3:4])


# ------------------------------------------------------------- curvature


def _d(f, h, axis):
    """First derivative: central in the interior, third-order one-sided at the ends."""
    f = np.moveaxis(f, axis, 0)
    out = np.empty_like(f)
    out[1:-1] = (f[2:] - f[:-2]) / 2
    out[0] = (-11 * f[0] + 18 * f[1] - 9 * f[2] + 2 * f[3]) / 6
    out[-1] = (11 * f[-1] - 18 * f[-2] + 9 * f[-3] - 2 * f[-4]) / 6
    return np.moveaxis(out / h, 0, axis)


def _dd(f, h, axis):
    """Second derivative: central in the interior, third-order one-sided at the ends."""
    f = np.moveaxis(f, axis, 0)
    out = np.empty_like(f)
    out[1:-1] = f[2:] - 2 * f[1:-1] + f[:-2]
    out[0] = (35 * f[0] - 104 * f[1] + 114 * f[2] - 56 * f[3] + 11 * f[4]) / 12
    out[-1] = (35 * f[-1] - 104 * f[-2] + 114 * f[-3] - 56 * f[-4] + 11 * f[-5]) / 12
    return np.moveaxis(out / h ** 2, 0, axis)


def brioschi_curvature(g: np.ndarray, h: float) -> np.ndarray:
    """Gaussian curvature of a metric sampled on a uniform grid, shape (r, r, 2, 2)."""
    E, F, G = g[..., 0, 0], g[..., 0, 1], g[..., 1, 1]
    Eu, Ev = _d(E, h, 0), _d(E, h, 1)
    Fu, Fv = _d(F, h, 0), _d(F, h, 1)
    Gu, Gv = _d(G, h, 0), _d(G, h, 1)
    Evv = _dd(E, h, 1)
    Guu = _dd(G, h, 0)
    Fuv = _d(Fu, h, 1)
    A = np.zeros(E.shape + (3, 3))
    A[..., 0, 0] = -0.5 * Evv + Fuv - 0.5 * Guu
    A[..., 0, 1] = 0.5 * Eu
    A[..., 0, 2] = Fu - 0.5 * Ev
    A[..., 1, 0] = Fv - 0.5 * Gu
    A[..., 1, 1] = E
    A[..., 1, 2] = F
    A[..., 2, 0] = 0.5 * Gv
    A[..., 2, 1] = F
    A[..., 2, 2] = G
    B = np.zeros(E.shape + (3, 3))
    B[..., 0, 1] = 0.5 * Ev
    B[..., 0, 2] = 0.5 * Gu
    B[..., 1, 0] = 0.5 * Ev
    B[..., 1, 1] = E
    B[..., 1, 2] = F
    B[..., 2, 0] = 0.5 * Gu
    B[..., 2, 1] = F
    B[..., 2, 2] = G
    return (np.linalg.det(A) - np.linalg.det(B)) / (E * G - F * F) ** 2


def christoffel(g: np.ndarray, h: float) -> np.ndarray:
    """Gamma[..., k, i, j] of a grid metric."""
    dg = np.stack([_d(g, h, 0), _d(g, h, 1)], axis=-3)  # (..., l, i, j): d_l g_ij
    ginv = np.linalg.inv(g)
    # Gamma_kij = 1/2 g^kl (d_i g_lj + d_j g_li - d_l g_ij)
    t = 0.5 * (np.swapaxes(dg, -3, -2) + np.moveaxis(dg, -3, -1) - dg)  # (..., l, i, j)
    return np.einsum("...kl,...lij->...kij", ginv, t)


def codazzi_defect(bmat: np.ndarray, g: np.ndarray, h: float) -> np.ndarray:
    """Pointwise (d^nabla b)(d_1, d_2) as a vector field, shape (r, r, 2)."""
    Gam = christoffel(g, h)
    d1b2 = _d(bmat[..., :, 1], h, 0)
    d2b1 = _d(bmat[..., :, 0], h, 1)
    t1 = np.einsum("...km,...m->...k", Gam[..., :, 0, :], bmat[..., :, 1])
    t2 = np.einsum("...km,...m->...k", Gam[..., :, 1, :], bmat[..., :, 0])
    return d1b2 - d2b1 + t1 - t2


@dataclass
class GaussCodazziReport:
    resolution: int
    step: float
    gauss: float
    codazzi: float
    symmetry: float
    j_square: float

    def as_dict(self):
        return dict(self.__dict__)


def gauss_codazzi_residual(surface: ParamSurface, resolution: int | None = None,
                           b_perturbation: Callable | None = None) -> GaussCodazziReport:
    A, B, h = surface.grid(resolution)
    op = fundamental_forms(surface, A, B)
    bmat = op.b if b_perturbation is None else op.b + b_perturbation(A, B)
    kappa = brioschi_curvature(op.s, h)
    gauss = np.max(np.abs(np.linalg.det(bmat) + kappa + 1.0))
    cod = np.max(np.linalg.norm(codazzi_defect(bmat, op.s, h), axis=-1))
    return GaussCodazziReport(A.shape[0], float(h), float(gauss), float(cod),
                              op.symmetry_residual(), op.j_square_residual())


def convergence_order(surface: ParamSurface, resolutions=(64, 128)) -> dict:
    """Observed order of the Gauss residual under grid refinement."""
    r = [gauss_codazzi_residual(surface, n) for n in resolutions]
    g = [x.gauss for x in r]
    hs = [x.step for x in r]
    order = float(np.log(g[0] / g[1]) / np.log(hs[0] / hs[1])) if g[1] > 0 and g[0] > 0 else float("nan")
    return {"resolutions": list(resolutions), "gauss": g, "codazzi": [x.codazzi for x in r], "order": order}


def left_right_metrics(op: OperatorSample):
    I = np.eye(2)
    out = []
    for sgn in (1.0, -1.0):
        T = I + sgn * op.j @ op.b
        if np.any(np.abs(np.linalg.det(T)) < 1e-8):
            raise DegenerateOperator("id +- jb is singular on the grid")
        out.append(np.swapaxes(T, -1, -2) @ op.s @ T)
    return out[0], out[1]


@dataclass
class LeftRightReport:
    resolution: int
    curvature_plus: float
    curvature_minus: float
    left_right_mismatch: float
    reference_mismatch: float | None

    def as_dict(self):
        return dict(self.__dict__)


def left_right_metrics_check(surface: ParamSurface, resolution: int | None = None,
                             reference: Callable | None = None) -> LeftRightReport:
    """Curvatures of s((id +- jb).,(id +- jb).) and their mutual agreement.

    ``reference`` (a, b) -> metric, if given, is compared with both metrics.
    """
    A, B, h = surface.grid(resolution)
    op = fundamental_forms(surface, A, B)
    mp, mm = left_right_metrics(op)
    kp = brioschi_curvature(mp, h)
    km = brioschi_curvature(mm, h)
    ref = None
    if reference is not None:
        R = reference(A, B)
        ref = float(max(np.max(np.abs(mp - R)), np.max(np.abs(mm - R))))
    return LeftRightReport(A.shape[0], float(np.max(np.abs(kp + 1))), float(np.max(np.abs(km + 1))),
                           float(np.max(np.abs(mp - mm))), ref)


def equidistant_report(t: float, resolution: int = 128) -> dict:
    """All smooth checks on one member of the equidistant family."""
    S = fuchsian_equidistant_surface(t, resolution)
    A, B, _ = S.grid()
    op = fundamental_forms(S, A, B)
    hyp = hyperbolic_fermi_metric(A, B)
    gc = gauss_codazzi_residual(S)
    lr = left_right_metrics_check(S, reference=hyperbolic_fermi_metric)
    conv = convergence_order(S, (resolution // 2, resolution))
    return {
        "t": t,
        "resolution": resolution,
        "metric_residual": float(np.max(np.abs(op.s - np.cos(t) ** 2 * hyp))),
        "shape_operator_residual": float(np.max(np.abs(op.b - np.tan(t) * np.eye(2)))),
        "symmetry_residual": op.symmetry_residual(),
        "j_square_residual": op.j_square_residual(),
        "j_orthogonality_residual": op.j_orthogonality_residual(),
        "gauss_residual": gc.gauss,
        "codazzi_residual": gc.codazzi,
        "gauss_convergence_order": conv["order"],
        "gauss_residual_coarse": conv["gauss"][0],
        "left_curvature_residual": lr.curvature_plus,
        "right_curvature_residual": lr.curvature_minus,
        "left_right_mismatch": lr.left_right_mismatch,
        "left_right_vs_hyperbolic": lr.reference_mismatch,
    }
