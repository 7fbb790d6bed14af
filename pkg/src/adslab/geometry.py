"""Linear models of AdS^3 and Minkowski 3-space on a shared affine chart.

Points of AdS^3 are negative lines of R^{2,2} with the form diag(1, 1, -1, -1).
The chart is the affine plane {x4 = 1}; Minkowski space is the same plane with
the form diag(1, 1, -1).  The origin o = (0, 0, 0, 1) is the identity matrix in
the sl(2, R) model

    X = x4 I + x1 E1 + x2 E2 + x3 E3,    -det X = form(x, x),

with E1 = [[1, 0], [0, -1]], E2 = [[0, 1], [1, 0]], E3 = [[0, 1], [-1, 0]].
A pair (A, B) of SL(2, R) matrices acts by X -> A X B^{-1}.

Frozen Lie algebra bases (all coefficient vectors refer to these):

* g = sl2 + sl2: (E1, 0), (E2, 0), (E3, 0), (0, E1), (0, E2), (0, E3), where
  (X, Y) is the infinitesimal isometry P -> X P - P Y.
* g0 = so(2,1) + R^{2,1}: ad(E1), ad(E2), ad(E3) acting linearly on the chart,
  followed by the unit translations e1, e2, e3.
* g_F = so(2,1): ad(E1), ad(E2), ad(E3).  Inside g it is the diagonal
  (c, c); inside g0 it is (c, 0).

Time orientation.  In Minkowski space the future is increasing y3.  In AdS the
future is given by the timelike field (0, 0, -x4, x3), so at o it points to
decreasing x3.  With these choices the future side of the totally geodesic
plane dual to o is {x3 < 0} in AdS and {y3 > 0} in Minkowski.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import expm

from .errors import CausallyRelated, ChartUndefined, NonTimelikeVector

J22 = np.diag([1.0, 1.0, -1.0, -1.0])
J21 = np.diag([1.0, 1.0, -1.0])
ORIGIN = np.array([0.0, 0.0, 0.0, 1.0])

E1 = np.array([[1.0, 0.0], [0.0, -1.0]])
E2 = np.array([[0.0, 1.0], [1.0, 0.0]])
E3 = np.array([[0.0, 1.0], [-1.0, 0.0]])
SL2_BASIS = (E1, E2, E3)
I2 = np.eye(2)


def form22(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return x[..., 0] * y[..., 0] + x[..., 1] * y[..., 1] - x[..., 2] * y[..., 2] - x[..., 3] * y[..., 3]


def mink_form(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return x[..., 0] * y[..., 0] + x[..., 1] * y[..., 1] - x[..., 2] * y[..., 2]


def vec_to_sl2(x):
    """2x2 matrix of a vector of R^{2,2}."""
    x = np.asarray(x, dtype=float)
    return x[3] * I2 + x[0] * E1 + x[1] * E2 + x[2] * E3


def sl2_to_vec(X):
    X = np.asarray(X, dtype=float)
    return np.array([
        (X[0, 0] - X[1, 1]) / 2,
        (X[0, 1] + X[1, 0]) / 2,
        (X[0, 1] - X[1, 0]) / 2,
        (X[0, 0] + X[1, 1]) / 2,
    ])


def isometry_matrix(A, B):
    """4x4 matrix of X -> A X B^{-1} on R^{2,2}."""
    Binv = np.linalg.inv(B)
    return np.column_stack([sl2_to_vec(A @ vec_to_sl2(e) @ Binv) for e in np.eye(4)])


def lie_matrix(X, Y):
    """4x4 matrix of the infinitesimal isometry P -> X P - P Y."""
    return np.column_stack([sl2_to_vec(X @ vec_to_sl2(e) - vec_to_sl2(e) @ Y) for e in np.eye(4)])


def _affine(L, t):
    M = np.zeros((4, 4))
    M[:3, :3] = L
    M[:3, 3] = t
    return M


AD_BASIS = tuple(lie_matrix(E, E)[:3, :3] for E in SL2_BASIS)
G_BASIS = np.array(
    [lie_matrix(E, 0 * I2) for E in SL2_BASIS] + [lie_matrix(0 * I2, E) for E in SL2_BASIS]
)
G0_BASIS = np.array(
    [_affine(A, np.zeros(3)) for A in AD_BASIS] + [_affine(np.zeros((3, 3)), e) for e in np.eye(3)]
)
GF_BASIS = np.array([_affine(A, np.zeros(3)) for A in AD_BASIS])


def so21_of_sl2(A):
    """The SO(2,1) matrix of conjugation by A on the chart (diagonal isometry)."""
    return isometry_matrix(A, A)[:3, :3]


def chart_velocity(X, Xdot):
    """Chart velocity of a moving homogeneous point X(t) of R^4 with x4 != 0.

    Works on stacked arrays of shape (..., 4).
    """
    X = np.asarray(X, dtype=float)
    Xdot = np.asarray(Xdot, dtype=float)
    w = X[..., 3:4]
    return (Xdot[..., :3] - X[..., :3] / w * Xdot[..., 3:4]) / w


def homogeneous(y):
    y = np.asarray(y, dtype=float)
    return np.concatenate([y, np.ones(y.shape[:-1] + (1,))], axis=-1)


def dehomogenize(X):
    X = np.asarray(X, dtype=float)
    return X[..., :3] / X[..., 3:4]


@dataclass(frozen=True)
class TangentVec:
    base: np.ndarray
    vec: np.ndarray


@dataclass(frozen=True)
class AdSPoint:
    rep: np.ndarray
    chart: np.ndarray | None

    @property
    def chart_defined(self) -> bool:
        return self.chart is not None

    @property
    def in_chart_region(self) -> bool:
        return self.chart is not None and mink_form(self.chart, self.chart) < 1.0


def ads_point(x) -> AdSPoint:
    x = np.asarray(x, dtype=float)
    q = form22(x, x)
    if not q < 0:
        raise NonTimelikeVector(f"form value {q} is not negative")
    rep = x / np.sqrt(-q)
    if abs(rep[3]) < 1e-12:
        return AdSPoint(rep=rep, chart=None)
    if rep[3] < 0:
        rep = -rep
    return AdSPoint(rep=rep, chart=rep[:3] / rep[3])


@dataclass(frozen=True)
class AdSIsometry:
    """Element (A, B) of PSL(2,R) x PSL(2,R), acting by X -> A X B^{-1}."""

    left: np.ndarray
    right: np.ndarray

    @cached_property
    def mat4(self) -> np.ndarray:
        return isometry_matrix(self.left, self.right)

    def inverse(self) -> "AdSIsometry":
        return AdSIsometry(np.linalg.inv(self.left), np.linalg.inv(self.right))

    def __matmul__(self, other: "AdSIsometry") -> "AdSIsometry":
        return AdSIsometry(self.left @ other.left, self.right @ other.right)

    @staticmethod
    def identity() -> "AdSIsometry":
        return AdSIsometry(I2.copy(), I2.copy())


@dataclass(frozen=True)
class MinkIsometry:
    linear: np.ndarray
    translation: np.ndarray

    @cached_property
    def mat4(self) -> np.ndarray:
        return _affine(self.linear, self.translation) + np.diag([0.0, 0.0, 0.0, 1.0])

    def inverse(self) -> "MinkIsometry":
        Linv = np.linalg.inv(self.linear)
        return MinkIsometry(Linv, -Linv @ self.translation)

    def __matmul__(self, other: "MinkIsometry") -> "MinkIsometry":
        return MinkIsometry(self.linear @ other.linear, self.linear @ other.translation + self.translation)

    @staticmethod
    def identity() -> "MinkIsometry":
        return MinkIsometry(np.eye(3), np.zeros(3))


def apply_isometry(g, p):
    """Act on a point: AdSIsometry on AdSPoint or on a chart point, MinkIsometry on a chart point."""
    if isinstance(g, AdSIsometry):
        if isinstance(p, AdSPoint):
            return ads_point(g.mat4 @ p.rep)
        X = g.mat4 @ homogeneous(p)
        if abs(X[3]) < 1e-12:
            raise ChartUndefined("image leaves the chart")
        return X[:3] / X[3]
    if isinstance(g, MinkIsometry):
        if isinstance(p, AdSPoint):
            raise TypeError("Minkowski isometries act on chart points")
        return g.linear @ np.asarray(p, dtype=float) + g.translation
    raise TypeError(f"unsupported isometry {type(g).__name__}")


@dataclass(frozen=True)
class KillingField:
    geometry: str
    coeffs: np.ndarray

    def __post_init__(self):
        if self.geometry not in ("ads", "mink"):
            raise ValueError(f"unknown geometry {self.geometry!r}")
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=float).reshape(6))

    @property
    def matrix(self) -> np.ndarray:
        basis = G_BASIS if self.geometry == "ads" else G0_BASIS
        return np.tensordot(self.coeffs, basis, axes=1)

    def flow(self, t: float):
        """The isometry exp(t xi)."""
        M = expm(t * self.matrix)
        if self.geometry == "mink":
            return MinkIsometry(M[:3, :3], M[:3, 3])
        return _ads_isometry_from_coeffs(t * self.coeffs)


def _ads_isometry_from_coeffs(c):
    X = sum(ci * E for ci, E in zip(c[:3], SL2_BASIS))
    Y = sum(ci * E for ci, E in zip(c[3:], SL2_BASIS))
    return AdSIsometry(expm(X), expm(Y))


def killing_velocity(M, y):
    """Chart velocity of the field with 4x4 matrix M at chart points y (..., 3)."""
    X = homogeneous(y)
    return chart_velocity(X, X @ np.asarray(M).T)


def killing_eval(xi: KillingField, p) -> TangentVec:
    if isinstance(p, AdSPoint):
        if xi.geometry != "ads":
            raise TypeError("AdS point given to a Minkowski field")
        if p.chart is None:
            raise ChartUndefined("point is outside the chart")
        p = p.chart
    y = np.asarray(p, dtype=float)
    return TangentVec(base=y, vec=killing_velocity(xi.matrix, y))


def ads_distance_homogeneous(P, Q):
    """AdS length of the spacelike segment between homogeneous points (vectorized)."""
    a = form22(P, Q)
    b = form22(P, P)
    c = form22(Q, Q)
    if np.any(b >= 0) or np.any(c >= 0):
        raise NonTimelikeVector("endpoint is not in AdS")
    ch = np.abs(a) / np.sqrt(b * c)
    if np.any(ch < 1.0 - 1e-12):
        raise CausallyRelated("points are not joined by a spacelike geodesic")
    return np.arccosh(np.maximum(ch, 1.0))


def mink_distance(p, q):
    d = np.asarray(q, dtype=float) - np.asarray(p, dtype=float)
    n = mink_form(d, d)
    moved = np.linalg.norm(d, axis=-1) > 1e-14
    if np.any(np.logical_and(moved, n <= 0)):
        raise CausallyRelated("difference vector is not spacelike")
    return np.sqrt(np.maximum(n, 0.0))


def spacelike_distance(p, q, geometry: str):
    if geometry == "ads":
        P = p.rep if isinstance(p, AdSPoint) else homogeneous(p)
        Q = q.rep if isinstance(q, AdSPoint) else homogeneous(q)
        return float(ads_distance_homogeneous(P, Q))
    if geometry == "mink":
        return float(mink_distance(p, q))
    raise ValueError(f"unknown geometry {geometry!r}")


def cone_coords(p):
    """(in_cone, r) with r the Lorentzian distance from o; r is None outside the cone."""
    p = np.asarray(p, dtype=float)
    q = mink_form(p, p)
    if q < 0:
        return True, float(np.sqrt(-q))
    return False, None


def coeffs_of(M, basis):
    """Coefficients of a Lie algebra matrix in a frozen basis (least squares)."""
    B = np.asarray(basis).reshape(len(basis), -1).T
    c, *_ = np.linalg.lstsq(B, np.asarray(M).reshape(-1), rcond=None)
    return c
