"""Infinitesimal Pogorelov map on the timelike cone C of o.

For a chart point p in C and a vector v at p, split v into its radial part
(along p) and its lateral part (Minkowski-orthogonal to p) and set

    Phi(v) = v_r / (1 - <p, p>) + v_l,

where <p, p> = -r^2 is the Minkowski square of p.  This sends restrictions of
AdS Killing fields to restrictions of Minkowski Killing fields; the induced
linear map Psi : g -> g0 is fitted once on a fixed quasi-random sample.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm
from scipy.stats import qmc

from .errors import IllConditionedFit, LabError, NotFuchsian, OutsideCone
from .geometry import (
    G0_BASIS,
    G_BASIS,
    SL2_BASIS,
    KillingField,
    isometry_matrix,
    killing_velocity,
    mink_form,
)
from .surface_group import Cocycle, Representation, adjoint, is_fuchsian


class SingularRadius(LabError):
    """The rescaling factor 1 - <p, p> vanishes (never inside C)."""


@dataclass(frozen=True)
class RadialSplit:
    base: np.ndarray
    v_r: np.ndarray
    v_l: np.ndarray


def split_radial_lateral(p, v) -> RadialSplit:
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    q = mink_form(p, p)
    if not q < 0:
        raise OutsideCone(f"point {p.tolist()} is not timelike from o")
    v_r = (mink_form(v, p) / q) * p
    return RadialSplit(p, v_r, v - v_r)


def _factor(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    q = mink_form(p, p)
    if np.any(q >= 0):
        raise OutsideCone("point is not timelike from o")
    f = 1.0 - q
    if np.any(np.abs(f) < 1e-8):
        raise SingularRadius("rescaling factor vanishes")
    return f


def pogorelov_map(p, v, direction: str = "fwd") -> np.ndarray:
    """Phi (``fwd``) or its inverse (``inv``); vectorized over leading axes."""
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    f = _factor(p)
    q = mink_form(p, p)
    v_r = (mink_form(v, p) / q)[..., None] * p
    v_l = v - v_r
    if direction == "fwd":
        return v_r / np.asarray(f)[..., None] + v_l
    if direction == "inv":
        return v_r * np.asarray(f)[..., None] + v_l
    raise ValueError("direction must be 'fwd' or 'inv'")


def pogorelov_matrix(p, direction: str = "fwd") -> np.ndarray:
    """3x3 matrix of Phi at p."""
    return np.column_stack([pogorelov_map(p, e, direction) for e in np.eye(3)])


def cone_samples(n: int = 50, rmin: float = 0.05, rmax: float = 0.9, seed: int = 0) -> np.ndarray:
    """Deterministic quasi-random points of C with rmin < r < rmax on both nappes."""
    h = qmc.Halton(d=3, scramble=False, seed=seed)
    out = []
    while len(out) < n:
        u = h.random(1)[0]
        r = rmin + (rmax - rmin) * u[0]
        d = 2.0 * u[1]
        phi = 2 * np.pi * u[2]
        s = 1.0 if len(out) % 2 == 0 else -1.0
        out.append(r * np.array([np.sinh(d) * np.cos(phi), np.sinh(d) * np.sin(phi), s * np.cosh(d)]))
    return np.array(out)


def _killing_design(basis, samples):
    """Stacked chart velocities of each basis field: (3m, 6)."""
    return np.column_stack([killing_velocity(B, samples).ravel() for B in basis])


@dataclass(frozen=True)
class KillingFit:
    coeffs: np.ndarray
    residual: float


def _fit(design, target, cond_limit=1e8) -> KillingFit:
    sv = np.linalg.svd(design, compute_uv=False)
    if sv[-1] <= sv[0] / cond_limit:
        raise IllConditionedFit("sample points do not determine a Killing field")
    c, *_ = np.linalg.lstsq(design, target, rcond=None)
    nrm = np.linalg.norm(target)
    res = np.linalg.norm(design @ c - target) / nrm if nrm > 0 else 0.0
    return KillingFit(c, float(res))


def psi_killing(xi, samples=None) -> tuple[KillingField, float]:
    """Minkowski Killing field best matching Phi of the AdS field xi on samples."""
    samples = cone_samples() if samples is None else np.asarray(samples, dtype=float)
    if len(samples) < 6:
        raise IllConditionedFit("need at least six sample points")
    xi = xi if isinstance(xi, KillingField) else KillingField("ads", xi)
    v = killing_velocity(xi.matrix, samples)
    target = pogorelov_map(samples, v, "fwd").ravel()
    fit = _fit(_killing_design(G0_BASIS, samples), target)
    return KillingField("mink", fit.coeffs), fit.residual


def psi_inverse_killing(eta, samples=None) -> tuple[KillingField, float]:
    samples = cone_samples() if samples is None else np.asarray(samples, dtype=float)
    eta = eta if isinstance(eta, KillingField) else KillingField("mink", eta)
    v = killing_velocity(eta.matrix, samples)
    target = pogorelov_map(samples, v, "inv").ravel()
    fit = _fit(_killing_design(G_BASIS, samples), target)
    return KillingField("ads", fit.coeffs), fit.residual


@dataclass(frozen=True)
class PsiData:
    matrix: np.ndarray
    residuals: np.ndarray
    condition_number: float


@lru_cache(maxsize=1)
def psi_data() -> PsiData:
    cols, res = [], []
    for e in np.eye(6):
        eta, r = psi_killing(e)
        cols.append(eta.coeffs)
        res.append(r)
    M = np.column_stack(cols)
    M.setflags(write=False)
    return PsiData(M, np.array(res), float(np.linalg.cond(M)))


def psi_matrix() -> np.ndarray:
    return psi_data().matrix


def psi_cocycle(tau: Cocycle) -> Cocycle:
    if tau.module != "g":
        raise ValueError("Psi acts on g-valued cocycles")
    return Cocycle("g0", tau.values @ psi_matrix().T)


# ------------------------------------------------------- configurations


@dataclass(frozen=True)
class DeformationVector:
    """A cocycle plus one chart velocity per marked vertex, for each surface."""

    cocycle: Cocycle
    velocities: tuple

    def __post_init__(self):
        vs = tuple(np.array(v, dtype=float).reshape(-1, 3) for v in self.velocities)
        object.__setattr__(self, "velocities", vs)

    def scaled(self, a: float) -> "DeformationVector":
        return DeformationVector(Cocycle(self.cocycle.module, a * self.cocycle.values),
                                 tuple(a * v for v in self.velocities))


def transfer_deformation(configs, d: DeformationVector) -> DeformationVector:
    """Move an AdS deformation at the Fuchsian locus to Minkowski space.

    ``configs`` is one AdS MarkedConfig or a sequence of them sharing rho; the
    velocities of surface s are mapped by Phi at the vertices of configs[s].
    """
    configs = list(configs) if isinstance(configs, (list, tuple)) else [configs]
    for c in configs:
        if c.geometry != "ads":
            raise ValueError("transfer starts from AdS configurations")
        if not is_fuchsian(c.rho):
            raise NotFuchsian("the transfer is defined at the Fuchsian locus only")
    vel = tuple(pogorelov_map(c.vertices, v, "fwd") for c, v in zip(configs, d.velocities))
    return DeformationVector(psi_cocycle(d.cocycle), vel)


def intertwining_residual(rng, trials: int = 100, rho_f: Representation | None = None) -> float:
    """Largest mismatch |Psi Ad(g) xi - Ad0(g) Psi xi| over random g in G_F.

    The mismatch is measured relative to |Ad(g)| |xi|, the scale at which the
    adjoint matrices themselves carry rounding error.  With ``rho_f`` the
    elements are images of random words of length 1 to 4, otherwise
    exponentials of random sl2 elements.
    """
    from .words import random_word

    P = psi_matrix()
    worst = 0.0
    for _ in range(trials):
        if rho_f is None:
            A = expm(sum(c * E for c, E in zip(rng.normal(size=3), SL2_BASIS)))
            g = isometry_matrix(A, A)
        else:
            g = rho_f.image(random_word(rng, rho_f.genus, int(rng.integers(1, 5))))
        xi = rng.normal(size=6)
        Ad = adjoint("g", g)
        lhs = P @ Ad @ xi
        rhs = adjoint("g0", g) @ P @ xi
        worst = max(worst, np.linalg.norm(lhs - rhs) / (np.linalg.norm(Ad, 2) * np.linalg.norm(xi)))
    return float(worst)
