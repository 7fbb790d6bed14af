"""Surface-group representations into G_F, G and G0, and their cocycle calculus.

Group elements are stored as 4x4 matrices acting on homogeneous coordinates of
R^{2,2} (for G_F and G) or on (y, 1) for the affine group G0.  The Fuchsian
group G_F sits in both as block-diag(L, 1) with L in SO(2,1); these matrices do
not see the sign ambiguity of PSL(2,R), so no lift has to be chosen.

Cocycle convention: for rho_t = exp(t tau) rho we get
tau(g1 g2) = tau(g1) + Ad(rho(g1)) tau(g2).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm, logm
from scipy.optimize import least_squares

from . import words as W
from .config import DEFAULT_TOL, Tolerances
from .errors import NewtonDivergence, RankAmbiguous
from .geometry import AD_BASIS, G0_BASIS, G_BASIS, GF_BASIS, J21, J22, isometry_matrix

TARGETS = ("G_F", "G", "G0")
MODULES = ("g_F", "g", "g0", "R21")

_LIE_BASIS = {"g_F": GF_BASIS, "g": G_BASIS, "g0": G0_BASIS}
_TARGET_MODULE = {"G_F": "g_F", "G": "g", "G0": "g0"}


@dataclass(frozen=True)
class SurfacePresentation:
    genus: int

    @property
    def ngens(self) -> int:
        return 2 * self.genus

    @property
    def relator(self) -> tuple:
        return W.relator(self.genus)

    @property
    def generator_names(self) -> list[str]:
        return [f"{c}{j + 1}" for j in range(self.genus) for c in "ab"]


@dataclass(frozen=True)
class Representation:
    target: str
    genus: int
    mats: np.ndarray
    relation_residual: float

    def __post_init__(self):
        if self.target not in TARGETS:
            raise ValueError(f"unknown target {self.target!r}")
        m = np.array(self.mats, dtype=float)
        m.setflags(write=False)
        object.__setattr__(self, "mats", m)

    @property
    def ngens(self) -> int:
        return 2 * self.genus

    def image(self, w) -> np.ndarray:
        return W.evaluate(self.mats, w)

    def to_json(self) -> dict:
        return {
            "target": self.target,
            "genus": self.genus,
            "generators": self.mats.tolist(),
            "relation_residual": self.relation_residual,
        }


def relator_image(mats, k: int) -> np.ndarray:
    return W.evaluate(mats, W.relator(k))


def relation_residual(mats, k: int) -> float:
    """Relative mismatch between the two halves of the relator.

    Comparing the halves instead of the full product against the identity
    keeps rounding from the long matrix product out of the measurement.
    """
    r = W.relator(k)
    h = len(r) // 2
    P1 = W.evaluate(mats, r[:h])
    P2 = W.evaluate(mats, W.inverse(r[h:]))
    return float(np.linalg.norm(P1 - P2) / np.linalg.norm(P1))


def make_representation(target: str, k: int, mats) -> Representation:
    mats = np.asarray(mats, dtype=float)
    return Representation(target, k, mats, relation_residual(mats, k))


@lru_cache(maxsize=None)
def build_fuchsian_rep(k: int) -> Representation:
    if k < 2:
        raise ValueError("genus must be at least 2")
    mats = np.array([isometry_matrix(A, A) for A in W.fuchsian_sl2(k)])
    return make_representation("G_F", k, mats)


def as_target(rho: Representation, target: str) -> Representation:
    """View a Fuchsian representation inside G or G0 (same matrices)."""
    if rho.target == target:
        return rho
    if rho.target != "G_F":
        raise ValueError(f"cannot view a {rho.target} representation in {target}")
    return Representation(target, rho.genus, rho.mats, rho.relation_residual)


def evaluate_word(rho: Representation, w) -> np.ndarray:
    return rho.image(w)


def is_fuchsian(rho: Representation, tol: float = 1e-9) -> bool:
    """True when every image fixes o and is block diagonal."""
    e4 = np.array([0.0, 0.0, 0.0, 1.0])
    for M in rho.mats:
        if np.linalg.norm(M @ e4 - e4) > tol or np.linalg.norm(M[3, :3]) > tol:
            return False
    return True


# ----------------------------------------------------------------- modules


def module_dim(module: str) -> int:
    return {"g_F": 3, "g": 6, "g0": 6, "R21": 3}[module]


def _check_module(rho: Representation, module: str):
    allowed = {
        "G_F": ("g_F", "g", "g0", "R21"),
        "G": ("g",),
        "G0": ("g0", "R21"),
    }[rho.target]
    if module not in allowed:
        raise ValueError(f"module {module} is not compatible with target {rho.target}")


@lru_cache(maxsize=None)
def _basis_pinv(module: str):
    B = _LIE_BASIS[module].reshape(len(_LIE_BASIS[module]), -1).T
    return np.linalg.pinv(B)


def lie_coeffs(module: str, M) -> np.ndarray:
    M = np.asarray(M)
    return M.reshape(M.shape[:-2] + (16,)) @ _basis_pinv(module).T


def lie_matrix_of(module: str, c) -> np.ndarray:
    if module == "R21":
        raise ValueError("R21 is not a Lie algebra module")
    return np.tensordot(np.asarray(c, dtype=float), _LIE_BASIS[module], axes=([-1], [0]))


def group_inverse(module: str, g) -> np.ndarray:
    """Inverse of a group element through its invariant form (no pivoting error).

    Elements of G and G_F preserve diag(1, 1, -1, -1); elements of G0 are affine
    with linear part preserving diag(1, 1, -1).
    """
    g = np.asarray(g)
    if module in ("g", "g_F"):
        return J22 @ g.T @ J22
    Linv = J21 @ g[:3, :3].T @ J21
    out = np.eye(4)
    out[:3, :3] = Linv
    out[:3, 3] = -Linv @ g[:3, 3]
    return out


def adjoint(module: str, g) -> np.ndarray:
    """Matrix of the action of the group element g (4x4) on the module."""
    g = np.asarray(g)
    if module == "R21":
        return g[:3, :3].copy()
    basis = _LIE_BASIS[module]
    ginv = group_inverse(module, g)
    return np.column_stack([lie_coeffs(module, g @ B @ ginv) for B in basis])


@dataclass(frozen=True)
class Cocycle:
    """One module element per generator, shape (2k, dim)."""

    module: str
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)

    @staticmethod
    def from_flat(module: str, k: int, x) -> "Cocycle":
        return Cocycle(module, np.asarray(x, dtype=float).reshape(2 * k, module_dim(module)))


def word_derivative(rho: Representation, module: str, w) -> np.ndarray:
    """Linear map from generator values (flattened) to tau(w) under the cocycle rule."""
    d = module_dim(module)
    n = rho.ngens
    D = np.zeros((d, n * d))
    prefix = np.eye(4)
    invs = {}
    for x in w:
        i = abs(x) - 1
        A = adjoint(module, prefix)
        if x > 0:
            D[:, i * d:(i + 1) * d] += A
            prefix = prefix @ rho.mats[i]
        else:
            if i not in invs:
                invs[i] = np.linalg.inv(rho.mats[i])
            # tau(g^-1) = -Ad(g^-1) tau(g)
            D[:, i * d:(i + 1) * d] -= A @ adjoint(module, invs[i])
            prefix = prefix @ invs[i]
    return D


def cocycle_eval(rho: Representation, tau: Cocycle, w) -> np.ndarray:
    return word_derivative(rho, tau.module, w) @ tau.flat


def relator_jacobian(rho: Representation, module: str) -> np.ndarray:
    return word_derivative(rho, module, W.relator(rho.genus))


def cocycle_identity_residual(rho: Representation, tau: Cocycle, w1, w2) -> float:
    lhs = cocycle_eval(rho, tau, W.concat(w1, w2))
    rhs = cocycle_eval(rho, tau, w1) + adjoint(tau.module, rho.image(w1)) @ cocycle_eval(rho, tau, w2)
    return float(np.linalg.norm(lhs - rhs))


def relator_defect(rho: Representation, tau: Cocycle) -> float:
    return float(np.linalg.norm(relator_jacobian(rho, tau.module) @ tau.flat))


def coboundary(rho: Representation, x, module: str) -> Cocycle:
    _check_module(rho, module)
    x = np.asarray(x, dtype=float)
    vals = np.array([adjoint(module, M) @ x - x for M in rho.mats])
    return Cocycle(module, vals)


def coboundary_matrix(rho: Representation, module: str) -> np.ndarray:
    """Columns: coboundaries of the module basis, flattened."""
    d = module_dim(module)
    return np.column_stack([coboundary(rho, e, module).flat for e in np.eye(d)])


@dataclass(frozen=True)
class RankDecision:
    rank: int
    singular_values: np.ndarray
    cutoff: float
    gap_factor: float


def decide_rank(sv, tol: Tolerances = DEFAULT_TOL, what: str = "matrix") -> RankDecision:
    """Rank at a relative cutoff; refuse when a singular value sits near the cutoff."""
    sv = np.sort(np.asarray(sv, dtype=float))[::-1]
    if sv.size == 0 or sv[0] == 0:
        return RankDecision(0, sv, 0.0, np.inf)
    cutoff = tol.rank_rel * sv[0]
    band = tol.ambiguity_factor
    near = (sv > cutoff / band) & (sv < cutoff * band)
    if np.any(near):
        raise RankAmbiguous(
            f"{what}: singular value(s) {sv[near].tolist()} within a factor {band} of cutoff {cutoff:.3e}",
            singular_values=sv.tolist(),
            cutoff=cutoff,
        )
    rank = int(np.sum(sv > cutoff))
    below = sv[rank] if rank < sv.size else 0.0
    gap = sv[rank - 1] / max(below, cutoff) if rank > 0 else np.inf
    return RankDecision(rank, sv, cutoff, float(gap))


def numerical_kernel(A, tol: Tolerances = DEFAULT_TOL, what: str = "matrix"):
    """Orthonormal kernel basis (columns) and the rank decision."""
    A = np.asarray(A, dtype=float)
    _, s, Vt = np.linalg.svd(A, full_matrices=True)
    dec = decide_rank(s, tol, what)
    return Vt[dec.rank:].T, dec


@dataclass(frozen=True)
class CohomologyData:
    module: str
    z1: np.ndarray  # orthonormal columns in generator-tuple space
    b1: np.ndarray  # orthonormal columns
    h1: np.ndarray  # orthonormal complement of b1 inside z1
    relator_rank: RankDecision
    coboundary_rank: RankDecision

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.z1.shape[1], self.b1.shape[1], self.h1.shape[1]

    @property
    def h1_dim(self) -> int:
        return self.h1.shape[1]


def z1_basis(rho: Representation, module: str, tol: Tolerances = DEFAULT_TOL) -> CohomologyData:
    _check_module(rho, module)
    z1, dec = numerical_kernel(relator_jacobian(rho, module), tol, f"linearized relator ({module})")
    C = coboundary_matrix(rho, module)
    U, s, _ = np.linalg.svd(C, full_matrices=False)
    bdec = decide_rank(s, tol, f"coboundaries ({module})")
    b1 = U[:, :bdec.rank]
    # complement of B1 in Z1
    P = z1.T @ b1
    Uz, sz, _ = np.linalg.svd(P, full_matrices=True)
    h1 = z1 @ Uz[:, bdec.rank:]
    return CohomologyData(module, z1, b1, h1, dec, bdec)


# ------------------------------------------------------------- deformation


def _target_module(rho: Representation, direction: Cocycle) -> str:
    if direction.module == "g_F":
        if rho.target != "G_F":
            raise ValueError("g_F directions need a Fuchsian representation")
        return "G_F"
    if direction.module == "g":
        if rho.target not in ("G_F", "G"):
            raise ValueError("g directions need an AdS representation")
        return "G"
    if direction.module == "g0":
        if rho.target not in ("G_F", "G0"):
            raise ValueError("g0 directions need a Minkowski representation")
        return "G0"
    raise ValueError(f"{direction.module} is not a Lie algebra module")


def newton_project(target: str, k: int, mats, max_iter: int = 50, tol: float = 1e-13) -> Representation:
    """Minimum-norm Newton iteration onto the relation variety.

    Stops once the residual is below ``tol`` or has stopped improving (the
    floating-point floor); fails if the best iterate is still above 1e-9.
    """
    module = _TARGET_MODULE[target]
    d = module_dim(module)
    mats = np.array(mats, dtype=float)
    best = make_representation(target, k, mats)
    stall = 0
    for _ in range(max_iter):
        if best.relation_residual < tol or stall >= 3:
            break
        R = relator_image(mats, k)
        r = lie_coeffs(module, np.real(logm(R)))
        Jm = relator_jacobian(Representation(target, k, mats, best.relation_residual), module)
        delta = -np.linalg.lstsq(Jm, r, rcond=None)[0]
        for i in range(2 * k):
            mats[i] = expm(lie_matrix_of(module, delta[i * d:(i + 1) * d])) @ mats[i]
        if not np.all(np.isfinite(mats)):
            break
        rep = make_representation(target, k, mats)
        if rep.relation_residual < best.relation_residual:
            stall = stall + 1 if rep.relation_residual > 0.5 * best.relation_residual else 0
            best = rep
        elif best.relation_residual < 1e-10:
            stall += 1
        if best.relation_residual > 1e-10:
            stall = 0
    if best.relation_residual < 1e-9:
        return best
    raise NewtonDivergence(f"relator residual {best.relation_residual:.3e} after {max_iter} iterations")


def deform_rep(rho: Representation, direction: Cocycle, step: float) -> Representation:
    target = _target_module(rho, direction)
    if step == 0:
        return Representation(target, rho.genus, rho.mats, rho.relation_residual)
    mats = np.array([
        expm(step * lie_matrix_of(direction.module, v)) @ M for v, M in zip(direction.values, rho.mats)
    ])
    return newton_project(target, rho.genus, mats)


@dataclass(frozen=True)
class ConjugationFit:
    residual: float
    coeffs: np.ndarray
    conjugator: np.ndarray


def conjugation_fit(rho1: Representation, rho2: Representation, module: str | None = None) -> ConjugationFit:
    """Least-squares h with h rho1 h^-1 close to rho2; residual is the Frobenius misfit."""
    module = module or _TARGET_MODULE[rho2.target if rho2.target != "G_F" else rho1.target]
    d = module_dim(module)

    def f(c):
        h = expm(lie_matrix_of(module, c))
        hinv = np.linalg.inv(h)
        return np.concatenate([(h @ A @ hinv - B).ravel() for A, B in zip(rho1.mats, rho2.mats)])

    sol = least_squares(f, np.zeros(d), xtol=1e-15, ftol=1e-15, gtol=1e-15)
    h = expm(lie_matrix_of(module, sol.x))
    return ConjugationFit(float(np.linalg.norm(sol.fun)), sol.x, h)


# --------------------------------------------------- cross-product module


@dataclass(frozen=True)
class CrossProductIso:
    """Linear isomorphism R^{2,1} -> g_F, v |-> (w |-> v x w) in ad-coordinates."""

    matrix: np.ndarray

    @property
    def inverse(self) -> np.ndarray:
        return np.linalg.inv(self.matrix)

    @property
    def condition_number(self) -> float:
        return float(np.linalg.cond(self.matrix))

    def __call__(self, v):
        return self.matrix @ np.asarray(v, dtype=float)


def mink_cross(u, v):
    """Minkowski cross product, Minkowski-orthogonal to both factors."""
    return J21 @ np.cross(u, v)


def cross_product_iso(rho_f: Representation | None = None) -> CrossProductIso:
    if rho_f is not None and not is_fuchsian(rho_f):
        raise ValueError("cross-product isomorphism is defined at the Fuchsian locus")
    B = np.array(AD_BASIS).reshape(3, 9).T
    cols = []
    for e in np.eye(3):
        M = np.column_stack([mink_cross(e, w) for w in np.eye(3)])
        c, *_ = np.linalg.lstsq(B, M.reshape(-1), rcond=None)
        cols.append(c)
    return CrossProductIso(np.column_stack(cols))


def random_cocycle(rng, rho: Representation, data: CohomologyData) -> Cocycle:
    k = rho.genus
    x = data.z1 @ rng.standard_normal(data.z1.shape[1])
    return Cocycle.from_flat(data.module, k, x)


def unit_h1_direction(rng, rho: Representation, data: CohomologyData) -> Cocycle:
    c = rng.standard_normal(data.h1.shape[1])
    c /= np.linalg.norm(c)
    return Cocycle.from_flat(data.module, rho.genus, data.h1 @ c)
