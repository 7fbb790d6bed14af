"""Edge-length variations, isometric kernels, triviality fits and Jacobians.

A system is one or two marked surfaces sharing a representation.  Its
unknowns are the coordinates of a cocycle in an orthonormal basis of Z^1
followed by the chart velocities (3 per marked vertex) of each surface.  Each
row is the first-order variation of one fundamental edge length.

The velocity of the orbit point rho(w)(v_i) under a deformation is

    d/dt [rho_t(w) (v_i(t), 1)] = rho(w) (v_i', 0) + tau(w) rho(w) (v_i, 1),

with tau extended from the generators by the cocycle rule.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm, subspace_angles

from .config import DEFAULT_TOL, Tolerances
from .errors import InvariantViolation, LabError
from .geometry import G0_BASIS, G_BASIS, J21, J22, TangentVec, chart_velocity, homogeneous
from .hull import (
    MarkedConfig,
    Triangulation,
    edge_points,
    hull_boundary,
    induced_cone_metric,
    segment_lengths,
    triangulate,
)
from .pogorelov import DeformationVector, transfer_deformation
from .surface_group import (
    CohomologyData,
    Cocycle,
    Representation,
    as_target,
    coboundary,
    decide_rank,
    deform_rep,
    lie_matrix_of,
    numerical_kernel,
    word_derivative,
    z1_basis,
)


def system_module(geometry: str) -> str:
    return "g" if geometry == "ads" else "g0"


def _basis(module: str):
    return G_BASIS if module == "g" else G0_BASIS


def _target(geometry: str) -> str:
    return "G" if geometry == "ads" else "G0"


# ------------------------------------------------------------- surfaces


@dataclass(frozen=True)
class SurfaceData:
    config: MarkedConfig
    tri: Triangulation
    lengths: np.ndarray


def prepare_surface(c: MarkedConfig, L: int = 4, tri: Triangulation | None = None) -> SurfaceData:
    """Hull, triangulation and edge lengths; reuse ``tri`` to freeze combinatorics."""
    if tri is None:
        surf = hull_boundary(c, L)
        induced_cone_metric(surf)  # validates counts and triangle inequalities
        tri = triangulate(surf)
    P, Q = edge_points(c, tri.edges)
    return SurfaceData(c, tri, segment_lengths(P, Q, c.geometry))


def automorphic_velocity(d: DeformationVector, rho: Representation, w, c: MarkedConfig,
                         i: int, surface: int = 0) -> TangentVec:
    """Chart velocity of rho(w) v_i induced by the deformation d."""
    module = d.cocycle.module
    X = homogeneous(c.vertices[i])
    g = rho.image(w)
    Y = g @ X
    tau_w = word_derivative(rho, module, w) @ d.cocycle.flat
    Ydot = g @ np.append(d.velocities[surface][i], 0.0) + lie_matrix_of(module, tau_w) @ Y
    return TangentVec(Y[:3] / Y[3], chart_velocity(Y, Ydot))


def _length_gradients(P, Q, geometry: str):
    """Gradients of edge length with respect to homogeneous endpoints."""
    if geometry == "ads":
        a = np.einsum("ij,jk,ik->i", P, J22, Q)
        sgn = np.where(a > 0, -1.0, 1.0)
        Q = Q * sgn[:, None]
        a = a * sgn
        b = np.einsum("ij,jk,ik->i", P, J22, P)
        c = np.einsum("ij,jk,ik->i", Q, J22, Q)
        root = np.sqrt(b * c)
        f = -a / root
        sh = np.sqrt(f ** 2 - 1.0)
        JP, JQ = P @ J22, Q @ J22
        gP = (-JQ / root[:, None] + (a / (b * root))[:, None] * JP) / sh[:, None]
        gQ = (-JP / root[:, None] + (a / (c * root))[:, None] * JQ) / sh[:, None]
        return gP, gQ * sgn[:, None], np.arccosh(f)
    p = P[:, :3] / P[:, 3:4]
    q = Q[:, :3] / Q[:, 3:4]
    d = q - p
    ell = np.sqrt(np.einsum("ij,jk,ik->i", d, J21, d))
    g = (d @ J21) / ell[:, None]
    zero = np.zeros((len(P), 1))
    return np.hstack([-g, zero]), np.hstack([g, zero]), ell


@dataclass
class EdgeSystem:
    """Linear map from deformation coordinates to edge-length variations."""

    geometry: str
    rho: Representation
    surfaces: list
    coh: CohomologyData
    matrix: np.ndarray
    trivial_map: np.ndarray  # (columns, 6): coordinates of trivial deformations
    row_labels: list
    column_layout: dict
    fd: dict = field(default_factory=dict)

    @property
    def module(self) -> str:
        return self.coh.module

    @property
    def n_cocycle(self) -> int:
        return self.coh.z1.shape[1]

    def split(self, x):
        """Deformation vector from a coordinate vector."""
        x = np.asarray(x, dtype=float)
        tau = self.coh.z1 @ x[:self.n_cocycle]
        vel = []
        for s in self.surfaces:
            a, b = self.column_layout[id(s)]
            vel.append(x[a:b].reshape(-1, 3))
        return DeformationVector(Cocycle.from_flat(self.module, self.rho.genus, tau), tuple(vel))

    def coordinates(self, d: DeformationVector) -> np.ndarray:
        z = self.coh.z1.T @ d.cocycle.flat
        return np.concatenate([z] + [np.asarray(v).ravel() for v in d.velocities])

    def cocycle_outside_z1(self, d: DeformationVector) -> float:
        t = d.cocycle.flat
        return float(np.linalg.norm(t - self.coh.z1 @ (self.coh.z1.T @ t)) / max(np.linalg.norm(t), 1e-300))


def _trivial_map(rho, module, surfaces, coh, layout, ncols) -> np.ndarray:
    T = np.zeros((ncols, 6))
    basis = _basis(module)
    for a, e in enumerate(np.eye(6)):
        tau = -coboundary(rho, e, module).flat
        T[:coh.z1.shape[1], a] = coh.z1.T @ tau
        for s in surfaces:
            lo, hi = layout[id(s)]
            X = homogeneous(s.config.vertices)
            T[lo:hi, a] = chart_velocity(X, X @ basis[a].T).ravel()
    return T


def edge_variation_matrix(surfaces, coh: CohomologyData | None = None,
                          tol: Tolerances = DEFAULT_TOL) -> EdgeSystem:
    surfaces = list(surfaces)
    geometry = surfaces[0].config.geometry
    rho = as_target(surfaces[0].config.rho, _target(geometry)) if surfaces[0].config.rho.target == "G_F" \
        else surfaces[0].config.rho
    for s in surfaces:
        if s.config.geometry != geometry:
            raise ValueError("all surfaces must share a geometry")
        if s.config.rho.mats is not surfaces[0].config.rho.mats and \
                not np.array_equal(s.config.rho.mats, surfaces[0].config.rho.mats):
            raise ValueError("all surfaces must share the representation")
    module = system_module(geometry)
    coh = coh or z1_basis(rho, module, tol)
    nz = coh.z1.shape[1]
    layout, col = {}, nz
    for s in surfaces:
        layout[id(s)] = (col, col + 3 * s.config.n)
        col += 3 * s.config.n
    basis = _basis(module)
    rows, labels = [], []
    for si, s in enumerate(surfaces):
        c = s.config
        P, Q = edge_points(c, s.tri.edges, rho)
        gP, gQ, _ = _length_gradients(P, Q, geometry)
        lo, _ = layout[id(s)]
        for r, e in enumerate(s.tri.edges):
            row = np.zeros(col)
            g = rho.image(e.word)
            row[lo + 3 * e.i: lo + 3 * e.i + 3] += gP[r, :3]
            row[lo + 3 * e.j: lo + 3 * e.j + 3] += (gQ[r] @ g)[:3]
            dQ = np.array([gQ[r] @ (B @ Q[r]) for B in basis])
            row[:nz] = dQ @ word_derivative(rho, module, e.word) @ coh.z1
            rows.append(row)
            labels.append((si, e.i, list(e.word), e.j))
    M = np.array(rows)
    T = _trivial_map(rho, module, surfaces, coh, layout, col)
    return EdgeSystem(geometry, rho, surfaces, coh, M, T, labels, layout)


def system_lengths(system: EdgeSystem, x, eps: float) -> np.ndarray:
    """Edge lengths after moving by eps along coordinate vector x (no projection)."""
    d = system.split(x)
    mats = np.array([expm(eps * lie_matrix_of(system.module, v)) @ M
                     for v, M in zip(d.cocycle.values, system.rho.mats)])
    rho = Representation(system.rho.target, system.rho.genus, mats, 0.0)
    out = []
    for s, v in zip(system.surfaces, d.velocities):
        c = s.config.with_vertices(s.config.vertices + eps * v)
        P, Q = edge_points(c, s.tri.edges, rho)
        out.append(segment_lengths(P, Q, s.config.geometry))
    return np.concatenate(out)


def finite_difference_check(system: EdgeSystem, steps=(2e-3, 1e-3)) -> dict:
    """Compare every column with central differences at two step sizes."""
    errs = []
    for h in steps:
        worst = 0.0
        for j in range(system.matrix.shape[1]):
            x = np.zeros(system.matrix.shape[1])
            x[j] = 1.0
            fd = (system_lengths(system, x, h) - system_lengths(system, x, -h)) / (2 * h)
            worst = max(worst, float(np.max(np.abs(fd - system.matrix[:, j]))))
        errs.append(worst)
    ratio = errs[0] / errs[1] if errs[1] > 0 else float("inf")
    out = {"steps": list(steps), "max_abs_error": errs, "ratio": ratio}
    system.fd.update(out)
    return out


# ------------------------------------------------------------ kernels


@dataclass
class RigidityReport:
    variables: int
    constraints: int
    singular_values: list
    kernel_dim: int
    gap_factor: float
    cutoff: float
    triviality_residuals: list
    trivial_in_kernel: float
    rigid: bool
    kernel: np.ndarray = field(repr=False, default=None)

    def as_dict(self):
        return {
            "variables": self.variables,
            "constraints": self.constraints,
            "singular_values": self.singular_values,
            "kernel_dim": self.kernel_dim,
            "gap_factor": self.gap_factor,
            "cutoff": self.cutoff,
            "triviality_residuals": self.triviality_residuals,
            "trivial_in_kernel_residual": self.trivial_in_kernel,
            "verdict_rigid": self.rigid,
        }


def triviality_residuals(system: EdgeSystem, vectors) -> list:
    """Relative misfit of the best single Killing field for each column vector."""
    T = system.trivial_map
    V = np.atleast_2d(np.asarray(vectors, dtype=float).T).T
    out = []
    for v in V.T:
        xi, *_ = np.linalg.lstsq(T, v, rcond=None)
        out.append(float(np.linalg.norm(T @ xi - v) / np.linalg.norm(v)))
    return out


def trivial_in_kernel_residual(system: EdgeSystem) -> float:
    M, T = system.matrix, system.trivial_map
    return float(np.linalg.norm(M @ T) / (np.linalg.norm(M) * np.linalg.norm(T)))


def isometric_kernel(system: EdgeSystem, tol: Tolerances = DEFAULT_TOL) -> RigidityReport:
    M = system.matrix
    K, dec = numerical_kernel(M, tol, "edge variation matrix")
    inv = trivial_in_kernel_residual(system)
    if inv > 1e-8:
        raise InvariantViolation(f"trivial deformations leave the kernel (residual {inv:.2e})")
    if K.shape[1] < 6:
        raise InvariantViolation("kernel smaller than the isometry group")
    res = triviality_residuals(system, K)
    return RigidityReport(
        variables=M.shape[1], constraints=M.shape[0],
        singular_values=[float(x) for x in dec.singular_values],
        kernel_dim=int(K.shape[1]), gap_factor=dec.gap_factor, cutoff=dec.cutoff,
        triviality_residuals=res, trivial_in_kernel=inv, rigid=K.shape[1] == 6, kernel=K,
    )


def nontrivial_kernel_vector(system: EdgeSystem, report: RigidityReport) -> np.ndarray:
    """A kernel vector orthogonal to all trivial deformations (negative control)."""
    K = report.kernel
    Qt, _ = np.linalg.qr(system.trivial_map)
    R = K - Qt @ (Qt.T @ K)
    U, s, _ = np.linalg.svd(R, full_matrices=False)
    return U[:, 0]


# ----------------------------------------------------------- Jacobians


@dataclass
class JacobianReport:
    size: tuple
    gauge: str
    description: str
    singular_values: list
    min_singular_value: float
    condition_number: float
    gap_factor: float
    quotient_singular_values: list
    invertible: bool

    @property
    def quotient_min_singular_value(self) -> float:
        return self.quotient_singular_values[-1]

    def as_dict(self):
        return {
            "size": list(self.size),
            "gauge": self.gauge,
            "gauge_description": self.description,
            "singular_values": self.singular_values,
            "min_singular_value": self.min_singular_value,
            "condition_number": self.condition_number,
            "gap_factor": self.gap_factor,
            "quotient_singular_values": self.quotient_singular_values,
            "invertible": self.invertible,
        }


def gauge_slice(system: EdgeSystem, gauge: str):
    """Orthonormal basis (columns) of a slice transverse to the trivial deformations."""
    N = system.matrix.shape[1]
    nz = system.n_cocycle
    if gauge == "cohomology":
        h = system.coh.z1.T @ system.coh.h1  # H1 complement in Z1 coordinates
        S = np.zeros((N, h.shape[1] + N - nz))
        S[:nz, :h.shape[1]] = h
        S[nz:, h.shape[1]:] = np.eye(N - nz)
        return S, "cocycle orthogonal to coboundaries, vertex velocities free"
    if gauge == "pin":
        s0 = system.surfaces[0]
        lo, _ = system.column_layout[id(s0)]
        C = np.zeros((6, N))
        C[0:3, lo:lo + 3] = np.eye(3)
        e = next(e for e in s0.tri.edges if e.i == 0 or e.j == 0)
        # velocity of the far endpoint, as a linear functional of the coordinates
        far_j, word = (e.j, e.word) if e.i == 0 else (e.i, _inverse(e.word))
        Vq = _endpoint_velocity_map(system, s0, word, far_j)
        p = s0.config.vertices[0]
        X = system.rho.image(word) @ homogeneous(s0.config.vertices[far_j])
        q = X[:3] / X[3]
        u = (q - p) / np.linalg.norm(q - p)
        a = np.cross(u, [0.3, 0.5, 0.81])
        a /= np.linalg.norm(a)
        b = np.cross(u, a)
        C[3] = a @ Vq
        C[4] = b @ Vq
        # rotation about the edge: third vertex of an incident triangle
        third = _third_vertex(system, s0, e)
        n_t = np.cross(u, third[1] - p)
        n_t /= np.linalg.norm(n_t)
        C[5] = n_t @ third[0]
        if abs(np.linalg.det(C @ system.trivial_map)) < 1e-12 * np.linalg.norm(C @ system.trivial_map) ** 6:
            raise LabError("pin gauge is not transverse to the trivial deformations")
        _, _, Vt = np.linalg.svd(C)
        return Vt[6:].T, "first side-+ vertex pinned, first incident edge direction and rotation fixed"
    raise ValueError(f"unknown gauge {gauge!r}")


def _inverse(w):
    return tuple(-x for x in reversed(w))


def _endpoint_velocity_map(system: EdgeSystem, s, word, j) -> np.ndarray:
    """3 x N matrix: coordinates -> chart velocity of rho(word) v_j."""
    N = system.matrix.shape[1]
    out = np.zeros((3, N))
    for col in range(N):
        x = np.zeros(N)
        x[col] = 1.0
        d = system.split(x)
        k = system.surfaces.index(s)
        out[:, col] = automorphic_velocity(d, system.rho, word, s.config, j, k).vec
    return out


def _third_vertex(system: EdgeSystem, s, e):
    """(velocity map, chart position) of a third vertex of a triangle containing e."""
    tri = s.tri
    ei = tri.edges.index(e)
    t = int(np.flatnonzero((tri.triangles == ei).any(axis=1))[0])
    corner_pos = list(tri.triangles[t]).index(ei)
    # the corner opposite e; recover its label by walking the other two edges
    other = [tri.edges[x] for x in tri.triangles[t] if x != ei]
    for cand in other:
        for endpoint in ((cand.i, ()), (cand.j, cand.word)):
            vidx, word = endpoint
            X = system.rho.image(word) @ homogeneous(s.config.vertices[vidx])
            q = X[:3] / X[3]
            if not np.allclose(q, s.config.vertices[0]):
                return _endpoint_velocity_map(system, s, word, vidx), q
    raise LabError(f"no third vertex found for triangle {t} (corner {corner_pos})")


def induced_metric_jacobian(system: EdgeSystem, gauge: str = "cohomology",
                            tol: Tolerances = DEFAULT_TOL) -> JacobianReport:
    S, desc = gauge_slice(system, gauge)
    Jm = system.matrix @ S
    if Jm.shape[0] != Jm.shape[1]:
        raise LabError(f"Jacobian is {Jm.shape}, not square")
    sv = np.linalg.svd(Jm, compute_uv=False)
    dec = decide_rank(sv, tol, f"Jacobian ({gauge} gauge)")
    # singular values with respect to the quotient norm |P_perp x| on the slice,
    # where P_perp projects away from the trivial deformations
    Qt, _ = np.linalg.qr(system.trivial_map)
    PS = S - Qt @ (Qt.T @ S)
    _, R = np.linalg.qr(PS)
    qsv = np.linalg.svd(np.linalg.solve(R.T, Jm.T).T, compute_uv=False)
    return JacobianReport(
        size=Jm.shape, gauge=gauge, description=desc,
        singular_values=[float(x) for x in sv], min_singular_value=float(sv[-1]),
        condition_number=float(sv[0] / sv[-1]), gap_factor=float(sv[-1] / dec.cutoff),
        quotient_singular_values=[float(x) for x in qsv], invertible=dec.rank == Jm.shape[1],
    )


def rebuilt_system(system: EdgeSystem, rho: Representation, vertex_map=None) -> EdgeSystem:
    """The same frozen triangulations with a new representation (and moved vertices)."""
    surfaces = []
    for s in system.surfaces:
        v = s.config.vertices if vertex_map is None else vertex_map(s.config.vertices)
        c = MarkedConfig(s.config.geometry, rho, s.config.side, v)
        surfaces.append(prepare_surface(c, tri=s.tri))
    return edge_variation_matrix(surfaces)


@dataclass
class PersistenceReport:
    trials: int
    step: float
    min_singular_values: list
    invertible: list
    relator_residuals: list

    @property
    def all_invertible(self) -> bool:
        return all(self.invertible)

    def as_dict(self):
        return {
            "trials": self.trials,
            "step": self.step,
            "min_singular_values": self.min_singular_values,
            "invertible": self.invertible,
            "relator_residuals": self.relator_residuals,
            "all_invertible": self.all_invertible,
        }


def jacobian_persistence(system: EdgeSystem, trials: int, step: float, rng,
                         gauge: str = "cohomology", tol: Tolerances = DEFAULT_TOL) -> PersistenceReport:
    """Jacobians at representations deformed along random unit H^1 directions."""
    sv, inv, rr = [], [], []
    for _ in range(trials):
        h = rng.standard_normal(system.coh.h1.shape[1])
        h /= np.linalg.norm(h)
        tau = Cocycle.from_flat(system.module, system.rho.genus, system.coh.h1 @ h)
        rho = deform_rep(system.rho, tau, step)
        rep = induced_metric_jacobian(rebuilt_system(system, rho), gauge, tol)
        sv.append(rep.min_singular_value)
        inv.append(rep.invertible)
        rr.append(rho.relation_residual)
    return PersistenceReport(trials, step, sv, inv, rr)


def conjugated_system(system: EdgeSystem, g: np.ndarray) -> EdgeSystem:
    """Conjugate the representation by g and move every vertex by g."""
    ginv = np.linalg.inv(g)
    mats = np.array([g @ M @ ginv for M in system.rho.mats])
    rho = Representation(system.rho.target, system.rho.genus, mats, system.rho.relation_residual)

    def move(v):
        X = homogeneous(v) @ g.T
        return X[:, :3] / X[:, 3:4]

    return rebuilt_system(system, rho, move)


# ---------------------------------------------------- Minkowski transversality


@dataclass
class TransversalityReport:
    image_dims: tuple
    concatenated_rank: int
    h1_dim: int
    principal_angles: list
    smallest_angle: float
    transverse: bool

    def as_dict(self):
        return {
            "image_dims": list(self.image_dims),
            "concatenated_rank": self.concatenated_rank,
            "h1_dim": self.h1_dim,
            "principal_angles": self.principal_angles,
            "smallest_principal_angle": self.smallest_angle,
            "transverse": self.transverse,
        }


def h1_image(system: EdgeSystem, K: np.ndarray) -> np.ndarray:
    """Coordinates in the H^1 basis of the cocycle parts of kernel vectors."""
    tau = system.coh.z1 @ K[:system.n_cocycle]
    return system.coh.h1.T @ tau


def mink_transversality(plus: SurfaceData, minus: SurfaceData,
                        tol: Tolerances = DEFAULT_TOL) -> TransversalityReport:
    ims = []
    coh = None
    for s in (plus, minus):
        sys_ = edge_variation_matrix([s], coh, tol)
        coh = sys_.coh
        rep = isometric_kernel(sys_, tol)
        A = h1_image(sys_, rep.kernel)
        U, sv, _ = np.linalg.svd(A, full_matrices=False)
        r = decide_rank(sv, tol, "kernel image in H1").rank
        ims.append(U[:, :r])
    both = np.hstack(ims)
    r = decide_rank(np.linalg.svd(both, compute_uv=False), tol, "concatenated images").rank
    angles = np.sort(subspace_angles(ims[0], ims[1]))
    h1 = coh.h1.shape[1]
    return TransversalityReport(
        (ims[0].shape[1], ims[1].shape[1]), r, h1, [float(a) for a in angles],
        float(angles[0]), bool(r == h1),
    )


# --------------------------------------------------- local injectivity probe


@dataclass
class InjectivityReport:
    trials: int
    step: float
    mu: float
    failures: int
    min_ratio: float
    mean_ratio: float

    def as_dict(self):
        return {
            "trials": self.trials,
            "step": self.step,
            "mu": self.mu,
            "failures": self.failures,
            "min_ratio": self.min_ratio,
            "mean_ratio": self.mean_ratio,
        }


def configuration_lengths(system: EdgeSystem, u: np.ndarray) -> np.ndarray:
    """Edge lengths (frozen triangulation) at cohomology-gauge coordinates u."""
    nh = system.coh.h1.shape[1]
    h, dv = u[:nh], u[nh:]
    tau = Cocycle.from_flat(system.module, system.rho.genus, system.coh.h1 @ h)
    rho = deform_rep(system.rho, tau, 1.0) if np.any(h) else system.rho
    out, pos = [], 0
    for s in system.surfaces:
        m = 3 * s.config.n
        c = MarkedConfig(s.config.geometry, rho, s.config.side,
                         s.config.vertices + dv[pos:pos + m].reshape(-1, 3))
        pos += m
        P, Q = edge_points(c, s.tri.edges)
        out.append(segment_lengths(P, Q, c.geometry))
    return np.concatenate(out)


def local_injectivity_probe(system: EdgeSystem, trials: int, step: float, rng,
                            jac: JacobianReport | None = None) -> InjectivityReport:
    jac = jac or induced_metric_jacobian(system, "cohomology")
    mu = 0.5 * jac.min_singular_value
    dim = jac.size[1]
    failures, ratios = 0, []
    for _ in range(trials):
        u1 = rng.standard_normal(dim)
        u1 *= step / np.linalg.norm(u1)
        u2 = rng.standard_normal(dim)
        u2 *= step / np.linalg.norm(u2)
        dist = np.linalg.norm(u1 - u2)
        gap = np.linalg.norm(configuration_lengths(system, u1) - configuration_lengths(system, u2))
        ratios.append(gap / dist)
        if gap < mu * dist:
            failures += 1
    ratios = np.array(ratios)
    return InjectivityReport(trials, step, mu, failures, float(ratios.min()), float(ratios.mean()))


# -------------------------------------------------- Pogorelov consistency


def pogorelov_consistency(ads_system: EdgeSystem, ads_report: RigidityReport,
                          mink_system: EdgeSystem, tol: Tolerances = DEFAULT_TOL) -> dict:
    """Transfer the AdS isometric kernel and test containment in the Minkowski kernel."""
    Kmink, _ = numerical_kernel(mink_system.matrix, tol, "Minkowski edge variation")
    configs = [s.config for s in ads_system.surfaces]
    worst_contain, worst_z1, worst_rows = 0.0, 0.0, 0.0
    for v in ads_report.kernel.T:
        d = ads_system.split(v)
        dm = transfer_deformation(configs, d)
        worst_z1 = max(worst_z1, mink_system.cocycle_outside_z1(dm))
        x = mink_system.coordinates(dm)
        nx = np.linalg.norm(x)
        worst_contain = max(worst_contain, float(np.linalg.norm(x - Kmink @ (Kmink.T @ x)) / nx))
        worst_rows = max(worst_rows, float(np.linalg.norm(mink_system.matrix @ x)
                                           / (np.linalg.norm(mink_system.matrix, 2) * nx)))
    return {
        "subspace_residual": worst_contain,
        "cocycle_outside_z1": worst_z1,
        "edge_variation_residual": worst_rows,
        "kernel_dims": [int(ads_report.kernel.shape[1]), int(Kmink.shape[1])],
    }


def mirror_mink_surfaces(ads_surfaces) -> list:
    """Minkowski configurations on the same chart points as AdS configurations."""
    out = []
    for s in ads_surfaces:
        c = s.config
        mc = MarkedConfig("mink", as_target(_fuchsian_view(c.rho), "G0"), -c.side, c.vertices)
        out.append(prepare_surface(mc, tri=None))
    return out


def _fuchsian_view(rho: Representation) -> Representation:
    return Representation("G_F", rho.genus, rho.mats, rho.relation_residual)


__all__ = [
    "SurfaceData", "prepare_surface", "automorphic_velocity", "EdgeSystem", "edge_variation_matrix",
    "finite_difference_check", "RigidityReport", "isometric_kernel", "triviality_residuals",
    "nontrivial_kernel_vector", "trivial_in_kernel_residual", "InvariantViolation", "JacobianReport", "induced_metric_jacobian", "gauge_slice",
    "TransversalityReport", "mink_transversality", "InjectivityReport", "local_injectivity_probe",
    "pogorelov_consistency", "rebuilt_system", "PersistenceReport", "jacobian_persistence",
    "conjugated_system", "mirror_mink_surfaces",
]
