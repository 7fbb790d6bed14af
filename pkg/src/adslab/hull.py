"""Equivariant marked configurations, truncated orbits, hull boundaries, cone metrics.

Hull computations happen in a second affine chart
    z = (x1, x2, x4) / (s x3),
where s = +1 or -1 picks the nappe of the marked side.  A Fuchsian orbit on a
level set of the Lorentzian distance to o lies on an ellipsoid there, the plane
{x4 = 0} preserved by G_F becomes {z3 = 0} and o sits at z3 = +infinity.  The
boundary component facing o is the surface we want: it is made of the hull
facets whose outward normal has a positive z3 component.

Labels.  An orbit point is labelled (e, i): ball element index e, marked
vertex i.  Element index 0 is the identity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull
from scipy.spatial import QhullError

from . import words as W
from .errors import (
    ChartExit,
    DegenerateHull,
    NonSpacelike,
    NonVertexMarkedPoint,
    TriangleInequalityViolation,
    TruncationTooShort,
)
from .geometry import J21, J22, form22, homogeneous, mink_form
from .surface_group import Representation, is_fuchsian

GEOMETRIES = ("ads", "mink")


def nappe_sign(geometry: str, side: int) -> int:
    """Sign of y3 on the marked side (future side + in each geometry's orientation)."""
    if side not in (1, -1):
        raise ValueError("side must be +1 or -1")
    return -side if geometry == "ads" else side


@dataclass(frozen=True)
class MarkedConfig:
    geometry: str
    rho: Representation
    side: int
    vertices: np.ndarray

    def __post_init__(self):
        if self.geometry not in GEOMETRIES:
            raise ValueError(f"unknown geometry {self.geometry!r}")
        if self.geometry == "ads" and self.rho.target not in ("G_F", "G"):
            raise ValueError("AdS configurations need a representation into G")
        if self.geometry == "mink" and self.rho.target not in ("G_F", "G0"):
            raise ValueError("Minkowski configurations need a representation into G0")
        v = np.array(self.vertices, dtype=float).reshape(-1, 3)
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        if self.geometry == "ads":
            q = mink_form(v, v)
            if np.any(q >= 1.0):
                raise ValueError("AdS vertices must lie in the chart region")

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def genus(self) -> int:
        return self.rho.genus

    @property
    def nappe(self) -> int:
        return nappe_sign(self.geometry, self.side)

    def with_vertices(self, vertices) -> "MarkedConfig":
        return MarkedConfig(self.geometry, self.rho, self.side, vertices)

    def with_rho(self, rho: Representation) -> "MarkedConfig":
        return MarkedConfig(self.geometry, rho, self.side, self.vertices)


def fuchsian_config(geometry: str, rho: Representation, side: int, n: int = 1,
                    height: float | None = None, spread: float = 0.35) -> MarkedConfig:
    """n marked points on one level set of the Lorentzian distance to o.

    The first vertex sits on the timelike axis at chart height ``height``; the
    others are spread at hyperbolic distance ``spread`` (and twice that) from the
    axis so that they fall into distinct orbits.  Side - is the antipodal image
    of side +, which commutes with G_F.
    """
    if height is None:
        height = 0.5 if geometry == "ads" else 1.0
    pts = []
    for j in range(n):
        if j == 0:
            u = np.array([0.0, 0.0, 1.0])
        else:
            d = spread * (1 + (j - 1) // 3)
            phi = 0.3 + 2 * np.pi * (j - 1) / max(n - 1, 1) + 0.2 * j
            u = np.array([np.sinh(d) * np.cos(phi), np.sinh(d) * np.sin(phi), np.cosh(d)])
        pts.append(height * u)
    pts = np.array(pts)
    s = nappe_sign(geometry, side)
    if s < 0:
        pts = -pts
    return MarkedConfig(geometry, rho, side, pts)


# ------------------------------------------------------------------ orbits


@dataclass(frozen=True)
class OrbitCloud:
    """Homogeneous orbit points rho(w)(v_i, 1) for every ball element w."""

    geometry: str
    L: int
    ball: W.Ball
    n: int
    points: np.ndarray  # (len(ball), n, 4)
    images: np.ndarray  # (len(ball), 4, 4)

    def __len__(self):
        return self.points.shape[0] * self.n

    @property
    def flat(self) -> np.ndarray:
        return self.points.reshape(-1, 4)

    def label(self, p: int) -> tuple[int, int]:
        return divmod(int(p), self.n)

    def index(self, elem: int, vert: int) -> int:
        return elem * self.n + vert

    def chart(self) -> np.ndarray:
        return self.flat[:, :3] / self.flat[:, 3:4]

    def word(self, elem: int) -> tuple:
        return self.ball.words[elem]


def orbit(c: MarkedConfig, L: int) -> OrbitCloud:
    if L < 0:
        raise ValueError("L must be non-negative")
    b = W.ball(c.genus, L)
    images = b.images(c.rho.mats)
    X = homogeneous(c.vertices)
    points = np.einsum("eab,ib->eia", images, X)
    cloud = OrbitCloud(c.geometry, L, b, c.n, points, images)
    z_chart(cloud, c.nappe)
    return cloud


def z_chart(cloud: OrbitCloud, s: int) -> np.ndarray:
    """Points in the hull chart; raises ChartExit if a point reaches its plane at infinity."""
    X = cloud.flat
    x3 = X[:, 2]
    scale = np.linalg.norm(X, axis=1)
    if cloud.geometry == "mink":
        bad = s * x3 <= 1e-12 * scale
    else:
        bad = np.abs(x3) <= 1e-12 * scale
    if np.any(bad):
        p = int(np.flatnonzero(bad)[0])
        e, i = cloud.label(p)
        raise ChartExit(f"orbit point of vertex {i} under word {cloud.word(e)} leaves the hull chart")
    return X[:, [0, 1, 3]] / (s * x3[:, None])


# ------------------------------------------------------------------- hulls


@dataclass(frozen=True)
class Face:
    """A face of the hull boundary, vertices as labels in cyclic order."""

    labels: tuple
    covector: np.ndarray  # homogeneous plane c with c . x = 0
    planarity: float


@dataclass
class ConvexSurface:
    config: MarkedConfig
    L: int
    cloud: OrbitCloud
    faces: list  # fundamental faces (canonical translates)
    star_faces: list  # faces of the hull incident to a marked vertex, as found
    deck: list  # (star face index, fundamental face index, translating element)
    hull_vertex_count: int
    nonvertex_points: int
    max_planarity: float
    min_spacelike_margin: float
    _edges_cache: dict = field(default_factory=dict, repr=False)

    @property
    def geometry(self) -> str:
        return self.config.geometry

    @property
    def n(self) -> int:
        return self.config.n

    def point(self, label) -> np.ndarray:
        e, i = label
        return self.cloud.points[e, i]

    def element_index(self, w) -> int:
        j = self.cloud.ball.index_of(w)
        if j < 0:
            raise TruncationTooShort(f"word {w} is outside the orbit ball")
        return j

    def relative(self, e1: int, e2: int) -> int:
        """Ball index of g_{e1}^{-1} g_{e2}."""
        key = (e1, e2)
        if key not in self._edges_cache:
            w = W.concat(W.inverse(self.cloud.word(e1)), self.cloud.word(e2))
            self._edges_cache[key] = self.element_index(w)
        return self._edges_cache[key]

    def face_lattice(self):
        """Face labels with words instead of ball indices (for serialization)."""
        return [[(list(self.cloud.word(e)), int(i)) for e, i in f.labels] for f in self.faces]


def _group_coplanar(hull: ConvexHull, tris: np.ndarray, tol: float):
    """Union adjacent facets with equal plane equations."""
    eq = hull.equations
    tris = np.asarray(tris)
    mask = np.zeros(len(eq), dtype=bool)
    mask[tris] = True
    nb = hull.neighbors[tris]
    pairs_a = np.repeat(tris, 3)
    pairs_b = nb.ravel()
    ok = mask[pairs_b] & (np.max(np.abs(eq[pairs_a] - eq[pairs_b]), axis=1) < tol)
    parent = np.arange(len(eq))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in zip(pairs_a[ok], pairs_b[ok]):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for t in tris:
        groups.setdefault(find(t), []).append(int(t))
    return list(groups.values())


def _cyclic_boundary(hull: ConvexHull, group: list[int], z: np.ndarray) -> list[int]:
    """Boundary cycle of a group of triangles, counterclockwise seen from outside."""
    count: dict[tuple[int, int], int] = {}
    for t in group:
        a, b, c = (int(x) for x in hull.simplices[t])
        normal = hull.equations[t, :3]
        if np.dot(np.cross(z[b] - z[a], z[c] - z[a]), normal) < 0:
            b, c = c, b
        for e in ((a, b), (b, c), (c, a)):
            count[e] = count.get(e, 0) + 1
    directed = [e for e in count if (e[1], e[0]) not in count]
    nxt = {a: b for a, b in directed}
    if len(nxt) != len(directed):
        raise DegenerateHull("face boundary is not a simple cycle")
    start = min(nxt)
    cyc = [start]
    while True:
        v = nxt[cyc[-1]]
        if v == start:
            break
        cyc.append(v)
        if len(cyc) > len(nxt):
            raise DegenerateHull("face boundary is not a simple cycle")
    if len(cyc) != len(nxt):
        raise DegenerateHull("face boundary has several components")
    return cyc


def _plane_covector(z: np.ndarray, s: int) -> tuple[np.ndarray, float]:
    """Homogeneous covector of the best-fit plane through chart points z (m, 3)."""
    ctr = z.mean(axis=0)
    _, sv, Vt = np.linalg.svd(z - ctr)
    nrm = Vt[-1]
    d = -nrm @ ctr
    res = float(np.max(np.abs((z - ctr) @ nrm)))
    c = np.array([nrm[0], nrm[1], s * d, nrm[2]])
    return c / np.linalg.norm(c), res


def spacelike_margin(c: np.ndarray, geometry: str) -> float:
    """Positive when the plane with covector c is spacelike."""
    if geometry == "ads":
        return float(-(c @ J22 @ c) / (c @ c))
    n = c[:3]
    return float(-(n @ J21 @ n) / (n @ n))


def _canonical_face(surface: ConvexSurface, labels: list[tuple[int, int]]):
    """Deck translate of a face with lexicographically smallest label cycle."""
    best = None
    for a in range(len(labels)):
        ea = labels[a][0]
        moved = [(surface.relative(ea, e), i) for e, i in labels]
        rot = moved[a:] + moved[:a]
        if best is None or tuple(rot) < best[0]:
            best = (tuple(rot), ea)
    return best


def hull_boundary(c: MarkedConfig, L: int = 4, tol_plane: float = 1e-9) -> ConvexSurface:
    """Hull boundary facing o, restricted to faces around the marked vertices.

    The orbit is computed on the radius-(L+1) ball and a face is trusted when
    all its vertices have word length at most L.
    """
    cloud = orbit(c, L + 1)
    s = c.nappe
    z = z_chart(cloud, s)
    scale = float(np.max(np.abs(z)))
    try:
        hull = ConvexHull(z)
    except QhullError as exc:
        raise DegenerateHull(str(exc)) from exc
    is_vertex = np.zeros(len(z), dtype=bool)
    is_vertex[hull.vertices] = True

    lengths = cloud.ball.lengths
    trusted_pt = np.repeat(lengths <= L, c.n)

    up = np.flatnonzero(hull.equations[:, 2] > 0)
    groups = _group_coplanar(hull, up, tol_plane * max(scale, 1.0))
    surface = ConvexSurface(
        config=c, L=L, cloud=cloud, faces=[], star_faces=[], deck=[],
        hull_vertex_count=int(is_vertex.sum()),
        nonvertex_points=0, max_planarity=0.0, min_spacelike_margin=np.inf,
    )

    base = {cloud.index(0, i) for i in range(c.n)}
    for b in base:
        if not is_vertex[b]:
            raise NonVertexMarkedPoint(f"marked vertex {b} is not a vertex of the hull")

    simp = hull.simplices
    touches = np.isin(simp, list(base)).any(axis=1)
    keys: dict[tuple, int] = {}
    incident: dict[int, list[int]] = {b: [] for b in base}
    for g in groups:
        if not touches[g].any():
            continue
        cyc = _cyclic_boundary(hull, g, z)
        if not all(trusted_pt[p] for p in cyc):
            continue
        hit = base.intersection(cyc)
        labels = [cloud.label(p) for p in cyc]
        cov, res = _plane_covector(z[cyc], s)
        margin = spacelike_margin(cov, c.geometry)
        if margin <= 0:
            raise NonSpacelike(f"face through {labels} is not spacelike")
        surface.max_planarity = max(surface.max_planarity, res)
        surface.min_spacelike_margin = min(surface.min_spacelike_margin, margin)
        fi = len(surface.star_faces)
        surface.star_faces.append(Face(tuple(labels), cov, res))
        for b in hit:
            incident[b].append(fi)
        canon, ea = _canonical_face(surface, labels)
        if canon not in keys:
            keys[canon] = len(surface.faces)
            surface.faces.append(Face(canon, cov, res))
        surface.deck.append((fi, keys[canon], ea))

    _check_stars(surface, incident, cloud)
    trusted_idx = np.flatnonzero(trusted_pt)
    surface.nonvertex_points = int(np.sum(~is_vertex[trusted_idx]))
    return surface


def _check_stars(surface: ConvexSurface, incident: dict, cloud: OrbitCloud):
    """Every marked vertex must be surrounded by a closed cycle of trusted faces."""
    for b, fis in incident.items():
        lab = cloud.label(b)
        if not fis:
            raise TruncationTooShort(f"no trusted face at marked vertex {lab[1]}")
        ends: dict[tuple, int] = {}
        for fi in fis:
            f = surface.star_faces[fi].labels
            m = len(f)
            j = f.index(lab)
            for nb in (f[(j + 1) % m], f[(j - 1) % m]):
                ends[nb] = ends.get(nb, 0) + 1
        if any(v != 2 for v in ends.values()):
            raise TruncationTooShort(
                f"star of marked vertex {lab[1]} is not closed at L={surface.L}; increase L"
            )


# ------------------------------------------------------------ cone metrics


@dataclass(frozen=True)
class Edge:
    """Segment from marked vertex i to rho(word) applied to marked vertex j."""

    i: int
    j: int
    elem: int
    word: tuple


@dataclass
class ConeMetric:
    geometry: str
    n: int
    genus: int
    edges: list
    lengths: np.ndarray
    triangles: np.ndarray  # (T, 3) edge indices, side opposite each corner
    corners: np.ndarray  # (T, 3) marked-vertex index of each corner
    angles: np.ndarray  # (T, 3)
    cone_angles: np.ndarray
    fan: str

    @property
    def curvature_sign(self) -> int:
        return -1 if self.geometry == "ads" else 0

    @property
    def area(self) -> float:
        if self.geometry == "ads":
            return float(np.sum(np.pi - self.angles.sum(axis=1)))
        return 0.0

    @property
    def euler_characteristic(self) -> int:
        return self.n - len(self.edges) + len(self.triangles)

    def gauss_bonnet_residual(self) -> float:
        chi = 2 - 2 * self.genus
        total = np.sum(2 * np.pi - self.cone_angles) - self.area
        return float(abs(total - 2 * np.pi * chi))

    def edge_table(self):
        return [(e.i, list(e.word), e.j, float(l)) for e, l in zip(self.edges, self.lengths)]


def triangle_angles(lengths, geometry: str) -> np.ndarray:
    """Corner angles opposite each side, lengths (T, 3)."""
    a, b, c = (np.asarray(lengths, dtype=float)[:, i] for i in range(3))
    if np.any(a >= b + c) or np.any(b >= a + c) or np.any(c >= a + b):
        raise TriangleInequalityViolation("degenerate triangle in the cone metric")

    def corner(opp, s1, s2):
        if geometry == "ads":
            num = np.cosh(s1) * np.cosh(s2) - np.cosh(opp)
            den = np.sinh(s1) * np.sinh(s2)
        else:
            num = s1 ** 2 + s2 ** 2 - opp ** 2
            den = 2 * s1 * s2
        return np.arccos(np.clip(num / den, -1.0, 1.0))

    return np.column_stack([corner(a, b, c), corner(b, a, c), corner(c, a, b)])


def edge_points(surface_or_config, edges, rho=None):
    """Homogeneous endpoints (P, Q) of fundamental edges for a configuration."""
    c = surface_or_config.config if isinstance(surface_or_config, ConvexSurface) else surface_or_config
    rho = rho or c.rho
    X = homogeneous(c.vertices)
    P = np.array([X[e.i] for e in edges])
    Q = np.array([rho.image(e.word) @ X[e.j] for e in edges])
    return P, Q


def segment_lengths(P, Q, geometry: str) -> np.ndarray:
    if geometry == "ads":
        a = form22(P, Q)
        b = form22(P, P)
        cc = form22(Q, Q)
        ch = np.abs(a) / np.sqrt(b * cc)
        if np.any(ch <= 1.0):
            raise TriangleInequalityViolation("edge is not a spacelike segment")
        return np.arccosh(ch)
    y = P[:, :3] / P[:, 3:4]
    x = Q[:, :3] / Q[:, 3:4]
    d = x - y
    n2 = mink_form(d, d)
    if np.any(n2 <= 0):
        raise TriangleInequalityViolation("edge is not a spacelike segment")
    return np.sqrt(n2)


@dataclass(frozen=True)
class Triangulation:
    """Frozen combinatorics of a fundamental-domain triangulation."""

    geometry: str
    n: int
    genus: int
    edges: tuple
    triangles: np.ndarray
    corners: np.ndarray
    fan: str


def triangulate(surface: ConvexSurface, fan: str = "min") -> Triangulation:
    """Fan every fundamental face from its lowest (or highest) label."""
    edge_index: dict[tuple, int] = {}
    edges: list[Edge] = []

    def edge_of(l1, l2) -> int:
        (e1, i), (e2, j) = l1, l2
        k1 = (i, surface.relative(e1, e2), j)
        k2 = (j, surface.relative(e2, e1), i)
        key = min(k1, k2)
        if key not in edge_index:
            edge_index[key] = len(edges)
            edges.append(Edge(key[0], key[2], key[1], surface.cloud.word(key[1])))
        return edge_index[key]

    tris, corners = [], []
    for f in surface.faces:
        lab = list(f.labels)
        root = lab.index(min(lab) if fan == "min" else max(lab))
        lab = lab[root:] + lab[:root]
        for m in range(1, len(lab) - 1):
            t = (lab[0], lab[m], lab[m + 1])
            tris.append((edge_of(t[1], t[2]), edge_of(t[0], t[2]), edge_of(t[0], t[1])))
            corners.append((t[0][1], t[1][1], t[2][1]))
    return Triangulation(
        surface.geometry, surface.n, surface.config.genus, tuple(edges),
        np.array(tris, dtype=int), np.array(corners, dtype=int), fan,
    )


def cone_metric_from(tri: Triangulation, lengths) -> ConeMetric:
    lengths = np.asarray(lengths, dtype=float)
    tl = lengths[tri.triangles]
    ang = triangle_angles(tl, tri.geometry)
    cone = np.zeros(tri.n)
    np.add.at(cone, tri.corners.ravel(), ang.ravel())
    return ConeMetric(tri.geometry, tri.n, tri.genus, list(tri.edges), lengths, tri.triangles,
                      tri.corners, ang, cone, tri.fan)


def metric_of_config(c: MarkedConfig, tri: Triangulation) -> ConeMetric:
    """Cone metric of a configuration on a frozen triangulation."""
    P, Q = edge_points(c, tri.edges)
    return cone_metric_from(tri, segment_lengths(P, Q, c.geometry))


def induced_cone_metric(surface: ConvexSurface, fan: str = "min") -> ConeMetric:
    tri = triangulate(surface, fan)
    expected_e = 6 * surface.config.genus - 6 + 3 * surface.n
    if len(tri.edges) != expected_e:
        raise DegenerateHull(f"found {len(tri.edges)} fundamental edges, expected {expected_e}")
    return metric_of_config(surface.config, tri)


# -------------------------------------------------------- convexity checks


@dataclass(frozen=True)
class ConvexityReport:
    vertex_hull: bool
    vertex_margin: float
    core_disjoint: bool | None
    core_margin: float
    method: str

    def as_dict(self):
        return {
            "vertex_hull": self.vertex_hull,
            "vertex_margin": self.vertex_margin,
            "core_disjoint": self.core_disjoint,
            "core_margin": self.core_margin,
            "core_method": self.method,
        }


def _outside_distance(hull: ConvexHull, p: np.ndarray) -> float:
    return float(np.max(hull.equations[:, :3] @ p + hull.equations[:, 3]))


def limit_set_samples(rho: Representation, L_core: int = 4) -> np.ndarray:
    """Attracting fixed points in R^4 of all words up to length L_core."""
    b = W.ball(rho.genus, L_core)
    pts = []
    for M in b.images(rho.mats)[1:]:
        w, V = np.linalg.eig(M)
        v = np.real(V[:, np.argmax(np.abs(w))])
        pts.append(v / np.linalg.norm(v))
    return np.array(pts)


def face_samples(surface: ConvexSurface, m: int = 12) -> np.ndarray:
    """Homogeneous points on a barycentric grid of every fundamental face fan."""
    out = []
    bary = [(a / m, b / m, (m - a - b) / m) for a in range(m + 1) for b in range(m + 1 - a)]
    bary = np.array(bary)
    for f in surface.faces:
        P = np.array([surface.point(lab) for lab in f.labels])
        P = P / np.sqrt(np.abs(form22(P, P)))[:, None] if surface.geometry == "ads" else P / P[:, 3:4]
        for t in range(1, len(P) - 1):
            out.append(bary @ P[[0, t, t + 1]])
    return np.vstack(out)


def convexity_checks(c: MarkedConfig, surface: ConvexSurface, L_core: int = 4) -> ConvexityReport:
    s = c.nappe
    z = z_chart(surface.cloud, s)
    lengths = np.repeat(surface.cloud.ball.lengths, c.n)
    keep = lengths <= surface.L
    vertex_margin = np.inf
    for i in range(c.n):
        b = surface.cloud.index(0, i)
        others = np.flatnonzero(keep)
        others = others[others != b]
        h = ConvexHull(z[others])
        vertex_margin = min(vertex_margin, _outside_distance(h, z[b]))
    vertex_ok = surface.nonvertex_points == 0 and vertex_margin > 0

    samples = face_samples(surface)
    if c.geometry == "mink":
        if not is_fuchsian(c.rho):
            return ConvexityReport(bool(vertex_ok), float(vertex_margin), None, float("nan"),
                                   "unavailable for Minkowski configurations with a translation part")
        # the core degenerates to o; distance from o to the surface along timelike rays
        y = samples[:, :3]
        q = -mink_form(y, y)
        margin = float(np.min(np.sqrt(np.maximum(q, 0.0)))) if np.all(s * y[:, 2] > 0) else 0.0
        return ConvexityReport(bool(vertex_ok), float(vertex_margin), bool(margin > 0), margin,
                               "Lorentzian distance from o")
    if is_fuchsian(c.rho):
        # timelike distance to the invariant plane {x4 = 0}
        q = -form22(samples, samples)
        margin = float(np.min(np.arcsin(np.minimum(np.abs(samples[:, 3]) / np.sqrt(q), 1.0))))
        method = "timelike distance to the invariant plane"
    else:
        lim = limit_set_samples(c.rho, L_core)
        zl = lim[:, [0, 1, 3]] / (s * lim[:, 2:3])
        hl = ConvexHull(zl)
        zs = samples[:, [0, 1, 3]] / (s * samples[:, 2:3])
        margin = float(min(_outside_distance(hl, p) for p in zs))
        method = f"chart separation from sampled limit set (L_core={L_core})"
    return ConvexityReport(bool(vertex_ok), float(vertex_margin), bool(margin > 0), margin, method)


# ---------------------------------------------------------- stabilization


@dataclass(frozen=True)
class StabilizationReport:
    L_values: tuple
    edge_deltas: tuple
    angle_deltas: tuple
    combinatorics_equal: tuple

    def as_dict(self):
        return {
            "L": list(self.L_values),
            "edge_length_deltas": list(self.edge_deltas),
            "cone_angle_deltas": list(self.angle_deltas),
            "combinatorics_equal": list(self.combinatorics_equal),
        }


def _combinatorics_key(tri: Triangulation):
    return (tuple((e.i, e.j, e.word) for e in tri.edges), tri.triangles.tolist(), tri.corners.tolist())


def stabilization_report(c: MarkedConfig, L_range) -> StabilizationReport:
    L_range = list(L_range)
    if any(b <= a for a, b in zip(L_range, L_range[1:])):
        raise ValueError("L_range must be increasing")
    data = []
    for L in L_range:
        surf = hull_boundary(c, L)
        tri = triangulate(surf)
        data.append((tri, metric_of_config(c, tri)))
    ed, ad, same = [], [], []
    for (t1, m1), (t2, m2) in zip(data, data[1:]):
        eq = _combinatorics_key(t1) == _combinatorics_key(t2)
        same.append(eq)
        if eq:
            ed.append(float(np.max(np.abs(m1.lengths - m2.lengths))))
        else:
            ed.append(float("inf"))
        ad.append(float(np.max(np.abs(m1.cone_angles - m2.cone_angles))))
    return StabilizationReport(tuple(L_range), tuple(ed), tuple(ad), tuple(same))


# ---------------------------------------------------------- serialization


def surface_to_json(surface: ConvexSurface) -> dict:
    return {
        "geometry": surface.geometry,
        "L": surface.L,
        "n": surface.n,
        "vertices": surface.config.vertices.tolist(),
        "faces": surface.face_lattice(),
        "max_planarity": surface.max_planarity,
        "min_spacelike_margin": surface.min_spacelike_margin,
    }


def metric_to_json(m: ConeMetric) -> dict:
    return {
        "geometry": m.geometry,
        "edges": [{"from": e.i, "to": e.j, "word": list(e.word)} for e in m.edges],
        "lengths": m.lengths.tolist(),
        "triangles": m.triangles.tolist(),
        "angles": m.angles.tolist(),
        "cone_angles": m.cone_angles.tolist(),
        "gauss_bonnet_residual": m.gauss_bonnet_residual(),
    }


def surface_to_off(surface: ConvexSurface) -> str:
    """OFF text of the trusted star faces in the y chart (z chart for far points)."""
    labels = sorted({lab for f in surface.star_faces for lab in f.labels})
    index = {lab: i for i, lab in enumerate(labels)}
    pts = np.array([surface.point(lab) for lab in labels])
    y = pts[:, :3] / pts[:, 3:4]
    lines = ["OFF", f"{len(labels)} {len(surface.star_faces)} 0"]
    lines += [" ".join(f"{v:.12g}" for v in p) for p in y]
    for f in surface.star_faces:
        lines.append(" ".join([str(len(f.labels))] + [str(index[lab]) for lab in f.labels]))
    return "\n".join(lines) + "\n"
