"""Experiment sections and the certificate they produce.

Each section computes a results dictionary and a set of named boolean
verdicts from a resolved configuration.  Verdict thresholds live in
``THRESHOLDS``; every entry has a class (``alg`` for identities that hold
exactly in exact arithmetic, ``fd`` for quantities measured by finite
differences, ``fixed`` otherwise) so that command line overrides can retarget
a whole class at once.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from . import __version__
from .config import Tolerances
from .errors import ConfigError
from .gc_fields import equidistant_report, fuchsian_equidistant_surface, gauss_codazzi_residual
from .geometry import G_BASIS, isometry_matrix
from .hull import (
    MarkedConfig,
    cone_metric_from,
    convexity_checks,
    fuchsian_config,
    hull_boundary,
    induced_cone_metric,
    stabilization_report,
)
from .pogorelov import psi_data
from .rigidity import (
    conjugated_system,
    edge_variation_matrix,
    finite_difference_check,
    induced_metric_jacobian,
    isometric_kernel,
    jacobian_persistence,
    local_injectivity_probe,
    mink_transversality,
    mirror_mink_surfaces,
    nontrivial_kernel_vector,
    pogorelov_consistency,
    prepare_surface,
    triviality_residuals,
)
from .surface_group import (
    build_fuchsian_rep,
    as_target,
    cross_product_iso,
    deform_rep,
    unit_h1_direction,
    z1_basis,
)
from .transfer_checks import transfer_suite

KINDS = ("rep", "hull", "metric", "rigidity", "jacobian", "pogorelov", "transversality", "gc", "suite")
SUITE_ORDER = ("rep", "hull", "metric", "rigidity", "jacobian", "pogorelov", "transversality", "gc")

DEFAULTS = {
    "kind": "suite",
    "genus": 2,
    "n_plus": 1,
    "n_minus": 1,
    "n_values": [1, 2, 3],
    "height": None,
    "spread": 0.35,
    "vertices_plus": None,
    "vertices_minus": None,
    "L": 4,
    "seed": 0,
    "trials": 100,
    "quasi_fuchsian_step": 0.1,
    "persistence_trials": 20,
    "persistence_step": 1e-2,
    "probe_step": 1e-3,
    "conjugation_size": 1e-2,
    "t_values": [0.2, 0.5, 1.0],
    "resolution": 128,
    "tolerances": {},
    "thresholds": {},
    "output": {"dir": None, "json": True, "csv": True, "off": False},
}

# name -> (class, value)
THRESHOLDS = {
    "relation_residual": ("alg", 1e-9),
    "rank_gap_cohomology": ("fixed", 1e3),
    "gauss_bonnet": ("alg", 1e-6),
    "stabilization": ("alg", 1e-10),
    "triangulation_independence": ("alg", 1e-9),
    "rank_gap_rigidity": ("fixed", 1e2),
    "triviality_fit": ("alg", 1e-7),
    "nontrivial_fit_min": ("fixed", 1e-2),
    "fd_ratio_low": ("fixed", 3.0),
    "fd_ratio_high": ("fixed", 5.0),
    "jacobian_gap": ("fixed", 1e3),
    "gauge_agreement": ("fixed", 0.05),
    "conjugation_agreement": ("fixed", 0.05),
    "probe_ratio_low": ("fixed", 0.8),
    "probe_ratio_high": ("fixed", 1.2),
    "killing_fit": ("alg", 1e-8),
    "equivariance": ("alg", 1e-9),
    "intertwining": ("alg", 1e-8),
    "segment_transfer": ("alg", 1e-7),
    "automorphicity": ("alg", 1e-8),
    "pogorelov_consistency": ("alg", 1e-7),
    "principal_angle_min": ("fixed", 1e-3),
    "gc_exact": ("alg", 1e-8),
    "gauss_codazzi": ("fd", 1e-5),
    "fd_order_low": ("fixed", 1.8),
    "fd_order_high": ("fixed", 2.2),
    "left_right_curvature": ("fd", 1e-4),
    "codazzi_sensitivity": ("fixed", 1e-4),
}


def resolve_thresholds(overrides: dict | None = None, tol_alg: float | None = None,
                       tol_fd: float | None = None) -> dict:
    out = {}
    for name, (cls, val) in THRESHOLDS.items():
        if cls == "alg" and tol_alg is not None:
            val = tol_alg
        if cls == "fd" and tol_fd is not None:
            val = tol_fd
        out[name] = val
    for k, v in (overrides or {}).items():
        if k not in THRESHOLDS:
            raise ConfigError(f"unknown threshold {k!r}")
        out[k] = float(v)
    return out


def resolve_config(cfg: dict) -> dict:
    out = copy.deepcopy(DEFAULTS)
    for k, v in cfg.items():
        if k == "output":
            out["output"].update(v)
        else:
            out[k] = v
    return out


# ------------------------------------------------------------- context


@dataclass
class Context:
    cfg: dict
    tol: Tolerances
    thr: dict
    cache: dict = field(default_factory=dict)

    @property
    def genus(self) -> int:
        return int(self.cfg["genus"])

    @property
    def rho(self):
        return build_fuchsian_rep(self.genus)

    def rng(self, section: str) -> np.random.Generator:
        # independent stream per section so sections are reproducible alone
        return np.random.default_rng([int(self.cfg["seed"]), SUITE_ORDER.index(section)])

    def config(self, geometry: str, side: int, n: int | None = None):
        if n is None:
            n = self.cfg["n_plus"] if side > 0 else self.cfg["n_minus"]
        explicit = self.cfg["vertices_plus"] if side > 0 else self.cfg["vertices_minus"]
        if explicit is not None and n == len(explicit):
            return MarkedConfig(geometry, self.rho, side, np.array(explicit, dtype=float))
        return fuchsian_config(geometry, self.rho, side, n, self.cfg["height"], self.cfg["spread"])

    def surface(self, geometry: str, side: int, n: int | None = None):
        c = self.config(geometry, side, n)
        key = ("surface", geometry, side, c.vertices.tobytes())
        if key not in self.cache:
            self.cache[key] = prepare_surface(c, self.cfg["L"])
        return self.cache[key]

    def pair_system(self, geometry: str, n_plus: int | None = None, n_minus: int | None = None):
        key = ("pair", geometry, n_plus, n_minus)
        if key not in self.cache:
            surfs = [self.surface(geometry, 1, n_plus), self.surface(geometry, -1, n_minus)]
            self.cache[key] = edge_variation_matrix(surfs, tol=self.tol)
        return self.cache[key]


def _max(xs) -> float:
    xs = list(xs)
    return float(max(xs)) if xs else 0.0


# ------------------------------------------------------------- sections


def section_rep(ctx: Context) -> tuple[dict, dict]:
    k, thr = ctx.genus, ctx.thr
    rho = ctx.rho
    rng = ctx.rng("rep")
    g_data = z1_basis(as_target(rho, "G"), "g", ctx.tol)
    rho_qf = deform_rep(rho, unit_h1_direction(rng, rho, g_data), ctx.cfg["quasi_fuchsian_step"])
    cases = [
        ("fuchsian_gF", rho, "g_F", (6 * k - 3, 3, 6 * k - 6)),
        ("quasi_fuchsian_g", rho_qf, "g", (12 * k - 6, 6, 12 * k - 12)),
        ("fuchsian_g0", as_target(rho, "G0"), "g0", (12 * k - 6, 6, 12 * k - 12)),
        ("fuchsian_R21", rho, "R21", (6 * k - 3, 3, 6 * k - 6)),
    ]
    res, dims_ok, gaps = {}, True, []
    for name, r, module, expected in cases:
        d = z1_basis(r, module, ctx.tol)
        res[name] = {
            "module": module,
            "dims": list(d.dims),
            "expected": list(expected),
            "relator_gap": d.relator_rank.gap_factor,
            "coboundary_gap": d.coboundary_rank.gap_factor,
            "relation_residual": r.relation_residual,
        }
        dims_ok &= tuple(d.dims) == expected
        gaps += [d.relator_rank.gap_factor, d.coboundary_rank.gap_factor]
    iso = cross_product_iso(rho)
    res["cross_product_condition"] = iso.condition_number
    res["fuchsian_relation_residual"] = rho.relation_residual
    res["quasi_fuchsian_step"] = ctx.cfg["quasi_fuchsian_step"]
    verdicts = {
        "cohomology_dimensions": bool(dims_ok),
        "cohomology_rank_gaps": bool(min(gaps) >= thr["rank_gap_cohomology"]),
        "relation_residuals": bool(max(rho.relation_residual, rho_qf.relation_residual) < thr["relation_residual"]),
    }
    return res, verdicts


def _hull_entry(ctx: Context, geometry: str, side: int, with_stabilization: bool) -> tuple[dict, dict]:
    thr, L = ctx.thr, ctx.cfg["L"]
    c = ctx.config(geometry, side)
    surf = hull_boundary(c, L)
    m_min = induced_cone_metric(surf, "min")
    m_max = induced_cone_metric(surf, "max")
    conv = convexity_checks(c, surf)
    entry = {
        "n": c.n,
        "faces": len(surf.faces),
        "edges": len(m_min.edges),
        "triangles": len(m_min.triangles),
        "max_planarity": surf.max_planarity,
        "min_spacelike_margin": surf.min_spacelike_margin,
        "gauss_bonnet_residual": m_min.gauss_bonnet_residual(),
        "cone_angles": m_min.cone_angles.tolist(),
        "min_cone_angle_excess": float(np.min(m_min.cone_angles) - 2 * np.pi),
        "triangulation_independence": float(np.max(np.abs(m_min.cone_angles - m_max.cone_angles))),
        "convexity": conv.as_dict(),
    }
    v = {
        "gauss_bonnet": entry["gauss_bonnet_residual"] < thr["gauss_bonnet"],
        "cone_angles_exceed_2pi": entry["min_cone_angle_excess"] > 0,
        "triangulation_independence": entry["triangulation_independence"] < thr["triangulation_independence"],
        "edge_count": entry["edges"] == 6 * ctx.genus - 6 + 3 * c.n,
        "vertices_on_hull": conv.vertex_hull,
        "core_disjoint": conv.core_disjoint is not False,
    }
    if with_stabilization:
        st = stabilization_report(c, [L, L + 1])
        entry["stabilization"] = st.as_dict()
        v["stabilization"] = all(st.combinatorics_equal) and max(st.edge_deltas) < thr["stabilization"]
    return entry, v


def _collect(entries: dict) -> tuple[dict, dict]:
    res, verdicts = {}, {}
    for name, (e, v) in entries.items():
        res[name] = e
        for k, ok in v.items():
            verdicts[f"{name}.{k}"] = bool(ok)
    return res, verdicts


def section_hull(ctx: Context) -> tuple[dict, dict]:
    entries = {f"{g}_{'plus' if s > 0 else 'minus'}": _hull_entry(ctx, g, s, True)
               for g in ("ads", "mink") for s in (1, -1)}
    return _collect(entries)


def section_metric(ctx: Context) -> tuple[dict, dict]:
    """Cone metrics of the surfaces used by the rigidity section, for every n."""
    entries = {}
    for n in ctx.cfg["n_values"]:
        for g in ("ads", "mink"):
            for s in (1, -1):
                sd = ctx.surface(g, s, n)
                m = cone_metric_from(sd.tri, sd.lengths)
                e = {
                    "gauss_bonnet_residual": m.gauss_bonnet_residual(),
                    "min_cone_angle_excess": float(np.min(m.cone_angles) - 2 * np.pi),
                    "edges": len(m.edges),
                }
                v = {
                    "gauss_bonnet": e["gauss_bonnet_residual"] < ctx.thr["gauss_bonnet"],
                    "cone_angles_exceed_2pi": e["min_cone_angle_excess"] > 0,
                }
                entries[f"{g}_{'plus' if s > 0 else 'minus'}_n{n}"] = (e, v)
    return _collect(entries)


def section_rigidity(ctx: Context) -> tuple[dict, dict]:
    thr = ctx.thr
    entries = {}
    for n in ctx.cfg["n_values"]:
        for g in ("ads", "mink"):
            S = ctx.pair_system(g, n, n)
            rep = isometric_kernel(S, ctx.tol)
            fd = finite_difference_check(S)
            e = rep.as_dict()
            e["finite_difference"] = fd
            v = {
                "kernel_dim_6": rep.kernel_dim == 6,
                "rank_gap": rep.gap_factor >= thr["rank_gap_rigidity"],
                "kernel_trivial": _max(rep.triviality_residuals) < thr["triviality_fit"],
                "finite_difference_order2": thr["fd_ratio_low"] <= fd["ratio"] <= thr["fd_ratio_high"],
            }
            entries[f"{g}_pair_n{n}"] = (e, v)
    # one side only: moduli directions survive
    single = edge_variation_matrix([ctx.surface("ads", 1)], tol=ctx.tol)
    rep = isometric_kernel(single, ctx.tol)
    worst = triviality_residuals(single, nontrivial_kernel_vector(single, rep))[0]
    e = rep.as_dict()
    e["constructed_nontrivial_fit"] = worst
    k = ctx.genus
    v = {
        "kernel_dim_moduli": rep.kernel_dim == 6 + 6 * k - 6,
        "nontrivial_vector_detected": max(worst, _max(rep.triviality_residuals)) > thr["nontrivial_fit_min"],
    }
    entries["ads_single_plus"] = (e, v)
    return _collect(entries)


def _axis_rotation(angle: float) -> np.ndarray:
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    A = np.array([[c, s], [-s, c]])
    return isometry_matrix(A, A)


def section_jacobian(ctx: Context) -> tuple[dict, dict]:
    thr = ctx.thr
    rng = ctx.rng("jacobian")
    S = ctx.pair_system("ads")
    jc = induced_metric_jacobian(S, "cohomology", ctx.tol)
    jp = induced_metric_jacobian(S, "pin", ctx.tol)
    qc, qp = jc.quotient_min_singular_value, jp.quotient_min_singular_value
    gauge_dev = abs(qc - qp) / max(qc, qp)
    pers = jacobian_persistence(S, ctx.cfg["persistence_trials"], ctx.cfg["persistence_step"], rng, tol=ctx.tol)
    step = ctx.cfg["probe_step"]
    p1 = local_injectivity_probe(S, ctx.cfg["trials"], step, ctx.rng("jacobian"), jc)
    p2 = local_injectivity_probe(S, ctx.cfg["trials"], step / 2, ctx.rng("jacobian"), jc)
    probe_ratio = p1.min_ratio / p2.min_ratio
    conj = {}
    size = ctx.cfg["conjugation_size"]
    g_small = expm(sum(c * B for c, B in zip(size * rng.standard_normal(6), G_BASIS)))
    for label, g in (("axis_rotation", _axis_rotation(0.7)), ("small_generic", g_small)):
        C = conjugated_system(S, g)
        dev = 0.0
        for gauge, base in (("cohomology", jc), ("pin", jp)):
            other = induced_metric_jacobian(C, gauge, ctx.tol)
            dev = max(dev, float(np.max(np.abs(np.array(other.quotient_singular_values)
                                               / np.array(base.quotient_singular_values) - 1))))
        conj[label] = dev
    res = {
        "cohomology_gauge": jc.as_dict(),
        "pin_gauge": jp.as_dict(),
        "gauge_relative_deviation": gauge_dev,
        "persistence": pers.as_dict(),
        "injectivity_probe": [p1.as_dict(), p2.as_dict()],
        "probe_min_ratio_ratio": probe_ratio,
        "conjugation_deviation": conj,
        "conjugation_size": size,
    }
    verdicts = {
        "square": jc.size[0] == jc.size[1] == 12 * ctx.genus - 12 + 3 * (ctx.cfg["n_plus"] + ctx.cfg["n_minus"]),
        "invertible_with_gap": jc.invertible and jp.invertible and min(jc.gap_factor, jp.gap_factor) > thr["jacobian_gap"],
        "gauge_independent": gauge_dev < thr["gauge_agreement"],
        "persistence": pers.all_invertible,
        "injectivity_no_failures": p1.failures == 0 and p2.failures == 0,
        "probe_scaling": thr["probe_ratio_low"] <= probe_ratio <= thr["probe_ratio_high"],
        "conjugation_invariance": max(conj.values()) < thr["conjugation_agreement"],
    }
    return res, verdicts


def section_pogorelov(ctx: Context) -> tuple[dict, dict]:
    thr = ctx.thr
    suite = transfer_suite(int(ctx.cfg["seed"]), ctx.cfg["trials"])
    pd = psi_data()
    S = ctx.pair_system("ads")
    rep = isometric_kernel(S, ctx.tol)
    mink = mirror_mink_surfaces(S.surfaces)
    MS = edge_variation_matrix(mink, tol=ctx.tol)
    cons = pogorelov_consistency(S, rep, MS, ctx.tol)
    res = {
        "transfer_suite": suite.as_dict(),
        "psi_matrix": pd.matrix.tolist(),
        "psi_fit_residuals": pd.residuals.tolist(),
        "psi_condition_number": pd.condition_number,
        "consistency": cons,
    }
    verdicts = {
        "killing_fit": suite.killing_fit < thr["killing_fit"],
        "equivariance": suite.equivariance < thr["equivariance"],
        "intertwining": suite.intertwining < thr["intertwining"],
        "segment_transfer": suite.segment_transfer < thr["segment_transfer"],
        "automorphicity": suite.automorphicity < thr["automorphicity"],
        "kernel_transfer": cons["subspace_residual"] < thr["pogorelov_consistency"],
    }
    return res, verdicts


def section_transversality(ctx: Context) -> tuple[dict, dict]:
    rep = mink_transversality(ctx.surface("mink", 1), ctx.surface("mink", -1), ctx.tol)
    k = ctx.genus
    res = rep.as_dict()
    res["seed"] = int(ctx.cfg["seed"])
    verdicts = {
        "image_dims": rep.image_dims == (6 * k - 6, 6 * k - 6),
        "spans_h1": rep.concatenated_rank == 12 * k - 12,
        "principal_angle": rep.smallest_angle > ctx.thr["principal_angle_min"],
    }
    return res, verdicts


def _non_codazzi(A, B):
    out = np.zeros(A.shape + (2, 2))
    out[..., 0, 0] = 1e-3 * B / np.max(np.abs(B))
    return out


def section_gc(ctx: Context) -> tuple[dict, dict]:
    thr = ctx.thr
    res, verdicts = {}, {}
    for t in ctx.cfg["t_values"]:
        r = equidistant_report(float(t), int(ctx.cfg["resolution"]))
        key = f"t={t}"
        res[key] = r
        verdicts[f"{key}.metric"] = r["metric_residual"] < thr["gc_exact"]
        verdicts[f"{key}.shape_operator"] = r["shape_operator_residual"] < thr["gc_exact"]
        verdicts[f"{key}.gauss"] = r["gauss_residual"] < thr["gauss_codazzi"]
        verdicts[f"{key}.codazzi"] = r["codazzi_residual"] < thr["gauss_codazzi"]
        verdicts[f"{key}.order2"] = thr["fd_order_low"] <= r["gauss_convergence_order"] <= thr["fd_order_high"]
        verdicts[f"{key}.left_right_curvature"] = max(r["left_curvature_residual"],
                                                       r["right_curvature_residual"]) < thr["left_right_curvature"]
        verdicts[f"{key}.left_equals_right"] = r["left_right_mismatch"] < thr["gc_exact"]
    S = fuchsian_equidistant_surface(0.5, int(ctx.cfg["resolution"]))
    pert = gauss_codazzi_residual(S, b_perturbation=_non_codazzi)
    res["perturbed_codazzi"] = pert.codazzi
    verdicts["codazzi_sensitivity"] = pert.codazzi > thr["codazzi_sensitivity"]
    return res, verdicts


SECTIONS = {
    "rep": section_rep,
    "hull": section_hull,
    "metric": section_metric,
    "rigidity": section_rigidity,
    "jacobian": section_jacobian,
    "pogorelov": section_pogorelov,
    "transversality": section_transversality,
    "gc": section_gc,
}


# ------------------------------------------------------------- certificate


def jsonable(x):
    """Plain JSON types; non-finite floats become strings."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return x


def embedded_config(cfg: dict) -> dict:
    """The configuration as recorded in a certificate (destination paths left out)."""
    out = copy.deepcopy(cfg)
    out["output"] = {k: v for k, v in out["output"].items() if k != "dir"}
    return out


def run_sections(cfg: dict, tol: Tolerances, thresholds: dict) -> dict:
    ctx = Context(cfg, tol, thresholds)
    kinds = SUITE_ORDER if cfg["kind"] == "suite" else (cfg["kind"],)
    sections = {}
    for kind in kinds:
        res, verdicts = SECTIONS[kind](ctx)
        sections[kind] = {"results": res, "verdicts": {k: bool(v) for k, v in verdicts.items()}}
    passed = all(all(s["verdicts"].values()) for s in sections.values())
    return {
        "adslab_version": __version__,
        "kind": cfg["kind"],
        "seed": int(cfg["seed"]),
        "config": embedded_config(cfg),
        "tolerances": tol.as_dict(),
        "thresholds": thresholds,
        "sections": sections,
        "passed": passed,
    }


def certificate_rows(cert: dict) -> list[tuple]:
    """(section, verdict, passed) rows for the CSV summary."""
    rows = []
    for name, sec in cert.get("sections", {}).items():
        for k, v in sorted(sec["verdicts"].items()):
            rows.append((name, k, bool(v)))
    return rows
