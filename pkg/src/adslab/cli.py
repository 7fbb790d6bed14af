"""Command line entry point: one subcommand per experiment kind.

Exit codes: 0 all verdicts pass, 2 a verdict fails (or a computation fails),
3 a rank decision was ambiguous, 1 invalid input or configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from importlib import resources

import jsonschema

from .config import Tolerances
from .errors import ConfigError, LabError, RankAmbiguous
from .experiments import (
    KINDS,
    certificate_rows,
    embedded_config,
    jsonable,
    resolve_config,
    resolve_thresholds,
    run_sections,
)

DESCRIPTIONS = {
    "rep": (
        "inputs: genus, seed, quasi_fuchsian_step",
        "outputs: (dim Z1, dim B1, dim H1) for the Fuchsian group with coefficients in so(2,1), "
        "its quasi-Fuchsian deformation in sl2+sl2, the Fuchsian group in the Poincare algebra and in R^{2,1}; "
        "rank gaps; relator residuals",
        "certifies: the space of Fuchsian deformations has dimension 6k-6 and the AdS and Minkowski "
        "deformation spaces have dimension 12k-12, with R^{2,1} isomorphic to so(2,1) as a module",
    ),
    "hull": (
        "inputs: genus, n_plus, n_minus, vertex placement, L",
        "outputs: per geometry and side, face counts, edge counts, cone angles, Gauss-Bonnet residual, "
        "convexity margins and L to L+1 stabilization",
        "certifies: the equivariant hull boundary is a strictly convex polyhedral surface whose induced "
        "cone metric has 6k-6+3n edges, cone angles above 2 pi and the correct total curvature",
    ),
    "metric": (
        "inputs: genus, n_values, vertex placement, L",
        "outputs: Gauss-Bonnet residuals and cone angle excess for every surface used in rigidity runs",
        "certifies: the induced cone metrics are well formed for every configuration size in the run",
    ),
    "rigidity": (
        "inputs: genus, n_values, L, tolerances.rank_rel",
        "outputs: singular values and kernel dimension of the edge variation matrix for AdS and Minkowski "
        "Fuchsian pairs, Killing fit residuals, finite difference checks, and the one-sided negative control",
        "certifies: infinitesimal rigidity of Fuchsian AdS pairs and of Minkowski pairs (every "
        "isometric first-order deformation is the restriction of a global Killing field)",
    ),
    "jacobian": (
        "inputs: genus, n_plus, n_minus, persistence_trials, persistence_step, probe_step, trials, seed",
        "outputs: square induced-metric Jacobian in two gauges, persistence under H1 deformations, "
        "injectivity probe statistics and conjugation invariance",
        "certifies: the induced-metric map is a local diffeomorphism near the Fuchsian locus",
    ),
    "pogorelov": (
        "inputs: seed, trials",
        "outputs: Killing fit, equivariance, module intertwining, segment transfer and automorphicity "
        "residuals of the infinitesimal Pogorelov map, and the transfer of the AdS isometric kernel",
        "certifies: the infinitesimal Pogorelov map sends AdS Killing fields to Minkowski Killing fields, "
        "induces a module isomorphism g -> g0 at the Fuchsian locus and transports isometric deformations",
    ),
    "transversality": (
        "inputs: genus, n_plus, n_minus, seed",
        "outputs: dimensions of the two single-surface deformation images in H1, rank of their sum, "
        "principal angles",
        "certifies: the future and past Minkowski deformation images meet transversally",
    ),
    "gc": (
        "inputs: t_values, resolution",
        "outputs: induced metric and shape operator residuals, Gauss and Codazzi residuals with "
        "convergence order, curvature of the two metrics s((id +- jb).,(id +- jb).)",
        "certifies: the Gauss and Codazzi equations on equidistant surfaces and that both auxiliary "
        "metrics are hyperbolic and coincide at the Fuchsian locus",
    ),
    "suite": (
        "inputs: all of the above",
        "outputs: every section in one certificate",
        "certifies: the full acceptance list",
    ),
}


def load_schema() -> dict:
    return json.loads(resources.files("adslab").joinpath("data/config.schema.json").read_text())


def describe(kind: str) -> str:
    if kind not in DESCRIPTIONS:
        raise ConfigError(f"unknown experiment kind {kind!r}; choose from {', '.join(KINDS)}")
    return "\n".join([kind] + ["  " + line for line in DESCRIPTIONS[kind]]) + "\n"


def _atomic_write(path: str, text: str):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    with os.fdopen(fd, "w") as f:
        f.write(text)
    os.chmod(tmp, 0o644)
    os.replace(tmp, path)


def certificate_json(cert: dict) -> str:
    return json.dumps(jsonable(cert), sort_keys=True, indent=2, allow_nan=False) + "\n"


def certificate_csv(cert: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["section", "verdict", "passed"])
    for row in certificate_rows(cert):
        w.writerow(row)
    return buf.getvalue()


def load_config(path: str | None, kind: str) -> dict:
    cfg = {}
    if path:
        try:
            with open(path) as f:
                cfg = json.load(f)
        except FileNotFoundError as e:
            raise ConfigError(f"config file not found: {path}") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"config is not valid JSON: {e}") from e
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    try:
        jsonschema.validate(cfg, load_schema())
    except jsonschema.ValidationError as e:
        where = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise ConfigError(f"schema violation at {where}: {e.message}") from e
    if "kind" in cfg and cfg["kind"] != kind:
        raise ConfigError(f"config kind {cfg['kind']!r} does not match subcommand {kind!r}")
    cfg["kind"] = kind
    return cfg


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="adslab", description="Equivariant polyhedral surface experiments.")
    sub = p.add_subparsers(dest="command", required=True)
    for kind in KINDS:
        s = sub.add_parser(kind, help=f"run the {kind} experiment")
        s.add_argument("--config", help="JSON configuration file")
        s.add_argument("--seed", type=int)
        s.add_argument("--out", help="output directory for certificate files")
        s.add_argument("--tol-alg", type=float, help="threshold for exact-arithmetic identities")
        s.add_argument("--tol-fd", type=float, help="threshold for finite-difference quantities")
        s.add_argument("--rank-rel", type=float, help="relative singular value cutoff")
        s.add_argument("--json", action="store_true", help="write (or print) the JSON certificate")
        s.add_argument("--csv", action="store_true", help="write (or print) the CSV summary")
    d = sub.add_parser("describe", help="explain an experiment kind")
    d.add_argument("kind")
    sub.add_parser("schema", help="print the configuration schema")
    return p


def run(args) -> int:
    cfg = resolve_config(load_config(args.config, args.command))
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.out is not None:
        cfg["output"]["dir"] = args.out
    if args.json or args.csv:
        cfg["output"]["json"], cfg["output"]["csv"] = bool(args.json), bool(args.csv)
    tol_over = dict(cfg["tolerances"])
    if args.tol_alg is not None:
        tol_over["algebraic"] = args.tol_alg
    if args.tol_fd is not None:
        tol_over["finite_difference"] = args.tol_fd
    if args.rank_rel is not None:
        tol_over["rank_rel"] = args.rank_rel
    cfg["tolerances"] = tol_over
    tol = Tolerances().with_overrides(**tol_over)
    thresholds = resolve_thresholds(cfg["thresholds"], tol_over.get("algebraic"), tol_over.get("finite_difference"))

    code = 0
    try:
        cert = run_sections(cfg, tol, thresholds)
        code = 0 if cert["passed"] else 2
    except RankAmbiguous as e:
        cert = _error_certificate(cfg, tol, thresholds, "RankAmbiguous", str(e),
                                  {"singular_values": e.singular_values, "cutoff": e.cutoff})
        code = 3
    except LabError as e:
        cert = _error_certificate(cfg, tol, thresholds, type(e).__name__, str(e), {})
        code = 2

    out_dir = cfg["output"]["dir"]
    if out_dir:
        if cfg["output"]["json"]:
            _atomic_write(os.path.join(out_dir, f"certificate_{cfg['kind']}.json"), certificate_json(cert))
        if cfg["output"]["csv"]:
            _atomic_write(os.path.join(out_dir, f"summary_{cfg['kind']}.csv"), certificate_csv(cert))
        if cfg["output"]["off"] and code != 1:
            _write_off(cfg, out_dir)
    if out_dir is None and args.json:
        sys.stdout.write(certificate_json(cert))
    elif out_dir is None and args.csv:
        sys.stdout.write(certificate_csv(cert))
    else:
        for section, name, ok in certificate_rows(cert):
            print(f"{'PASS' if ok else 'FAIL'} {section}.{name}")
        if "error" in cert:
            print(f"ERROR {cert['error']['type']}: {cert['error']['message']}")
        print("PASSED" if code == 0 else f"FAILED (exit {code})")
    return code


def _error_certificate(cfg, tol, thresholds, etype, message, extra) -> dict:
    from . import __version__

    return {
        "adslab_version": __version__,
        "kind": cfg["kind"],
        "seed": int(cfg["seed"]),
        "config": embedded_config(cfg),
        "tolerances": tol.as_dict(),
        "thresholds": thresholds,
        "sections": {},
        "error": dict({"type": etype, "message": message}, **extra),
        "passed": False,
    }


def _write_off(cfg, out_dir):
    from .experiments import Context
    from .hull import hull_boundary, surface_to_off

    ctx = Context(cfg, Tolerances(), {})
    for geometry in ("ads", "mink"):
        for side in (1, -1):
            surf = hull_boundary(ctx.config(geometry, side), cfg["L"])
            name = f"surface_{geometry}_{'plus' if side > 0 else 'minus'}.off"
            _atomic_write(os.path.join(out_dir, name), surface_to_off(surf))


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 1 if e.code else 0
    try:
        if args.command == "describe":
            sys.stdout.write(describe(args.kind))
            return 0
        if args.command == "schema":
            sys.stdout.write(json.dumps(load_schema(), indent=2, sort_keys=True) + "\n")
            return 0
        return run(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
