"""Reproducible experiment front door.

One experiment per invocation: parse a key=value spec, run the named module
pipeline with an explicit seed, and emit byte-reproducible JSON (and CSV
where tabular) into the output directory.  Exit codes: 0 done, 1 config
error, 2 assertion-style check failure.
"""

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__, fields, flow, garding, grassmann, specfile, sphjet, subeq
from .garding import HyperbolicityViolation
from .rng import derive_rng
from .specfile import SpecError

MATRIX_KEYS = ("a",)


@dataclass
class ExperimentConfig:
    command: str
    action: str
    spec_path: str
    seed: int
    out: str
    tol: float
    budget: int
    spec: dict

    def echo(self) -> dict:
        return {
            "command": self.command,
            "action": self.action,
            "spec_path": self.spec_path,
            "seed": self.seed,
            "out": self.out,
            "tol": self.tol,
            "budget": self.budget,
            "spec": dict(sorted(self.spec.items())),
            "version": __version__,
        }


def parse_config(text: str, command: str, action: str, seed, out: str, tol: float, budget: int, spec_path: str = "<inline>") -> ExperimentConfig:
    """Resolve a spec file plus flags into a full config; no silent defaults."""
    spec = specfile.parse_kv(text)
    if seed is None:
        if "seed" in spec:
            seed = int(spec["seed"])
        else:
            raise SpecError("missing seed: pass --seed or a 'seed' key in the spec")
    if budget < 1:
        raise SpecError("budget must be >= 1")
    if tol <= 0:
        raise SpecError("tolerance must be positive")
    return ExperimentConfig(
        command=command,
        action=action,
        spec_path=spec_path,
        seed=int(seed),
        out=out,
        tol=float(tol),
        budget=int(budget),
        spec=spec,
    )


def _json_matrix(a: np.ndarray) -> dict:
    return {"entries": [float(x) for x in np.asarray(a).ravel()], "shape": list(np.asarray(a).shape)}


def _require_matrix(spec: dict, n: int) -> np.ndarray:
    a = specfile.get_matrix(spec, "a", n, required=True)
    return 0.5 * (a + a.T)


# ---------------------------------------------------------------------------
# pipelines; each returns (payload, csv or None, exit_code)


def _run_subeq(cfg: ExperimentConfig):
    spec = cfg.spec
    specfile.check_keys(spec, specfile.SUBEQ_KEYS + ("a", "pmax", "qmax", "seed"))
    f = specfile.build_subequation(spec)
    if cfg.action == "member":
        a = _require_matrix(spec, f.dim)
        res = subeq.member(f, a, cfg.tol)
        return {"subequation": f.name, "member": res.member, "margin": res.margin, "a": _json_matrix(a)}, None, 0
    if cfg.action == "dual":
        a = _require_matrix(spec, f.dim)
        is_member = subeq.dual_member(f, a, cfg.tol)
        return {"subequation": f.name, "dual_member": is_member, "a": _json_matrix(a)}, None, 0
    if cfg.action == "riesz":
        pmax = specfile.get_float(spec, "pmax", default=32.0)
        qmax = specfile.get_float(spec, "qmax", default=32.0)
        inc = subeq.riesz_increasing(f, p_max=pmax, tol=cfg.tol)
        dec = subeq.riesz_decreasing(f, q_max=qmax, tol=cfg.tol)
        payload = {"subequation": f.name, "increasing": _riesz_dict(inc), "decreasing": _riesz_dict(dec)}
        return payload, None, 0
    if cfg.action == "expand":
        delta = specfile.get_float(spec, "delta", required=True)
        base_p = subeq.riesz_increasing(f, tol=cfg.tol)
        expanded = subeq.expand(f, delta)
        got = subeq.riesz_increasing(expanded, tol=cfg.tol)
        predicted = subeq.predicted_expansion_characteristic(base_p.as_float(), delta, f.dim)
        payload = {
            "subequation": f.name,
            "delta": delta,
            "base_characteristic": _riesz_dict(base_p),
            "expanded_characteristic": _riesz_dict(got),
            "predicted": None if math.isinf(predicted) else predicted,
            "predicted_infinite": math.isinf(predicted),
        }
        return payload, None, 0
    raise SpecError(f"unknown subeq action {cfg.action!r}")


def _riesz_dict(r: subeq.RieszCharacteristic) -> dict:
    return {
        "infinite": r.infinite,
        "value": r.value,
        "bracket": [None if math.isinf(b) else b for b in r.bracket],
        "evaluations": r.evaluations,
    }


def _run_garding(cfg: ExperimentConfig):
    spec = cfg.spec
    specfile.check_keys(spec, specfile.GARDING_KEYS + ("a", "seed"))
    op = specfile.build_garding(spec)
    if cfg.action == "eig":
        a = _require_matrix(spec, op.dim)
        s = garding.garding_eigenvalues(op, a)
        return {
            "operator": op.name,
            "eigenvalues": [float(v) for v in s.eigenvalues],
            "residual": s.residual,
            "value": op.evaluate(a),
            "a": _json_matrix(a),
        }, None, 0
    if cfg.action == "branch":
        k = specfile.get_int(spec, "branch", default=1)
        a = _require_matrix(spec, op.dim)
        ok, margin = garding.branch_member(op, k, a, tol=cfg.tol)
        return {"operator": op.name, "branch": k, "member": ok, "margin": margin, "a": _json_matrix(a)}, None, 0
    if cfg.action == "sigma":
        k = specfile.get_int(spec, "k", required=True)
        a = _require_matrix(spec, op.dim)
        val = garding.elementary_symmetric_value(op, k, a)
        return {"operator": op.name, "k": k, "value": val, "a": _json_matrix(a)}, None, 0
    if cfg.action == "certify":
        report = garding.certify_garding(op, trials=cfg.budget, seed=cfg.seed, tol=cfg.tol)
        return report.to_dict(), None, 0 if report.passed else 2
    raise SpecError(f"unknown garding action {cfg.action!r}")


def _run_grass(cfg: ExperimentConfig):
    spec = cfg.spec
    specfile.check_keys(spec, specfile.FAMILY_KEYS + ("x", "y", "seed"))
    family = specfile.build_family(spec)
    if cfg.action == "invariant":
        rng = derive_rng(cfg.seed, "cli-grass-invariant")
        values = []
        for _ in range(cfg.budget):
            w = grassmann.sample_plane(family, rng)
            if family.kind == "kahler_orbit":
                values.append(grassmann.kahler_angle_invariant(w, family.structure))
            elif family.kind == "quat_orbit":
                values.append(grassmann.quaternionic_invariant(w, family.structure))
            else:
                values.append(grassmann.family_predicate(family, w)[1])
        arr = np.array(values)
        payload = {
            "family": family.describe(),
            "samples": cfg.budget,
            "mean": float(arr.mean()),
            "min": float(arr.min()),
            "max": float(arr.max()),
        }
        return payload, None, 0
    if cfg.action == "transitivity":
        x = specfile.get_vector(spec, "x")
        y = specfile.get_vector(spec, "y")
        rng = derive_rng(cfg.seed, "cli-grass-endpoints")
        if x is None:
            x = rng.standard_normal(family.n)
        if y is None:
            y = rng.standard_normal(family.n)
        report = grassmann.transitivity_check(family, x, y, budget=cfg.budget, seed=cfg.seed)
        return report.to_dict(), None, 0
    raise SpecError(f"unknown grass action {cfg.action!r}")


def _run_flow(cfg: ExperimentConfig):
    spec = cfg.spec
    allowed = specfile.FIELD_KEYS + specfile.SCHEDULE_KEYS + ("candidate", "candidate_catalog", "w", "seed")
    specfile.check_keys(spec, allowed)
    u = specfile.build_field(spec)
    schedule = specfile.build_schedule(spec, cfg.seed)
    if cfg.action == "density":
        report = flow.density(u, schedule)
        payload = report.to_dict()
        return payload, report.csv_rows(), 0
    if cfg.action == "tangent":
        cand_expr = spec.get("candidate")
        cand_name = specfile.get_str(spec, "candidate_catalog")
        if (cand_expr is None) == (cand_name is None):
            raise SpecError("provide exactly one of 'candidate' or 'candidate_catalog'")
        if cand_expr is not None:
            candidate = fields.parse_field_expression(cand_expr, u.dim)
        else:
            candidate = fields.catalog_field(cand_name, u.dim)
        report = flow.tangent_convergence(u, schedule, candidate, tol=cfg.tol)
        return report.to_dict(), report.csv_rows(), 0
    if cfg.action == "convex":
        report = flow.convex_tangent(u, schedule, tol=cfg.tol, strict=False)
        code = 2 if report.monotone_violations else 0
        return report.to_dict(), None, code
    if cfg.action == "restrict":
        w = specfile.get_frame(spec, "w", required=True)
        report, polar = flow.plane_restriction_density(u, w, schedule)
        payload = report.to_dict()
        payload["polar"] = polar
        return payload, report.csv_rows(), 0
    raise SpecError(f"unknown flow action {cfg.action!r}")


def _sphere_inputs(spec: dict):
    n = specfile.get_int(spec, "n", required=True)
    g_expr = spec.get("g")
    if g_expr is None:
        raise SpecError("missing required key 'g'")
    g = fields.parse_field_expression(g_expr, n)
    sigma_v = specfile.get_vector(spec, "sigma", required=True)
    if sigma_v.size != n:
        raise SpecError("sigma has the wrong dimension")
    h = specfile.get_float(spec, "h", default=1e-4)
    return n, g.evaluate, sigma_v, h


def _run_sphere(cfg: ExperimentConfig):
    spec = cfg.spec
    allowed = ("g", "sigma", "h", "theta", "n", "p") + specfile.SUBEQ_KEYS + ("seed",)
    specfile.check_keys(spec, allowed)
    if cfg.action == "phi":
        n, g_fn, sigma, h = _sphere_inputs(spec)
        p = specfile.get_float(spec, "p", required=True)
        jet = sphjet.jet_from_function(g_fn, sigma, h)
        mat = sphjet.assemble_phi(jet, p)
        tr, closed, gap = sphjet.trace_of_phi(jet, p)
        return {
            "p": p,
            "phi": _json_matrix(mat),
            "eigenvalues": [float(v) for v in np.linalg.eigvalsh(mat)],
            "trace": tr,
            "trace_closed_form": closed,
            "trace_gap": gap,
        }, None, 0
    if cfg.action == "fdcheck":
        n, g_fn, sigma, h = _sphere_inputs(spec)
        p = specfile.get_float(spec, "p", required=True)
        residual = sphjet.fd_cross_check(g_fn, sigma, p, h)
        budget = 10.0 * h * h
        return {"p": p, "h": h, "residual": residual, "budget": budget, "within_budget": residual <= budget}, None, 0
    if cfg.action == "member":
        n, g_fn, sigma, h = _sphere_inputs(spec)
        p = specfile.get_float(spec, "p", required=True)
        f = specfile.build_subequation(spec)
        jet = sphjet.jet_from_function(g_fn, sigma, h)
        ok, margin = sphjet.sphere_subeq_member(f, jet, p, tol=cfg.tol)
        return {"subequation": f.name, "p": p, "member": ok, "margin": margin}, None, 0
    if cfg.action == "complex":
        from .linalg import ComplexStructure

        n, g_fn, sigma, h = _sphere_inputs(spec)
        if n % 2:
            raise SpecError("complex check needs even n")
        theta = specfile.get_float(spec, "theta", default=0.0)
        report = sphjet.complex_radial_structure_check(g_fn, theta, sigma, ComplexStructure.standard(n // 2), h)
        return report, None, 0
    if cfg.action == "quaternion":
        from .linalg import QuaternionStructure

        n, g_fn, sigma, h = _sphere_inputs(spec)
        if n % 4:
            raise SpecError("quaternionic check needs n divisible by 4")
        report = sphjet.quaternionic_block_check(g_fn, sigma, QuaternionStructure.standard(n // 4), h)
        return report, None, 0
    raise SpecError(f"unknown sphere action {cfg.action!r}")


_RUNNERS = {
    "subeq": _run_subeq,
    "garding": _run_garding,
    "grass": _run_grass,
    "flow": _run_flow,
    "sphere": _run_sphere,
}


def run(cfg: ExperimentConfig) -> int:
    """Execute one experiment; writes report files and returns the exit code."""
    started = time.monotonic()
    try:
        payload, table, code = _RUNNERS[cfg.command](cfg)
    except HyperbolicityViolation as exc:
        payload = {
            "error": "hyperbolicity-violation",
            "message": str(exc),
            "matrix": _json_matrix(exc.matrix),
            "residual": exc.residual,
        }
        table = None
        code = 2
    report = {"config": cfg.echo(), "result": payload}
    paths = emit_tables(report, table, cfg)
    elapsed = time.monotonic() - started
    print(f"{cfg.command} {cfg.action}: exit {code}, wrote {', '.join(str(p) for p in paths)}")
    print(f"wall time: {elapsed:.3f}s", file=sys.stderr)
    return code


def emit_tables(report: dict, table, cfg: ExperimentConfig):
    """Write the JSON payload (and CSV table when present); byte-stable."""
    outdir = Path(cfg.out)
    outdir.mkdir(parents=True, exist_ok=True)
    stem = f"{cfg.command}-{cfg.action}-{cfg.seed}"
    paths = []
    json_path = outdir / f"{stem}.json"
    json_path.write_text(json.dumps(report, sort_keys=True, indent=2, allow_nan=True) + "\n")
    paths.append(json_path)
    if table is not None:
        header, rows = table
        csv_path = outdir / f"{stem}.csv"
        with open(csv_path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([repr(float(v)) if isinstance(v, (int, float)) else v for v in row])
        paths.append(csv_path)
    return paths


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rieszflow", description=__doc__)
    parser.add_argument("--version", action="version", version=f"rieszflow {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    actions = {
        "subeq": ["member", "riesz", "dual", "expand"],
        "garding": ["eig", "branch", "certify", "sigma"],
        "grass": ["invariant", "transitivity"],
        "flow": ["density", "tangent", "convex", "restrict"],
        "sphere": ["phi", "fdcheck", "member", "complex", "quaternion"],
    }
    for command, acts in actions.items():
        cp = sub.add_parser(command)
        asub = cp.add_subparsers(dest="action", required=True)
        for act in acts:
            ap = asub.add_parser(act)
            ap.add_argument("--spec", required=True, help="path to the key=value spec file")
            ap.add_argument("--seed", type=int, default=None, help="64-bit master seed")
            ap.add_argument("--out", default=".", help="output directory")
            ap.add_argument("--tol", type=float, default=1e-9, help="tolerance override")
            ap.add_argument("--budget", type=int, default=1000, help="sample/trial budget")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = Path(args.spec).read_text()
    except OSError as exc:
        print(f"config error: cannot read spec: {exc}", file=sys.stderr)
        return 1
    try:
        cfg = parse_config(
            text,
            command=args.command,
            action=args.action,
            seed=args.seed,
            out=args.out,
            tol=args.tol,
            budget=args.budget,
            spec_path=str(args.spec),
        )
        return run(cfg)
    except (SpecError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
