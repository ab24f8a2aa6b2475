"""Line-oriented key=value spec files shared by the CLI subcommands.

Keys are case-insensitive, duplicate keys are errors, unknown keys are
errors, and '#' starts a comment.  Vectors are comma-separated, matrices are
row-major comma lists, and frames list columns separated by ';'.
"""

import math

import numpy as np

from . import fields, flow, garding, grassmann, subeq
from .linalg import ComplexStructure, QuaternionStructure, orthonormalize


class SpecError(ValueError):
    pass


def parse_kv(text: str) -> dict:
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SpecError(f"line {lineno}: expected key = value, got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip().lower()
        value = value.strip()
        if not key:
            raise SpecError(f"line {lineno}: empty key")
        if key in out:
            raise SpecError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def check_keys(d: dict, allowed) -> None:
    unknown = sorted(set(d) - set(allowed))
    if unknown:
        raise SpecError(f"unknown keys: {', '.join(unknown)} (allowed: {', '.join(sorted(allowed))})")


def _get(d, key, conv, default=None, required=False):
    if key not in d:
        if required:
            raise SpecError(f"missing required key {key!r}")
        return default
    try:
        return conv(d[key])
    except SpecError:
        raise
    except Exception as exc:
        raise SpecError(f"bad value for {key!r}: {d[key]!r} ({exc})") from exc


def get_int(d, key, default=None, required=False):
    return _get(d, key, lambda v: int(v), default, required)


def get_float(d, key, default=None, required=False):
    def conv(v):
        if v.strip().lower() in ("inf", "infinity"):
            return math.inf
        return float(v)

    return _get(d, key, conv, default, required)


def get_str(d, key, default=None, required=False):
    return _get(d, key, lambda v: v.strip().lower(), default, required)


def get_vector(d, key, required=False):
    def conv(v):
        return np.array([float(x) for x in v.split(",") if x.strip() != ""])

    return _get(d, key, conv, None, required)


def get_matrix(d, key, n: int, required=False):
    def conv(v):
        vals = [float(x) for x in v.split(",") if x.strip() != ""]
        if len(vals) != n * n:
            raise SpecError(f"matrix {key!r} needs {n * n} entries, got {len(vals)}")
        return np.array(vals).reshape(n, n)

    return _get(d, key, conv, None, required)


def get_frame(d, key, required=False):
    def conv(v):
        cols = []
        for part in v.split(";"):
            part = part.strip()
            if part:
                cols.append([float(x) for x in part.split(",")])
        return orthonormalize(np.array(cols).T)

    return _get(d, key, conv, None, required)


# ---------------------------------------------------------------------------
# builders

_PROFILE_KINDS = ("orphant", "trace", "minmax", "min2", "pconvex")


def _profile(kind: str, m: int, p):
    if kind == "orphant":
        return subeq.orphant_profile(m)
    if kind == "trace":
        return subeq.trace_profile(m)
    if p is None:
        raise SpecError(f"kind {kind!r} needs key 'p'")
    if kind == "minmax":
        return subeq.minmax_profile(m, p)
    if kind == "min2":
        return subeq.min2_profile(m, p)
    if kind == "pconvex":
        if not 1.0 <= p <= m:
            raise SpecError(f"pconvex needs 1 <= p <= n, got p={p}, n={m}")
        return subeq.pconvex_profile(m, p)
    raise SpecError(f"unknown profile kind {kind!r}")


SUBEQ_KEYS = ("kind", "n", "p", "delta", "base", "structure", "branch")


def build_subequation(d: dict) -> subeq.Subequation:
    kind = get_str(d, "kind", required=True)
    n = get_int(d, "n", required=True)
    p = get_float(d, "p")
    delta = get_float(d, "delta")
    base_kind = get_str(d, "base")
    structure = get_str(d, "structure")

    if kind.startswith("garding:"):
        op = build_garding(dict(d, kind=kind))
        branch = get_int(d, "branch", default=1)
        return subeq.garding_branch(op, branch)

    if kind in _PROFILE_KINDS:
        return subeq.from_profile(_profile(kind, n, p))
    if kind == "expansion":
        if delta is None:
            raise SpecError("expansion needs key 'delta'")
        base = subeq.from_profile(_profile(base_kind or "orphant", n, p))
        return subeq.expand(base, delta)
    if kind == "dual":
        base = subeq.from_profile(_profile(base_kind or "orphant", n, p))
        return subeq.dual(base)
    if kind in ("complex_lift", "quaternion_lift"):
        group = 2 if kind == "complex_lift" else 4
        if n % group != 0:
            raise SpecError(f"{kind} needs n divisible by {group}")
        m = n // group
        profile = _profile(base_kind or "orphant", m, p)
        if kind == "complex_lift":
            return subeq.complex_lift(profile, ComplexStructure.standard(m))
        return subeq.quaternion_lift(profile, QuaternionStructure.standard(m))
    if kind == "lagrangian":
        if n % 2:
            raise SpecError("lagrangian needs even n")
        return subeq.lagrangian_cone(ComplexStructure.standard(n // 2))
    if kind in ("isotropic", "isotropic_dual"):
        if n % 2:
            raise SpecError("isotropic needs even n")
        if p is None:
            raise SpecError("isotropic needs key 'p'")
        return subeq.isotropic_cone(
            ComplexStructure.standard(n // 2), int(p), dual_variant=kind == "isotropic_dual"
        )
    raise SpecError(f"unknown subequation kind {kind!r}")


GARDING_KEYS = ("kind", "n", "p", "delta", "base", "k", "structure", "branch")


def build_garding(d: dict) -> garding.GardingOperator:
    kind = get_str(d, "kind", required=True)
    if not kind.startswith("garding:"):
        raise SpecError("operator kind must start with 'garding:'")
    kind = kind.split(":", 1)[1]
    n = get_int(d, "n", required=True)

    def base_op():
        base_kind = get_str(d, "base", default="det_real")
        return build_garding({"kind": f"garding:{base_kind}", "n": str(n)})

    if kind == "det_real":
        return garding.det_real(n)
    if kind == "det_complex":
        if n % 2:
            raise SpecError("det_complex needs even n")
        return garding.det_complex(ComplexStructure.standard(n // 2))
    if kind == "det_quaternionic":
        if n % 4:
            raise SpecError("det_quaternionic needs n divisible by 4")
        return garding.det_quaternionic(QuaternionStructure.standard(n // 4))
    if kind == "elementary_symmetric":
        k = get_int(d, "k", required=True)
        return garding.elementary_symmetric(base_op(), k)
    if kind == "pconvexity":
        p = get_float(d, "p", required=True)
        return garding.pconvexity(base_op(), p)
    if kind == "delta_reg":
        delta = get_float(d, "delta", required=True)
        return garding.delta_reg(base_op(), delta)
    if kind == "lag":
        if n % 2:
            raise SpecError("lag needs even n")
        return garding.lag_operator(ComplexStructure.standard(n // 2))
    if kind == "iso":
        if n % 2:
            raise SpecError("iso needs even n")
        p = get_int(d, "p", required=True)
        return garding.iso_operator(ComplexStructure.standard(n // 2), p)
    if kind == "corrupted":
        return garding.corrupted_det(n)
    raise SpecError(f"unknown operator kind {kind!r}")


FAMILY_KEYS = ("family", "n", "p", "k", "costheta", "invariant")


def build_family(d: dict) -> grassmann.PlaneFamily:
    name = get_str(d, "family", required=True)
    n = get_int(d, "n", required=True)
    if name == "full_real":
        p = get_int(d, "p", required=True)
        return grassmann.full_real(n, p)
    if name in ("complex", "complex_planes"):
        if n % 2:
            raise SpecError("complex planes need even n")
        k = get_int(d, "k", required=True)
        return grassmann.complex_planes(k, ComplexStructure.standard(n // 2))
    if name in ("quaternionic", "quaternionic_planes"):
        if n % 4:
            raise SpecError("quaternionic planes need n divisible by 4")
        k = get_int(d, "k", required=True)
        return grassmann.quaternionic_planes(k, QuaternionStructure.standard(n // 4))
    if name == "lagrangian":
        if n % 2:
            raise SpecError("lagrangian needs even n")
        return grassmann.lagrangian(ComplexStructure.standard(n // 2))
    if name == "isotropic":
        if n % 2:
            raise SpecError("isotropic needs even n")
        p = get_int(d, "p", required=True)
        return grassmann.isotropic(p, ComplexStructure.standard(n // 2))
    if name == "kahler_orbit":
        if n % 2:
            raise SpecError("kahler orbits need even n")
        c = get_float(d, "costheta", required=True)
        return grassmann.kahler_orbit(c, ComplexStructure.standard(n // 2))
    if name == "quat_orbit":
        if n % 4:
            raise SpecError("quaternionic orbits need n divisible by 4")
        inv = get_float(d, "invariant", required=True)
        return grassmann.quat_orbit(inv, QuaternionStructure.standard(n // 4))
    raise SpecError(f"unknown family {name!r}")


FIELD_KEYS = ("field", "catalog", "n", "p", "theta")


def build_field(d: dict) -> fields.ScalarField:
    n = get_int(d, "n", required=True)
    expr = d.get("field")
    name = get_str(d, "catalog")
    if (expr is None) == (name is None):
        raise SpecError("provide exactly one of 'field' or 'catalog'")
    if expr is not None:
        return fields.parse_field_expression(expr, n)
    kwargs = {}
    if name in ("kernel", "kernel_plus_square", "kernel_shifted"):
        p = get_float(d, "p")
        if p is not None:
            kwargs["p"] = p
        if name == "kernel":
            theta = get_float(d, "theta")
            if theta is not None:
                kwargs["theta"] = theta
    return fields.catalog_field(name, n, **kwargs)


SCHEDULE_KEYS = ("p", "radii", "ns", "nb", "annulus", "seed")


def build_schedule(d: dict, seed: int) -> flow.FlowSchedule:
    p = get_float(d, "p", required=True)
    radii_v = get_vector(d, "radii")
    radii = tuple(radii_v) if radii_v is not None else flow.geometric_radii(1, 10)
    annulus_v = get_vector(d, "annulus")
    annulus = tuple(annulus_v) if annulus_v is not None else (0.5, 1.0)
    if len(annulus) != 2:
        raise SpecError("annulus needs exactly two values")
    return flow.FlowSchedule(
        p=p,
        radii=radii,
        ns=get_int(d, "ns", default=10000),
        nb=get_int(d, "nb", default=4096),
        annulus=annulus,
        seed=seed,
    )
