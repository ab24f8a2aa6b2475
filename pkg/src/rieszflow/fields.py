"""Scalar test fields: the fixed catalog and a small expression grammar.

Evaluators are vectorized maps from (N, dim) point arrays to (N,) values,
floored at FLOOR in place of -infinity.  Catalog entries carry metadata used
by the flow engine: a known density, a known tangent field, structure tags
and the natural kernel parameter.
"""

import ast
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

FLOOR = -1e12


def _floored(fn):
    def wrapped(pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = np.asarray(fn(pts), dtype=np.float64)
        vals = np.where(np.isnan(vals), FLOOR, vals)
        return np.maximum(vals, FLOOR)

    return wrapped


@dataclass(frozen=True)
class ScalarField:
    dim: int
    field_id: str
    evaluate: Callable[[np.ndarray], np.ndarray]
    density: Optional[float] = None
    tangent: Optional["ScalarField"] = None
    tags: frozenset = frozenset()
    kernel_p: Optional[float] = None

    def __call__(self, pts) -> np.ndarray:
        return self.evaluate(pts)


def make_field(dim, field_id, fn, density=None, tangent=None, tags=(), kernel_p=None) -> ScalarField:
    return ScalarField(
        dim=int(dim),
        field_id=str(field_id),
        evaluate=_floored(fn),
        density=density,
        tangent=tangent,
        tags=frozenset(tags),
        kernel_p=kernel_p,
    )


def kernel_profile(p: float, t: np.ndarray) -> np.ndarray:
    """Radial kernel profile: t^(2-p), log t, or -t^(2-p)."""
    t = np.asarray(t, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        if p < 2.0:
            return t ** (2.0 - p)
        if p == 2.0:
            return np.log(t)
        return -(t ** (2.0 - p))


# ---------------------------------------------------------------------------
# catalog


def kernel_field(n: int, p: float, theta: float = 1.0) -> ScalarField:
    fid = f"kernel(p={p},theta={theta},n={n})"
    fld = make_field(
        n,
        fid,
        lambda pts: theta * kernel_profile(p, np.linalg.norm(pts, axis=1)),
        density=theta,
        tags=("radial",),
        kernel_p=p,
    )
    return ScalarField(**{**fld.__dict__, "tangent": fld})


def kernel_plus_square(n: int, p: float) -> ScalarField:
    return make_field(
        n,
        f"kernel_plus_square(p={p},n={n})",
        lambda pts: kernel_profile(p, np.linalg.norm(pts, axis=1)) + (pts**2).sum(axis=1),
        density=1.0,
        tangent=kernel_field(n, p),
        tags=("radial",),
        kernel_p=p,
    )


def kernel_shifted(n: int, p: float) -> ScalarField:
    # homogeneity negative control
    return make_field(
        n,
        f"kernel_shifted(p={p},n={n})",
        lambda pts: kernel_profile(p, np.linalg.norm(pts, axis=1)) + 1.0,
        kernel_p=p,
    )


def log_modulus_z1(m: int) -> ScalarField:
    """log |z_1| on C^m; coordinates are interleaved (x1, y1, x2, y2, ...)."""
    fld = make_field(
        2 * m,
        f"log_abs_z1(m={m})",
        lambda pts: 0.5 * np.log(pts[:, 0] ** 2 + pts[:, 1] ** 2),
        density=1.0,
        tags=("complex-psh",),
        kernel_p=2.0,
    )
    return ScalarField(**{**fld.__dict__, "tangent": fld})


def max_log_modulus(m: int) -> ScalarField:
    def fn(pts):
        mods = pts[:, 0::2] ** 2 + pts[:, 1::2] ** 2
        return 0.5 * np.log(mods.max(axis=1))

    fld = make_field(2 * m, f"max_log_abs_z(m={m})", fn, density=1.0, tags=("complex-psh",), kernel_p=2.0)
    return ScalarField(**{**fld.__dict__, "tangent": fld})


def inverse_square_q1(m: int) -> ScalarField:
    """-1/|q_1|^2 on H^m; four consecutive coordinates per quaternion."""
    fld = make_field(
        4 * m,
        f"neg_inv_sq_q1(m={m})",
        lambda pts: -1.0 / (pts[:, :4] ** 2).sum(axis=1),
        density=1.0,
        tags=("quaternionic-psh",),
        kernel_p=4.0,
    )
    return ScalarField(**{**fld.__dict__, "tangent": fld})


def abs_coordinate(n: int, index: int = 0) -> ScalarField:
    fld = make_field(
        n,
        f"abs_x{index + 1}(n={n})",
        lambda pts: np.abs(pts[:, index]),
        tags=("convex",),
        kernel_p=1.0,
    )
    return ScalarField(**{**fld.__dict__, "tangent": fld})


def square_norm(n: int) -> ScalarField:
    zero = make_field(n, "zero", lambda pts: np.zeros(pts.shape[0]), kernel_p=1.0)
    return make_field(
        n,
        f"square_norm(n={n})",
        lambda pts: (pts**2).sum(axis=1),
        tangent=zero,
        tags=("convex", "smooth"),
        kernel_p=1.0,
    )


def max_affine(n: int, slopes, offsets) -> ScalarField:
    """max_i (<a_i, x> + b_i); the blow-up at 0 is the support function of the
    hull of the active slopes (b_i = 0)."""
    a = np.asarray(slopes, dtype=np.float64)
    b = np.asarray(offsets, dtype=np.float64)
    if a.ndim != 2 or a.shape[1] != n or a.shape[0] != b.size:
        raise ValueError("slopes must be (k, n) with matching offsets")
    if b.max() != 0.0:
        raise ValueError("normalized max-affine fields need max offset 0")
    active = a[b == 0.0]

    support = make_field(n, "support_fn", lambda pts: (pts @ active.T).max(axis=1), tags=("convex",), kernel_p=1.0)
    return make_field(
        n,
        f"max_affine(k={len(b)},n={n})",
        lambda pts: (pts @ a.T + b).max(axis=1),
        tangent=support,
        tags=("convex",),
        kernel_p=1.0,
    )


def halfspace_seminorm(n: int, direction) -> ScalarField:
    a = np.asarray(direction, dtype=np.float64)
    fld = make_field(
        n,
        f"halfspace_seminorm(n={n})",
        lambda pts: np.maximum(pts @ a, 0.0),
        tags=("convex",),
        kernel_p=1.0,
    )
    return ScalarField(**{**fld.__dict__, "tangent": fld})


CATALOG = {
    "kernel": lambda n, p=3.0, theta=1.0: kernel_field(n, p, theta),
    "kernel_plus_square": lambda n, p=3.0: kernel_plus_square(n, p),
    "kernel_shifted": lambda n, p=3.0: kernel_shifted(n, p),
    "logz1": lambda n: log_modulus_z1(_half(n, 2)),
    "maxlog": lambda n: max_log_modulus(_half(n, 2)),
    "invq1": lambda n: inverse_square_q1(_half(n, 4)),
    "absx1": lambda n: abs_coordinate(n, 0),
    "normsq": lambda n: square_norm(n),
}


def _half(n: int, k: int) -> int:
    if n % k != 0:
        raise ValueError(f"dimension {n} is not a multiple of {k}")
    return n // k


def catalog_field(name: str, n: int, **kwargs) -> ScalarField:
    key = name.strip().lower()
    if key not in CATALOG:
        raise ValueError(f"unknown catalog field {name!r}; known: {sorted(CATALOG)}")
    return CATALOG[key](n, **kwargs)


# ---------------------------------------------------------------------------
# expression grammar: coordinates x1..xn, norm, abs, log, max, min, + - * / **

_ALLOWED_CALLS = {"abs", "log", "max", "min", "sqrt"}


def parse_field_expression(expr: str, dim: int, field_id: Optional[str] = None) -> ScalarField:
    """Compile a restricted expression into a vectorized field.

    Grammar: numbers, coordinates x1..x{dim}, norm (the Euclidean norm of the
    point), abs/log/sqrt/max/min calls, +, -, *, /, ** with numeric exponent.
    """
    tree = ast.parse(expr, mode="eval")

    def compile_node(node):
        if isinstance(node, ast.Expression):
            return compile_node(node.body)
        if isinstance(node, ast.Constant):
            if not isinstance(node.value, (int, float)):
                raise ValueError("only numeric constants are allowed")
            val = float(node.value)
            return lambda pts: np.full(pts.shape[0], val)
        if isinstance(node, ast.Name):
            name = node.id.lower()
            if name == "norm":
                return lambda pts: np.linalg.norm(pts, axis=1)
            if name.startswith("x") and name[1:].isdigit():
                idx = int(name[1:]) - 1
                if not 0 <= idx < dim:
                    raise ValueError(f"coordinate {node.id} out of range for dimension {dim}")
                return lambda pts: pts[:, idx]
            raise ValueError(f"unknown name {node.id!r}")
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            inner = compile_node(node.operand)
            if isinstance(node.op, ast.USub):
                return lambda pts: -inner(pts)
            return inner
        if isinstance(node, ast.BinOp) and isinstance(node.op, (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)):
            left = compile_node(node.left)
            right = compile_node(node.right)
            op = node.op
            if isinstance(op, ast.Add):
                return lambda pts: left(pts) + right(pts)
            if isinstance(op, ast.Sub):
                return lambda pts: left(pts) - right(pts)
            if isinstance(op, ast.Mult):
                return lambda pts: left(pts) * right(pts)
            if isinstance(op, ast.Div):
                return lambda pts: left(pts) / right(pts)
            return lambda pts: left(pts) ** right(pts)
        if isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id.lower() not in _ALLOWED_CALLS:
                raise ValueError("only abs, log, sqrt, max and min calls are allowed")
            if node.keywords:
                raise ValueError("keyword arguments are not allowed")
            args = [compile_node(arg) for arg in node.args]
            name = node.func.id.lower()
            if name == "abs":
                _require_args(args, 1, "abs")
                return lambda pts: np.abs(args[0](pts))
            if name == "log":
                _require_args(args, 1, "log")
                return lambda pts: np.log(args[0](pts))
            if name == "sqrt":
                _require_args(args, 1, "sqrt")
                return lambda pts: np.sqrt(args[0](pts))
            if len(args) < 2:
                raise ValueError(f"{name} needs at least two arguments")
            reducer = np.maximum if name == "max" else np.minimum
            return lambda pts: _reduce(reducer, args, pts)
        raise ValueError(f"unsupported syntax: {ast.dump(node)}")

    fn = compile_node(tree)
    return make_field(dim, field_id or f"expr({expr})", fn)


def _require_args(args, count, name):
    if len(args) != count:
        raise ValueError(f"{name} takes exactly {count} argument(s)")


def _reduce(reducer, args, pts):
    out = args[0](pts)
    for a in args[1:]:
        out = reducer(out, a(pts))
    return out
