"""Structured p-plane families, orbit invariants, and chain transitivity.

Plane families are samplers of orthonormal frames subject to a structural
predicate (complex/quaternionic invariance, isotropy, a fixed orbit
invariant).  The transitivity checker looks for a chain of family planes
joining two vectors with consecutive nontrivial intersections.  Uniform
sampling alone cannot find chains in families whose generic pairwise
intersection is trivial, so the checker also constructs planes through
prescribed vectors and bridge vectors compatible with both endpoints, which
mirrors how such chains are actually built.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._kernels import pairwise_intersection_dims
from .linalg import (
    ComplexStructure,
    QuaternionStructure,
    complete_orthonormal,
    frame,
    orthonormalize,
    random_frame,
    unit_vector,
)
from .rng import derive_rng

PREDICATE_TOL = 1e-8
CONTAIN_TOL = 1e-9


@dataclass(frozen=True)
class PlaneFamily:
    kind: str
    n: int  # ambient real dimension
    p: int  # plane dimension
    structure: object = None
    param: float = 0.0
    frames: tuple = ()

    def describe(self) -> dict:
        out = {"kind": self.kind, "n": self.n, "p": self.p}
        if self.kind in ("kahler_orbit",):
            out["costheta"] = self.param
        if self.kind in ("quat_orbit",):
            out["invariant"] = self.param
        return out


def full_real(n: int, p: int) -> PlaneFamily:
    if not 1 <= p <= n:
        raise ValueError("plane dimension out of range")
    return PlaneFamily("full_real", n, p)


def complex_planes(k: int, s: ComplexStructure) -> PlaneFamily:
    if not 1 <= k <= s.lines:
        raise ValueError("complex plane dimension out of range")
    return PlaneFamily("complex_planes", s.dim, 2 * k, structure=s, param=float(k))


def quaternionic_planes(k: int, s: QuaternionStructure) -> PlaneFamily:
    if not 1 <= k <= s.lines:
        raise ValueError("quaternionic plane dimension out of range")
    return PlaneFamily("quaternionic_planes", s.dim, 4 * k, structure=s, param=float(k))


def lagrangian(s: ComplexStructure) -> PlaneFamily:
    return PlaneFamily("lagrangian", s.dim, s.lines, structure=s)


def isotropic(p: int, s: ComplexStructure) -> PlaneFamily:
    if not 1 <= p <= s.lines:
        raise ValueError("isotropic rank out of range")
    return PlaneFamily("isotropic", s.dim, p, structure=s)


def kahler_orbit(costheta: float, s: ComplexStructure) -> PlaneFamily:
    if not 0.0 <= costheta <= 1.0:
        raise ValueError("costheta must lie in [0, 1]")
    return PlaneFamily("kahler_orbit", s.dim, 2, structure=s, param=float(costheta))


def quat_orbit(invariant: float, s: QuaternionStructure) -> PlaneFamily:
    if not 0.0 <= invariant <= 1.0:
        raise ValueError("orbit invariant must lie in [0, 1]")
    return PlaneFamily("quat_orbit", s.dim, 2, structure=s, param=float(invariant))


def explicit(frames_list) -> PlaneFamily:
    frames_t = tuple(frame(w) for w in frames_list)
    if not frames_t:
        raise ValueError("explicit family must contain at least one plane")
    n, p = frames_t[0].shape
    if any(w.shape != (n, p) for w in frames_t):
        raise ValueError("all frames must share the same shape")
    return PlaneFamily("explicit", n, p, frames=frames_t)


# ---------------------------------------------------------------------------
# invariants and predicates


def intersection_dim(w1, w2, tol: float = 1e-8) -> int:
    """dim(span W1 ∩ span W2) = p1 + p2 - rank[W1 | W2]."""
    w1 = frame(w1)
    w2 = frame(w2)
    if w1.shape[0] != w2.shape[0]:
        raise ValueError("frames live in different ambient dimensions")
    stacked = np.hstack([w1, w2])
    sv = np.linalg.svd(stacked, compute_uv=False)
    rank = int((sv > tol * sv[0]).sum()) if sv[0] > 0 else 0
    return w1.shape[1] + w2.shape[1] - rank


def kahler_angle_invariant(w, s: ComplexStructure) -> float:
    """|<J w1, w2>| for the stored orthonormal basis of a real 2-plane."""
    w = frame(w)
    if w.shape[1] != 2:
        raise ValueError("the angle invariant is defined for 2-planes")
    return abs(float(w[:, 1] @ (s.j @ w[:, 0])))


def quaternionic_invariant(w, s: QuaternionStructure) -> float:
    """Squared distance of w2 from the quaternion line through w1."""
    w = frame(w)
    if w.shape[1] != 2:
        raise ValueError("the orbit invariant is defined for 2-planes")
    x, v = w[:, 0], w[:, 1]
    val = 1.0 - float(v @ x) ** 2
    for e in s.units:
        val -= float(v @ (e @ x)) ** 2
    return val


def isotropy_check(w, s: ComplexStructure, tol: float = PREDICATE_TOL):
    """Max symplectic pairing over frame pairs; isotropic iff below tol."""
    w = frame(w)
    pair = w.T @ (s.j @ w)
    violation = float(np.abs(pair).max())
    return violation <= tol, violation


def family_predicate(family: PlaneFamily, w, tol: float = PREDICATE_TOL):
    """Check whether a frame's span belongs to the family; returns (ok, violation)."""
    w = frame(w)
    if w.shape != (family.n, family.p):
        return False, float("inf")
    kind = family.kind
    if kind == "full_real":
        return True, 0.0
    if kind in ("complex_planes", "quaternionic_planes"):
        units = (family.structure.j,) if kind == "complex_planes" else family.structure.units
        proj = w @ w.T
        violation = 0.0
        for e in units:
            ew = e @ w
            violation = max(violation, float(np.abs(ew - proj @ ew).max()))
        return violation <= tol, violation
    if kind in ("lagrangian", "isotropic"):
        return isotropy_check(w, family.structure, tol)
    if kind == "kahler_orbit":
        violation = abs(kahler_angle_invariant(w, family.structure) - family.param)
        return violation <= tol, violation
    if kind == "quat_orbit":
        violation = abs(quaternionic_invariant(w, family.structure) - family.param)
        return violation <= tol, violation
    if kind == "explicit":
        best = min(float(np.abs(w @ w.T - f @ f.T).max()) for f in family.frames)
        return best <= tol, best
    raise ValueError(f"unknown family kind {kind!r}")


# ---------------------------------------------------------------------------
# sampling


def _unit_orthogonal(rng, n, constraints, attempts: int = 100) -> np.ndarray:
    for _ in range(attempts):
        v = rng.standard_normal(n)
        for u in constraints:
            v -= (u @ v) * u
        nrm = np.linalg.norm(v)
        if nrm > 1e-8:
            return v / nrm
    raise ValueError("rejection/completion sampling budget exhausted")


def _structured_span(units, anchors, count, rng, first=None):
    """Grow `count` anchor vectors, each orthogonal to the unit-orbit of the
    previous ones; `anchors` accumulates v plus its unit images."""
    cols = []
    for i in range(count):
        if i == 0 and first is not None:
            v = unit_vector(first)
            resid = max(abs(v @ u) for u in anchors) if anchors else 0.0
            if resid > 1e-12:
                raise ValueError("vector incompatible with existing constraints")
        else:
            v = _unit_orthogonal(rng, units[0].shape[0] if units else len(anchors[0]), anchors)
        cols.append(v)
        anchors.append(v)
        for e in units:
            anchors.append(e @ v)
    return cols


def _sample_frame(family: PlaneFamily, rng, first=None) -> np.ndarray:
    kind = family.kind
    n = family.n
    if kind == "full_real":
        if first is None:
            return random_frame(rng, n, family.p)
        base = unit_vector(first)[:, None]
        return complete_orthonormal(base, family.p - 1, rng)
    if kind == "complex_planes":
        s = family.structure
        k = int(family.param)
        anchors: list = []
        vs = _structured_span((s.j,), anchors, k, rng, first=first)
        cols = []
        for v in vs:
            cols.extend([v, s.j @ v])
        return np.column_stack(cols)
    if kind == "quaternionic_planes":
        s = family.structure
        k = int(family.param)
        anchors = []
        vs = _structured_span(s.units, anchors, k, rng, first=first)
        cols = []
        for v in vs:
            cols.append(v)
            cols.extend(e @ v for e in s.units)
        return np.column_stack(cols)
    if kind in ("lagrangian", "isotropic"):
        s = family.structure
        count = family.p
        anchors = []
        vs = _structured_span((s.j,), anchors, count, rng, first=first)
        return np.column_stack(vs)
    if kind == "kahler_orbit":
        s = family.structure
        c = family.param
        x = unit_vector(first) if first is not None else _unit_orthogonal(rng, n, [])
        jx = s.j @ x
        sin = float(np.sqrt(max(0.0, 1.0 - c * c)))
        if sin == 0.0:
            v = jx
        else:
            w = _unit_orthogonal(rng, n, [x, jx])
            v = c * jx + sin * w
        return np.column_stack([x, v])
    if kind == "quat_orbit":
        s = family.structure
        inv = family.param
        x = unit_vector(first) if first is not None else _unit_orthogonal(rng, n, [])
        line = [x] + [e @ x for e in s.units]
        u = _unit_orthogonal(rng, n, [x], attempts=100)
        # in-line unit direction: project onto span{Ix, Jx, Kx}
        coeffs = np.array([u @ (e @ x) for e in s.units])
        if np.linalg.norm(coeffs) < 1e-8:
            u_line = s.units[0] @ x
        else:
            coeffs = coeffs / np.linalg.norm(coeffs)
            u_line = sum(c * (e @ x) for c, e in zip(coeffs, s.units))
        w = _unit_orthogonal(rng, n, line)
        v = np.sqrt(max(0.0, 1.0 - inv)) * u_line + np.sqrt(inv) * w
        return np.column_stack([x, unit_vector(v)])
    if kind == "explicit":
        if first is None:
            idx = int(rng.integers(len(family.frames)))
            return np.array(family.frames[idx])
        x = unit_vector(first)
        for f in family.frames:
            if np.linalg.norm(f @ (f.T @ x) - x) <= CONTAIN_TOL:
                return np.array(f)
        raise ValueError("no explicit plane contains the requested vector")
    raise ValueError(f"unknown family kind {kind!r}")


def sample_plane(family: PlaneFamily, rng) -> np.ndarray:
    """Draw a frame from the family; the result always passes the predicate."""
    w = _sample_frame(family, rng)
    ok, violation = family_predicate(family, w)
    if not ok:
        raise RuntimeError(f"sampled plane violates the family predicate ({violation:.3e})")
    return w


def plane_through(family: PlaneFamily, x, rng) -> np.ndarray:
    """A family plane containing the given vector (rejection/completion)."""
    w = _sample_frame(family, rng, first=unit_vector(x))
    ok, violation = family_predicate(family, w)
    if not ok:
        raise RuntimeError(f"constructed plane violates the family predicate ({violation:.3e})")
    return w


# ---------------------------------------------------------------------------
# plane-through-pair and bridge constructions


def _contains(w, v, tol: float = CONTAIN_TOL) -> bool:
    return float(np.linalg.norm(w @ (w.T @ v) - v)) <= tol


def _pair_span(a, b):
    """Orthonormal basis of span{a, b}, or None when (anti)parallel."""
    if abs(float(a @ b)) > 1.0 - 1e-12:
        return None
    return orthonormalize(np.column_stack([a, b]))


def plane_through_pair(family: PlaneFamily, a, b, rng) -> Optional[np.ndarray]:
    """A family plane containing both vectors, when one exists; else None."""
    a = unit_vector(a)
    b = unit_vector(b)
    if abs(float(a @ b)) > 1.0 - 1e-12:
        return plane_through(family, a, rng)
    kind = family.kind
    if kind == "full_real":
        if family.p < 2:
            return None
        base = _pair_span(a, b)
        return complete_orthonormal(base, family.p - 2, rng)
    if kind == "complex_planes":
        s = family.structure
        k = int(family.param)
        b_perp = b - (a @ b) * a - ((s.j @ a) @ b) * (s.j @ a)
        if np.linalg.norm(b_perp) <= 1e-10:
            return plane_through(family, a, rng)  # b lies in the line through a
        if k < 2:
            return None
        anchors = [a, s.j @ a]
        v2 = unit_vector(b_perp)
        anchors.extend([v2, s.j @ v2])
        vs = [a, v2]
        if k > 2:
            vs.extend(_structured_span((s.j,), anchors, k - 2, rng))
        cols = []
        for v in vs:
            cols.extend([v, s.j @ v])
        w = np.column_stack(cols)
        if not _contains(w, b):
            return None
        return w
    if kind == "quaternionic_planes":
        s = family.structure
        k = int(family.param)
        line = [a] + [e @ a for e in s.units]
        b_perp = b.copy()
        for u in line:
            b_perp -= (u @ b_perp) * u
        if np.linalg.norm(b_perp) <= 1e-10:
            return plane_through(family, a, rng)
        if k < 2:
            return None
        v2 = unit_vector(b_perp)
        anchors = line + [v2] + [e @ v2 for e in s.units]
        vs = [a, v2]
        if k > 2:
            vs.extend(_structured_span(s.units, anchors, k - 2, rng))
        cols = []
        for v in vs:
            cols.append(v)
            cols.extend(e @ v for e in s.units)
        w = np.column_stack(cols)
        if not _contains(w, b):
            return None
        return w
    if kind in ("lagrangian", "isotropic"):
        s = family.structure
        if abs(float((s.j @ a) @ b)) > 1e-9:
            return None  # the pair spans a non-isotropic plane
        base = _pair_span(a, b)
        if base is None:
            return plane_through(family, a, rng)
        count = family.p - 2
        if count < 0:
            return None
        anchors = [base[:, 0], s.j @ base[:, 0], base[:, 1], s.j @ base[:, 1]]
        extra = _structured_span((s.j,), anchors, count, rng) if count else []
        return np.column_stack([base[:, 0], base[:, 1]] + extra)
    if kind == "kahler_orbit":
        if abs(float(a @ b)) > 1e-9:
            return None  # exact constructions always supply orthogonal pairs
        inv = abs(float((family.structure.j @ a) @ b))
        if abs(inv - family.param) > 1e-9:
            return None
        return np.column_stack([a, unit_vector(b - (a @ b) * a)])
    if kind == "quat_orbit":
        if abs(float(a @ b)) > 1e-9:
            return None
        w = np.column_stack([a, unit_vector(b - (a @ b) * a)])
        if abs(quaternionic_invariant(w, family.structure) - family.param) > 1e-8:
            return None
        return w
    if kind == "explicit":
        for f in family.frames:
            if _contains(f, a) and _contains(f, b):
                return np.array(f)
        return None
    raise ValueError(f"unknown family kind {kind!r}")


def bridge_vector(family: PlaneFamily, x, y, rng) -> Optional[np.ndarray]:
    """A vector z admitting family planes through {x, z} and {z, y}."""
    x = unit_vector(x)
    y = unit_vector(y)
    kind = family.kind
    n = family.n
    if kind == "full_real":
        if family.p < 2 or n < 3:
            return None
        return _unit_orthogonal(rng, n, list(orthonormalize(np.column_stack([x, y])).T))
    if kind in ("lagrangian", "isotropic"):
        if family.p < 2:
            return None
        s = family.structure
        rows = np.vstack([(s.j @ x), (s.j @ y)])
        null = _nullspace(rows)
        if null.shape[1] == 0:
            return None
        for _ in range(50):
            z = null @ rng.standard_normal(null.shape[1])
            nrm = np.linalg.norm(z)
            if nrm < 1e-10:
                continue
            z = z / nrm
            if abs(z @ x) < 1.0 - 1e-8 and abs(z @ y) < 1.0 - 1e-8:
                return z
        return None
    if kind == "kahler_orbit":
        c = family.param
        if c >= 1.0 - 1e-12:
            return None  # complex lines: no freedom
        s = family.structure
        basis_cols = []
        for v in (x, s.j @ x, y, s.j @ y):
            try:
                basis_cols = list(orthonormalize(np.column_stack(basis_cols + [v])).T) if basis_cols else [v]
            except ValueError:
                continue
        vmat = np.column_stack(basis_cols)
        best = None
        for s1 in (1.0, -1.0):
            for s2 in (1.0, -1.0):
                targets = np.array([0.0, 0.0, s1 * c, s2 * c])
                mrows = np.vstack([x, y, s.j @ x, s.j @ y]) @ vmat
                alpha, *_ = np.linalg.lstsq(mrows, targets, rcond=None)
                if np.linalg.norm(mrows @ alpha - targets) > 1e-10:
                    continue
                nrm2 = float(alpha @ alpha)
                if nrm2 <= 1.0 + 1e-12 and (best is None or nrm2 < best[0]):
                    best = (nrm2, alpha)
        if best is None:
            return None
        nrm2, alpha = best
        z = vmat @ alpha
        rest = max(0.0, 1.0 - nrm2)
        if rest > 1e-14:
            if vmat.shape[1] >= n:
                return None
            w = _unit_orthogonal(rng, n, list(vmat.T))
            z = z + np.sqrt(rest) * w
        nrm = np.linalg.norm(z)
        if nrm < 1e-10:
            return None
        return z / nrm
    if kind == "quat_orbit":
        return _quat_orbit_bridge(family, x, y, rng)
    return None


def _nullspace(rows: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    _, sv, vt = np.linalg.svd(rows, full_matrices=True)
    rank = int((sv > tol * max(1.0, sv[0])).sum()) if sv.size else 0
    return vt[rank:].T


def _quat_orbit_bridge(family: PlaneFamily, x, y, rng):
    from scipy.optimize import minimize

    s = family.structure
    inv = family.param
    if inv <= 1e-12:
        return None  # planes inside a quaternion line never leave it
    n = family.n
    basis = _nullspace(np.vstack([x, y]))
    if basis.shape[1] < 2:
        return None
    target = 1.0 - inv

    units = [np.column_stack([e @ x for e in s.units]), np.column_stack([e @ y for e in s.units])]

    def objective(c):
        z = basis @ c
        nrm = np.linalg.norm(z)
        if nrm < 1e-12:
            return 1.0
        z = z / nrm
        r = 0.0
        for u in units:
            r += (float(((u.T @ z) ** 2).sum()) - target) ** 2
        return r

    for attempt in range(8):
        c0 = derive_rng(int(rng.integers(2**62)), "quat-bridge", attempt).standard_normal(basis.shape[1])
        res = minimize(objective, c0, method="BFGS", options={"gtol": 1e-14, "maxiter": 400})
        if res.fun < 1e-18:
            z = basis @ res.x
            return z / np.linalg.norm(z)
    return None


# ---------------------------------------------------------------------------
# transitivity


@dataclass
class TransitivityReport:
    verdict: str  # 'chain-found' | 'no-chain-at-budget'
    chain: list = field(default_factory=list)
    chain_intersections: list = field(default_factory=list)
    samples_used: int = 0
    seed: int = 0
    budget: int = 0
    histogram: dict = field(default_factory=dict)
    exhaustive: bool = False
    family: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "chain": [[float(v) for v in w.ravel()] for w in self.chain],
            "chain_shapes": [list(w.shape) for w in self.chain],
            "chain_intersections": [int(d) for d in self.chain_intersections],
            "samples_used": self.samples_used,
            "seed": self.seed,
            "budget": self.budget,
            "histogram": {str(k): int(v) for k, v in sorted(self.histogram.items())},
            "exhaustive": self.exhaustive,
            "family": self.family,
        }


def _verify_chain(family, chain, x, y):
    if not chain:
        raise RuntimeError("empty chain")
    if not _contains(chain[0], x):
        raise RuntimeError("chain does not start at the first vector")
    if not _contains(chain[-1], y):
        raise RuntimeError("chain does not end at the second vector")
    dims = []
    for w in chain:
        ok, violation = family_predicate(family, w)
        if not ok:
            raise RuntimeError(f"chain plane violates the family predicate ({violation:.3e})")
    for wa, wb in zip(chain, chain[1:]):
        d = intersection_dim(wa, wb)
        if d < 1:
            raise RuntimeError("consecutive chain planes have trivial intersection")
        dims.append(d)
    return dims


def _slerp(x, y, t, rng):
    cos = float(np.clip(x @ y, -1.0, 1.0))
    if abs(cos) > 1.0 - 1e-10:
        return unit_vector(x + 1e-3 * rng.standard_normal(len(x)))
    ang = np.arccos(cos)
    v = (np.sin((1 - t) * ang) * x + np.sin(t * ang) * y) / np.sin(ang)
    return unit_vector(v)


def _bridge_chain(family, x, y, rng, depth, counter):
    if depth <= 0:
        return None
    z = bridge_vector(family, x, y, rng)
    if z is not None:
        wa = plane_through_pair(family, x, z, rng)
        wb = plane_through_pair(family, z, y, rng)
        counter[0] += 2
        if wa is not None and wb is not None:
            return [wa, wb]
    if family.kind in ("kahler_orbit", "quat_orbit", "lagrangian", "isotropic"):
        mid = _slerp(x, y, 0.5, rng)
        left = _bridge_chain(family, x, mid, rng, depth - 1, counter)
        if left is None:
            return None
        right = _bridge_chain(family, mid, y, rng, depth - 1, counter)
        if right is None:
            return None
        return left + right
    return None


def transitivity_check(family: PlaneFamily, x, y, budget: int, seed: int) -> TransitivityReport:
    """Search for a chain of family planes joining x to y.

    'no-chain-at-budget' is probabilistic evidence, not a proof, except for
    explicit families, which are exhaustively pairwise-checked.
    """
    if budget < 2:
        raise ValueError("budget must be >= 2")
    x = unit_vector(x)
    y = unit_vector(y)
    rng = derive_rng(seed, "transitivity", family.kind, family.n, family.p)
    counter = [0]

    def emit(chain):
        dims = _verify_chain(family, chain, x, y)
        return TransitivityReport(
            verdict="chain-found",
            chain=chain,
            chain_intersections=dims,
            samples_used=counter[0],
            seed=seed,
            budget=budget,
            family=family.describe(),
        )

    w_x = plane_through(family, x, rng)
    counter[0] += 1
    if _contains(w_x, y):
        return emit([w_x])
    w_y = plane_through(family, y, rng)
    counter[0] += 1
    if intersection_dim(w_x, w_y) >= 1:
        return emit([w_x, w_y])

    direct = plane_through_pair(family, x, y, rng)
    counter[0] += 1
    if direct is not None:
        return emit([direct])

    chain = _bridge_chain(family, x, y, rng, depth=6, counter=counter)
    if chain is not None:
        return emit(chain)

    # sampled graph fallback: planes through anchors drawn from known planes
    nodes = [w_x, w_y]
    while counter[0] < budget:
        if family.kind == "explicit" and len(nodes) >= len(family.frames) + 2:
            break
        if rng.uniform() < 0.5 and family.kind != "explicit":
            host = nodes[int(rng.integers(len(nodes)))]
            coeff = rng.standard_normal(host.shape[1])
            anchor = unit_vector(host @ coeff)
            try:
                w = plane_through(family, anchor, rng)
            except ValueError:
                w = sample_plane(family, rng)
        else:
            w = sample_plane(family, rng)
        counter[0] += 1
        nodes.append(w)

    if family.kind == "explicit":
        nodes = [w_x, w_y] + [np.array(f) for f in family.frames]

    dims = pairwise_intersection_dims(np.stack(nodes))
    path = _shortest_path(dims >= 1, 0, 1)
    if path is not None:
        return emit([nodes[i] for i in path])

    pair_dims = dims[np.triu_indices(len(nodes), k=1)]
    hist: dict = {}
    for d in pair_dims:
        hist[int(d)] = hist.get(int(d), 0) + 1
    return TransitivityReport(
        verdict="no-chain-at-budget",
        samples_used=counter[0],
        seed=seed,
        budget=budget,
        histogram=hist,
        exhaustive=family.kind == "explicit",
        family=family.describe(),
    )


def _shortest_path(adj: np.ndarray, start: int, goal: int):
    from collections import deque

    n = adj.shape[0]
    prev = np.full(n, -1, dtype=int)
    seen = np.zeros(n, dtype=bool)
    seen[start] = True
    queue = deque([start])
    while queue:
        i = queue.popleft()
        if i == goal:
            path = [i]
            while path[-1] != start:
                path.append(int(prev[path[-1]]))
            return path[::-1]
        for j in np.flatnonzero(adj[i]):
            if not seen[j] and j != i:
                seen[j] = True
                prev[j] = i
                queue.append(int(j))
    return None


# ---------------------------------------------------------------------------
# group elements (used by the orbit-soundness tests)


def random_structure_unitary(s: ComplexStructure, rng) -> np.ndarray:
    """Random orthogonal matrix commuting with the complex structure."""

    def full_frame():
        anchors: list = []
        vs = _structured_span((s.j,), anchors, s.lines, rng)
        cols = []
        for v in vs:
            cols.extend([v, s.j @ v])
        return np.column_stack(cols)

    return full_frame() @ full_frame().T


def random_structure_symplectic(s: QuaternionStructure, rng) -> np.ndarray:
    """Random orthogonal matrix commuting with I, J and K."""

    def full_frame():
        anchors: list = []
        vs = _structured_span(s.units, anchors, s.lines, rng)
        cols = []
        for v in vs:
            cols.append(v)
            cols.extend(e @ v for e in s.units)
        return np.column_stack(cols)

    return full_frame() @ full_frame().T
