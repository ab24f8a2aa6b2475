"""Hyperbolic polynomial operators on symmetric matrices.

An operator here is a homogeneous degree-m polynomial M on Sym(R^n), positive
at the identity, such that s -> M(sI + A) has m real roots for every A.  Its
spectrum at A is the negated root list scaled by M(I)^(1/m); the scaling makes
the product of the spectrum equal M(A) and gives the derived operators below
the eigenvalue formulas one actually wants to read off (e.g. the trace-shifted
family reports lambda_j + (delta/n) tr A).
"""

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial.chebyshev import Chebyshev
from numpy.polynomial.polynomial import Polynomial

from .linalg import (
    ComplexStructure,
    QuaternionStructure,
    as_symmetric,
    eigenvalues_sorted,
    grouped_eigenvalues,
    hermitian_part_complex,
    hermitian_part_quaternionic,
    random_symmetric,
    skew_hermitian_eigenvalue_pairs,
)
from .rng import derive_rng


class HyperbolicityViolation(RuntimeError):
    """Root finding met complex roots beyond tolerance; carries the input."""

    def __init__(self, message: str, matrix: np.ndarray, residual: float):
        super().__init__(message)
        self.matrix = np.array(matrix)
        self.residual = float(residual)


@dataclass(frozen=True)
class GardingOperator:
    dim: int
    degree: int
    name: str
    fn: Callable[[np.ndarray], float]
    unit_value: float  # value at the identity, required positive
    # Exact factor values for product operators whose roots carry structural
    # high multiplicity (companion-matrix extraction cannot resolve those).
    spectrum_fn: Callable[[np.ndarray], np.ndarray] | None = None

    def evaluate(self, a) -> float:
        a = np.asarray(a, dtype=np.float64)
        if a.shape != (self.dim, self.dim):
            raise ValueError(f"operator expects {self.dim}x{self.dim} matrices")
        return float(self.fn(a))

    @property
    def unit_scale(self) -> float:
        return self.unit_value ** (1.0 / self.degree)


def _make(dim: int, degree: int, name: str, fn, spectrum_fn=None) -> GardingOperator:
    unit = float(fn(np.eye(dim)))
    if not unit > 0.0:
        raise ValueError(f"operator value at the identity must be positive, got {unit}")
    return GardingOperator(
        dim=dim, degree=degree, name=name, fn=fn, unit_value=unit, spectrum_fn=spectrum_fn
    )


# ---------------------------------------------------------------------------
# base operators


def det_real(n: int) -> GardingOperator:
    return _make(n, n, f"det_real(n={n})", lambda a: float(np.linalg.det(a)))


def det_complex(s: ComplexStructure) -> GardingOperator:
    m = s.lines

    def fn(a):
        lam = eigenvalues_sorted(hermitian_part_complex(a, s))
        scale = max(1.0, float(np.abs(lam).max()))
        return float(np.prod(grouped_eigenvalues(lam, 2, 1e-8 * scale)))

    return _make(s.dim, m, f"det_complex(m={m})", fn)


def det_quaternionic(s: QuaternionStructure) -> GardingOperator:
    m = s.lines

    def fn(a):
        lam = eigenvalues_sorted(hermitian_part_quaternionic(a, s))
        scale = max(1.0, float(np.abs(lam).max()))
        return float(np.prod(grouped_eigenvalues(lam, 4, 1e-8 * scale)))

    return _make(s.dim, m, f"det_quaternionic(m={m})", fn)


def m_lag_value(a, s: ComplexStructure) -> float:
    """Product over all sign patterns of tr(A)/2 +/- pair sums.

    The factor count is 2^m; refuse m > 12.
    """
    a = as_symmetric(a)
    m = s.lines
    if m > 12:
        raise ValueError("too many factors: 2^m with m > 12")
    lam = skew_hermitian_eigenvalue_pairs(a, s)
    t = float(np.trace(a))
    signs = np.array(list(itertools.product((1.0, -1.0), repeat=m)))
    return float(np.prod(t / 2.0 + signs @ lam))


def _lag_factors(a, s: ComplexStructure) -> np.ndarray:
    lam = skew_hermitian_eigenvalue_pairs(as_symmetric(a), s)
    t = float(np.trace(np.asarray(a)))
    signs = np.array(list(itertools.product((1.0, -1.0), repeat=s.lines)))
    return np.sort(t / 2.0 + signs @ lam)


def lag_operator(s: ComplexStructure) -> GardingOperator:
    m = s.lines
    return _make(
        s.dim,
        2**m,
        f"lag(m={m})",
        lambda a: m_lag_value(a, s),
        spectrum_fn=lambda a: _lag_factors(a, s),
    )


def m_iso_value(a, s: ComplexStructure, p: int) -> float:
    a = as_symmetric(a)
    m = s.lines
    if not 1 <= p <= m:
        raise ValueError("isotropic rank out of range")
    lam = skew_hermitian_eigenvalue_pairs(a, s)
    t = float(np.trace(a))
    total = 1.0
    for idx in itertools.combinations(range(m), p):
        sub = lam[list(idx)]
        for sgn in itertools.product((1.0, -1.0), repeat=p):
            total *= t * p / m + float(np.dot(sgn, sub))
    return total


def _iso_factors(a, s: ComplexStructure, p: int) -> np.ndarray:
    lam = skew_hermitian_eigenvalue_pairs(as_symmetric(a), s)
    t = float(np.trace(np.asarray(a)))
    m = s.lines
    vals = []
    for idx in itertools.combinations(range(m), p):
        sub = lam[list(idx)]
        for sgn in itertools.product((1.0, -1.0), repeat=p):
            vals.append(t * p / m + float(np.dot(sgn, sub)))
    return np.sort(vals)


def iso_operator(s: ComplexStructure, p: int) -> GardingOperator:
    m = s.lines
    degree = math.comb(m, p) * 2**p
    return _make(
        s.dim,
        degree,
        f"iso(m={m},p={p})",
        lambda a: m_iso_value(a, s, p),
        spectrum_fn=lambda a: _iso_factors(a, s, p),
    )


def corrupted_det(n: int = 3) -> GardingOperator:
    """Negative control: degree-n determinant plus a cubic off-diagonal term.

    Homogeneous only for n = 3, which is all the control needs; real-rootedness
    fails on generic inputs and certification must flag it.
    """
    if n != 3:
        raise ValueError("the corrupted control operator is defined for n = 3")
    return _make(n, n, "corrupted_det(n=3)", lambda a: float(np.linalg.det(a)) + 0.5 * float(a[0, 1]) ** 3)


# ---------------------------------------------------------------------------
# spectrum extraction


@dataclass
class GardingSpectrum:
    eigenvalues: np.ndarray  # ascending, scaled so the product equals M(A)
    residual: float  # largest imaginary part met during root finding


_COEFF_NOISE = 1e-13  # relative coefficient noise of exact-degree interpolation


def _cluster_mean_repair(values: np.ndarray, radius: float) -> np.ndarray:
    """Average runs of roots closer than `radius`.

    A k-fold real root perturbed by coefficient noise scatters into a regular
    k-point constellation whose first-order displacements cancel in the mean,
    so averaging restores close-to-machine accuracy; well-separated roots are
    untouched.
    """
    out = values.copy()
    i = 0
    n = len(values)
    while i < n:
        j = i + 1
        while j < n and values[j] - values[j - 1] <= radius:
            j += 1
        if j - i > 1:
            out[i:j] = values[i:j].mean()
        i = j
    return out


def garding_eigenvalues(op: GardingOperator, a, imag_tol: float = 1e-6) -> GardingSpectrum:
    """Spectrum of A under the operator, ascending.

    Samples s -> M(sI + A) at Chebyshev nodes, interpolates exactly, and takes
    companion-matrix roots.  Imaginary parts below imag_tol * (1 + |A|), or
    below the noise ceiling of an m-fold real root, are flattened (repeated
    roots scatter as eps^(1/multiplicity), so a flat threshold would reject
    legitimately hyperbolic inputs); anything larger raises
    HyperbolicityViolation.
    """
    a = as_symmetric(a)
    if a.shape[0] != op.dim:
        raise ValueError("matrix dimension does not match the operator")
    if op.spectrum_fn is not None:
        eig = np.sort(np.asarray(op.spectrum_fn(a), dtype=np.float64))
        return GardingSpectrum(eigenvalues=eig, residual=0.0)
    m = op.degree
    n = op.dim
    trace_part = float(np.trace(a)) / n
    if np.abs(a - trace_part * np.eye(n)).max() == 0.0:
        # scalar matrices: the spectrum is exact by homogeneity and translation
        eig = np.full(m, trace_part * op.unit_scale)
        return GardingSpectrum(eigenvalues=eig, residual=0.0)
    eye = np.eye(n)
    norm = float(np.linalg.norm(a))
    limit = 2.0 * (norm + 1.0)
    nodes = np.cos(np.pi * (2 * np.arange(m + 1) + 1) / (2 * (m + 1))) * limit
    vals = np.array([op.fn(a + s * eye) for s in nodes])
    series = Chebyshev.fit(nodes, vals, deg=m, domain=[-limit, limit])
    roots = series.roots()
    scale = 1.0 + norm
    tol = max(imag_tol * scale, 3.0 * scale * _COEFF_NOISE ** (1.0 / m))
    worst = float(np.abs(roots.imag).max()) if len(roots) else 0.0
    if worst > tol:
        raise HyperbolicityViolation(
            f"{op.name}: complex root residual {worst:.3e} exceeds {tol:.3e}", a, worst * op.unit_scale
        )
    if len(roots) != m:
        raise HyperbolicityViolation(f"{op.name}: expected {m} roots, found {len(roots)}", a, worst)
    repaired = _cluster_mean_repair(np.sort(-roots.real), tol)
    eig = repaired * op.unit_scale
    return GardingSpectrum(eigenvalues=eig, residual=worst * op.unit_scale)


# ---------------------------------------------------------------------------
# derived operators (evaluated through the base spectrum on every call)


def elementary_symmetric(base: GardingOperator, k: int) -> GardingOperator:
    if not 1 <= k <= base.degree:
        raise ValueError("symmetric-function order out of range")

    def fn(a):
        lam = garding_eigenvalues(base, a).eigenvalues
        return _esym(lam, k)

    return _make(base.dim, k, f"sigma_{k}[{base.name}]", fn)


def _esym(lam: np.ndarray, k: int) -> float:
    # Newton-free product expansion: coefficients of prod (t + lam_i)
    coeffs = np.zeros(k + 1)
    coeffs[0] = 1.0
    for x in lam:
        coeffs[1:] = coeffs[1:] + x * coeffs[:-1]
    return float(coeffs[k])


def pconvexity(base: GardingOperator, p: float) -> GardingOperator:
    m = base.degree
    if not 1.0 <= p <= m:
        raise ValueError("convexity parameter out of range")
    whole = int(math.floor(p))
    frac = p - whole

    if whole == m:
        def fn(a):
            lam = garding_eigenvalues(base, a).eigenvalues
            return float(lam.sum())

        return _make(base.dim, 1, f"pconvexity(p={p})[{base.name}]", fn)

    def fn(a):
        lam = garding_eigenvalues(base, a).eigenvalues
        total = 1.0
        for idx in itertools.combinations(range(m), whole):
            ssum = float(lam[list(idx)].sum())
            for j in range(m):
                if j not in idx:
                    total *= ssum + frac * lam[j]
        return total

    degree = math.comb(m, whole) * (m - whole)
    return _make(base.dim, degree, f"pconvexity(p={p})[{base.name}]", fn)


def delta_reg(base: GardingOperator, delta: float) -> GardingOperator:
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    n = base.dim

    def fn(a):
        lam = garding_eigenvalues(base, a).eigenvalues
        t = float(np.trace(a))
        return float(np.prod(lam + delta * t / n))

    return _make(base.dim, base.degree, f"delta_reg(delta={delta})[{base.name}]", fn)


# ---------------------------------------------------------------------------
# operations


def elementary_symmetric_value(base: GardingOperator, k: int, a) -> float:
    """k-th elementary symmetric function of the base spectrum, by coefficient
    extraction from the univariate polynomial t -> M(A + tI)."""
    if not 1 <= k <= base.degree:
        raise ValueError("symmetric-function order out of range")
    a = as_symmetric(a)
    m = base.degree
    eye = np.eye(base.dim)
    limit = 2.0 * (float(np.linalg.norm(a)) + 1.0)
    nodes = np.cos(np.pi * (2 * np.arange(m + 1) + 1) / (2 * (m + 1))) * limit
    vals = np.array([base.fn(a + t * eye) for t in nodes])
    series = Chebyshev.fit(nodes, vals, deg=m, domain=[-limit, limit])
    poly = series.convert(kind=Polynomial)
    coef = poly.coef
    c = float(coef[m - k]) if m - k < len(coef) else 0.0
    return c / base.unit_scale ** (m - k)


def branch_margin(op: GardingOperator, k: int, a) -> float:
    if not 1 <= k <= op.degree:
        raise ValueError("branch index out of range")
    return float(garding_eigenvalues(op, a).eigenvalues[k - 1])


def branch_member(op: GardingOperator, k: int, a, tol: float = 1e-9):
    """Membership in the k-th ordered branch; returns (member, margin)."""
    margin = branch_margin(op, k, a)
    return margin >= -tol, margin


# ---------------------------------------------------------------------------
# certification


@dataclass
class CheckResult:
    name: str
    passed: bool
    trials: int
    worst: float
    counterexamples: list = field(default_factory=list)

    def to_dict(self):
        return {
            "name": self.name,
            "passed": self.passed,
            "trials": self.trials,
            "worst": self.worst,
            "counterexamples": self.counterexamples,
        }


@dataclass
class CertificationReport:
    operator: str
    trials: int
    seed: int
    checks: dict

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def to_dict(self):
        return {
            "operator": self.operator,
            "trials": self.trials,
            "seed": self.seed,
            "passed": self.passed,
            "checks": {k: v.to_dict() for k, v in self.checks.items()},
        }


def _counterexample(**mats):
    out = {}
    for key, val in mats.items():
        if isinstance(val, np.ndarray):
            out[key] = [float(x) for x in val.ravel()]  # row-major
            out[key + "_shape"] = list(val.shape)
        else:
            out[key] = float(val)
    return out


def _shift_into_cone(op: GardingOperator, a: np.ndarray, pad: float = 0.5) -> np.ndarray:
    lam_min = garding_eigenvalues(op, a).eigenvalues[0]
    c = (max(0.0, -lam_min) + pad) / op.unit_scale
    return a + c * np.eye(op.dim)


def certify_garding(op: GardingOperator, trials: int, seed: int, tol: float = 1e-8) -> CertificationReport:
    """Sampled certification of real-rootedness, cone convexity, positivity
    and eigenvalue monotonicity.  Counterexamples are reported verbatim."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n = op.dim
    eye = np.eye(n)
    max_fail = 5

    rooted = CheckResult("real_rootedness", True, trials, 0.0)
    convex = CheckResult("cone_convexity", True, trials, 0.0)
    positive = CheckResult("positivity", True, trials, 0.0)
    monotone = CheckResult("eigenvalue_monotonicity", True, trials, 0.0)

    for trial in range(trials):
        rng = derive_rng(seed, "garding-certify", op.name, trial)
        a = random_symmetric(rng, n)
        b = random_symmetric(rng, n)
        g = rng.standard_normal((n, n))
        psd = g @ g.T / n
        t = float(rng.uniform())

        try:
            spec_a = garding_eigenvalues(op, a)
            spec_b = garding_eigenvalues(op, b)
        except HyperbolicityViolation as exc:
            rooted.passed = False
            rooted.worst = max(rooted.worst, exc.residual)
            if len(rooted.counterexamples) < max_fail:
                rooted.counterexamples.append(_counterexample(a=exc.matrix, residual=exc.residual))
            continue
        rooted.worst = max(rooted.worst, spec_a.residual, spec_b.residual)

        try:
            ac = _shift_into_cone(op, a)
            bc = _shift_into_cone(op, b)
            scale = 1.0 + float(np.linalg.norm(ac)) + float(np.linalg.norm(bc))

            mix = t * ac + (1.0 - t) * bc
            margin = garding_eigenvalues(op, mix).eigenvalues[0]
            if margin < -tol * scale:
                convex.passed = False
                convex.worst = min(convex.worst, float(margin))
                if len(convex.counterexamples) < max_fail:
                    convex.counterexamples.append(_counterexample(a=ac, b=bc, t=t, margin=margin))

            margin_pos = garding_eigenvalues(op, ac + psd).eigenvalues[0]
            if margin_pos < -tol * scale:
                positive.passed = False
                positive.worst = min(positive.worst, float(margin_pos))
                if len(positive.counterexamples) < max_fail:
                    positive.counterexamples.append(_counterexample(a=ac, p=psd, margin=margin_pos))

            lam_a = garding_eigenvalues(op, a).eigenvalues
            lam_ab = garding_eigenvalues(op, a + bc).eigenvalues
            drop = float((lam_a - lam_ab).max())
            if drop > tol * scale:
                monotone.passed = False
                monotone.worst = max(monotone.worst, drop)
                if len(monotone.counterexamples) < max_fail:
                    monotone.counterexamples.append(_counterexample(a=a, b=bc, drop=drop))
        except HyperbolicityViolation as exc:
            rooted.passed = False
            rooted.worst = max(rooted.worst, exc.residual)
            if len(rooted.counterexamples) < max_fail:
                rooted.counterexamples.append(_counterexample(a=exc.matrix, residual=exc.residual))

    return CertificationReport(
        operator=op.name,
        trials=trials,
        seed=seed,
        checks={
            "real_rootedness": rooted,
            "cone_convexity": convex,
            "positivity": positive,
            "eigenvalue_monotonicity": monotone,
        },
    )
