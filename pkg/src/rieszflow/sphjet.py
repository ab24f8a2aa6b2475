"""The spherical 2-jet map: homogeneous extensions and the induced sphere cones.

A jet at a point sigma of the unit sphere holds the value, tangential
gradient and riemannian Hessian of a function g on the sphere, in the
coordinates of a chosen tangent frame.  `assemble_phi` maps the jet to the
ambient Hessian of the (2-p)-homogeneous extension |x|^{2-p} g(x/|x|) at
sigma; membership of that matrix in an ambient cone is the induced sphere
condition on g.
"""

from dataclasses import dataclass

import numpy as np

from .linalg import (
    ComplexStructure,
    QuaternionStructure,
    as_symmetric,
    frame,
    hermitian_part_complex,
    hermitian_part_quaternionic,
    unit_vector,
)


@dataclass(frozen=True)
class SphericalJet:
    sigma: np.ndarray  # base point on the sphere
    basis: np.ndarray  # n x (n-1) tangent frame, orthogonal to sigma
    g: float
    dg: np.ndarray  # tangential gradient coordinates, length n-1
    hess: np.ndarray  # riemannian Hessian coordinates, (n-1) x (n-1)

    def __post_init__(self):
        sigma = unit_vector(self.sigma)
        basis = frame(self.basis)
        n = sigma.size
        if basis.shape != (n, n - 1):
            raise ValueError("tangent basis must have rank n-1")
        if np.abs(basis.T @ sigma).max() > 1e-10:
            raise ValueError("tangent basis is not orthogonal to the base point")
        dg = np.asarray(self.dg, dtype=np.float64).ravel()
        hess = as_symmetric(self.hess)
        if dg.size != n - 1 or hess.shape != (n - 1, n - 1):
            raise ValueError("jet component dimensions are inconsistent")
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "g", float(self.g))
        object.__setattr__(self, "dg", dg)
        object.__setattr__(self, "hess", hess)

    @property
    def dim(self) -> int:
        return self.sigma.size


def tangent_basis(sigma) -> np.ndarray:
    """Deterministic orthonormal basis of the tangent space at sigma."""
    sigma = unit_vector(sigma)
    n = sigma.size
    vals, vecs = np.linalg.eigh(np.eye(n) - np.outer(sigma, sigma))
    return vecs[:, vals > 0.5]


def assemble_phi(jet: SphericalJet, p: float) -> np.ndarray:
    """Ambient matrix of the jet under the degree-(2-p) extension at sigma.

    In the (tangent, radial) block splitting the matrix reads

        [ Hess - (p-2) g I      -(p-1) Dg        ]
        [ -(p-1) Dg^T           (p-2)(p-1) g     ]

    and is conjugated back to ambient coordinates with the stored frame.
    """
    if p < 1:
        raise ValueError("homogeneity parameter must be >= 1")
    n = jet.dim
    block = np.zeros((n, n))
    block[: n - 1, : n - 1] = jet.hess - (p - 2.0) * jet.g * np.eye(n - 1)
    block[: n - 1, n - 1] = -(p - 1.0) * jet.dg
    block[n - 1, : n - 1] = -(p - 1.0) * jet.dg
    block[n - 1, n - 1] = (p - 2.0) * (p - 1.0) * jet.g
    b = np.hstack([jet.basis, jet.sigma[:, None]])
    return b @ block @ b.T


def trace_of_phi(jet: SphericalJet, p: float):
    """Trace of the assembled matrix, plus the independent closed form.

    Returns (trace, tr Hess - (n-p)(p-2) g, difference); the two agree to
    rounding for every jet.
    """
    n = jet.dim
    assembled = float(np.trace(assemble_phi(jet, p)))
    closed = float(np.trace(jet.hess) - (n - p) * (p - 2.0) * jet.g)
    return assembled, closed, assembled - closed


# ---------------------------------------------------------------------------
# finite-difference recovery of jets


def _ambient_gradient_hessian(fn, x: np.ndarray, h: float):
    """Central-difference gradient and Hessian, one batched evaluation."""
    n = x.size
    pts = [x]
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        pts.extend([x + e, x - e])
    for i in range(n):
        for j in range(i + 1, n):
            ei = np.zeros(n)
            ej = np.zeros(n)
            ei[i] = h
            ej[j] = h
            pts.extend([x + ei + ej, x + ei - ej, x - ei + ej, x - ei - ej])
    vals = fn(np.array(pts))
    if not np.all(np.isfinite(vals)):
        raise ValueError("non-finite samples during finite differencing")
    f0 = vals[0]
    grad = np.empty(n)
    hess = np.empty((n, n))
    for i in range(n):
        fp, fm = vals[1 + 2 * i], vals[2 + 2 * i]
        grad[i] = (fp - fm) / (2.0 * h)
        hess[i, i] = (fp - 2.0 * f0 + fm) / (h * h)
    k = 1 + 2 * n
    for i in range(n):
        for j in range(i + 1, n):
            fpp, fpm, fmp, fmm = vals[k : k + 4]
            k += 4
            hess[i, j] = hess[j, i] = (fpp - fpm - fmp + fmm) / (4.0 * h * h)
    return f0, grad, hess


def jet_from_function(g_fn, sigma, h: float = 1e-4) -> SphericalJet:
    """Recover the spherical 2-jet of g at sigma from ambient differences.

    g_fn evaluates on (N, n) arrays of nonzero points and must depend only on
    the direction; the degree-0 extension is applied internally.  The
    riemannian Hessian is read off the extension's ambient Hessian restricted
    to the tangent space, where the radial correction vanishes.
    """
    if not 1e-6 <= h <= 1e-2:
        raise ValueError("step size out of the supported range")
    sigma = unit_vector(sigma)
    basis = tangent_basis(sigma)

    def extension(pts):
        pts = np.atleast_2d(pts)
        return np.asarray(g_fn(pts / np.linalg.norm(pts, axis=1, keepdims=True)), dtype=np.float64)

    g0, grad, hess = _ambient_gradient_hessian(extension, sigma, h)
    dg = basis.T @ grad
    hess_t = basis.T @ hess @ basis
    return SphericalJet(sigma=sigma, basis=basis, g=float(g0), dg=dg, hess=0.5 * (hess_t + hess_t.T))


def fd_cross_check(g_fn, sigma, p: float, h: float = 1e-4) -> float:
    """Max-norm gap between the assembled jet matrix and the direct ambient
    Hessian of |x|^{2-p} g(x/|x|) at sigma; O(h^2) for smooth g."""
    sigma = unit_vector(sigma)
    jet = jet_from_function(g_fn, sigma, h)

    def u_fn(pts):
        pts = np.atleast_2d(pts)
        norms = np.linalg.norm(pts, axis=1)
        g_vals = np.asarray(g_fn(pts / norms[:, None]), dtype=np.float64)
        return norms ** (2.0 - p) * g_vals

    _, _, hess_u = _ambient_gradient_hessian(u_fn, sigma, h)
    return float(np.abs(hess_u - assemble_phi(jet, p)).max())


def sphere_subeq_member(f, jet: SphericalJet, p: float, tol: float = 1e-9):
    """Membership of the jet in the sphere condition induced by an ambient cone."""
    margin = f.margin(assemble_phi(jet, p))
    return margin >= -tol, margin


# ---------------------------------------------------------------------------
# structured second-order checks at a sphere point


def _line_constancy_residual(g_fn, sigma, units, samples: int = 32) -> float:
    angles = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
    worst = 0.0
    base = float(np.asarray(g_fn(sigma[None, :]))[0])
    for e in units:
        esig = e @ sigma
        pts = np.outer(np.cos(angles), sigma) + np.outer(np.sin(angles), esig)
        vals = np.asarray(g_fn(pts), dtype=np.float64)
        worst = max(worst, float(np.abs(vals - base).max()))
    return worst


def complex_radial_structure_check(g_fn, theta: float, sigma, s: ComplexStructure, h: float = 1e-4) -> dict:
    """Hermitian-part structure of Theta log|x| + g(x/|x|) at a sphere point.

    g must be constant along unit circles of complex lines.  Reports the
    norm of the hermitian part on the complex line through sigma (should
    vanish to O(h^2)) and the spectrum of its restriction to the orthogonal
    complement (nonnegative iff the quasi-positivity inequality holds there).
    """
    sigma = unit_vector(sigma)
    const_resid = _line_constancy_residual(g_fn, sigma, (s.j,))
    if const_resid > 1e-8:
        raise ValueError(f"g is not constant on complex lines (residual {const_resid:.3e})")

    def u_fn(pts):
        pts = np.atleast_2d(pts)
        norms = np.linalg.norm(pts, axis=1)
        g_vals = np.asarray(g_fn(pts / norms[:, None]), dtype=np.float64)
        return theta * np.log(norms) + g_vals

    _, _, hess = _ambient_gradient_hessian(u_fn, sigma, h)
    herm = hermitian_part_complex(0.5 * (hess + hess.T), s)
    line = np.column_stack([sigma, s.j @ sigma])
    line_block = line.T @ herm @ line
    # orthogonal complement of the complex line
    vals, vecs = np.linalg.eigh(np.eye(s.dim) - line @ line.T)
    horiz = vecs[:, vals > 0.5]
    horiz_block = horiz.T @ herm @ horiz
    spectrum = np.linalg.eigvalsh(0.5 * (horiz_block + horiz_block.T))
    return {
        "line_block_norm": float(np.abs(line_block).max()),
        "horizontal_spectrum": [float(v) for v in spectrum],
        "min_horizontal_eigenvalue": float(spectrum[0]),
        "constancy_residual": const_resid,
        "theta": float(theta),
    }


def quaternionic_block_check(g_fn, sigma, s: QuaternionStructure, h: float = 1e-4) -> dict:
    """Quaternionic hermitian-part structure of |x|^{-2} g(x/|x|) at a point.

    g must be constant along unit circles of quaternion lines.  The
    quaternion line through sigma lies in the kernel; the horizontal block is
    nonnegative exactly when the shifted-Hessian inequality holds there.
    """
    sigma = unit_vector(sigma)
    const_resid = _line_constancy_residual(g_fn, sigma, s.units)
    if const_resid > 1e-8:
        raise ValueError(f"g is not constant on quaternion lines (residual {const_resid:.3e})")

    def u_fn(pts):
        pts = np.atleast_2d(pts)
        norms = np.linalg.norm(pts, axis=1)
        g_vals = np.asarray(g_fn(pts / norms[:, None]), dtype=np.float64)
        return norms**-2.0 * g_vals

    _, _, hess = _ambient_gradient_hessian(u_fn, sigma, h)
    herm = hermitian_part_quaternionic(0.5 * (hess + hess.T), s)
    line = np.column_stack([sigma] + [e @ sigma for e in s.units])
    line_block = line.T @ herm @ line
    vals, vecs = np.linalg.eigh(np.eye(s.dim) - line @ line.T)
    horiz = vecs[:, vals > 0.5]
    horiz_block = horiz.T @ herm @ horiz
    spectrum = np.linalg.eigvalsh(0.5 * (horiz_block + horiz_block.T))
    return {
        "line_block_norm": float(np.abs(line_block).max()),
        "horizontal_spectrum": [float(v) for v in spectrum],
        "min_horizontal_eigenvalue": float(spectrum[0]),
        "constancy_residual": const_resid,
    }
