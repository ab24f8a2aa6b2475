"""Symmetric-matrix primitives and the complex/quaternionic structure algebra.

All matrices are plain float64 numpy arrays.  Complex and quaternionic
structures are kept as real matrices acting on R^{2m} / R^{4m}; no complex
dtype is used anywhere.
"""

from dataclasses import dataclass

import numpy as np

SYM_TOL = 1e-12
UNIT_TOL = 1e-12
FRAME_GRAM_REJECT = 1e-8
STRUCT_TOL = 1e-12


def as_symmetric(a, tol: float = 1e-10) -> np.ndarray:
    """Validate and return a float64 copy of a symmetric matrix."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] < 1:
        raise ValueError("matrix dimension must be >= 1")
    skew = np.abs(a - a.T).max() if a.size else 0.0
    if skew > tol * max(1.0, np.abs(a).max()):
        raise ValueError(f"matrix is not symmetric (max asymmetry {skew:.3e})")
    return 0.5 * (a + a.T)


def symmetrize(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    return 0.5 * (a + a.T)


def random_symmetric(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    g = rng.standard_normal((n, n))
    return scale * 0.5 * (g + g.T)


def eigenvalues_sorted(a) -> np.ndarray:
    """Eigenvalues of a symmetric matrix, ascending."""
    return np.linalg.eigvalsh(as_symmetric(a))


def unit_vector(v) -> np.ndarray:
    """Normalize v and validate the result against the unit-norm tolerance."""
    v = np.asarray(v, dtype=np.float64).ravel()
    nrm = float(np.linalg.norm(v))
    if nrm == 0.0:
        raise ValueError("cannot normalize the zero vector")
    u = v / nrm
    if abs(np.linalg.norm(u) - 1.0) > UNIT_TOL:
        raise ValueError("normalization failed to reach unit tolerance")
    return u


def frame(cols) -> np.ndarray:
    """Validate an n x p orthonormal frame; near-degenerate frames are rejected."""
    w = np.asarray(cols, dtype=np.float64)
    if w.ndim == 1:
        w = w[:, None]
    n, p = w.shape
    if not 1 <= p <= n:
        raise ValueError(f"frame rank {p} invalid for ambient dimension {n}")
    gram_residual = np.abs(w.T @ w - np.eye(p)).max()
    if gram_residual > FRAME_GRAM_REJECT:
        raise ValueError(f"frame is not orthonormal (Gram residual {gram_residual:.3e})")
    return w


def orthonormalize(cols, tol: float = 1e-10) -> np.ndarray:
    """Gram-Schmidt with re-orthogonalization; raises on rank deficiency."""
    w = np.asarray(cols, dtype=np.float64)
    if w.ndim == 1:
        w = w[:, None]
    out = []
    for j in range(w.shape[1]):
        v = w[:, j].copy()
        for _ in range(2):
            for u in out:
                v -= (u @ v) * u
        nrm = np.linalg.norm(v)
        if nrm < tol:
            raise ValueError("columns are numerically dependent")
        out.append(v / nrm)
    return np.column_stack(out)


def complete_orthonormal(w: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Append k random orthonormal columns orthogonal to the given frame."""
    n = w.shape[0]
    cols = [w[:, j].copy() for j in range(w.shape[1])]
    added = 0
    attempts = 0
    while added < k:
        attempts += 1
        if attempts > 100 * (k + 1):
            raise ValueError("could not complete frame")
        v = rng.standard_normal(n)
        for _ in range(2):
            for u in cols:
                v -= (u @ v) * u
        nrm = np.linalg.norm(v)
        if nrm < 1e-8:
            continue
        cols.append(v / nrm)
        added += 1
    return np.column_stack(cols)


def random_frame(rng: np.random.Generator, n: int, p: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((n, p)))
    # fix signs so the distribution is Haar
    return q * np.sign(np.where(np.diag(r) == 0, 1.0, np.diag(r)))


def projector(w) -> np.ndarray:
    """Orthogonal projector W W^T onto the span of an orthonormal frame."""
    w = frame(w)
    return w @ w.T


def trace_on_plane(a, w) -> float:
    """Trace of the compression of a symmetric form to the span of a frame."""
    a = np.asarray(a, dtype=np.float64)
    w = frame(w)
    if a.shape[0] != w.shape[0]:
        raise ValueError("dimension mismatch between matrix and frame")
    return float(np.einsum("ij,ik,kj->", w, a, w))


# ---------------------------------------------------------------------------
# complex / quaternionic structures (real matrix models)

_J2 = np.array([[0.0, -1.0], [1.0, 0.0]])
# left multiplication by i, j, k on H = R^4 with coordinates (1, i, j, k)
_I4 = np.array(
    [
        [0.0, -1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
    ]
)
_J4 = np.array(
    [
        [0.0, 0.0, -1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, -1.0, 0.0, 0.0],
    ]
)
_K4 = np.array(
    [
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, -1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
    ]
)


def _check_unit(m: np.ndarray, name: str) -> None:
    n = m.shape[0]
    if np.abs(m.T @ m - np.eye(n)).max() > STRUCT_TOL:
        raise ValueError(f"{name} is not orthogonal")
    if np.abs(m @ m + np.eye(n)).max() > STRUCT_TOL:
        raise ValueError(f"{name} does not square to -I")


@dataclass(frozen=True)
class ComplexStructure:
    """Orthogonal J with J^2 = -I on R^{2m}."""

    j: np.ndarray

    def __post_init__(self):
        j = np.asarray(self.j, dtype=np.float64)
        object.__setattr__(self, "j", j)
        if j.shape[0] % 2 != 0:
            raise ValueError("complex structure needs even dimension")
        _check_unit(j, "J")

    @property
    def dim(self) -> int:
        return self.j.shape[0]

    @property
    def lines(self) -> int:
        return self.dim // 2

    @staticmethod
    def standard(m: int) -> "ComplexStructure":
        """Block-diagonal J pairing coordinates (2k, 2k+1)."""
        return ComplexStructure(np.kron(np.eye(m), _J2))


@dataclass(frozen=True)
class QuaternionStructure:
    """Anticommuting orthogonal I, J, K with I^2 = J^2 = K^2 = -Id, K = IJ."""

    i: np.ndarray
    j: np.ndarray
    k: np.ndarray

    def __post_init__(self):
        i = np.asarray(self.i, dtype=np.float64)
        j = np.asarray(self.j, dtype=np.float64)
        k = np.asarray(self.k, dtype=np.float64)
        object.__setattr__(self, "i", i)
        object.__setattr__(self, "j", j)
        object.__setattr__(self, "k", k)
        if i.shape[0] % 4 != 0:
            raise ValueError("quaternion structure needs dimension divisible by 4")
        for m, name in ((i, "I"), (j, "J"), (k, "K")):
            _check_unit(m, name)
        if np.abs(i @ j - k).max() > STRUCT_TOL:
            raise ValueError("K != IJ")
        if np.abs(i @ j + j @ i).max() > STRUCT_TOL:
            raise ValueError("I and J do not anticommute")

    @property
    def dim(self) -> int:
        return self.i.shape[0]

    @property
    def lines(self) -> int:
        return self.dim // 4

    @property
    def units(self):
        return (self.i, self.j, self.k)

    @staticmethod
    def standard(m: int) -> "QuaternionStructure":
        """Left multiplication by i, j, k per quaternion coordinate block."""
        eye = np.eye(m)
        return QuaternionStructure(np.kron(eye, _I4), np.kron(eye, _J4), np.kron(eye, _K4))


def _match_dim(a: np.ndarray, dim: int) -> None:
    if a.shape[0] != dim:
        raise ValueError(f"matrix dimension {a.shape[0]} does not match structure dimension {dim}")


def hermitian_part_complex(a, s: ComplexStructure) -> np.ndarray:
    """Orthogonal projection of a symmetric form onto the J-commutant."""
    a = as_symmetric(a)
    _match_dim(a, s.dim)
    return 0.5 * (a - s.j @ a @ s.j)


def skew_part_complex(a, s: ComplexStructure) -> np.ndarray:
    a = as_symmetric(a)
    _match_dim(a, s.dim)
    return 0.5 * (a + s.j @ a @ s.j)


def skew_hermitian_eigenvalue_pairs(a, s: ComplexStructure, tol: float = 1e-9) -> np.ndarray:
    """Nonnegative half of the +/- paired spectrum of the J-anticommuting part.

    Returns m values, ascending, clamped at 0.  A pairing failure beyond
    tolerance signals a non-symmetric input or a mismatched structure.
    """
    a = as_symmetric(a)
    _match_dim(a, s.dim)
    skew = 0.5 * (a + s.j @ a @ s.j)
    lam = np.linalg.eigvalsh(skew)
    m = s.lines
    scale = max(1.0, float(np.abs(lam).max()))
    pos = lam[m:]
    neg = -lam[:m][::-1]
    if np.abs(pos - neg).max() > tol * scale:
        raise ValueError("eigenvalues of the anticommuting part do not pair up")
    return np.maximum(np.sort(pos), 0.0)


def hermitian_part_quaternionic(a, s: QuaternionStructure) -> np.ndarray:
    """Orthogonal projection of a symmetric form onto the I,J,K-commutant."""
    a = as_symmetric(a)
    _match_dim(a, s.dim)
    out = a.copy()
    for e in s.units:
        out = out - e @ a @ e
    return 0.25 * out


def grouped_eigenvalues(values: np.ndarray, group: int, atol: float) -> np.ndarray:
    """Collapse an ascending spectrum with multiplicity `group` to group means.

    Raises when any group spreads wider than `atol` (wrong structure or a
    matrix outside the commutant).
    """
    values = np.asarray(values, dtype=np.float64)
    if values.size % group != 0:
        raise ValueError("spectrum length is not a multiple of the group size")
    blocks = values.reshape(-1, group)
    spread = (blocks.max(axis=1) - blocks.min(axis=1)).max()
    if spread > atol:
        raise ValueError(f"eigenvalue multiplicity pattern violated (spread {spread:.3e})")
    return blocks.mean(axis=1)
