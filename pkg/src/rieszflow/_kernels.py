"""Hot numeric kernels: numba-compiled with a pure-numpy fallback.

Set RIESZFLOW_DISABLE_NUMBA=1 to force the numpy path (the benchmark in
benchmarks/bench_kernels.py times both).  Both paths return identical values;
the dispatcher only switches implementations.
"""

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):  # type: ignore[misc]
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


def numba_enabled() -> bool:
    if not HAVE_NUMBA:
        return False
    flag = os.environ.get("RIESZFLOW_DISABLE_NUMBA", "").strip().lower()
    return flag not in ("1", "true", "yes")


# ---------------------------------------------------------------------------
# pairwise intersection dimensions
#
# For orthonormal frames W_i (n x p_i) the intersection dimension equals the
# number of principal-angle cosines sigma_k(W_i^T W_j) at 1.  A singular value
# s of the stacked frame [W_i | W_j] relates to a cosine via s^2 = 1 - sigma,
# so the relative threshold `tol` on stacked singular values maps to the
# cosine threshold 1 - 2 tol^2.


def _cos_threshold(tol: float) -> float:
    return 1.0 - 2.0 * tol * tol


def pairwise_intersection_dims(frames: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Intersection dimensions for every unordered pair of frames.

    frames: (B, n, p) stack of orthonormal column frames (equal p).
    Returns a symmetric (B, B) integer matrix; diagonal entries are p.
    """
    frames = np.ascontiguousarray(frames, dtype=np.float64)
    thresh = _cos_threshold(tol)
    if numba_enabled():
        return _pairwise_dims_numba(frames, thresh)
    return _pairwise_dims_numpy(frames, thresh)


def _pairwise_dims_numpy(frames: np.ndarray, thresh: float) -> np.ndarray:
    b, _, p = frames.shape
    grams = np.einsum("anp,bnq->abpq", frames, frames)
    sv = np.linalg.svd(grams.reshape(b * b, p, p), compute_uv=False)
    dims = (sv >= thresh).sum(axis=1).reshape(b, b).astype(np.int64)
    np.fill_diagonal(dims, p)
    return dims


@njit(cache=True)
def _pairwise_dims_numba(frames, thresh):  # pragma: no cover - numba path
    b = frames.shape[0]
    p = frames.shape[2]
    dims = np.empty((b, b), dtype=np.int64)
    for i in range(b):
        dims[i, i] = p
        for j in range(i + 1, b):
            g = frames[i].T @ frames[j]
            sv = np.linalg.svd(g)[1]
            c = 0
            for k in range(sv.shape[0]):
                if sv[k] >= thresh:
                    c += 1
            dims[i, j] = c
            dims[j, i] = c
    return dims


# ---------------------------------------------------------------------------
# minimum plane trace
#
# margin of the geometric membership oracle: min_W tr(W^T A W) over a batch
# of sampled frames.


def plane_trace_min(a: np.ndarray, frames: np.ndarray) -> float:
    a = np.ascontiguousarray(a, dtype=np.float64)
    frames = np.ascontiguousarray(frames, dtype=np.float64)
    if numba_enabled():
        return float(_plane_trace_min_numba(a, frames))
    return float(_plane_trace_min_numpy(a, frames))


def _plane_trace_min_numpy(a: np.ndarray, frames: np.ndarray) -> float:
    traces = np.einsum("bij,ik,bkj->b", frames, a, frames)
    return float(traces.min())


@njit(cache=True)
def _plane_trace_min_numba(a, frames):  # pragma: no cover - numba path
    b = frames.shape[0]
    n = frames.shape[1]
    p = frames.shape[2]
    best = np.inf
    for i in range(b):
        t = 0.0
        for j in range(p):
            for r in range(n):
                av = 0.0
                for c in range(n):
                    av += a[r, c] * frames[i, c, j]
                t += frames[i, r, j] * av
        if t < best:
            best = t
    return best


def plane_traces(a: np.ndarray, frames: np.ndarray) -> np.ndarray:
    """All plane traces tr(W^T A W); numpy only (used in tests/reports)."""
    return np.einsum("bij,ik,bkj->b", frames, a, frames)
