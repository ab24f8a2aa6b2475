import numpy as np
import pytest

from rieszflow.linalg import (
    ComplexStructure,
    QuaternionStructure,
    eigenvalues_sorted,
    frame,
    grouped_eigenvalues,
    hermitian_part_complex,
    hermitian_part_quaternionic,
    orthonormalize,
    projector,
    random_frame,
    random_symmetric,
    skew_hermitian_eigenvalue_pairs,
    trace_on_plane,
    unit_vector,
)
from rieszflow.rng import derive_rng

RNG = derive_rng(20260809, "test-linalg")


def test_eigenvalues_sorted_examples():
    assert np.allclose(eigenvalues_sorted(np.diag([3.0, -1.0])), [-1.0, 3.0])
    assert np.allclose(eigenvalues_sorted(np.eye(4)), np.ones(4))


def test_eigenvalues_reconstruction():
    for _ in range(20):
        a = random_symmetric(RNG, 5)
        lam, vecs = np.linalg.eigh(a)
        back = vecs @ np.diag(lam) @ vecs.T
        assert np.abs(back - a).max() <= 1e-9 * max(1.0, np.linalg.norm(a))
        assert np.allclose(np.sort(lam), eigenvalues_sorted(a))


def test_eigenvalue_continuity_weyl():
    eps = 1e-6
    for _ in range(20):
        a = random_symmetric(RNG, 5)
        e = random_symmetric(RNG, 5)
        e *= eps / max(np.linalg.norm(e, 2), 1e-30)
        moved = np.abs(eigenvalues_sorted(a + e) - eigenvalues_sorted(a)).max()
        assert moved <= eps * (1 + 1e-9)


def test_projector_examples():
    w = np.zeros((2, 1))
    w[0, 0] = 1.0
    assert np.allclose(projector(w), np.diag([1.0, 0.0]))
    w = np.eye(3)[:, :2]
    assert np.allclose(projector(w), np.diag([1.0, 1.0, 0.0]))


def test_projector_idempotent_and_span_invariant():
    for _ in range(20):
        w = random_frame(RNG, 6, 3)
        p = projector(w)
        assert np.abs(p @ p - p).max() <= 1e-10
        assert abs(np.trace(p) - 3.0) <= 1e-10
        # rotating the frame in-plane leaves the projector unchanged
        r = np.linalg.qr(RNG.standard_normal((3, 3)))[0]
        assert np.abs(projector(w @ r) - p).max() <= 1e-10


def test_frame_rejects_degenerate():
    cols = np.ones((4, 2))
    with pytest.raises(ValueError):
        frame(cols)


def test_trace_on_plane_examples():
    w = np.eye(3)[:, :2]
    assert trace_on_plane(np.eye(3), w) == pytest.approx(2.0)
    assert trace_on_plane(np.diag([1.0, -1.0, 0.0]), w) == pytest.approx(0.0)


def test_trace_on_plane_matches_projector_route():
    for _ in range(20):
        a = random_symmetric(RNG, 5)
        w = random_frame(RNG, 5, 2)
        via_proj = float(np.trace(projector(w) @ a))
        assert abs(trace_on_plane(a, w) - via_proj) <= 1e-10
        r = np.linalg.qr(RNG.standard_normal((2, 2)))[0]
        assert abs(trace_on_plane(a, w @ r) - trace_on_plane(a, w)) <= 1e-10


def test_complex_structure_standard():
    s = ComplexStructure.standard(3)
    assert s.dim == 6 and s.lines == 3
    assert np.abs(s.j @ s.j + np.eye(6)).max() <= 1e-12


def test_hermitian_part_complex():
    s = ComplexStructure.standard(1)
    assert np.allclose(hermitian_part_complex(np.eye(2), s), np.eye(2))
    # J A J = A for this diagonal, so the commuting part vanishes
    assert np.abs(hermitian_part_complex(np.diag([1.0, -1.0]), s)).max() <= 1e-14
    s4 = ComplexStructure.standard(2)
    for _ in range(20):
        a = random_symmetric(RNG, 4)
        h = hermitian_part_complex(a, s4)
        assert np.abs(h @ s4.j - s4.j @ h).max() <= 1e-10
        assert np.abs(hermitian_part_complex(h, s4) - h).max() <= 1e-12


def test_skew_pairs_examples():
    s = ComplexStructure.standard(1)
    assert np.allclose(skew_hermitian_eigenvalue_pairs(np.eye(2), s), [0.0])
    assert np.allclose(skew_hermitian_eigenvalue_pairs(np.diag([1.0, -1.0]), s), [1.0])
    s2 = ComplexStructure.standard(2)
    assert np.allclose(skew_hermitian_eigenvalue_pairs(np.eye(4), s2), [0.0, 0.0])
    for _ in range(20):
        a = random_symmetric(RNG, 4)
        skew = 0.5 * (a + s2.j @ a @ s2.j)
        lam = np.linalg.eigvalsh(skew)
        assert np.abs(np.sort(lam) + np.sort(-lam)[::-1]).max() <= 1e-9


def test_quaternion_structure_relations():
    s = QuaternionStructure.standard(2)
    i, j, k = s.units
    assert np.abs(i @ j - k).max() <= 1e-12
    assert np.abs(j @ k - i).max() <= 1e-12
    assert np.abs(k @ i - j).max() <= 1e-12


def test_hermitian_part_quaternionic():
    s = QuaternionStructure.standard(2)
    assert np.allclose(hermitian_part_quaternionic(np.eye(8), s), np.eye(8))
    for _ in range(10):
        a = random_symmetric(RNG, 8)
        h = hermitian_part_quaternionic(a, s)
        for e in s.units:
            assert np.abs(h @ e - e @ h).max() <= 1e-10
        assert np.abs(hermitian_part_quaternionic(h, s) - h).max() <= 1e-12


def test_invariant_quadratic_form_unchanged():
    # a sum of projectors onto quaternion lines is already I,J,K-invariant
    s = QuaternionStructure.standard(2)
    rng = derive_rng(7, "quat-invariant")
    v = rng.standard_normal(8)
    v /= np.linalg.norm(v)
    line = orthonormalize(np.column_stack([v] + [e @ v for e in s.units]))
    a = 2.0 * line @ line.T + 0.5 * (np.eye(8) - line @ line.T)
    assert np.abs(hermitian_part_quaternionic(a, s) - a).max() <= 1e-10


def test_hermitian_parts_are_orthogonal_projections():
    # self-adjointness in the Frobenius inner product, sampled over pairs
    s = ComplexStructure.standard(2)
    q = QuaternionStructure.standard(2)
    for _ in range(10):
        a, b = random_symmetric(RNG, 4), random_symmetric(RNG, 4)
        lhs = np.tensordot(hermitian_part_complex(a, s), b)
        rhs = np.tensordot(a, hermitian_part_complex(b, s))
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))
        a8, b8 = random_symmetric(RNG, 8), random_symmetric(RNG, 8)
        lhs = np.tensordot(hermitian_part_quaternionic(a8, q), b8)
        rhs = np.tensordot(a8, hermitian_part_quaternionic(b8, q))
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))


def test_grouped_eigenvalues():
    vals = np.array([1.0, 1.0 + 1e-10, 2.0, 2.0])
    assert np.allclose(grouped_eigenvalues(vals, 2, 1e-8), [1.0 + 5e-11, 2.0])
    with pytest.raises(ValueError):
        grouped_eigenvalues(np.array([1.0, 2.0, 3.0, 4.0]), 2, 1e-8)


def test_unit_vector():
    v = unit_vector([3.0, 4.0])
    assert np.allclose(v, [0.6, 0.8])
    with pytest.raises(ValueError):
        unit_vector([0.0, 0.0])
