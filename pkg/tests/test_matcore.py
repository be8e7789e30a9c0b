import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import (
    munit,
    partial_trace_second_loops,
    partial_transpose_loops,
    rand_herm,
    rand_mat,
    rand_unitary,
    swap_permutation,
    unit,
)
from posmaps.errors import DimensionMismatch, NotHermitian, NotUnitary
from posmaps.matcore import (
    BipartiteOperator,
    bipartite,
    eig_hermitian,
    fix_phase,
    kron,
    local_conjugate,
    partial_trace,
    partial_transpose,
    projector,
    svd,
    trace_norm,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


# --- BipartiteOperator -------------------------------------------------------


def test_block_accessor_matches_tensor_sum(rng):
    blocks = [[rand_mat(rng, 2) for _ in range(3)] for _ in range(3)]
    m = sum(np.kron(munit(i, j, 3), blocks[i][j]) for i in range(3) for j in range(3))
    op = BipartiteOperator(m, 3, 2)
    for i in range(3):
        for j in range(3):
            assert np.array_equal(op.block(i, j), blocks[i][j])


def test_operator_rejects_wrong_size():
    with pytest.raises(DimensionMismatch):
        BipartiteOperator(np.eye(5), 2, 2)


def test_operator_rejects_non_finite():
    m = np.eye(4)
    m[0, 0] = np.nan
    with pytest.raises(ValueError):
        bipartite(m, 2)


def test_operator_is_immutable():
    op = bipartite(np.eye(4), 2)
    with pytest.raises(ValueError):
        op.matrix[0, 0] = 2.0


def test_operator_arithmetic():
    a = bipartite(np.eye(4), 2)
    b = bipartite(np.diag([1, 2, 3, 4]), 2)
    assert np.allclose((a + 2 * b - b / 2).matrix, np.diag([2.5, 4, 5.5, 7]))
    with pytest.raises(DimensionMismatch):
        a + bipartite(np.eye(4), 4, 1)


# --- eigensolver -------------------------------------------------------------


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_eig_diagonal(method):
    es = eig_hermitian(np.diag([3.0, 1.0, 2.0]), method=method)
    assert np.allclose(es.eigenvalues, [1, 2, 3])
    assert np.allclose(np.abs(es.eigenvectors), np.eye(3)[:, [1, 2, 0]])


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_eig_pauli_x(method):
    es = eig_hermitian(np.array([[0, 1], [1, 0]]), method=method)
    assert np.allclose(es.eigenvalues, [-1, 1])
    assert np.allclose(es.eigenvectors[:, 0], np.array([1, -1]) / np.sqrt(2))
    assert np.allclose(es.eigenvectors[:, 1], np.array([1, 1]) / np.sqrt(2))


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_eig_reconstruction_many_seeds(method):
    for seed in range(100):
        h = rand_herm(np.random.default_rng(seed), 9)
        es = eig_hermitian(h, method=method)
        v = es.eigenvectors
        assert np.linalg.norm(es.reconstruct() - h) <= 1e-12 * np.linalg.norm(h)
        assert np.abs(v.conj().T @ v - np.eye(9)).max() <= 1e-12
        assert np.all(np.diff(es.eigenvalues) >= 0)


def test_jacobi_agrees_with_lapack(rng):
    for _ in range(20):
        h = rand_herm(rng, 6)
        a = eig_hermitian(h, method="jacobi").eigenvalues
        b = eig_hermitian(h).eigenvalues
        assert np.abs(a - b).max() <= 1e-12 * np.abs(b).max()


def test_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        eig_hermitian(np.array([[0, 1], [0, 0]]))


def test_eig_degenerate_phase_convention():
    es = eig_hermitian(np.eye(3) * 2.0)
    first = es.eigenvectors[np.argmax(np.abs(es.eigenvectors) > 1e-10, axis=0), range(3)]
    assert np.all(first.real > 0) and np.allclose(first.imag, 0)


def test_fix_phase_stack():
    v = np.exp(0.7j) * np.array([[0.0, 1.0], [1.0, 0.0]])
    out = fix_phase(np.stack([v, v]))
    assert np.allclose(out, np.stack([np.array([[0, 1], [1, 0]])] * 2))


# --- svd ---------------------------------------------------------------------


def test_svd_identity():
    _, s, _ = svd(np.eye(3))
    assert np.allclose(s, [1, 1, 1])


def test_svd_rank_one(rng):
    u = rand_mat(rng, 3, 1)[:, 0]
    v = rand_mat(rng, 3, 1)[:, 0]
    u, v = u / np.linalg.norm(u), v / np.linalg.norm(v)
    _, s, _ = svd(np.outer(u, v.conj()))
    assert abs(s[0] - 1) < 1e-12 and np.abs(s[1:]).max() < 1e-12


def test_svd_reconstruction(rng):
    for _ in range(100):
        m = rand_mat(rng, 3)
        u, s, v = svd(m)
        assert np.linalg.norm(u @ np.diag(s) @ v.conj().T - m) <= 1e-12 * np.linalg.norm(m)
        assert np.all(np.diff(s) <= 0)


# --- kron, partial trace, partial transpose ----------------------------------


def test_kron_matrix_unit_placement():
    k = kron(munit(0, 0, 2), munit(1, 1, 2))
    expected = np.zeros((4, 4))
    expected[1, 1] = 1
    assert np.array_equal(k, expected)
    assert np.array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))


def test_kron_mixed_product(rng):
    a, b, c, d = (rand_mat(rng, 2) for _ in range(4))
    assert np.abs(kron(a, b) @ kron(c, d) - kron(a @ c, b @ d)).max() <= 1e-13


def test_partial_trace_product(rng):
    a, b = rand_mat(rng, 3), rand_mat(rng, 2)
    op = BipartiteOperator(np.kron(a, b), 3, 2)
    assert np.allclose(partial_trace(op, 2), np.trace(b) * a)
    assert np.allclose(partial_trace(op, 1), np.trace(a) * b)


def test_partial_trace_against_loops(rng):
    m = rand_mat(rng, 6)
    op = BipartiteOperator(m, 3, 2)
    assert np.allclose(partial_trace(op, 2), partial_trace_second_loops(m, 3, 2))
    assert abs(np.trace(partial_trace(op, 1)) - np.trace(m)) < 1e-12


def test_partial_trace_swap_and_max_entangled():
    assert np.allclose(partial_trace(bipartite(swap_permutation(2), 2), 2), np.eye(2))
    x = (np.kron(unit(0, 2), unit(0, 2)) + np.kron(unit(1, 2), unit(1, 2))) / np.sqrt(2)
    assert np.allclose(partial_trace(bipartite(projector(x), 2), 1), np.eye(2) / 2)


def test_partial_transpose_product(rng):
    a, b = rand_mat(rng, 2), rand_mat(rng, 3)
    out = partial_transpose(BipartiteOperator(np.kron(a, b), 2, 3))
    assert np.allclose(out.matrix, np.kron(a, b.T))


def test_partial_transpose_of_swap():
    # 3 P_y with y = sum_i e_i (x) e_i / sqrt(3), written without rounding
    v = np.eye(3).ravel()
    out = partial_transpose(bipartite(swap_permutation(3), 3))
    assert np.array_equal(out.matrix, np.outer(v, v))


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_partial_transpose_against_loops_and_involution(seed):
    rng = np.random.default_rng(seed)
    m = rand_mat(rng, 6)
    op = BipartiteOperator(m, 2, 3)
    pt = partial_transpose(op)
    assert np.array_equal(pt.matrix, partial_transpose_loops(m, 2, 3))
    assert np.array_equal(partial_transpose(pt).matrix, m)
    h = bipartite(rand_herm(rng, 9), 3)
    assert partial_transpose(h).is_hermitian(1e-14)


# --- local conjugation -------------------------------------------------------


def test_local_conjugate_identity(rng):
    op = bipartite(rand_herm(rng, 9), 3)
    assert op.allclose(local_conjugate(op, np.eye(3), np.eye(3)), 0.0)


def test_local_conjugate_preserves_spectrum(rng):
    op = bipartite(rand_herm(rng, 9), 3)
    out = local_conjugate(op, rand_unitary(rng, 3), rand_unitary(rng, 3))
    assert np.allclose(np.linalg.eigvalsh(out.matrix), np.linalg.eigvalsh(op.matrix), atol=1e-12)


def test_local_conjugate_rejects_non_unitary():
    with pytest.raises(NotUnitary):
        local_conjugate(bipartite(np.eye(4), 2), np.diag([1, 2]), np.eye(2))


def test_partial_transpose_local_unitary_identity():
    # tau_P((U x V) a (U x V)^*) = (U x conj V) tau_P(a) (U x conj V)^*
    for seed in range(200):
        rng = np.random.default_rng(seed)
        a = bipartite(rand_mat(rng, 9), 3)
        u, v = rand_unitary(rng, 3), rand_unitary(rng, 3)
        lhs = partial_transpose(local_conjugate(a, u, v)).matrix
        w = np.kron(u, v.conj())
        rhs = w @ partial_transpose_loops(a.matrix, 3, 3) @ w.conj().T
        assert np.abs(lhs - rhs).max() <= 1e-12


def test_trace_norm(rng):
    h = rand_herm(rng, 4)
    assert np.isclose(trace_norm(h), np.abs(np.linalg.eigvalsh(h)).sum())
    m = rand_mat(rng, 3)
    assert np.isclose(trace_norm(m), np.linalg.svd(m, compute_uv=False).sum())
