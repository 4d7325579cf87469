import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import haar_list, random_matrix
from ufest.errors import DimensionCapError, NotUnitaryError
from ufest.linalg import (
    compact_svd,
    direct_sum,
    direct_sum_all,
    is_unitary,
    partial_transpose,
    permutation_matrix,
    require_unitary,
    svd,
    tensor,
    trace_norm,
)

dims = st.integers(min_value=1, max_value=4)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_tensor_examples():
    np.testing.assert_array_equal(tensor(np.eye(2), np.eye(2)), np.eye(4))
    b = np.array([[1, 2j], [3, 4]])
    np.testing.assert_array_equal(tensor([[2]], b), 2 * b)
    x = np.array([[0, 1], [1, 0]])
    z = np.diag([1, -1])
    expected = np.block([[np.zeros((2, 2)), z], [z, np.zeros((2, 2))]])
    np.testing.assert_array_equal(tensor(x, z), expected)


def test_tensor_index_law(gen):
    a, b = random_matrix(gen, 2, 3), random_matrix(gen, 3, 2)
    t = tensor(a, b)
    assert t.shape == (6, 6)
    for i1, j1, i2, j2 in [(0, 0, 0, 0), (1, 2, 2, 1), (0, 1, 1, 0)]:
        assert t[i1 * 3 + i2, j1 * 2 + j2] == pytest.approx(a[i1, j1] * b[i2, j2], abs=1e-15)


def test_cap_enforced():
    with pytest.raises(DimensionCapError):
        tensor(np.eye(64), np.eye(64), cap=1000)
    with pytest.raises(DimensionCapError):
        direct_sum(np.eye(600), np.eye(600), cap=1000)


def test_direct_sum_examples():
    np.testing.assert_array_equal(direct_sum([[1]], [[1]]), np.eye(2))
    np.testing.assert_array_equal(direct_sum([[2]], [[3]]), np.diag([2, 3]))
    g, h = haar_list(2, 1)[0], haar_list(3, 1)[0]
    assert is_unitary(direct_sum(g, h))


@settings(max_examples=30, deadline=None)
@given(dims, dims, dims, seeds)
def test_associativity_exact(p, q, r, seed):
    gen = np.random.default_rng(seed)
    a, b, c = random_matrix(gen, p), random_matrix(gen, q), random_matrix(gen, r)
    np.testing.assert_allclose(tensor(tensor(a, b), c), tensor(a, tensor(b, c)), rtol=1e-14)
    np.testing.assert_array_equal(direct_sum(direct_sum(a, b), c), direct_sum(a, direct_sum(b, c)))
    np.testing.assert_array_equal(direct_sum_all([a, b, c]), direct_sum(a, direct_sum(b, c)))


def test_svd_examples():
    np.testing.assert_allclose(svd(np.eye(3)).singulars, [1, 1, 1])
    e12 = np.array([[0, 1], [0, 0]])
    np.testing.assert_allclose(svd(e12).singulars, [1, 0])
    u, v = haar_list(4, 2, seed=3)
    a = u @ np.diag([3, 2, 1, 0.5]) @ v
    np.testing.assert_allclose(svd(a).singulars, [3, 2, 1, 0.5], atol=1e-9)


@settings(max_examples=30, deadline=None)
@given(dims, dims, seeds)
def test_svd_invariants(r, c, seed):
    a = random_matrix(np.random.default_rng(seed), r, c)
    f = svd(a)
    rec = f.reconstruct()
    assert np.linalg.norm(rec - a) / np.linalg.norm(a) < 1e-10
    assert np.all(np.diff(f.singulars) <= 0)
    assert is_unitary(f.left) and is_unitary(f.right)
    assert trace_norm(a) == pytest.approx(np.sum(f.singulars))


def test_svd_large_reconstruction(gen):
    a = random_matrix(gen, 512)
    f = svd(a)
    assert np.linalg.norm(f.reconstruct() - a) / np.linalg.norm(a) < 1e-10


def test_compact_svd_drops_zero_rows():
    a = np.zeros((50, 50), dtype=complex)
    a[3, 7] = 2
    a[10, 10] = 1j
    f = compact_svd(a)
    np.testing.assert_allclose(f.singulars, [2, 1])
    np.testing.assert_allclose(f.reconstruct(), a, atol=1e-14)


def test_trace_norm_examples():
    e = np.zeros((3, 3))
    e[0, 2] = 1
    assert trace_norm(e) == pytest.approx(1)
    assert trace_norm(np.eye(5)) == pytest.approx(5)


@settings(max_examples=25, deadline=None)
@given(dims, dims, seeds)
def test_trace_norm_identities(p, q, seed):
    gen = np.random.default_rng(seed)
    a, b = random_matrix(gen, p), random_matrix(gen, q)
    assert trace_norm(direct_sum(a, b)) == pytest.approx(trace_norm(a) + trace_norm(b), rel=1e-10)
    assert trace_norm(tensor(a, b)) == pytest.approx(trace_norm(a) * trace_norm(b), rel=1e-10)
    u, v = haar_list(p, 2, seed=seed % 1000)
    assert trace_norm(u @ a @ v) == pytest.approx(trace_norm(a), rel=1e-10)


@settings(max_examples=30, deadline=None)
@given(dims, dims, seeds)
def test_partial_transpose_of_product(p, q, seed):
    gen = np.random.default_rng(seed)
    a, b = random_matrix(gen, p), random_matrix(gen, q)
    x = tensor(a, b)
    np.testing.assert_allclose(partial_transpose(x, p, q), tensor(a, b.T), atol=1e-13)
    np.testing.assert_allclose(partial_transpose(x, p, q, which="first"), tensor(a.T, b), atol=1e-13)
    np.testing.assert_array_equal(partial_transpose(partial_transpose(x, p, q), p, q), x)


def test_partial_transpose_bad_shape():
    with pytest.raises(ValueError):
        partial_transpose(np.eye(5), 2, 2)
    with pytest.raises(ValueError):
        partial_transpose(np.eye(4), 2, 2, which="third")


def block_lemma_residual(gen, dim_a, dim_b, dim_c):
    """Write ``A (x) B = (C D1; D2 D3)`` with ``dim C <= dim B``; then ``A (x) B^T`` starts with ``C^T``."""
    a, b = random_matrix(gen, dim_a), random_matrix(gen, dim_b)
    c = tensor(a, b)[:dim_c, :dim_c]
    pt = partial_transpose(tensor(a, b), dim_a, dim_b)
    np.testing.assert_allclose(pt, tensor(a, b.T), atol=1e-13)
    return np.max(np.abs(pt[:dim_c, :dim_c] - c.T))


def test_partial_transpose_block_lemma(gen):
    for _ in range(50):
        dim_a, dim_b = gen.integers(1, 4), gen.integers(2, 5)
        dim_c = gen.integers(1, dim_b + 1)
        assert block_lemma_residual(gen, dim_a, dim_b, dim_c) < 1e-12


def test_permutation_matrix():
    np.testing.assert_array_equal(permutation_matrix([0, 1, 2]), np.eye(3))
    np.testing.assert_array_equal(permutation_matrix([1, 0]), [[0, 1], [1, 0]])
    perm = np.array([2, 0, 3, 1])
    inv = np.argsort(perm)
    np.testing.assert_array_equal(permutation_matrix(perm) @ permutation_matrix(inv), np.eye(4))
    with pytest.raises(ValueError):
        permutation_matrix([0, 0, 1])


def test_require_unitary():
    with pytest.raises(NotUnitaryError):
        require_unitary(np.array([[1, 1], [0, 1]]))
    with pytest.raises(NotUnitaryError):
        require_unitary(np.eye(2), d=3)
    with pytest.raises(ValueError):
        require_unitary(np.array([[np.nan]]))
