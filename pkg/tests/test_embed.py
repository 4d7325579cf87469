import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import haar_list
from ufest.embed import (
    block_for_bits,
    block_layout,
    build_embedding,
    circuit_dim,
    direct_sum_operator,
    monomial_entry,
    useful_dim,
)
from ufest.errors import DimensionCapError
from ufest.linalg import direct_sum, permutation_matrix


def circuit_operator(g, m, dim_e=1):
    """``(I+g*)^(x)m on AB (x) (I+g)^(x)m on CD (x) I_E``, dense."""
    d = g.shape[0]
    ab = cd = np.ones((1, 1), complex)
    for _ in range(m):
        ab = np.kron(ab, direct_sum(np.eye(d), g.conj().T))
        cd = np.kron(cd, direct_sum(np.eye(d), g))
    return np.kron(np.kron(ab, cd), np.eye(dim_e))


def brute_direct_sum(g, m, dim_e=1):
    blocks = []
    for n in range(m + 1):
        for nb in range(m + 1):
            x = np.ones((1, 1), complex)
            for _ in range(n):
                x = np.kron(x, g)
            for _ in range(nb):
                x = np.kron(x, g.conj().T)
            blocks.append(np.kron(x, np.eye(dim_e)))
    out = blocks[0]
    for b in blocks[1:]:
        out = direct_sum(out, b)
    return out


def test_layout_m1_d2():
    blocks = block_layout(1, 2)
    assert [(b.n, b.nbar, b.offset, b.size) for b in blocks] == [
        (0, 0, 0, 1), (0, 1, 1, 2), (1, 0, 3, 2), (1, 1, 5, 4)]
    assert useful_dim(1, 2) == 9
    emb = build_embedding(1, 2, 1)
    assert emb.useful_dim == 9
    assert circuit_dim(1, 2, 1) == 16


def test_block_for_bits_examples():
    np.testing.assert_array_equal(block_for_bits((1,), 2), [2, 3])
    np.testing.assert_array_equal(block_for_bits((0,), 2), [0, 1])
    g = haar_list(2, 1)[0]
    op = direct_sum(np.eye(2), g)
    op2 = np.kron(op, op)
    idx = block_for_bits((1, 0), 2)
    np.testing.assert_allclose(op2[np.ix_(idx, idx)], np.kron(g, np.eye(2)), atol=1e-15)


def test_conjugation_at_identity():
    emb = build_embedding(2, 2, 1)
    w = permutation_matrix(emb.permutation)
    top = (w.T @ circuit_operator(np.eye(2), 2) @ w)[: emb.useful_dim, : emb.useful_dim]
    np.testing.assert_array_equal(top, np.eye(emb.useful_dim))


@pytest.mark.parametrize("d,m,dim_e", [(2, 1, 1), (2, 2, 1), (3, 1, 1), (3, 2, 1), (2, 1, 3)])
def test_conjugation_identity(d, m, dim_e):
    emb = build_embedding(m, d, dim_e)
    u = emb.useful_dim
    w = permutation_matrix(emb.permutation)
    for g in haar_list(d, 10, seed=d * 10 + m):
        conj = w.T @ circuit_operator(g, m, dim_e) @ w
        np.testing.assert_allclose(conj[:u, :u], brute_direct_sum(g, m, dim_e), atol=1e-10)
        np.testing.assert_allclose(conj[:u, :u], direct_sum_operator(g, m, dim_e), atol=1e-12)
        # the useful block is decoupled from Garbage
        assert np.abs(conj[:u, u:]).max() < 1e-12 and np.abs(conj[u:, :u]).max() < 1e-12


def test_permutation_is_bijection():
    emb = build_embedding(2, 3, 2)
    assert np.array_equal(np.sort(emb.permutation), np.arange(circuit_dim(2, 3, 2)))


def test_embed_vector():
    emb = build_embedding(1, 2)
    v = np.arange(9, dtype=complex)
    out = emb.embed(v)
    np.testing.assert_array_equal(out[emb.permutation[:9]], v)
    assert np.count_nonzero(out) == 8
    with pytest.raises(ValueError):
        emb.embed(np.ones(4))


@pytest.mark.parametrize("d,m,dim_e", [(2, 2, 1), (3, 2, 1), (2, 3, 2)])
def test_embeddings_nest(d, m, dim_e):
    big, small = build_embedding(m, d, dim_e), build_embedding(m - 1, d, dim_e)
    pair_small, pair_big = (2 * d) ** (m - 1), (2 * d) ** m

    def include(idx):
        e = idx % dim_e
        rest = idx // dim_e
        ab, cd = divmod(rest, pair_small)
        # the new last slot of each register pair sits at digit 0
        return ((ab * 2 * d) * pair_big + cd * 2 * d) * dim_e + e

    for n in range(m):
        for nb in range(m):
            bs, bb = small.block(n, nb), big.block(n, nb)
            np.testing.assert_array_equal(
                big.permutation[bb.offset:bb.offset + bb.size],
                include(small.permutation[bs.offset:bs.offset + bs.size]),
            )


def test_cap():
    with pytest.raises(DimensionCapError):
        build_embedding(3, 3, 1, cap=1000)


def grid(d, entries):
    a = np.zeros((d, d), dtype=int)
    for (i, j), e in entries.items():
        a[i, j] = e
    return a


def test_monomial_entry_examples():
    zero = np.zeros((2, 2), int)
    assert monomial_entry(grid(2, {(0, 0): 1}), zero, 1, 2) == (3, 3)
    assert monomial_entry(zero, grid(2, {(0, 1): 1}), 1, 2) == (2, 1)
    g = haar_list(2, 20, seed=5)
    r, c = monomial_entry(grid(2, {(0, 1): 1}), grid(2, {(1, 1): 1}), 1, 2)
    assert block_layout(1, 2)[3].offset <= r < 9
    for h in g:
        assert abs(direct_sum_operator(h, 1)[r, c] - h[0, 1] * np.conj(h[1, 1])) < 1e-12
    with pytest.raises(ValueError):
        monomial_entry(grid(2, {(0, 0): 2}), zero, 1, 2)


exponents = st.lists(st.integers(0, 2), min_size=8, max_size=8)


@settings(max_examples=100, deadline=None)
@given(exponents)
def test_monomial_entry_random(exps):
    alpha, alpha_bar = np.array(exps[:4]).reshape(2, 2), np.array(exps[4:]).reshape(2, 2)
    m = max(alpha.sum(), alpha_bar.sum())
    if m > 3:
        alpha, alpha_bar = np.minimum(alpha, 1), np.minimum(alpha_bar, 0)
        m = alpha.sum()
    r, c = monomial_entry(alpha, alpha_bar, m, 2)
    for g in haar_list(2, 10, seed=sum(exps)):
        target = np.prod(g ** alpha) * np.prod(g.conj() ** alpha_bar)
        assert abs(direct_sum_operator(g, m)[r, c] - target) < 1e-12
