"""Index bookkeeping between the circuit registers and the useful direct sum.

The circuit operator of the generalized Hadamard test is
``(I+g*)^(x)m`` on the AB registers times ``(I+g)^(x)m`` on CD, times
``I_E``. Its useful part is the direct sum over ``0 <= n, nbar <= m`` of
``g^(x)n (x) g*^(x)nbar (x) I_E``, blocks ordered lexicographically in
``(n, nbar)``. Block ``(n, nbar)`` is carried by the CD registers for the
``g`` powers (control bits ``1^n 0^(m-n)``) and by AB for the ``g*``
powers; identity slots are pinned to basis index 0.

Circuit index layout (ABCDE part, most significant first):
``A_1 B_1 ... A_m B_m  C_1 D_1 ... C_m D_m  E``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

from .linalg import DIMENSION_CAP, _check_cap


@dataclass(frozen=True)
class BlockIndex:
    n: int
    nbar: int
    offset: int
    size: int


def block_layout(m: int, d: int, dim_e: int = 1) -> list[BlockIndex]:
    blocks, offset = [], 0
    for n in range(m + 1):
        for nbar in range(m + 1):
            size = d ** (n + nbar) * dim_e
            blocks.append(BlockIndex(n, nbar, offset, size))
            offset += size
    return blocks


def useful_dim(m: int, d: int, dim_e: int = 1) -> int:
    s = sum(d**k for k in range(m + 1))
    return s * s * dim_e


def circuit_dim(m: int, d: int, dim_e: int = 1) -> int:
    """Dimension of the ABCDE registers (the control qubit excluded)."""
    return (2 * d) ** (2 * m) * dim_e


def block_for_bits(bits, d: int) -> np.ndarray:
    """Indices of the ``(2d)^m`` space where the A register equals ``bits``.

    Restricted to these indices, ``(I+g)^(x)m`` acts as the tensor product
    of ``g`` on slots whose bit is 1 and ``I_d`` on the others. Indices are
    listed in the natural order of the B digits.
    """
    bits = tuple(int(b) for b in bits)
    m = len(bits)
    out = np.empty(d**m, dtype=np.int64)
    for pos, digits in enumerate(product(range(d), repeat=m)):
        idx = 0
        for a, b in zip(bits, digits):
            idx = idx * 2 * d + a * d + b
        out[pos] = idx
    return out


def _slot_indices(n_active: int, m: int, d: int) -> np.ndarray:
    """Indices in a ``(2d)^m`` register pair for bits ``1^n 0^(m-n)``.

    Active slots range over their ``d`` digits; inactive slots have digit 0.
    Ordered by the active digits, first slot most significant.
    """
    out = np.empty(d**n_active, dtype=np.int64)
    for pos, digits in enumerate(product(range(d), repeat=n_active)):
        idx = 0
        for k in range(m):
            slot = (d + digits[k]) if k < n_active else 0
            idx = idx * 2 * d + slot
        out[pos] = idx
    return out


@dataclass(frozen=True)
class EmbeddingMap:
    """Permutation ``W`` with ``W e_u = e_{permutation[u]}``.

    The first ``useful_dim`` positions are the direct-sum coordinates; the
    rest enumerate the Garbage coordinates in increasing circuit order.
    """

    m: int
    d: int
    dim_e: int
    permutation: np.ndarray
    useful_dim: int
    blocks: tuple[BlockIndex, ...]

    def embed(self, vec) -> np.ndarray:
        """``W (vec (+) 0)`` as a vector on the ABCDE registers."""
        vec = np.asarray(vec, dtype=complex).ravel()
        if vec.size != self.useful_dim:
            raise ValueError(f"expected a vector of length {self.useful_dim}, got {vec.size}")
        out = np.zeros(self.permutation.size, dtype=complex)
        out[self.permutation[: self.useful_dim]] = vec
        return out

    def block(self, n: int, nbar: int) -> BlockIndex:
        return self.blocks[n * (self.m + 1) + nbar]


def build_embedding(m: int, d: int, dim_e: int = 1, cap: int | None = None) -> EmbeddingMap:
    return _build_embedding(m, d, dim_e, DIMENSION_CAP if cap is None else cap)


@lru_cache(maxsize=32)
def _build_embedding(m: int, d: int, dim_e: int, cap: int) -> EmbeddingMap:
    if m < 0 or d < 1 or dim_e < 1:
        raise ValueError("need m >= 0, d >= 1, dim_e >= 1")
    total = circuit_dim(m, d, dim_e)
    _check_cap(2 * total, 2 * total, cap)
    pair = (2 * d) ** m
    blocks = block_layout(m, d, dim_e)
    useful = []
    for blk in blocks:
        cd = _slot_indices(blk.n, m, d)
        ab = _slot_indices(blk.nbar, m, d)
        # local index order: g digits, then g* digits, then E
        idx = (ab[None, :, None] * pair + cd[:, None, None]) * dim_e + np.arange(dim_e)[None, None, :]
        useful.append(idx.ravel())
    useful = np.concatenate(useful)
    mask = np.ones(total, dtype=bool)
    mask[useful] = False
    perm = np.concatenate([useful, np.flatnonzero(mask)])
    perm.setflags(write=False)
    return EmbeddingMap(m=m, d=d, dim_e=dim_e, permutation=perm, useful_dim=useful.size, blocks=tuple(blocks))


def monomial_entry(alpha, alpha_bar, m: int, d: int) -> tuple[int, int]:
    """Global ``(row, col)`` of the direct sum whose entry is ``g^alpha conj(g)^alpha_bar``.

    ``alpha`` and ``alpha_bar`` are ``d x d`` exponent grids. Factors
    ``g_ij`` are listed in lexicographic ``(i, j)`` order and fill the
    ``g`` slots left to right; conjugate factors ``conj(g_ij) = (g*)_ji``
    fill the ``g*`` slots the same way.
    """
    alpha = np.asarray(alpha, dtype=int).reshape(d, d)
    alpha_bar = np.asarray(alpha_bar, dtype=int).reshape(d, d)
    n, nbar = int(alpha.sum()), int(alpha_bar.sum())
    if n > m or nbar > m:
        raise ValueError(f"degree ({n}, {nbar}) exceeds truncation m={m}")
    if (alpha < 0).any() or (alpha_bar < 0).any():
        raise ValueError("exponents must be nonnegative")
    rows, cols = [], []
    for i in range(d):
        for j in range(d):
            rows += [i] * alpha[i, j]
            cols += [j] * alpha[i, j]
    for i in range(d):
        for j in range(d):
            rows += [j] * alpha_bar[i, j]
            cols += [i] * alpha_bar[i, j]
    r = c = 0
    for a, b in zip(rows, cols):
        r, c = r * d + a, c * d + b
    offset = block_layout(m, d)[n * (m + 1) + nbar].offset
    return offset + r, offset + c


def direct_sum_operator(g, m: int, dim_e: int = 1) -> np.ndarray:
    """Dense direct sum of ``g^(x)n (x) g*^(x)nbar (x) I_E`` for ``n, nbar <= m``."""
    from .linalg import direct_sum_all

    g = np.asarray(g, dtype=complex)
    gs = g.conj().T
    pw, pws = [np.ones((1, 1), complex)], [np.ones((1, 1), complex)]
    for _ in range(m):
        pw.append(np.kron(pw[-1], g))
        pws.append(np.kron(pws[-1], gs))
    eye_e = np.eye(dim_e)
    return direct_sum_all([np.kron(np.kron(pw[n], pws[nb]), eye_e) for n in range(m + 1) for nb in range(m + 1)])
