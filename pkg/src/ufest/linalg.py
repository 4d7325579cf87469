"""Dense complex linear algebra on numpy arrays.

Matrices are plain ``complex128`` ndarrays. The SVD follows the ``A = U D V``
convention: the right factor already carries the adjoint, so ``A @ x`` is
``U @ diag(s) @ V @ x``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionCapError, NotUnitaryError, NumericalError

DIMENSION_CAP = 2**20

UNITARY_TOL = 1e-10


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a finite 2-D complex array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got array of shape {m.shape}")
    if m.size == 0:
        raise ValueError("matrix must have at least one row and one column")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def _check_cap(rows: int, cols: int, cap: int | None) -> None:
    cap = DIMENSION_CAP if cap is None else cap
    if rows > cap or cols > cap:
        raise DimensionCapError(f"{rows}x{cols} exceeds the dimension cap {cap}")


def is_unitary(g, tol: float = UNITARY_TOL) -> bool:
    g = np.asarray(g, dtype=complex)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        return False
    return bool(np.linalg.norm(g.conj().T @ g - np.eye(g.shape[0])) < tol)


def require_unitary(g, d: int | None = None, tol: float = UNITARY_TOL) -> np.ndarray:
    g = as_matrix(g)
    if d is not None and g.shape != (d, d):
        raise NotUnitaryError(f"expected a {d}x{d} unitary, got shape {g.shape}")
    if not is_unitary(g, tol):
        raise NotUnitaryError("matrix is not unitary within tolerance")
    return g


def tensor(a, b, cap: int | None = None) -> np.ndarray:
    """Kronecker product with entry ``(i1*rb + i2, j1*cb + j2) = a[i1, j1] * b[i2, j2]``."""
    a, b = as_matrix(a), as_matrix(b)
    _check_cap(a.shape[0] * b.shape[0], a.shape[1] * b.shape[1], cap)
    return np.kron(a, b)


def direct_sum(a, b, cap: int | None = None) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    rows, cols = a.shape[0] + b.shape[0], a.shape[1] + b.shape[1]
    _check_cap(rows, cols, cap)
    out = np.zeros((rows, cols), dtype=complex)
    out[: a.shape[0], : a.shape[1]] = a
    out[a.shape[0]:, a.shape[1]:] = b
    return out


def direct_sum_all(blocks, cap: int | None = None) -> np.ndarray:
    blocks = [as_matrix(b) for b in blocks]
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    _check_cap(rows, cols, cap)
    out = np.zeros((rows, cols), dtype=complex)
    r = c = 0
    for b in blocks:
        out[r:r + b.shape[0], c:c + b.shape[1]] = b
        r += b.shape[0]
        c += b.shape[1]
    return out


@dataclass(frozen=True)
class SvdFactors:
    """``left @ diag(singulars) @ right`` reconstructs the factored matrix."""

    left: np.ndarray
    singulars: np.ndarray
    right: np.ndarray

    def reconstruct(self) -> np.ndarray:
        k = self.singulars.size
        return (self.left[:, :k] * self.singulars) @ self.right[:k]

    @property
    def rank(self) -> int:
        return int(np.count_nonzero(self.singulars))


def svd(a) -> SvdFactors:
    a = as_matrix(a)
    try:
        u, s, v = np.linalg.svd(a, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge: {exc}") from exc
    if not np.all(np.isfinite(s)):
        raise NumericalError("SVD produced non-finite singular values")
    return SvdFactors(left=u, singulars=s, right=v)


def compact_svd(a, rtol: float = 1e-12) -> SvdFactors:
    """SVD restricted to the strictly positive singular values.

    Only the rows and columns where ``a`` is nonzero are decomposed, which
    keeps large but block-sparse coefficient matrices cheap. ``left`` has
    orthonormal columns and ``right`` orthonormal rows.
    """
    a = as_matrix(a)
    rows = np.flatnonzero(np.any(a != 0, axis=1))
    cols = np.flatnonzero(np.any(a != 0, axis=0))
    n_rows, n_cols = a.shape
    if rows.size == 0:
        return SvdFactors(np.zeros((n_rows, 0), complex), np.zeros(0), np.zeros((0, n_cols), complex))
    f = svd(a[np.ix_(rows, cols)])
    keep = f.singulars > rtol * f.singulars[0]
    k = int(np.count_nonzero(keep))
    left = np.zeros((n_rows, k), dtype=complex)
    right = np.zeros((k, n_cols), dtype=complex)
    left[rows, :] = f.left[:, :k]
    right[:, cols] = f.right[:k, :]
    return SvdFactors(left=left, singulars=f.singulars[:k].copy(), right=right)


def trace_norm(a) -> float:
    return float(np.sum(svd(a).singulars))


def partial_transpose(x, dim_v: int, dim_w: int, which: str = "second") -> np.ndarray:
    """Partial transpose of an operator on ``V (x) W``.

    ``which="second"`` transposes every ``dim_w x dim_w`` block in place;
    ``which="first"`` transposes the grid of blocks instead.
    """
    x = as_matrix(x)
    side = dim_v * dim_w
    if x.shape != (side, side):
        raise ValueError(f"expected a {side}x{side} matrix, got {x.shape}")
    t = x.reshape(dim_v, dim_w, dim_v, dim_w)
    if which == "second":
        t = t.transpose(0, 3, 2, 1)
    elif which == "first":
        t = t.transpose(2, 1, 0, 3)
    else:
        raise ValueError(f"which must be 'first' or 'second', got {which!r}")
    return np.ascontiguousarray(t).reshape(side, side)


def permutation_matrix(perm, n: int | None = None) -> np.ndarray:
    """Matrix sending basis vector ``e_i`` to ``e_{perm[i]}``."""
    perm = np.asarray(perm, dtype=np.int64)
    n = len(perm) if n is None else n
    if perm.shape != (n,) or not np.array_equal(np.sort(perm), np.arange(n)):
        raise ValueError("perm is not a bijection on {0, ..., n-1}")
    p = np.zeros((n, n), dtype=complex)
    p[perm, np.arange(n)] = 1.0
    return p
