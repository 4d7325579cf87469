"""Unitary irreducible representations of U(2) and numeric intertwiners.

The irrep with signature ``(l1, l2)`` is realised as
``det(g)**l2 * Sym^(l1 - l2)(g)`` on the orthonormal Dicke basis of the
symmetric subspace. Negative determinant powers use ``conj(det g)``,
which is only valid on unitaries.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

from .errors import IntertwinerError
from .haar import RngStream, sample_haar
from .linalg import require_unitary

INTERTWINER_SAMPLES = 8
INTERTWINER_TOL = 1e-8


@dataclass(frozen=True, order=True)
class IrrepLabel:
    lambda1: int
    lambda2: int

    def __post_init__(self):
        if self.lambda1 < self.lambda2:
            raise ValueError(f"signature must be non-increasing, got {self}")

    @property
    def dim(self) -> int:
        return self.lambda1 - self.lambda2 + 1

    @property
    def conjugate(self) -> "IrrepLabel":
        return IrrepLabel(-self.lambda2, -self.lambda1)

    def ambient(self) -> tuple[int, int]:
        """Smallest ``(m, mbar)`` with this irrep inside ``g^(x)m (x) conj(g)^(x)mbar``."""
        l1, l2 = self.lambda1, self.lambda2
        if l2 >= 0:
            return l1 + l2, 0
        if l1 <= 0:
            return 0, -(l1 + l2)
        return l1, -l2

    @property
    def degree(self) -> int:
        m, mbar = self.ambient()
        return m + mbar


@lru_cache(maxsize=None)
def _dicke_scale(k: int) -> np.ndarray:
    c = np.array([comb(k, r) for r in range(k + 1)], dtype=float)
    return np.sqrt(c[None, :] / c[:, None])


def symmetric_power(g: np.ndarray, k: int) -> np.ndarray:
    """``Sym^k(g)`` for a 2x2 matrix ``g`` in the normalised Dicke basis."""
    if k == 0:
        return np.ones((1, 1), dtype=complex)
    a, b = g[0, 0], g[0, 1]
    c, d = g[1, 0], g[1, 1]
    # column s: coefficients of (a + c t)^(k-s) (b + d t)^s in powers of t
    out = np.empty((k + 1, k + 1), dtype=complex)
    col0 = np.array([1.0 + 0j])
    first = np.array([a, c])
    second = np.array([b, d])
    powers_first = [col0]
    for _ in range(k):
        powers_first.append(np.convolve(powers_first[-1], first))
    powers_second = [col0]
    for _ in range(k):
        powers_second.append(np.convolve(powers_second[-1], second))
    for s in range(k + 1):
        out[:, s] = np.convolve(powers_first[k - s], powers_second[s])
    return out * _dicke_scale(k)


def _det_power(g: np.ndarray, p: int) -> complex:
    det = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
    return det**p if p >= 0 else np.conj(det) ** (-p)


def irrep_u2(label: IrrepLabel, g) -> np.ndarray:
    g = require_unitary(g, 2)
    return _irrep_unchecked(label, g)


def _irrep_unchecked(label: IrrepLabel, g: np.ndarray) -> np.ndarray:
    return _det_power(g, label.lambda2) * symmetric_power(g, label.lambda1 - label.lambda2)


def character(label: IrrepLabel, g) -> complex:
    return complex(np.trace(irrep_u2(label, g)))


def irrep_entries_batch(label: IrrepLabel, gs: np.ndarray) -> np.ndarray:
    """Irrep matrices for a stack of U(2) elements, shape ``(n, dim, dim)``."""
    return np.stack([_irrep_unchecked(label, g) for g in gs])


def ambient_rep(g: np.ndarray, m: int, mbar: int) -> np.ndarray:
    """``g^(x)m (x) conj(g)^(x)mbar`` as a dense matrix."""
    out = np.ones((1, 1), dtype=complex)
    for _ in range(m):
        out = np.kron(out, g)
    gbar = np.conj(g)
    for _ in range(mbar):
        out = np.kron(out, gbar)
    return out


def multiplicity(label: IrrepLabel, m: int, mbar: int, grid: int | None = None) -> int:
    """Multiplicity of ``label`` inside ``g^(x)m (x) conj(g)^(x)mbar``.

    Character inner product evaluated with the Weyl integration formula on
    a uniform torus grid; the grid is fine enough to integrate the
    trigonometric polynomials involved exactly.
    """
    k = label.lambda1 - label.lambda2
    n = grid or (2 * (m + mbar + abs(label.lambda1) + abs(label.lambda2)) + 4)
    theta = 2 * np.pi * np.arange(n) / n
    z1, z2 = np.meshgrid(np.exp(1j * theta), np.exp(1j * theta), indexing="ij")
    chi_amb = (z1 + z2) ** m * np.conj(z1 + z2) ** mbar
    chi_lam = (z1 * z2) ** label.lambda2 if label.lambda2 >= 0 else np.conj(z1 * z2) ** (-label.lambda2)
    chi_lam = chi_lam * sum(z1 ** (k - r) * z2**r for r in range(k + 1))
    weyl = np.abs(z1 - z2) ** 2 / 2
    value = np.mean(weyl * np.conj(chi_lam) * chi_amb)
    return int(round(value.real))


@dataclass(frozen=True)
class Intertwiner:
    """Isometry ``map`` from the irrep space into the ambient tensor power.

    ``ambient_rep(g, m, mbar) @ map == map @ irrep_u2(label, g)``.
    """

    map: np.ndarray
    label: IrrepLabel
    m: int
    mbar: int


def _row_echelon(rows: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Reduced row echelon form with unit-norm rows.

    The result depends only on the row space, which makes the choice among
    equivalent isotypic copies independent of the sampled constraints.
    """
    r = rows.copy()
    k = r.shape[0]
    pivot_row = 0
    for col in range(r.shape[1]):
        if pivot_row == k:
            break
        p = pivot_row + int(np.argmax(np.abs(r[pivot_row:, col])))
        if abs(r[p, col]) < tol:
            continue
        r[[pivot_row, p]] = r[[p, pivot_row]]
        r[pivot_row] /= r[pivot_row, col]
        for q in range(k):
            if q != pivot_row:
                r[q] -= r[q, col] * r[pivot_row]
        pivot_row += 1
    return r / np.linalg.norm(r, axis=1, keepdims=True)


def solve_intertwiner(label: IrrepLabel, m: int, mbar: int, rng: RngStream) -> Intertwiner:
    if multiplicity(label, m, mbar) < 1:
        raise IntertwinerError(f"{label} does not occur in the ({m}, {mbar}) tensor power")
    dim_pi = label.dim
    dim_amb = 2 ** (m + mbar)
    rows = []
    for _ in range(INTERTWINER_SAMPLES):
        g = sample_haar(2, rng)
        rho = ambient_rep(g, m, mbar)
        pi = _irrep_unchecked(label, g)
        # row-major vec: vec(rho T - T pi) = (rho (x) I - I (x) pi^T) vec(T)
        rows.append(np.kron(rho, np.eye(dim_pi)) - np.kron(np.eye(dim_amb), pi.T))
    system = np.vstack(rows)
    _, s, vh = np.linalg.svd(system)
    null_mask = np.concatenate([s, np.zeros(vh.shape[0] - s.size)]) < INTERTWINER_TOL * max(1.0, s[0])
    null = vh[null_mask].conj()
    expected = multiplicity(label, m, mbar)
    if null.shape[0] != expected:
        raise IntertwinerError(
            f"equivariance null space has dimension {null.shape[0]}, expected {expected}"
        )
    candidates = [v.reshape(dim_amb, dim_pi) for v in _row_echelon(null)]

    def lead(t):
        flat = t.ravel()
        idx = np.flatnonzero(np.abs(flat) > 1e-9)[0]
        return idx, flat[idx]

    best = max(candidates, key=lambda t: abs(lead(t)[1]))
    _, value = lead(best)
    t = best * (abs(value) / value)
    gram = t.conj().T @ t
    t = t / np.sqrt(np.real(np.trace(gram)) / dim_pi)
    if np.linalg.norm(t.conj().T @ t - np.eye(dim_pi)) > INTERTWINER_TOL:
        raise IntertwinerError("intertwiner is not an isometry")
    return Intertwiner(map=t, label=label, m=m, mbar=mbar)
