"""Function families on U(d), their coefficient matrices and complexity bounds.

Every family is written as ``f(g) = Tr[A D_m(g)]`` where ``D_m(g)`` is the
direct sum of ``g^(x)n (x) g*^(x)nbar`` over ``0 <= n, nbar <= m`` (see
:mod:`ufest.embed` for the block order). The estimator samples from the
SVD of ``A``, so ``||A||_1`` sets the shot count.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations
from math import factorial
from typing import Union

import numpy as np

from .embed import block_layout, monomial_entry, useful_dim
from .haar import RngStream
from .irreps import IrrepLabel, irrep_entries_batch, solve_intertwiner
from .linalg import compact_svd, partial_transpose, require_unitary

INTERTWINER_SEED = 20240517
IRREP_MAX_DEGREE = 4


@dataclass(frozen=True)
class Monomial:
    """``g_11 ** alpha``."""

    alpha: int
    d: int

    def __post_init__(self):
        if self.alpha < 0 or self.d < 1:
            raise ValueError("need alpha >= 0 and d >= 1")

    @property
    def degree(self) -> int:
        return self.alpha


@dataclass(frozen=True)
class UnivariatePoly:
    """``sum_k coeffs[k] * g_11 ** k``."""

    coeffs: tuple
    d: int

    def __post_init__(self):
        c = tuple(complex(x) for x in self.coeffs)
        if not c or not all(np.isfinite(x) for x in c):
            raise ValueError("coeffs must be a nonempty list of finite numbers")
        if self.d < 1:
            raise ValueError("d must be at least 1")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        nz = [k for k, c in enumerate(self.coeffs) if c != 0]
        return nz[-1] if nz else 0


@dataclass(frozen=True)
class NormalizedTrace:
    d: int

    @property
    def degree(self) -> int:
        return 1


@dataclass(frozen=True)
class Determinant:
    d: int

    @property
    def degree(self) -> int:
        return self.d


@dataclass(frozen=True)
class IrrepEntry:
    """Entry ``(i, j)`` of the U(2) irrep ``label``."""

    label: IrrepLabel
    i: int
    j: int
    d: int = 2

    def __post_init__(self):
        if self.d != 2:
            raise ValueError("irrep entries are only supported on U(2)")
        if not (0 <= self.i < self.label.dim and 0 <= self.j < self.label.dim):
            raise ValueError(f"indices ({self.i}, {self.j}) out of range for {self.label}")
        if self.label.degree > IRREP_MAX_DEGREE:
            raise ValueError(f"irrep entries need m + mbar <= {IRREP_MAX_DEGREE}")

    @property
    def degree(self) -> int:
        return self.label.degree


FunctionSpec = Union[Monomial, UnivariatePoly, NormalizedTrace, Determinant, IrrepEntry]


def describe(spec: FunctionSpec) -> str:
    if isinstance(spec, Monomial):
        return f"monomial(alpha={spec.alpha},d={spec.d})"
    if isinstance(spec, UnivariatePoly):
        cs = ",".join(f"{c.real:g}{c.imag:+g}i" for c in spec.coeffs)
        return f"poly(coeffs=[{cs}],d={spec.d})"
    if isinstance(spec, NormalizedTrace):
        return f"trace(d={spec.d})"
    if isinstance(spec, Determinant):
        return f"det(d={spec.d})"
    lab = spec.label
    return f"irrep(label=({lab.lambda1},{lab.lambda2}),i={spec.i},j={spec.j},d=2)"


def evaluate(spec: FunctionSpec, g) -> complex:
    g = require_unitary(g, spec.d)
    return complex(evaluate_batch(spec, g[None])[0])


def evaluate_batch(spec: FunctionSpec, gs: np.ndarray) -> np.ndarray:
    """Exact values of ``spec`` on a stack of unitaries ``(n, d, d)``; no unitarity check."""
    gs = np.asarray(gs, dtype=complex)
    g11 = gs[:, 0, 0]
    if isinstance(spec, Monomial):
        return g11**spec.alpha
    if isinstance(spec, UnivariatePoly):
        return np.polynomial.polynomial.polyval(g11, np.array(spec.coeffs))
    if isinstance(spec, NormalizedTrace):
        return np.trace(gs, axis1=1, axis2=2) / spec.d
    if isinstance(spec, Determinant):
        return np.linalg.det(gs)
    if isinstance(spec, IrrepEntry):
        return irrep_entries_batch(spec.label, gs)[:, spec.i, spec.j]
    raise TypeError(f"unknown function family {spec!r}")


def l2_norm_sq(spec: FunctionSpec) -> float:
    """Exact squared L2 norm under the Haar measure."""
    from .haar import moment_G

    if isinstance(spec, Monomial):
        return moment_G(spec.alpha, spec.d)
    if isinstance(spec, UnivariatePoly):
        return sum(abs(c) ** 2 * moment_G(k, spec.d) for k, c in enumerate(spec.coeffs))
    if isinstance(spec, NormalizedTrace):
        return 1.0 / spec.d**2
    if isinstance(spec, Determinant):
        return 1.0
    if isinstance(spec, IrrepEntry):
        return 1.0 / spec.label.dim
    raise TypeError(f"unknown function family {spec!r}")


@dataclass(frozen=True)
class AForm:
    """Coefficient matrix with ``Tr[a D_m(g)] = f(g)``."""

    a: np.ndarray
    m: int
    d: int
    dim_e: int
    claimed_trace_norm: float


def _place_monomials(terms, m: int, d: int) -> np.ndarray:
    """Coefficient matrix for ``sum coeff * g^alpha conj(g)^alpha_bar``."""
    a = np.zeros((useful_dim(m, d),) * 2, dtype=complex)
    for coeff, alpha, alpha_bar in terms:
        r, c = monomial_entry(alpha, alpha_bar, m, d)
        # Tr[A D] picks D[r, c] through A[c, r]
        a[c, r] += coeff
    return a


def _g11_power(k: int, d: int) -> np.ndarray:
    alpha = np.zeros((d, d), dtype=int)
    alpha[0, 0] = k
    return alpha


def _zero_form(d: int) -> AForm:
    return AForm(a=np.zeros((1, 1), dtype=complex), m=0, d=d, dim_e=1, claimed_trace_norm=0.0)


def _poly_form(coeffs, d: int) -> AForm:
    nz = [k for k, c in enumerate(coeffs) if c != 0]
    if not nz:
        return _zero_form(d)
    m = nz[-1]
    zero = np.zeros((d, d), dtype=int)
    a = _place_monomials([(coeffs[k], _g11_power(k, d), zero) for k in nz], m, d)
    return AForm(a=a, m=m, d=d, dim_e=1, claimed_trace_norm=float(sum(abs(coeffs[k]) for k in nz)))


def antisymmetric_vector(d: int) -> np.ndarray:
    """Normalised fully antisymmetric vector in ``(C^d)^(x)d``."""
    v = np.zeros(d**d, dtype=complex)
    for perm in permutations(range(d)):
        idx = 0
        for p in perm:
            idx = idx * d + p
        inversions = sum(1 for x in range(d) for y in range(x + 1, d) if perm[x] > perm[y])
        v[idx] = -1.0 if inversions % 2 else 1.0
    return v / np.sqrt(factorial(d))


def _determinant_form(d: int) -> AForm:
    m = d
    a = np.zeros((useful_dim(m, d),) * 2, dtype=complex)
    blk = block_layout(m, d)[m * (m + 1)]
    psi = antisymmetric_vector(d)
    a[blk.offset:blk.offset + blk.size, blk.offset:blk.offset + blk.size] = np.outer(psi, psi.conj())
    return AForm(a=a, m=m, d=d, dim_e=1, claimed_trace_norm=1.0)


def _schmidt_l1(vec: np.ndarray, dim_v: int, dim_w: int) -> float:
    return float(np.sum(np.linalg.svd(vec.reshape(dim_v, dim_w), compute_uv=False)))


def _irrep_form(spec: IrrepEntry) -> AForm:
    m0, mbar0 = spec.label.ambient()
    t = solve_intertwiner(spec.label, m0, mbar0, RngStream(INTERTWINER_SEED)).map
    left, right = t[:, spec.j], t[:, spec.i]
    # entry (i, j) = Tr[|T e_j><T e_i| g^(x)m0 (x) conj(g)^(x)mbar0]
    a_rho = np.outer(left, right.conj())
    dim_v, dim_w = 2**m0, 2**mbar0
    # conj(g)^(x)k = (g*^(x)k)^T, so transpose the conjugate factor across
    a_blk = partial_transpose(a_rho, dim_v, dim_w, which="second")
    m = max(m0, mbar0)
    a = np.zeros((useful_dim(m, 2),) * 2, dtype=complex)
    blk = block_layout(m, 2)[m0 * (m + 1) + mbar0]
    a[blk.offset:blk.offset + blk.size, blk.offset:blk.offset + blk.size] = a_blk
    # partial transpose of |u><v| has singular values s_k(u) t_l(v)
    claimed = _schmidt_l1(left, dim_v, dim_w) * _schmidt_l1(right, dim_v, dim_w)
    return AForm(a=a, m=m, d=2, dim_e=1, claimed_trace_norm=claimed)


@lru_cache(maxsize=128)
def build_a(spec: FunctionSpec) -> AForm:
    if isinstance(spec, Monomial):
        coeffs = [0.0] * spec.alpha + [1.0]
        return _poly_form(coeffs, spec.d)
    if isinstance(spec, UnivariatePoly):
        return _poly_form(list(spec.coeffs), spec.d)
    if isinstance(spec, NormalizedTrace):
        d = spec.d
        a = np.zeros((useful_dim(1, d),) * 2, dtype=complex)
        blk = block_layout(1, d)[2]  # block (1, 0)
        a[blk.offset:blk.offset + d, blk.offset:blk.offset + d] = np.eye(d) / d
        return AForm(a=a, m=1, d=d, dim_e=1, claimed_trace_norm=1.0)
    if isinstance(spec, Determinant):
        return _determinant_form(spec.d)
    if isinstance(spec, IrrepEntry):
        return _irrep_form(spec)
    raise TypeError(f"unknown function family {spec!r}")


def truncated_a(spec: FunctionSpec, max_degree: int) -> AForm:
    """Coefficient matrix of the projection of ``spec`` onto degree ``<= max_degree``.

    Powers of ``g_11`` of different degree are mutually orthogonal, and the
    other families are homogeneous, so truncation drops whole terms.
    """
    if max_degree < 0:
        raise ValueError("max_degree must be nonnegative")
    if isinstance(spec, (Monomial, UnivariatePoly)):
        coeffs = [0.0] * spec.alpha + [1.0] if isinstance(spec, Monomial) else list(spec.coeffs)
        return _poly_form(coeffs[: max_degree + 1], spec.d)
    if spec.degree <= max_degree:
        return build_a(spec)
    return _zero_form(spec.d)


def q_bound(spec: FunctionSpec, epsilon: float, delta: float) -> int:
    """Total controlled-g queries the PAC estimator spends on ``spec``."""
    from .estimator import pac_shots

    form = build_a(spec)
    return pac_shots(epsilon, delta, float(np.sum(compact_svd(form.a).singulars))) * 2 * form.m


def rep_bound(spec: FunctionSpec, epsilon: float) -> int:
    from .fourier import RepQuery, rep_epsilon

    return rep_epsilon(RepQuery(spec, epsilon))
