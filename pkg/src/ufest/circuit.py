"""Exact statevector simulation of the generalized Hadamard test.

Register order: control qubit, then ``A_1 B_1 ... A_m B_m``, then
``C_1 D_1 ... C_m D_m``, then ``E``. ``A_n, C_n`` are qubits and
``B_n, D_n`` qudits of dimension ``d``. The initial state of ABCDE is the
all-zero basis state.

Gate sequence: H on control; U_phi controlled on control=1; the m
doubly-controlled gates ``C_n(g)`` applying ``g`` to ``B_n`` when control
and ``A_n`` are both 1; X on control; U_psi controlled on control=1; the m
gates ``C'_n(g)`` on ``(control, C_n, D_n)``; ``S^-b``; H. Each
``C_n``/``C'_n`` counts as one controlled-g query.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embed import circuit_dim
from .errors import DimensionCapError
from .linalg import DIMENSION_CAP, UNITARY_TOL, direct_sum, require_unitary

NORM_DRIFT_TOL = 1e-11


@dataclass(frozen=True)
class RegisterLayout:
    m: int
    d: int
    dim_e: int

    @property
    def shape(self) -> tuple[int, ...]:
        return (2,) + (2, self.d) * (2 * self.m) + (self.dim_e,)

    @property
    def total_dim(self) -> int:
        return 2 * circuit_dim(self.m, self.d, self.dim_e)

    def a_axis(self, n: int) -> int:
        return 1 + 2 * n

    def c_axis(self, n: int) -> int:
        return 1 + 2 * self.m + 2 * n


@dataclass(frozen=True)
class GHadamardInstance:
    m: int
    d: int
    dim_e: int
    phi: np.ndarray
    psi: np.ndarray
    b: int

    def __post_init__(self):
        if self.m < 0 or self.d < 1 or self.dim_e < 1:
            raise ValueError("need m >= 0, d >= 1, dim_e >= 1")
        if self.b not in (0, 1):
            raise ValueError("b must be 0 or 1")
        n = circuit_dim(self.m, self.d, self.dim_e)
        for name in ("phi", "psi"):
            v = np.asarray(getattr(self, name), dtype=complex).ravel()
            if v.size != n:
                raise ValueError(f"{name} must have length {n}, got {v.size}")
            if abs(np.linalg.norm(v) - 1) > 1e-10:
                raise ValueError(f"{name} must be a unit vector")
            object.__setattr__(self, name, v)

    @property
    def layout(self) -> RegisterLayout:
        return RegisterLayout(self.m, self.d, self.dim_e)


@dataclass(frozen=True)
class OutcomeDistribution:
    p0: float
    p1: float
    queries: int = 0
    norm_drift: float = 0.0


def query_count(inst: GHadamardInstance) -> int:
    return 2 * inst.m


def state_prep_apply(target: np.ndarray, vec: np.ndarray) -> np.ndarray:
    """Apply a fixed unitary sending ``e_0`` to ``target`` to ``vec``.

    The unitary is ``e^{i theta}`` times the Householder reflection mapping
    ``e_0`` to ``e^{-i theta} target``, where ``theta = arg(target[0])``.
    """
    t0 = target[0]
    phase = t0 / abs(t0) if abs(t0) > 0 else 1.0
    t = target / phase
    v = -t.copy()
    v[0] += 1.0
    vv = np.vdot(v, v).real
    if vv < 1e-30:
        return phase * vec
    return phase * (vec - v * (2 * np.vdot(v, vec) / vv))


class _Simulator:
    def __init__(self, inst: GHadamardInstance, g: np.ndarray):
        self.inst = inst
        self.g = g
        self.layout = inst.layout
        self.state = np.zeros(self.layout.shape, dtype=complex)
        self.state[(0,) * len(self.layout.shape)] = 1.0
        self.queries = 0
        self.drift = 0.0

    def _check_norm(self):
        self.drift = max(self.drift, abs(np.linalg.norm(self.state) - 1.0))

    def single_control(self, u: np.ndarray):
        self.state = np.tensordot(u, self.state, axes=([1], [0]))
        self._check_norm()

    def controlled_prep(self, target: np.ndarray):
        branch = self.state[1].reshape(-1)
        self.state[1] = state_prep_apply(target, branch).reshape(self.state.shape[1:])
        self._check_norm()

    def controlled_controlled_g(self, bit_axis: int):
        # control=1 and the bit register=1: apply g to the qudit after it
        idx = [slice(None)] * self.state.ndim
        idx[0] = 1
        idx[bit_axis] = 1
        sub = self.state[tuple(idx)]
        qudit_axis = bit_axis - 1  # axes 0 and bit_axis were removed
        sub = np.moveaxis(np.tensordot(self.g, sub, axes=([1], [qudit_axis])), 0, qudit_axis)
        self.state[tuple(idx)] = sub
        self.queries += 1
        self._check_norm()

    def run(self) -> OutcomeDistribution:
        inst, lay = self.inst, self.layout
        h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
        x = np.array([[0, 1], [1, 0]], dtype=complex)
        s_inv_b = np.diag([1.0, (-1j) ** inst.b])
        self.single_control(h)
        self.controlled_prep(inst.phi)
        for n in range(inst.m):
            self.controlled_controlled_g(lay.a_axis(n))
        self.single_control(x)
        self.controlled_prep(inst.psi)
        for n in range(inst.m):
            self.controlled_controlled_g(lay.c_axis(n))
        self.single_control(s_inv_b)
        self.single_control(h)
        p0 = float(np.vdot(self.state[0], self.state[0]).real)
        p1 = float(np.vdot(self.state[1], self.state[1]).real)
        return OutcomeDistribution(p0=p0, p1=p1, queries=self.queries, norm_drift=self.drift)


def simulate_ghadamard(inst: GHadamardInstance, g, cap: int | None = None) -> OutcomeDistribution:
    g = require_unitary(g, inst.d, UNITARY_TOL)
    cap = DIMENSION_CAP if cap is None else cap
    if inst.layout.total_dim > cap:
        raise DimensionCapError(f"circuit dimension {inst.layout.total_dim} exceeds cap {cap}")
    return _Simulator(inst, g).run()


def circuit_inner_product(phi, psi, g, m: int, d: int, dim_e: int = 1) -> complex:
    """``<phi| (I+g*)^(x)m_AB (x) (I+g)^(x)m_CD (x) I_E |psi>`` by dense products."""
    g = np.asarray(g, dtype=complex)
    eye = np.eye(d)
    ab = np.ones((1, 1), dtype=complex)
    cd = np.ones((1, 1), dtype=complex)
    for _ in range(m):
        ab = np.kron(ab, direct_sum(eye, g.conj().T))
        cd = np.kron(cd, direct_sum(eye, g))
    pair = (2 * d) ** m
    psi_t = np.asarray(psi, dtype=complex).reshape(pair, pair, dim_e)
    out = np.einsum("ij,kl,jle->ike", ab, cd, psi_t)
    return complex(np.vdot(np.asarray(phi, dtype=complex).ravel(), out.ravel()))


def p_zero_formula(inst: GHadamardInstance, g) -> float:
    g = require_unitary(g, inst.d, UNITARY_TOL)
    z = circuit_inner_product(inst.phi, inst.psi, g, inst.m, inst.d, inst.dim_e)
    return (1 + (z.real if inst.b == 0 else z.imag)) / 2
