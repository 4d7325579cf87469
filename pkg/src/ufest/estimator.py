"""Unbiased estimation of ``Tr[A D_m(g)]`` from generalized Hadamard tests.

One shot picks coordinate ``i`` with probability ``sigma_i / ||A||_1``,
runs the test on ``phi = W(V* e_i (+) 0)`` and ``psi = W(U e_i (+) 0)``
with a uniformly random bit ``b``, maps the outcome ``(M, b)`` through
:data:`FHAT` and multiplies by ``||A||_1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import GHadamardInstance, simulate_ghadamard
from .embed import build_embedding, useful_dim
from .errors import BudgetCapError
from .haar import McEstimate, RngStream, mc_integrate
from .linalg import SvdFactors, as_matrix, compact_svd, require_unitary

FHAT = {
    (0, 0): 4 - (1 + 1j),
    (0, 1): 4j - (1 + 1j),
    (1, 0): -(1 + 1j),
    (1, 1): -(1 + 1j),
}
# indexed [M, b]
_FHAT_TABLE = np.array([[FHAT[0, 0], FHAT[0, 1]], [FHAT[1, 0], FHAT[1, 1]]])
SHOT_MODULUS = math.sqrt(10.0)
SHOT_CAP = 10**7


@dataclass(frozen=True)
class EstimationPlan:
    a: np.ndarray
    svd: SvdFactors
    m: int
    d: int
    dim_e: int
    probs: np.ndarray
    trace_norm: float

    @property
    def queries_per_shot(self) -> int:
        return 2 * self.m

    @property
    def is_trivial(self) -> bool:
        return self.probs.size == 0


@dataclass(frozen=True)
class ShotOutcome:
    coordinate: int | None
    b: int | None
    measurement: int | None
    value: complex
    queries: int


@dataclass(frozen=True)
class PacResult:
    estimate: complex
    shots: int
    total_queries: int
    epsilon: float
    delta: float


def build_plan(a, m: int, dim_e: int = 1, *, d: int) -> EstimationPlan:
    a = as_matrix(a)
    n = useful_dim(m, d, dim_e)
    if a.shape != (n, n):
        if not a.any():
            a = np.zeros((n, n), dtype=complex)
        else:
            raise ValueError(f"A must be {n}x{n} for m={m}, d={d}, dim_e={dim_e}; got {a.shape}")
    f = compact_svd(a)
    tn = float(np.sum(f.singulars))
    probs = f.singulars / tn if tn > 0 else np.zeros(0)
    return EstimationPlan(a=a, svd=f, m=m, d=d, dim_e=dim_e, probs=probs, trace_norm=tn)


def plan_for(form) -> EstimationPlan:
    """Plan for an :class:`ufest.functions.AForm`."""
    return build_plan(form.a, form.m, form.dim_e, d=form.d)


def _instance(m, d, dim_e, phi_t, psi_t, b) -> GHadamardInstance:
    emb = build_embedding(m, d, dim_e)
    return GHadamardInstance(m=m, d=d, dim_e=dim_e, phi=emb.embed(phi_t), psi=emb.embed(psi_t), b=b)


def est_inner(phi_t, psi_t, m: int, dim_e: int, g, rng: RngStream) -> ShotOutcome:
    """One shot of the inner-product estimator; costs ``2m`` controlled-g queries."""
    g = require_unitary(g)
    d = g.shape[0]
    gen = rng.generator
    b = int(gen.integers(2))
    out = simulate_ghadamard(_instance(m, d, dim_e, phi_t, psi_t, b), g)
    measurement = 0 if gen.random() < out.p0 else 1
    return ShotOutcome(None, b, measurement, complex(FHAT[measurement, b]), out.queries)


def exact_inner_expectation(phi_t, psi_t, m: int, dim_e: int, g) -> complex:
    """Exact mean of :func:`est_inner` over ``b`` and the measurement."""
    g = require_unitary(g)
    d = g.shape[0]
    total = 0j
    for b in (0, 1):
        p0 = simulate_ghadamard(_instance(m, d, dim_e, phi_t, psi_t, b), g).p0
        total += p0 * FHAT[0, b] + (1 - p0) * FHAT[1, b]
    return total / 2


def _coordinate_vectors(plan: EstimationPlan, i: int):
    return plan.svd.right[i].conj(), plan.svd.left[:, i]


def _sample_coordinates(plan: EstimationPlan, u: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(plan.probs)
    return np.minimum(np.searchsorted(cdf, u, side="right"), plan.probs.size - 1)


def shot(plan: EstimationPlan, g, rng: RngStream) -> ShotOutcome:
    if plan.is_trivial:
        return ShotOutcome(None, None, None, 0j, 0)
    i = int(_sample_coordinates(plan, np.array([rng.generator.random()]))[0])
    phi_t, psi_t = _coordinate_vectors(plan, i)
    out = est_inner(phi_t, psi_t, plan.m, plan.dim_e, g, rng)
    return ShotOutcome(i, out.b, out.measurement, plan.trace_norm * out.value, out.queries)


def coordinate_p0(plan: EstimationPlan, g) -> tuple[np.ndarray, int]:
    """Exact ``P(M=0 | i, b)`` for every coordinate, shape ``(rank, 2)``.

    Also returns the number of g-dependent gates the simulations applied.
    """
    g = require_unitary(g, plan.d)
    p0 = np.empty((plan.probs.size, 2))
    queries = 0
    for i in range(plan.probs.size):
        phi_t, psi_t = _coordinate_vectors(plan, i)
        for b in (0, 1):
            out = simulate_ghadamard(_instance(plan.m, plan.d, plan.dim_e, phi_t, psi_t, b), g)
            p0[i, b] = out.p0
            queries += out.queries
    return p0, queries


def conditional_expectation(plan: EstimationPlan, g) -> complex:
    """Exact mean shot value at ``g``, summed over ``(i, b, M)``."""
    if plan.is_trivial:
        return 0j
    p0, _ = coordinate_p0(plan, g)
    per_b = p0 * _FHAT_TABLE[0][None, :] + (1 - p0) * _FHAT_TABLE[1][None, :]
    return complex(plan.trace_norm * np.sum(plan.probs * per_b.mean(axis=1)))


def pac_shots(epsilon: float, delta: float, trace_norm: float) -> int:
    """Shots making the complex sample mean ``(epsilon, delta)``-accurate.

    Hoeffding on real and imaginary parts separately with
    ``C0 = sqrt(10) ||A||_1``, the largest possible shot modulus.
    """
    if not 0 < epsilon < 1 or not 0 < delta < 1:
        raise ValueError("epsilon and delta must lie in (0, 1)")
    c0 = SHOT_MODULUS * trace_norm
    return math.ceil(8 * c0**2 * math.log(4 / delta) / epsilon**2)


def estimate_pac(plan: EstimationPlan, g, epsilon: float, delta: float, rng: RngStream,
                 shot_cap: int = SHOT_CAP) -> PacResult:
    """Average of ``pac_shots`` independent shots at ``g``.

    Randomness is consumed as: all coordinate uniforms, then all bits ``b``,
    then all measurement uniforms. Shots are drawn in one vectorised pass
    from the exact per-coordinate outcome probabilities.
    """
    n = pac_shots(epsilon, delta, plan.trace_norm)
    if n > shot_cap:
        raise BudgetCapError(f"{n} shots exceed the cap of {shot_cap}")
    if plan.is_trivial or n == 0:
        return PacResult(0j, 0, 0, epsilon, delta)
    p0, _ = coordinate_p0(plan, g)
    gen = rng.generator
    coords = _sample_coordinates(plan, gen.random(n))
    bits = gen.integers(0, 2, n)
    outcomes = (gen.random(n) >= p0[coords, bits]).astype(int)
    values = plan.trace_norm * _FHAT_TABLE[outcomes, bits]
    return PacResult(complex(values.mean()), n, n * plan.queries_per_shot, epsilon, delta)


def bias_g_average(plan: EstimationPlan, reference, n: int, rng: RngStream) -> McEstimate:
    """Haar average of ``|E[shot | g] - f(g)|^2``."""
    from .functions import evaluate_batch

    def sq_dev(g):
        return abs(conditional_expectation(plan, g) - evaluate_batch(reference, g[None])[0]) ** 2

    return mc_integrate(sq_dev, plan.d, n, rng)
