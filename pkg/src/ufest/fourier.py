"""Polynomial subspaces of L2(U(d)), projection residuals and Rep_epsilon.

Degree-``<= m`` polynomials are spanned by the monomials
``g^alpha conj(g)^alpha_bar`` with ``|alpha| + |alpha_bar| <= m``. The
projection residual ``||f - Q_m f||^2`` is estimated by least squares
against that (non-orthogonal, partly dependent) monomial set on Haar
samples, with a closed-form fast path for the built-in families.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement
from math import comb

import numpy as np

from .errors import IllConditionedError, IndeterminateError
from .functions import (
    Determinant,
    IrrepEntry,
    Monomial,
    NormalizedTrace,
    UnivariatePoly,
    evaluate_batch,
    l2_norm_sq,
)
from .haar import McEstimate, RngStream, moment_G, sample_haar_batch, summarize
from .irreps import IrrepLabel, irrep_entries_batch

MONOMIAL_CAP = 5_000
GRAM_CONDITION_CAP = 1e8
GRAM_RANK_RTOL = 1e-10
GRAM_CHUNK = 4_000
INDETERMINATE_SIGMAS = 3.0


@dataclass(frozen=True)
class ExponentPair:
    """Exponents of ``g`` and ``conj(g)``, each a ``d x d`` grid (row-major tuples)."""

    alpha: tuple
    alpha_bar: tuple

    @property
    def degree(self) -> int:
        return sum(self.alpha) + sum(self.alpha_bar)

    def grids(self, d: int) -> tuple[np.ndarray, np.ndarray]:
        return np.array(self.alpha).reshape(d, d), np.array(self.alpha_bar).reshape(d, d)


def monomial_count(d: int, m: int) -> int:
    return comb(2 * d * d + m, m)


def enumerate_monomials(d: int, m: int, *, holomorphic_only: bool = False,
                        exact_degree: bool = False) -> list[ExponentPair]:
    """All exponent pairs of total degree ``<= m``.

    Ordered by total degree; within a degree, descending lexicographic order
    of the concatenated ``(alpha, alpha_bar)`` exponents, so ``g`` factors
    precede ``conj(g)`` factors.
    """
    if d < 0 or m < 0:
        raise ValueError("d and m must be nonnegative")
    if monomial_count(d, m) > MONOMIAL_CAP:
        raise ValueError(f"{monomial_count(d, m)} monomials exceed the cap {MONOMIAL_CAP}")
    nvar = d * d if holomorphic_only else 2 * d * d
    out = []
    for deg in range(m + 1):
        if exact_degree and deg != m:
            continue
        level = []
        for combo in combinations_with_replacement(range(nvar), deg):
            exps = [0] * nvar
            for v in combo:
                exps[v] += 1
            level.append(tuple(exps))
        level.sort(reverse=True)
        for exps in level:
            if holomorphic_only:
                out.append(ExponentPair(exps, (0,) * (d * d)))
            else:
                out.append(ExponentPair(exps[: d * d], exps[d * d:]))
    return out


def monomial_values(pairs: list[ExponentPair], gs: np.ndarray) -> np.ndarray:
    """Matrix ``(n_samples, n_monomials)`` of monomial values."""
    n, d, _ = gs.shape
    flat = gs.reshape(n, d * d)
    flat_bar = flat.conj()
    top = max((max(p.alpha + p.alpha_bar) for p in pairs), default=0)
    pw = [np.ones_like(flat)]
    pwb = [np.ones_like(flat)]
    for _ in range(top):
        pw.append(pw[-1] * flat)
        pwb.append(pwb[-1] * flat_bar)
    out = np.ones((n, len(pairs)), dtype=complex)
    for k, p in enumerate(pairs):
        col = out[:, k]
        for v, e in enumerate(p.alpha):
            if e:
                col *= pw[e][:, v]
        for v, e in enumerate(p.alpha_bar):
            if e:
                col *= pwb[e][:, v]
    return out


def _closed_form_complement(spec, m: int) -> float | None:
    if isinstance(spec, Monomial):
        return moment_G(spec.alpha, spec.d) if m < spec.alpha else 0.0
    if isinstance(spec, UnivariatePoly):
        return sum(abs(c) ** 2 * moment_G(k, spec.d) for k, c in enumerate(spec.coeffs) if k > m)
    if isinstance(spec, (NormalizedTrace, Determinant, IrrepEntry)):
        return l2_norm_sq(spec) if m < spec.degree else 0.0
    return None


def _values(spec, gs: np.ndarray) -> np.ndarray:
    if callable(spec):
        return np.asarray(spec(gs), dtype=complex)
    return evaluate_batch(spec, gs)


def complement_norm_sq(spec, m: int, n: int, rng: RngStream, *, d: int | None = None,
                       closed_form: bool = False) -> McEstimate:
    """Estimate ``||f||^2 - ||Q_m f||^2`` for ``f = spec``.

    ``spec`` is a function family or a vectorised callable on ``(k, d, d)``
    stacks (``d`` then required). Least-squares coefficients come from the
    Monte-Carlo Gram matrix via a pseudo-inverse; the residual ``|f - Q f|^2``
    is averaged over the same samples.
    """
    if closed_form:
        value = _closed_form_complement(spec, m)
        if value is None:
            raise ValueError("no closed form for this function")
        return McEstimate(mean=complex(value), stderr=0.0, samples=n)
    d = spec.d if d is None else d
    pairs = enumerate_monomials(d, m)
    gs = sample_haar_batch(d, n, rng)
    k = len(pairs)
    gram = np.zeros((k, k), dtype=complex)
    rhs = np.zeros(k, dtype=complex)
    for start in range(0, n, GRAM_CHUNK):
        chunk = gs[start:start + GRAM_CHUNK]
        mv = monomial_values(pairs, chunk)
        gram += mv.conj().T @ mv
        rhs += mv.conj().T @ _values(spec, chunk)
    gram /= n
    rhs /= n
    evals, evecs = np.linalg.eigh(gram)
    top = evals[-1]
    keep = evals > GRAM_RANK_RTOL * top
    cond = top / evals[keep].min()
    if cond > GRAM_CONDITION_CAP:
        raise IllConditionedError(f"Gram condition number {cond:.3g} exceeds {GRAM_CONDITION_CAP:g}")
    coef = evecs[:, keep] @ ((evecs[:, keep].conj().T @ rhs) / evals[keep])
    resid = np.empty(n)
    for start in range(0, n, GRAM_CHUNK):
        chunk = gs[start:start + GRAM_CHUNK]
        r = _values(spec, chunk) - monomial_values(pairs, chunk) @ coef
        resid[start:start + chunk.shape[0]] = np.abs(r) ** 2
    est = summarize(resid)
    return McEstimate(mean=complex(est.mean.real), stderr=est.stderr, samples=n)


def gram_rank(pairs: list[ExponentPair], d: int, n: int, rng: RngStream) -> int:
    """Numerical rank of the Monte-Carlo Gram matrix of ``pairs``."""
    mv = monomial_values(pairs, sample_haar_batch(d, n, rng))
    evals = np.linalg.eigvalsh(mv.conj().T @ mv / n)
    return int(np.count_nonzero(evals > 1e-9 * evals[-1]))


@dataclass(frozen=True)
class RepQuery:
    spec: object
    epsilon: float
    numeric: bool = False
    samples: int = 100_000
    seed: int = 0
    max_m: int = 2

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")


def _rep_closed(spec, eps: float) -> int | None:
    if isinstance(spec, NormalizedTrace):
        return 0
    if isinstance(spec, Monomial):
        return (spec.alpha - 1) // 2 if eps < moment_G(spec.alpha, spec.d) and spec.alpha > 0 else 0
    if isinstance(spec, Determinant):
        return (spec.d - 1) // 2 if eps < 1.0 else 0
    if isinstance(spec, IrrepEntry):
        return (spec.label.degree - 1) // 2 if eps < 1.0 / spec.label.dim else 0
    if isinstance(spec, UnivariatePoly):
        best = 0
        for m in range(len(spec.coeffs) + 1):
            tail = sum(abs(c) ** 2 * moment_G(k, spec.d) for k, c in enumerate(spec.coeffs) if k > 2 * m)
            if tail >= eps:
                best = m
        return best
    return None


def rep_epsilon(query: RepQuery) -> int:
    """Largest ``m`` with ``||Q_{<=2m}^perp f||^2 >= epsilon``; 0 when no ``m`` qualifies.

    Numeric mode scans ``m = 0 .. max_m`` with Monte-Carlo residuals and
    raises :class:`IndeterminateError` when a residual is within three
    standard errors of ``epsilon``.
    """
    if not query.numeric:
        value = _rep_closed(query.spec, query.epsilon)
        if value is not None:
            return value
    rng = RngStream(query.seed)
    best = 0
    for m in range(query.max_m + 1):
        est = complement_norm_sq(query.spec, 2 * m, query.samples, rng.spawn(m))
        gap = est.mean.real - query.epsilon
        if abs(gap) <= INDETERMINATE_SIGMAS * est.stderr:
            raise IndeterminateError(
                f"residual at degree {2 * m} is {est.mean.real:.4g} +- {est.stderr:.2g}, "
                f"too close to epsilon={query.epsilon}",
                estimate=est, threshold=query.epsilon,
            )
        if gap > 0:
            best = m
        else:
            break
    return best


def low_degree_witness(cond_expectation, m: int, probe: IrrepLabel, n: int, rng: RngStream,
                       entry: tuple[int, int] = (0, 0)) -> McEstimate:
    """Monte-Carlo ``<pi_probe(g)_{ij}, h>`` for ``h = cond_expectation``.

    Requires the probe irrep to have degree above ``2m``; an ``m``-query
    plan's conditional expectation then has zero overlap with it.
    """
    if probe.degree <= 2 * m:
        raise ValueError(f"probe {probe} has degree {probe.degree} <= 2m = {2 * m}")
    i, j = entry
    gs = sample_haar_batch(2, n, rng)
    probe_vals = irrep_entries_batch(probe, gs)[:, i, j]
    h = np.array([cond_expectation(g) for g in gs], dtype=complex)
    return summarize(probe_vals.conj() * h)
