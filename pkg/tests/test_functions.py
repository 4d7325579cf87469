import numpy as np
import pytest

from conftest import haar_list
from ufest.embed import direct_sum_operator
from ufest.errors import NotUnitaryError
from ufest.fourier import enumerate_monomials, monomial_values
from ufest.functions import (
    Determinant,
    IrrepEntry,
    Monomial,
    NormalizedTrace,
    UnivariatePoly,
    antisymmetric_vector,
    build_a,
    describe,
    evaluate,
    l2_norm_sq,
    q_bound,
    rep_bound,
    truncated_a,
)
from ufest.irreps import IrrepLabel, irrep_u2
from ufest.linalg import trace_norm

SPECS = [
    Monomial(0, 2), Monomial(1, 2), Monomial(2, 3), Monomial(3, 2),
    UnivariatePoly((1, 0, 2j, -1), 2), UnivariatePoly((0.5, 1), 3),
    NormalizedTrace(2), NormalizedTrace(3),
    Determinant(1), Determinant(2), Determinant(3),
    IrrepEntry(IrrepLabel(2, 0), 0, 0), IrrepEntry(IrrepLabel(2, 0), 1, 2),
    IrrepEntry(IrrepLabel(1, -1), 1, 1), IrrepEntry(IrrepLabel(1, -1), 0, 1),
    IrrepEntry(IrrepLabel(1, 1), 0, 0), IrrepEntry(IrrepLabel(0, -2), 0, 0),
]


def test_eval_examples():
    assert evaluate(NormalizedTrace(3), np.eye(3)) == pytest.approx(1)
    assert evaluate(Determinant(2), np.diag([1j, 1])) == pytest.approx(1j)
    a, b = np.exp(0.4j), np.exp(2.0j)
    assert evaluate(IrrepEntry(IrrepLabel(2, 0), 0, 0), np.diag([a, b])) == pytest.approx(a * a)
    with pytest.raises(NotUnitaryError):
        evaluate(Monomial(1, 2), np.ones((2, 2)))


def test_spec_validation():
    with pytest.raises(ValueError):
        Monomial(-1, 2)
    with pytest.raises(ValueError):
        UnivariatePoly((), 2)
    with pytest.raises(ValueError):
        UnivariatePoly((np.inf,), 2)
    with pytest.raises(ValueError):
        IrrepEntry(IrrepLabel(2, 0), 3, 0)
    with pytest.raises(ValueError):
        IrrepEntry(IrrepLabel(5, 0), 0, 0)
    with pytest.raises(ValueError):
        IrrepEntry(IrrepLabel(1, 0), 0, 0, d=3)


@pytest.mark.parametrize("spec", SPECS, ids=describe)
def test_aform_identity(spec):
    form = build_a(spec)
    for g in haar_list(spec.d, 20, seed=form.m):
        value = np.trace(form.a @ direct_sum_operator(g, form.m, form.dim_e))
        assert abs(value - evaluate(spec, g)) < 1e-9
    assert trace_norm(form.a) == pytest.approx(form.claimed_trace_norm, abs=1e-9)


def test_trace_norms():
    assert build_a(Monomial(2, 2)).claimed_trace_norm == 1
    assert build_a(Monomial(2, 2)).m == 2
    assert build_a(NormalizedTrace(3)).claimed_trace_norm == 1
    assert trace_norm(build_a(Determinant(3)).a) == pytest.approx(1)
    assert trace_norm(build_a(UnivariatePoly((1, -2, 0, 3j), 2)).a) == pytest.approx(6)
    assert trace_norm(build_a(IrrepEntry(IrrepLabel(2, 0), 1, 1)).a) == pytest.approx(1)


def test_degree_consistency():
    assert build_a(Monomial(3, 2)).m == 3
    assert build_a(NormalizedTrace(4)).m == 1
    assert build_a(Determinant(3)).m == 3
    for label in [IrrepLabel(2, 0), IrrepLabel(1, -1), IrrepLabel(0, -2), IrrepLabel(2, -2)]:
        m0, mbar0 = label.ambient()
        assert build_a(IrrepEntry(label, 0, 0)).m == max(m0, mbar0)


def test_irrep_entries_are_homogeneous_of_ambient_degree():
    # the entry lies in the span of monomials of degree m0 + mbar0 and not below
    rng_gs = np.array(haar_list(2, 400, seed=9))
    label = IrrepLabel(1, -1)
    f = np.array([irrep_u2(label, g)[0, 1] for g in rng_gs])
    for deg, expect_fit in [(1, False), (2, True)]:
        basis = monomial_values(enumerate_monomials(2, deg), rng_gs)
        coef, *_ = np.linalg.lstsq(basis, f, rcond=None)
        fits = np.linalg.norm(basis @ coef - f) < 1e-8
        assert fits == expect_fit


def test_antisymmetric_vector():
    for d in (2, 3):
        psi = antisymmetric_vector(d)
        assert np.linalg.norm(psi) == pytest.approx(1)
        for g in haar_list(d, 20, seed=d):
            gd = g
            for _ in range(d - 1):
                gd = np.kron(gd, g)
            assert abs(np.vdot(psi, gd @ psi) - np.linalg.det(g)) < 1e-10


def test_truncation():
    assert not truncated_a(Monomial(3, 2), 2).a.any()
    kept = truncated_a(UnivariatePoly((1, 0, 0, 1), 2), 0)
    assert kept.m == 0 and kept.a[0, 0] == 1
    assert truncated_a(NormalizedTrace(2), 1) is build_a(NormalizedTrace(2))
    with pytest.raises(ValueError):
        truncated_a(Monomial(1, 2), -1)


def test_l2_norms():
    assert l2_norm_sq(Monomial(3, 2)) == pytest.approx(0.25)
    assert l2_norm_sq(IrrepEntry(IrrepLabel(2, 0), 0, 0)) == pytest.approx(1 / 3)
    assert l2_norm_sq(NormalizedTrace(4)) == pytest.approx(1 / 16)


def test_q_bound_scaling():
    base = q_bound(NormalizedTrace(3), 0.1, 0.05)
    assert base == 2 * 35057
    assert q_bound(NormalizedTrace(3), 0.05, 0.05) == pytest.approx(4 * base, rel=1e-3)
    mono = [q_bound(Monomial(a, 2), 0.1, 0.05) for a in (1, 2, 3, 4)]
    assert mono == [a * base for a in (1, 2, 3, 4)]
    irrep = q_bound(IrrepEntry(IrrepLabel(2, 0), 0, 0), 0.1, 0.05)
    assert irrep == 2 * base


@pytest.mark.parametrize("d", [2, 3])
def test_upper_bound_dominates_rep(d):
    specs = [Monomial(3, d), UnivariatePoly((1, 1, 1, 1), d), NormalizedTrace(d), Determinant(d)]
    if d == 2:
        specs += [IrrepEntry(IrrepLabel(2, 0), 0, 0), IrrepEntry(IrrepLabel(1, -1), 0, 0)]
    for spec in specs:
        assert q_bound(spec, 0.1, 0.1) >= rep_bound(spec, 0.01)


def test_describe_is_stable():
    assert describe(Monomial(3, 2)) == "monomial(alpha=3,d=2)"
    assert describe(IrrepEntry(IrrepLabel(1, -1), 0, 1)) == "irrep(label=(1,-1),i=0,j=1,d=2)"
