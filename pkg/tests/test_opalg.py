import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from reflectode.errors import UnsupportedCaseError
from reflectode.exppoly import ExpPoly
from reflectode.opalg import (
    ReflectionOperator,
    apply_to_exppoly,
    compose,
    composed_coefficients,
    reduced_half_degree,
    reduction,
    refined_reduction,
    solution_basis,
)
from reflectode.poly import RationalPoly

D = ReflectionOperator.D()
PHI = ReflectionOperator.phi()

coeffs = st.lists(st.fractions(min_value=-4, max_value=4, max_denominator=5), min_size=0, max_size=6)
operators = st.builds(ReflectionOperator.from_coefficients, a=coeffs, b=coeffs)


def op(a=(), b=()):
    return ReflectionOperator.from_coefficients(a=a, b=b)


def span_rank(funcs):
    keys = sorted(set().union(*(f.keys() for f in funcs)), key=str)
    M = np.array([[f.coefficient(*k) for k in keys] for f in funcs])
    return np.linalg.matrix_rank(M, tol=1e-9 * np.abs(M).max())


# ---------------------------------------------------------------- compose


def test_compose_phi_d_squared():
    phiD = compose(PHI, D)
    assert compose(phiD, phiD) == op(a=[0, 0, -1])


def test_reduction_of_first_order():
    m = Fraction(3, 2)
    L = op(a=[0, 1], b=[m])
    L1 = reduction(L)
    assert L1 == op(a=[0, 1], b=[m])
    assert compose(L1, L) == op(a=[m * m, 0, 1])


def test_reduction_pure_reflection():
    P = RationalPoly([1, 2, 3])
    L = ReflectionOperator(P=P)
    L1 = reduction(L)
    assert L1 == L
    assert compose(L1, L) == ReflectionOperator(Q=P.reflect() * P)


@settings(max_examples=150, deadline=None)
@given(operators, operators, operators)
def test_compose_associative(L1, L2, L3):
    assert compose(compose(L1, L2), L3) == compose(L1, compose(L2, L3))


@settings(max_examples=300, deadline=None)
@given(operators)
def test_reduction_commutes_and_removes_reflection(L):
    L1 = reduction(L)
    left, right = compose(L1, L), compose(L, L1)
    assert left == right
    assert left.P.is_zero()
    assert composed_coefficients(L) == left.Q
    assert all(c == 0 for c in left.Q.coeffs[1::2])


@settings(max_examples=200, deadline=None)
@given(operators)
def test_refined_reduction_properties(L):
    assume(not L.is_zero())
    Lhat, R = refined_reduction(L)
    assert R.reflect() == R
    assert R.lead == 1
    left = compose(Lhat, L)
    assert left == compose(L, Lhat)
    assert left.P.is_zero()
    assert all(c == 0 for c in left.Q.coeffs[1::2])


def test_refined_reduction_odd_gcd_keeps_even_factor():
    # gcd(D, 0, -D, 0) = D is odd; the even part 1 is used instead
    L = op(b=[0, 1])
    Lhat, R = refined_reduction(L)
    assert R == RationalPoly([1])
    assert compose(Lhat, L) == compose(L, Lhat) == op(a=[0, 0, -1])
    L = compose(op(a=[-1, 0, 1]), op(a=[0, 1], b=[0, 2]))  # (D^2 - 1) D (1 + 2 phi*)
    _, R = refined_reduction(L)
    assert R == RationalPoly([-1, 0, 1])


def test_refined_reduction_coprime():
    L = op(a=[0, 1], b=[2])
    Lhat, R = refined_reduction(L)
    assert R == RationalPoly([1])
    assert Lhat == reduction(L)


def test_refined_reduction_extracts_common_factor():
    base = op(a=[0, 1], b=[3])
    factor = op(a=[-1, 0, 1])  # D^2 - 1, even so it commutes with phi*
    L = compose(factor, base)
    _, R = refined_reduction(L)
    assert R == RationalPoly([-1, 0, 1])


@pytest.mark.parametrize("an,bn", [(2, 1), (1, 3), (-1, 2)])
def test_leading_composed_coefficient(an, bn):
    L = op(a=[1, 2, an], b=[3, -1, bn])
    c = composed_coefficients(L)
    assert c.coeff(4) == (-1) ** 2 * (bn**2 - an**2)


def test_leading_coefficient_vanishes_when_an_equals_pm_bn():
    assert composed_coefficients(op(a=[1, 2], b=[3, 2])).coeff(2) == 0
    assert composed_coefficients(op(a=[1, 2], b=[3, -2])).coeff(2) == 0


def test_composed_coefficients_first_order():
    m = 5
    c = composed_coefficients(op(a=[0, 1], b=[m]))
    assert c == RationalPoly([m * m, 0, 1])


# ---------------------------------------------------------------- apply


def test_apply_examples():
    lam = 1.7
    assert apply_to_exppoly(D, ExpPoly.exp(lam)) == ExpPoly.exp(lam, coeff=lam)
    assert apply_to_exppoly(PHI, ExpPoly.exp(1.0, power=1)) == ExpPoly.exp(-1.0, power=1, coeff=-1.0)
    m = 2.5
    f = ExpPoly.cos(m) - ExpPoly.sin(m)
    assert apply_to_exppoly(op(a=[0, 1], b=[Fraction(5, 2)]), f).max_abs_coeff() < 1e-14


def random_exppoly(rng):
    terms = []
    for _ in range(3):
        kind = rng.choice(["plain", "cos", "sin"])
        freq = 0.0 if kind == "plain" else float(rng.uniform(0.5, 2))
        terms.append((float(rng.uniform(-1, 1)), int(rng.integers(0, 2)), float(rng.uniform(-1, 1)), freq, kind))
    return ExpPoly(terms)


@settings(max_examples=60, deadline=None)
@given(operators, operators, st.integers(0, 2**32 - 1))
def test_compose_matches_sequential_application(L1, L2, seed):
    f = random_exppoly(np.random.default_rng(seed))
    lhs = apply_to_exppoly(compose(L1, L2), f)
    rhs = apply_to_exppoly(L1, apply_to_exppoly(L2, f))
    diff = (lhs - rhs).max_abs_coeff()
    assert diff <= 1e-9 * (1 + lhs.max_abs_coeff())


def test_apply_matches_pointwise_definition(rng):
    L = op(a=[1, -2, 0.5], b=[0.25, 1])
    f = random_exppoly(rng)
    g = apply_to_exppoly(L, f)
    df = f.derivative()
    ddf = df.derivative()
    for t in np.linspace(-1, 1, 7):
        direct = 1 * f(t) - 2 * df(t) + 0.5 * ddf(t) + 0.25 * f(-t) + 1 * df(-t)
        assert g(t) == pytest.approx(direct, rel=1e-12, abs=1e-12)


# ---------------------------------------------------------------- basis


def annihilated(L, f):
    return apply_to_exppoly(L, f).max_abs_coeff() <= 1e-8 * f.max_abs_coeff()


@pytest.mark.parametrize("m", [1, 2, Fraction(1, 2)])
def test_basis_first_order(m):
    L = op(a=[0, 1], b=[m])
    basis = solution_basis(L)
    assert len(basis) == 1
    f = basis[0]
    mf = float(m)
    ref = ExpPoly.cos(mf) - ExpPoly.sin(mf)
    ratio = f(0.0) / ref(0.0)
    for t in np.linspace(-2, 2, 9):
        assert f(t) == pytest.approx(ratio * ref(t), abs=1e-12)


@pytest.mark.parametrize("g", [1, 16])
def test_basis_fourth_order_family(g):
    # (2 + phi*)(D^4 - g): a4 = 2, b4 = 1, a0 = -2g, b0 = -g
    L = op(a=[-2 * g, 0, 0, 0, 2], b=[-g, 0, 0, 0, 1])
    basis = solution_basis(L)
    w = g ** 0.25
    target = [ExpPoly.cos(w), ExpPoly.sin(w), ExpPoly.exp(w), ExpPoly.exp(-w)]
    assert len(basis) == 4
    assert span_rank(basis) == 4
    assert span_rank(basis + target) == 4
    assert all(annihilated(L, f) for f in basis)


def test_basis_size_with_common_factor():
    # R = D^4 - 16 divides both parts; the kernel has dimension 4
    L = op(a=[-32, 0, 0, 0, 2], b=[-16, 0, 0, 0, 1])
    assert reduced_half_degree(L) < 4
    basis = solution_basis(L)
    assert len(basis) == 4


def test_basis_size_equals_half_degree_of_composed():
    L = op(a=[3, 1, 2], b=[1, -1, 1])
    basis = solution_basis(L)
    assert len(basis) == composed_coefficients(L).degree // 2
    assert all(annihilated(L, f) for f in basis)


@pytest.mark.parametrize("a,b", [([0, 1, 1], []), ([0, 0, 1], [0, 1]), ([0, 1], [0, 1])])
def test_basis_zero_root_rejected(a, b):
    with pytest.raises(UnsupportedCaseError):
        solution_basis(op(a=a, b=b))


@settings(max_examples=40, deadline=None)
@given(
    a=st.lists(st.integers(-3, 3), min_size=2, max_size=4),
    b=st.lists(st.integers(-3, 3), min_size=1, max_size=4),
)
def test_basis_random_operators(a, b):
    L = op(a=a, b=b)
    assume(L.order >= 1)
    Lhat, _ = refined_reduction(L)
    red = compose(Lhat, L).Q
    assume(red.degree >= 2 and red.coeff(0) != 0)
    try:
        basis = solution_basis(L)
    except UnsupportedCaseError:
        assume(False)
    assert all(annihilated(L, f) for f in basis)
    if basis:
        assert span_rank(basis) == len(basis)


def test_operator_format():
    assert str(op(a=[0, 1], b=[2])) == "phi*[2] + [D]"
    assert str(ReflectionOperator()) == "0"
    assert math.isclose(float(op(a=[1]).a(0)), 1.0)


def test_basis_pure_differential_operator():
    L = op(a=[1, 0, 2])
    basis = solution_basis(L)
    w = 2 ** -0.5
    assert len(basis) == 2
    assert span_rank(basis + [ExpPoly.cos(w), ExpPoly.sin(w)]) == 2


def test_basis_skips_roundoff_candidates():
    L = op(a=[3, 1, 2], b=[1, -1, 1])
    basis = solution_basis(L)
    assert len(basis) == 2
    assert all(annihilated(L, f) for f in basis)
