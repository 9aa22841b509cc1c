import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_polynomial_of
from reflectode.errors import BranchCutError, ConvergenceError, PreconditionError, SingularMatrixError
from reflectode.matfun import (
    block_det_commuting,
    commutes,
    commuting_log,
    commuting_sqrt,
    cosh_sinh,
    expm,
    fro,
    is_invertible,
    series_pair,
    to_real,
)


def right_half_plane(rng, n):
    while True:
        M = np.eye(n) * rng.uniform(1.0, 3.0) + 0.4 * rng.uniform(-1, 1, (n, n))
        if np.all(np.linalg.eigvals(M).real > 0.1):
            return M


# ---------------------------------------------------------------- series_pair


def test_series_pair_at_zero():
    E = np.array([[1.0, 2.0], [3.0, 4.0]])
    p = series_pair(E, 0.0)
    assert np.array_equal(p.S1, np.eye(2))
    assert np.array_equal(p.S2, np.zeros((2, 2)))


def test_series_pair_identity_gives_cosh_sinh():
    p = series_pair(np.eye(2), 1.0)
    assert np.allclose(p.S1, math.cosh(1.0) * np.eye(2), atol=1e-15)
    assert np.allclose(p.S2, math.sinh(1.0) * np.eye(2), atol=1e-15)
    assert p.truncation_error_bound <= 1e-15


@pytest.mark.parametrize("bg", [0.5, 1.0, 4.0, 30.0])
@pytest.mark.parametrize("t", [-3.0, -0.4, 0.9, 2.5])
def test_series_pair_negative_identity_gives_cos_sin(bg, t):
    w = math.sqrt(bg)
    p = series_pair(-bg * np.eye(2), t)
    assert np.allclose(p.S1, math.cos(w * t) * np.eye(2), atol=1e-12)
    assert np.allclose(p.S2, math.sin(w * t) / w * np.eye(2), atol=1e-12)


def test_series_pair_matches_scipy_cosh_of_sqrt(rng):
    for _ in range(20):
        n = rng.integers(1, 5)
        Om = right_half_plane(rng, n)
        E = Om @ Om
        t = rng.uniform(-2, 2)
        p = series_pair(E, t)
        assert np.allclose(p.S1, scipy.linalg.coshm(Om * t), rtol=1e-10, atol=1e-10)
        assert np.allclose(p.S2, np.linalg.solve(Om, scipy.linalg.sinhm(Om * t)), rtol=1e-10, atol=1e-10)


def test_series_pair_halving_large_argument():
    E = np.diag([4.0, 9.0])
    p = series_pair(E, 6.0)
    assert p.doublings > 0
    assert np.allclose(np.diag(p.S1), np.cosh([12.0, 18.0]), rtol=1e-12)
    assert np.allclose(np.diag(p.S2), np.sinh([12.0, 18.0]) / np.array([2.0, 3.0]), rtol=1e-12)


def test_series_pair_cap_raises():
    with pytest.raises(ConvergenceError):
        series_pair(np.eye(2) * 50.0, 1.0, max_terms=2)


def test_series_pair_rejects_bad_tol():
    with pytest.raises(PreconditionError):
        series_pair(np.eye(2), 1.0, tol=0.0)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), t=st.floats(-2, 2))
def test_series_pair_derivatives(seed, t):
    """d/dt S2 = S1 and d/dt S1 = E S2 by central differences."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    E = rng.uniform(-2, 2, (n, n))
    h = 1e-5
    p, pp, pm = series_pair(E, t), series_pair(E, t + h), series_pair(E, t - h)
    assert np.allclose((pp.S2 - pm.S2) / (2 * h), p.S1, atol=1e-6)
    assert np.allclose((pp.S1 - pm.S1) / (2 * h), E @ p.S2, atol=1e-6)


# ---------------------------------------------------------------- sqrt


def test_sqrt_examples():
    assert np.allclose(commuting_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-12)
    assert np.allclose(commuting_sqrt(np.eye(3)), np.eye(3), atol=1e-14)
    S = commuting_sqrt(np.array([[1.0, 1.0], [0.0, 1.0]]))
    assert np.allclose(S, [[1.0, 0.5], [0.0, 1.0]], atol=1e-12)


def test_sqrt_singular_raises():
    with pytest.raises(SingularMatrixError):
        commuting_sqrt(np.array([[1.0, 0.0], [0.0, 0.0]]))


def test_sqrt_negative_eigenvalue_principal_raises():
    with pytest.raises(BranchCutError):
        commuting_sqrt(np.diag([-1.0, 4.0]))


def test_sqrt_rotated_branch_handles_negative_axis():
    M = np.diag([-4.0, 9.0])
    S = commuting_sqrt(M, branch="rotated")
    assert np.allclose(S @ S, M, atol=1e-10)


def test_sqrt_unknown_branch():
    with pytest.raises(PreconditionError):
        commuting_sqrt(np.eye(2), branch="other")


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_sqrt_roundtrip_and_commutation(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 6))
    M = right_half_plane(rng, n)
    S = commuting_sqrt(M)
    assert fro(S @ S - M) <= 1e-10 * fro(M)
    N = random_polynomial_of(rng, M, 3)
    assert fro(S @ N - N @ S) <= 1e-10 * fro(N) * fro(S)


# ---------------------------------------------------------------- log


def test_log_examples():
    assert np.allclose(commuting_log(np.eye(2)), np.zeros((2, 2)), atol=1e-14)
    assert np.allclose(commuting_log(np.diag([math.e, math.e**2])), np.diag([1.0, 2.0]), atol=1e-12)
    L = commuting_log(np.array([[1.0, 1.0], [0.0, 1.0]]))
    assert np.allclose(L, [[0.0, 1.0], [0.0, 0.0]], atol=1e-12)


def test_log_branch_cut():
    with pytest.raises(BranchCutError):
        commuting_log(np.diag([-2.0, 1.0]))


def test_log_singular():
    with pytest.raises(SingularMatrixError):
        commuting_log(np.zeros((2, 2)))


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_log_roundtrip(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 6))
    M = right_half_plane(rng, n)
    L = commuting_log(M)
    assert fro(expm(L) - M) <= 1e-9 * fro(M)
    assert commutes(L, M)


# ---------------------------------------------------------------- expm / cosh_sinh


def test_expm_matches_scipy(rng):
    for _ in range(20):
        n = rng.integers(1, 6)
        M = rng.uniform(-3, 3, (n, n))
        ref = scipy.linalg.expm(M)
        assert fro(expm(M) - ref) <= 1e-12 * fro(ref)


def test_cosh_sinh_matches_scipy(rng):
    for _ in range(20):
        n = rng.integers(1, 5)
        W = rng.uniform(-2, 2, (n, n))
        C, S = cosh_sinh(W)
        assert np.allclose(C, scipy.linalg.coshm(W), rtol=1e-11, atol=1e-11)
        assert np.allclose(S, scipy.linalg.sinhm(W), rtol=1e-11, atol=1e-11)


# ---------------------------------------------------------------- block det


def test_block_det_examples(rng):
    I, Z = np.eye(3), np.zeros((3, 3))
    assert block_det_commuting(I, Z, Z, I) == pytest.approx(1.0)
    M1 = rng.uniform(-1, 1, (3, 3))
    M2 = random_polynomial_of(rng, M1)
    expected = np.linalg.det(M1 + M2) * np.linalg.det(M2 - M1)
    assert block_det_commuting(M1, M2, -M2, -M1) == pytest.approx(expected, rel=1e-10)


def test_block_det_requires_commuting():
    M1 = np.array([[1.0, 1.0], [0.0, 1.0]])
    M3 = np.array([[1.0, 0.0], [1.0, 1.0]])
    with pytest.raises(PreconditionError):
        block_det_commuting(M1, np.eye(2), M3, np.eye(2))


def test_block_det_random_commuting_instances(rng):
    for _ in range(100):
        n = int(rng.integers(1, 6))
        M1 = rng.uniform(-1, 1, (n, n))
        M3 = random_polynomial_of(rng, M1)
        M2, M4 = rng.uniform(-1, 1, (n, n)), rng.uniform(-1, 1, (n, n))
        direct = np.linalg.det(np.block([[M1, M2], [M3, M4]]))
        assert block_det_commuting(M1, M2, M3, M4) == pytest.approx(direct, rel=1e-10, abs=1e-12)


# ---------------------------------------------------------------- helpers


def test_is_invertible_scaled():
    assert is_invertible(np.eye(2) * 1e-8)
    assert not is_invertible(np.array([[1.0, 2.0], [2.0, 4.0]]))


def test_to_real_rejects_large_imaginary():
    assert to_real(np.array([[1 + 1e-12j]])).dtype == float
    with pytest.raises(ConvergenceError):
        to_real(np.array([[1 + 1e-3j]]))


def test_as_square_rejects_rectangular():
    with pytest.raises(PreconditionError):
        commuting_sqrt(np.ones((2, 3)))
