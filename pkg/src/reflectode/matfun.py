"""Matrix functions used throughout the package.

Everything here is built from iterations and series whose iterates are
rational functions of the argument, so a result always commutes with every
matrix that commutes with the input.  No Jordan forms are computed.

Matrices are plain ``numpy.ndarray`` objects of shape ``(n, n)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BranchCutError,
    ConvergenceError,
    PreconditionError,
    SingularMatrixError,
)

SINGULAR_THRESHOLD = 1e-12
SQRT_TOL = 1e-12
SQRT_MAX_ITER = 100
SERIES_MAX_TERMS = 200
SERIES_TOL = 1e-16
# argument halving kicks in above this value of ||E|| t^2
SERIES_HALVING_LIMIT = 100.0
COMMUTE_RTOL = 1e-8
IMAG_TOL = 1e-9


def as_square(M, name="matrix"):
    """Return ``M`` as a 2-D array, raising if it is not square."""
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise PreconditionError(f"{name} must be square, got shape {M.shape}")
    return M


def fro(M):
    M = np.asarray(M)
    return math.sqrt(float(np.vdot(M, M).real))


def is_invertible(M, threshold=SINGULAR_THRESHOLD):
    """Scaled determinant test: ``|det M| > threshold * ||M||_F**n``."""
    M = as_square(M)
    n = M.shape[0]
    scale = fro(M) ** n
    if scale == 0.0:
        return False
    return abs(np.linalg.det(M)) > threshold * scale


def require_invertible(M, name="matrix", threshold=SINGULAR_THRESHOLD):
    if not is_invertible(M, threshold):
        raise SingularMatrixError(f"{name} is singular (det = {np.linalg.det(M):.3e})")


def commutes(A, B, rtol=COMMUTE_RTOL):
    """True when ``||AB - BA||_F <= rtol * ||A||_F ||B||_F``."""
    scale = fro(A) * fro(B)
    return fro(A @ B - B @ A) <= rtol * scale + 1e-300


def to_real(M, tol=IMAG_TOL):
    """Drop a negligible imaginary part, raising if it is not negligible.

    The tolerance is relative to ``max(1, max|M|)``.
    """
    M = np.asarray(M)
    if not np.iscomplexobj(M):
        return M
    scale = max(1.0, float(np.max(np.abs(M.real), initial=0.0)))
    imag = float(np.max(np.abs(M.imag), initial=0.0))
    if imag > tol * scale:
        raise ConvergenceError(
            f"expected a real result, imaginary part is {imag:.3e} (scale {scale:.3e})"
        )
    return M.real.copy()


@dataclass(frozen=True)
class SeriesPair:
    """Values of the even and odd series

    ``S1 = sum_k E^k t^(2k) / (2k)!`` and ``S2 = sum_k E^k t^(2k+1) / (2k+1)!``.

    ``truncation_error_bound`` is the relative tail bound of the base series
    (before any argument doubling); ``doublings`` counts the halving steps.
    """

    S1: np.ndarray
    S2: np.ndarray
    terms_used: int
    truncation_error_bound: float
    doublings: int = 0


def _series_base(E, t, tol, max_terms):
    n = E.shape[0]
    dtype = np.result_type(E, float)
    eye = np.eye(n, dtype=dtype)
    S1 = eye.copy()
    S2 = t * eye
    T1 = eye.copy()
    T2 = t * eye
    normE = fro(E)
    t2 = t * t
    # running upper bounds on ||S1||, ||S2|| let most iterations skip two norms
    up1, up2 = fro(S1), fro(S2)
    for k in range(1, max_terms + 1):
        T1 = (E @ T1) * (t2 / ((2 * k - 1) * (2 * k)))
        T2 = (E @ T2) * (t2 / ((2 * k) * (2 * k + 1)))
        S1 = S1 + T1
        S2 = S2 + T2
        f1, f2 = fro(T1), fro(T2)
        up1, up2 = up1 + f1, up2 + f2
        # geometric tail: ||T_{j+1}|| <= r ||T_j|| with r shrinking in j
        r = normE * t2 / ((2 * k + 1) * (2 * k + 2))
        if r < 1.0:
            n1 = f1 * r / (1.0 - r)
            n2 = f2 * r / (1.0 - r)
            if n1 > tol * up1 or n2 > tol * up2:
                continue
            bound = max(n1 / max(fro(S1), 1e-300), n2 / max(fro(S2), 1e-300))
            if bound <= tol or (n1 == 0.0 and n2 == 0.0):
                return S1, S2, k + 1, bound
    raise ConvergenceError(
        f"series did not converge within {max_terms} terms (||E|| t^2 = {normE * t2:.3e})"
    )


def series_pair(E, t, tol=SERIES_TOL, max_terms=SERIES_MAX_TERMS):
    """Partial sums of the even/odd cosh-like series of ``E`` at ``t``.

    Uses ``cosh 2x = 2 cosh^2 x - 1`` and ``sinh 2x = 2 sinh x cosh x`` (in
    their ``E``-series form) when ``||E|| t^2`` is large, so that the base
    series never sees big terms.
    """
    E = as_square(E, "E")
    if tol <= 0:
        raise PreconditionError("tol must be positive")
    t = float(t)
    n = E.shape[0]
    if t == 0.0:
        dtype = np.result_type(E, float)
        return SeriesPair(np.eye(n, dtype=dtype), np.zeros((n, n), dtype=dtype), 1, 0.0)
    normE = fro(E)
    doublings = 0
    tb = t
    while normE * tb * tb > SERIES_HALVING_LIMIT:
        tb /= 2.0
        doublings += 1
    S1, S2, used, bound = _series_base(E, tb, tol, max_terms)
    eye = np.eye(n)
    for _ in range(doublings):
        S1, S2 = 2.0 * (S1 @ S1) - eye, 2.0 * (S2 @ S1)
    return SeriesPair(S1, S2, used, bound, doublings)


def expm(M):
    """Matrix exponential by scaling and squaring of a Taylor series."""
    M = as_square(M)
    n = M.shape[0]
    nrm = fro(M)
    s = max(0, int(math.ceil(math.log2(nrm))) + 1) if nrm > 0.5 else 0
    A = M / (2.0**s)
    dtype = np.result_type(M, float)
    result = np.eye(n, dtype=dtype)
    term = np.eye(n, dtype=dtype)
    for k in range(1, 40):
        term = (term @ A) / k
        result = result + term
        if fro(term) <= 1e-18 * fro(result):
            break
    for _ in range(s):
        result = result @ result
    return result


def cosh_sinh(W):
    """Return ``(cosh W, sinh W)`` from Taylor series with argument halving."""
    W = as_square(W)
    n = W.shape[0]
    nrm = fro(W)
    s = max(0, int(math.ceil(math.log2(nrm)))) if nrm > 1.0 else 0
    A = W / (2.0**s)
    dtype = np.result_type(W, float)
    eye = np.eye(n, dtype=dtype)
    A2 = A @ A
    C = eye.copy()
    S = A.copy()
    tc = eye.copy()
    ts = A.copy()
    for k in range(1, 30):
        tc = (tc @ A2) / ((2 * k - 1) * (2 * k))
        ts = (ts @ A2) / ((2 * k) * (2 * k + 1))
        C = C + tc
        S = S + ts
        if fro(tc) <= 1e-18 * fro(C) and fro(ts) <= 1e-18 * max(fro(S), 1e-300):
            break
    for _ in range(s):
        C, S = 2.0 * (C @ C) - eye, 2.0 * (S @ C)
    return C, S


def _angle_to_cut(eigs):
    """Angular distance of each eigenvalue from the negative real axis."""
    return np.pi - np.abs(np.angle(eigs))


def _check_principal(M, what):
    eigs = np.linalg.eigvals(M)
    bad = (_angle_to_cut(eigs) <= 1e-12) & (np.abs(eigs) > 0)
    if np.any(bad):
        raise BranchCutError(
            f"{what}: eigenvalue {eigs[bad][0]:.6g} lies on the closed negative real axis"
        )
    return eigs


def _denman_beavers(M, tol, max_iter):
    n = M.shape[0]
    dtype = np.result_type(M, float)
    Y = M.astype(dtype)
    Z = np.eye(n, dtype=dtype)
    scaling = True
    for _ in range(max_iter):
        if scaling:
            mu = abs(np.linalg.det(Y) * np.linalg.det(Z)) ** (-1.0 / (2 * n))
        else:
            mu = 1.0
        Yn = 0.5 * (mu * Y + np.linalg.inv(Z) / mu)
        Zn = 0.5 * (mu * Z + np.linalg.inv(Y) / mu)
        step = fro(Yn - Y) / max(fro(Yn), 1e-300)
        Y, Z = Yn, Zn
        if step < 1e-2:
            scaling = False
        if step <= tol:
            return Y
    raise ConvergenceError(f"Denman-Beavers iteration did not converge in {max_iter} steps")


def _rotation_for(eigs):
    """Pick a rotation angle moving the spectrum away from the cut.

    Returns 0 when the principal branch is safe.  Otherwise scans whole
    degrees and keeps the angle that maximises the smallest distance to the
    cut (smallest angle on ties), which maps eigenvalues on the negative real
    axis to square roots on the positive imaginary axis.
    """
    if np.all(_angle_to_cut(eigs) > 1e-3):
        return 0.0
    best, best_theta = -1.0, 0.0
    for k in range(1, 360):
        theta = k * np.pi / 180.0
        d = float(np.min(_angle_to_cut(eigs * np.exp(-1j * theta))))
        if d > best + 1e-12:
            best, best_theta = d, theta
    return best_theta


def commuting_sqrt(M, *, branch="principal", tol=SQRT_TOL, max_iter=SQRT_MAX_ITER):
    """Square root of an invertible matrix that commutes with everything ``M``
    commutes with.

    Args:
        M: invertible square matrix, real or complex.
        branch: ``"principal"`` raises :class:`BranchCutError` when ``M`` has
            an eigenvalue on the closed negative real axis.  ``"rotated"``
            instead computes ``exp(i theta/2) sqrt(exp(-i theta) M)`` for a
            rotation ``theta`` chosen by :func:`_rotation_for`; the result is
            still a square root and still a rational function of ``M``, but
            may be complex for real ``M``.
        tol: relative step tolerance of the Denman-Beavers iteration.
        max_iter: iteration cap.

    Returns:
        ``S`` with ``S @ S == M`` to working accuracy.
    """
    M = as_square(M)
    if branch not in ("principal", "rotated"):
        raise PreconditionError(f"unknown branch {branch!r}")
    require_invertible(M, "commuting_sqrt argument")
    if branch == "principal":
        _check_principal(M, "commuting_sqrt")
        return _denman_beavers(M, tol, max_iter)
    theta = _rotation_for(np.linalg.eigvals(M))
    if theta == 0.0:
        return _denman_beavers(M, tol, max_iter)
    S = _denman_beavers(M * np.exp(-1j * theta), tol, max_iter)
    return S * np.exp(0.5j * theta)


def _log_near_identity(M):
    # log(I + X) = 2 atanh(X (2I + X)^-1)
    n = M.shape[0]
    eye = np.eye(n, dtype=M.dtype)
    X = M - eye
    Z = np.linalg.solve((2.0 * eye + X).T, X.T).T
    Z2 = Z @ Z
    term = Z.copy()
    total = Z.copy()
    for j in range(1, 200):
        term = term @ Z2
        inc = term / (2 * j + 1)
        total = total + inc
        if fro(inc) <= 1e-18 * max(fro(total), 1e-300):
            break
    return 2.0 * total


def commuting_log(M, *, tol=SQRT_TOL, max_iter=SQRT_MAX_ITER):
    """Principal logarithm by inverse scaling and squaring.

    Takes repeated :func:`commuting_sqrt` until the argument is close to the
    identity, sums the ``atanh`` series of the remainder and scales back by
    ``2**k``.
    """
    M = as_square(M)
    require_invertible(M, "commuting_log argument")
    _check_principal(M, "commuting_log")
    n = M.shape[0]
    A = M.astype(np.result_type(M, float))
    eye = np.eye(n)
    k = 0
    while fro(A - eye) > 0.25:
        A = _denman_beavers(A, tol, max_iter)
        k += 1
        if k > 64:
            raise ConvergenceError("inverse scaling and squaring did not approach the identity")
    return (2.0**k) * _log_near_identity(A)


def block_det_commuting(M1, M2, M3, M4, rtol=COMMUTE_RTOL):
    """Determinant of ``[[M1, M2], [M3, M4]]`` when ``M1`` and ``M3`` commute,
    computed as ``det(M1 M4 - M3 M2)``."""
    M1, M2, M3, M4 = (as_square(M) for M in (M1, M2, M3, M4))
    if not (M1.shape == M2.shape == M3.shape == M4.shape):
        raise PreconditionError("blocks must share one shape")
    if not commutes(M1, M3, rtol):
        raise PreconditionError("M1 and M3 do not commute")
    return np.linalg.det(M1 @ M4 - M3 @ M2)
