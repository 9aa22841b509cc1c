"""Fundamental matrices of first-order systems with reflection

    F u'(t) + G u'(-t) + A u(t) + B u(-t) = 0.

With ``M+ = (F+G)^-1 (A+B)``, ``M- = (F-G)^-1 (A-B)`` and ``E = M- M+`` the
fundamental matrix normalized by ``X(0) = Id`` is

    X(t) = sum_k E^k t^(2k)/(2k)!  -  M+ sum_k E^k t^(2k+1)/(2k+1)!

and the associated system (``G`` and ``B`` negated) has ``Y`` given by the
same formula with ``M+`` and ``M-`` swapped.
"""

from __future__ import annotations

import functools
import math

import numpy as np

from .errors import (
    BranchCutError,
    DegenerateReductionError,
    PreconditionError,
    SingularMatrixError,
)
from .matfun import (
    as_square,
    commutes,
    commuting_log,
    commuting_sqrt,
    cosh_sinh,
    is_invertible,
    series_pair,
    to_real,
)

BISECTION_TOL = 1e-10
CACHE_SIZE = 8192


class ReflectionSystem:
    """Coefficients ``(F, G, A, B)`` of a linear system with reflection.

    ``F + G`` and ``F - G`` must be invertible; this is checked here.

    Attributes:
        n: dimension.
        Mplus: ``(F+G)^-1 (A+B)``.
        Mminus: ``(F-G)^-1 (A-B)``.
        E: ``Mminus @ Mplus``.
        Etilde: ``Mplus @ Mminus``.
    """

    def __init__(self, F, G, A, B):
        mats = [np.atleast_2d(np.asarray(M, dtype=float)) for M in (F, G, A, B)]
        for name, M in zip("FGAB", mats):
            as_square(M, name)
        if len({M.shape for M in mats}) != 1:
            raise PreconditionError("F, G, A, B must have the same shape")
        self.F, self.G, self.A, self.B = mats
        for M in mats:
            M.flags.writeable = False
        self.n = self.F.shape[0]
        for name, M in (("F + G", self.F + self.G), ("F - G", self.F - self.G)):
            if not is_invertible(M):
                raise SingularMatrixError(f"{name} is singular (det = {np.linalg.det(M):.3e})")
        self.Pplus = np.linalg.inv(self.F + self.G)
        self.Pminus = np.linalg.inv(self.F - self.G)
        self.Mplus = self.Pplus @ (self.A + self.B)
        self.Mminus = self.Pminus @ (self.A - self.B)
        self.E = self.Mminus @ self.Mplus
        self.Etilde = self.Mplus @ self.Mminus

    @classmethod
    def scalar(cls, f, g, a, b):
        return cls([[f]], [[g]], [[a]], [[b]])

    def associated(self):
        """The system with ``G`` and ``B`` negated."""
        return ReflectionSystem(self.F, -self.G, self.A, -self.B)

    def apply(self, u, du, t):
        """Left-hand side ``F u'(t) + G u'(-t) + A u(t) + B u(-t)``.

        ``u`` and ``du`` are callables returning vectors (or matrices).
        """
        return self.F @ du(t) + self.G @ du(-t) + self.A @ u(t) + self.B @ u(-t)

    def __eq__(self, other):
        if not isinstance(other, ReflectionSystem):
            return NotImplemented
        return all(
            np.array_equal(x, y)
            for x, y in zip((self.F, self.G, self.A, self.B), (other.F, other.G, other.A, other.B))
        )

    def __hash__(self):
        return hash(tuple(M.tobytes() for M in (self.F, self.G, self.A, self.B)))

    def __repr__(self):
        return (
            f"ReflectionSystem(F={self.F.tolist()}, G={self.G.tolist()}, "
            f"A={self.A.tolist()}, B={self.B.tolist()})"
        )


def matrix_E(sys):
    """``E = (F-G)^-1 (A-B) (F+G)^-1 (A+B)``."""
    return sys.E


def _series_X(E, M, t):
    pair = series_pair(E, t)
    return pair.S1 - M @ pair.S2


def fundamental_series(sys, t):
    """``X(t)`` from the even/odd power series, with ``X(0) = Id``."""
    return _series_X(sys.E, sys.Mplus, t)


def associated_Y(sys, t):
    """Fundamental matrix of the associated system, ``Y(0) = Id``."""
    return _series_X(sys.Etilde, sys.Mminus, t)


def _closed(E, M, t):
    Omega = commuting_sqrt(E, branch="rotated")
    C, S = cosh_sinh(Omega * t)
    X = C - M @ np.linalg.solve(Omega, S)
    return to_real(X)


def fundamental_closed(sys, t):
    """``X(t) = cosh(Omega t) - M+ Omega^-1 sinh(Omega t)`` with ``Omega^2 = E``.

    Requires ``A + B`` and ``A - B`` invertible.  When ``E`` has eigenvalues
    on the negative real axis the square root is taken on a rotated branch
    and is complex; ``X`` itself is real for any choice of root.
    """
    for name, M in (("A + B", sys.A + sys.B), ("A - B", sys.A - sys.B)):
        if not is_invertible(M):
            raise PreconditionError(f"{name} is singular; the closed form needs E invertible")
    return _closed(sys.E, sys.Mplus, t)


def companion_system(L):
    """First-order system equivalent to the scalar equation ``L u = 0``.

    The state is ``(u, u', ..., u^(n-1))``.
    """
    n = L.order
    if n < 1:
        raise PreconditionError("operator must have order at least 1")
    an, bn = L.a(n), L.b(n)
    if an * an == bn * bn:
        raise DegenerateReductionError(
            f"leading coefficients a_n = {an}, b_n = {bn} satisfy a_n^2 = b_n^2"
        )
    F = np.eye(n)
    G = np.zeros((n, n))
    A = np.zeros((n, n))
    B = np.zeros((n, n))
    F[-1, -1] = float(an)
    G[-1, -1] = float(bn)
    for i in range(n - 1):
        A[i, i + 1] = -1.0
    A[-1, :] = [float(L.a(k)) for k in range(n)]
    B[-1, :] = [float(L.b(k)) for k in range(n)]
    return ReflectionSystem(F, G, A, B)


def block_X(sys, t):
    """``[[X_e, Y_o], [X_o, Y_e]]`` at ``t``."""
    Xp, Xm = fundamental_series(sys, t), fundamental_series(sys, -t)
    Yp, Ym = associated_Y(sys, t), associated_Y(sys, -t)
    return np.block([[(Xp + Xm) / 2, (Yp - Ym) / 2], [(Xp - Xm) / 2, (Yp + Ym) / 2]])


class FundamentalPair:
    """Cached evaluators of ``X``, ``Y`` and the block matrix for one system.

    Returned arrays are read-only views into the cache.
    """

    def __init__(self, sys):
        self.system = sys
        self._parts = functools.lru_cache(maxsize=CACHE_SIZE)(self._parts_at)
        self.X = functools.lru_cache(maxsize=CACHE_SIZE)(self._X)
        self.Y = functools.lru_cache(maxsize=CACHE_SIZE)(self._Y)
        self.block = functools.lru_cache(maxsize=CACHE_SIZE)(self._block)
        self.block_inv = functools.lru_cache(maxsize=CACHE_SIZE)(self._block_inv)

    @staticmethod
    def _frozen(M):
        M.flags.writeable = False
        return M

    def _parts_at(self, a):
        # S1 is even and S2 odd in t, so one evaluation at |t| serves both signs
        sys = self.system
        px, py = series_pair(sys.E, a), series_pair(sys.Etilde, a)
        return px.S1, sys.Mplus @ px.S2, py.S1, sys.Mminus @ py.S2

    def _X(self, t):
        t = float(t)
        S1, MS2, _, _ = self._parts(abs(t))
        return self._frozen(S1 - MS2 if t >= 0 else S1 + MS2)

    def _Y(self, t):
        t = float(t)
        _, _, S1, MS2 = self._parts(abs(t))
        return self._frozen(S1 - MS2 if t >= 0 else S1 + MS2)

    def Z(self, t):
        """``(X(t) | Y(t))``, an ``n x 2n`` matrix."""
        return np.hstack([self.X(t), self.Y(t)])

    def _block(self, t):
        t = float(t)
        sgn = 1.0 if t >= 0 else -1.0
        S1x, MS2x, S1y, MS2y = self._parts(abs(t))
        # even parts are S1, odd parts are -M S2 (with the sign of t)
        M = np.block([[S1x, -sgn * MS2y], [-sgn * MS2x, S1y]])
        return self._frozen(M)

    def _block_inv(self, t):
        # the block matrix is exp(t K) for a constant K, so its inverse is its
        # value at -t; this avoids amplifying roundoff by the condition number
        return self.block(-float(t))

    def block_det(self, t):
        return float(np.linalg.det(self.block(t)))


def _log_any_branch(R):
    try:
        return commuting_log(R)
    except BranchCutError:
        # exp(log(-R) + i pi Id) = R
        n = R.shape[0]
        return commuting_log(-R.astype(complex)) + 1j * math.pi * np.eye(n)


def matrix_paf(M, N, U):
    """``M cosh U + N sinh U`` rewritten as ``M0 N0 cosh(U0 + U)``.

    ``M0^2 = M + N``, ``N0^2 = M - N`` and ``exp(U0) = N0^-1 M0``.  ``M``,
    ``N`` and ``U`` must commute pairwise and ``M +- N`` must be invertible.
    Square roots of matrices with negative eigenvalues are taken on a
    rotated branch; the returned value is real whenever the inputs are.
    """
    M, N, U = (as_square(np.asarray(X), name) for X, name in ((M, "M"), (N, "N"), (U, "U")))
    if not (M.shape == N.shape == U.shape):
        raise PreconditionError("M, N, U must have the same shape")
    for (X, Y), names in (((M, N), "M, N"), ((M, U), "M, U"), ((N, U), "N, U")):
        if not commutes(X, Y):
            raise PreconditionError(f"{names} do not commute")
    for name, X in (("M + N", M + N), ("M - N", M - N)):
        if not is_invertible(X):
            raise PreconditionError(f"{name} is singular")
    M0 = commuting_sqrt(M + N, branch="rotated")
    N0 = commuting_sqrt(M - N, branch="rotated")
    U0 = _log_any_branch(np.linalg.solve(N0, M0))
    C, _ = cosh_sinh(U0 + U)
    out = M0 @ N0 @ C
    if not any(np.iscomplexobj(X) for X in (M, N, U)):
        out = to_real(out, tol=1e-8)
    return out


def singular_locus(sys, interval, step):
    """Zeros of ``det X(t)`` on ``interval`` located by sign changes on a
    grid of spacing ``step`` and refined by bisection to ``1e-10``.

    Double zeros without a sign change are only found when a grid point hits
    them exactly.
    """
    lo, hi = map(float, interval)
    if hi < lo:
        lo, hi = hi, lo
    if step <= 0:
        raise PreconditionError("step must be positive")
    count = max(1, int(math.ceil((hi - lo) / step)))
    grid = np.linspace(lo, hi, count + 1)

    def det(t):
        return float(np.linalg.det(fundamental_series(sys, t)))

    values = [det(t) for t in grid]
    roots = []
    for i, (t, v) in enumerate(zip(grid, values)):
        if v == 0.0:
            roots.append(float(t))
            continue
        if i + 1 < len(grid) and v * values[i + 1] < 0.0:
            a, b, fa = t, grid[i + 1], v
            while b - a > BISECTION_TOL:
                mid = 0.5 * (a + b)
                fm = det(mid)
                if fm == 0.0:
                    a = b = mid
                    break
                if (fm < 0.0) == (fa < 0.0):
                    a, fa = mid, fm
                else:
                    b = mid
            roots.append(0.5 * (a + b))
    return sorted(roots)


__all__ = [
    "ReflectionSystem",
    "FundamentalPair",
    "matrix_E",
    "fundamental_series",
    "fundamental_closed",
    "associated_Y",
    "companion_system",
    "block_X",
    "matrix_paf",
    "singular_locus",
]
