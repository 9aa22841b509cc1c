"""Variation of parameters for ``F u'(t) + G u'(-t) + A u(t) + B u(-t) = gamma(t)``.

Solutions are sought as ``u = X a + Y b`` with ``a`` even and ``b`` odd.
Splitting the equation into even and odd parts gives

    X_e a' + Y_o b' = (F-G)^-1 gamma_o
    X_o a' + Y_e b' = (F+G)^-1 gamma_e

whose matrix is the block matrix ``[[X_e, Y_o], [X_o, Y_e]]``, so

    u(t) = X(t) c + (X(t) | Y(t)) int_0^t blk(s)^-1 ((F-G)^-1 gamma_o(s), (F+G)^-1 gamma_e(s)) ds.
"""

from __future__ import annotations

import numpy as np

from .errors import PreconditionError, SingularPathError
from .quadrature import QUAD_TOL, adaptive_simpson
from .sysfun import FundamentalPair

PATH_DET_THRESHOLD = 1e-12
PATH_COND_LIMIT = 1e14


class ForcingFunction:
    """Vector-valued right-hand side ``gamma``.

    Args:
        func: callable ``t -> array_like`` of length ``n``.
        n: dimension; inferred from ``func(0.0)`` when omitted.
        description: optional source text (expressions, for instance).
    """

    def __init__(self, func, n=None, description=None):
        self._func = func
        if n is None:
            n = np.atleast_1d(np.asarray(func(0.0), dtype=float)).shape[0]
        self.n = int(n)
        self.description = description

    def __call__(self, t):
        v = np.atleast_1d(np.asarray(self._func(float(t)), dtype=float))
        if v.shape != (self.n,):
            raise PreconditionError(f"forcing returned shape {v.shape}, expected ({self.n},)")
        return v

    @classmethod
    def zero(cls, n):
        return cls(lambda t: np.zeros(n), n, description="0")

    @classmethod
    def constant(cls, values):
        values = np.atleast_1d(np.asarray(values, dtype=float)).copy()
        return cls(lambda t: values, values.shape[0], description=str(values.tolist()))

    def __add__(self, other):
        return ForcingFunction(lambda t: self(t) + other(t), self.n)

    def scale(self, c):
        return ForcingFunction(lambda t: c * self(t), self.n)

    def __repr__(self):
        return f"ForcingFunction(n={self.n}, description={self.description!r})"


def as_forcing(gamma, n):
    if gamma is None:
        return ForcingFunction.zero(n)
    if isinstance(gamma, ForcingFunction):
        if gamma.n != n:
            raise PreconditionError(f"forcing has dimension {gamma.n}, system has {n}")
        return gamma
    if callable(gamma):
        return ForcingFunction(gamma, n)
    return ForcingFunction.constant(gamma)


def even_odd_split(gamma, t):
    """``(gamma_e(t), gamma_o(t))``."""
    gp, gm = gamma(t), gamma(-t)
    return (gp + gm) / 2.0, (gp - gm) / 2.0


def checked_block_inverse(pair, s):
    """Inverse of the block matrix at ``s``.

    Raises:
        SingularPathError: when ``|det| <= 1e-12`` or the 1-norm condition
            number exceeds ``1e14`` (the inverse would carry no correct digits).
    """
    M = pair.block(s)
    det = float(np.linalg.det(M))
    if abs(det) <= PATH_DET_THRESHOLD or not np.isfinite(det):
        raise SingularPathError(s, det)
    Minv = pair.block_inv(s)
    cond = float(np.abs(M).sum(axis=0).max() * np.abs(Minv).sum(axis=0).max())
    if cond > PATH_COND_LIMIT:
        raise SingularPathError(s, det, cond)
    return Minv


def _pair(sys, pair):
    if pair is None:
        return FundamentalPair(sys)
    if pair.system is not sys:
        raise PreconditionError("fundamental pair belongs to a different system")
    return pair


def vp_solve(sys, gamma, c, t, *, tol=QUAD_TOL, pair=None):
    """Solution of the forced system with ``u(0) = c``, evaluated at ``t``.

    Args:
        sys: :class:`~reflectode.sysfun.ReflectionSystem`.
        gamma: :class:`ForcingFunction`, a callable or a constant vector.
        c: initial value ``u(0)``.
        t: evaluation point (either sign).
        tol: absolute quadrature tolerance.
        pair: optional :class:`~reflectode.sysfun.FundamentalPair` to reuse
            cached evaluations across calls.

    Raises:
        SingularPathError: the block matrix is singular between 0 and ``t``.
    """
    pair = _pair(sys, pair)
    gamma = as_forcing(gamma, sys.n)
    c = np.asarray(c, dtype=float).reshape(sys.n)
    t = float(t)
    integral = adaptive_simpson(_integrand(sys, pair, gamma), 0.0, t, tol)
    return pair.X(t) @ c + pair.Z(t) @ integral


def _integrand(sys, pair, gamma):
    def integrand(s):
        ge, go = even_odd_split(gamma, s)
        rhs = np.concatenate([sys.Pminus @ go, sys.Pplus @ ge])
        return checked_block_inverse(pair, s) @ rhs

    return integrand


def vp_solve_grid(sys, gamma, c, ts, *, tol=QUAD_TOL, pair=None):
    """:func:`vp_solve` at every point of ``ts``, as an array ``(len(ts), n)``.

    The integral from 0 is accumulated outward through the sorted grid
    points on each side of 0, so the cost is that of a single solve at
    ``max |t|``.  Each panel gets the absolute tolerance ``tol``.

    Raises:
        SingularPathError: the block matrix is singular on some panel; points
            closer to 0 are not returned either.
    """
    pair = _pair(sys, pair)
    gamma = as_forcing(gamma, sys.n)
    c = np.asarray(c, dtype=float).reshape(sys.n)
    ts = np.asarray(ts, dtype=float).reshape(-1)
    f = _integrand(sys, pair, gamma)
    out = np.empty((ts.size, sys.n))
    for side in (1.0, -1.0):
        idx = [i for i in np.argsort(side * ts, kind="stable") if side * ts[i] > 0 or (side > 0 and ts[i] == 0)]
        acc = np.zeros(2 * sys.n)
        prev = 0.0
        for i in idx:
            t = float(ts[i])
            acc = acc + adaptive_simpson(f, prev, t, tol)
            prev = t
            out[i] = pair.X(t) @ c + pair.Z(t) @ acc
    return out


__all__ = [
    "ForcingFunction",
    "as_forcing",
    "even_odd_split",
    "checked_block_inverse",
    "vp_solve",
    "vp_solve_grid",
]
