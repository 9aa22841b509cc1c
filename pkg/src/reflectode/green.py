"""Green's functions of initial and two-point boundary value problems.

Write ``Z(t) = (X(t) | Y(t))``, ``blk`` for the block matrix of even/odd
parts, and

    P+ = ((F-G)^-1 ; (F+G)^-1),     P- = (-(F-G)^-1 ; (F+G)^-1)

(stacked vertically, ``2n x n``).  Every kernel below has the form

    G(t, s) = 1/2 [ W1 blk(s)^-1 P+  +  W2 blk(-s)^-1 P- ]

with ``n x 2n`` weights ``W1``, ``W2`` that depend on the region of ``(t, s)``.

Scalar problems ``L u = h`` may be passed as a
:class:`~reflectode.opalg.ReflectionOperator`; they are rewritten with
:func:`~reflectode.sysfun.companion_system`, the forcing becomes
``(0, ..., 0, h)`` and the first component is returned.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError, UnsolvableBVPError
from .matfun import fro, is_invertible
from .opalg import ReflectionOperator
from .quadrature import QUAD_TOL, adaptive_simpson
from .sysfun import FundamentalPair, ReflectionSystem, companion_system
from .varpar import ForcingFunction, as_forcing, checked_block_inverse

DOMAIN_SLACK = 1e-12
MX_THRESHOLD = 1e-12


def _stacks(sys):
    Pplus = np.vstack([sys.Pminus, sys.Pplus])
    Pminus = np.vstack([-sys.Pminus, sys.Pplus])
    return Pplus, Pminus


def _resolve(problem, pair=None):
    """``(system, pair, scalar)`` for a system or a scalar operator."""
    scalar = isinstance(problem, ReflectionOperator)
    sys = companion_system(problem) if scalar else problem
    if not isinstance(sys, ReflectionSystem):
        raise PreconditionError(f"expected a ReflectionSystem or ReflectionOperator, got {type(problem).__name__}")
    if pair is None or pair.system is not sys:
        pair = FundamentalPair(sys)
    return sys, pair, scalar


def _lift_scalar_forcing(h, n):
    if h is None:
        return ForcingFunction.zero(n)

    def g(t):
        v = np.zeros(n)
        v[-1] = float(np.asarray(h(t) if callable(h) else h, dtype=float).reshape(-1)[0])
        return v

    return ForcingFunction(g, n)


def _lift_scalar_vector(v, n, name):
    v = np.atleast_1d(np.asarray(v, dtype=float))
    if v.shape == (n,):
        return v
    if v.shape == (1,):
        out = np.zeros(n)
        out[0] = v[0]
        return out
    raise PreconditionError(f"{name} must have length 1 or {n}")


def _square(M, n, name):
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.shape != (n, n):
        raise PreconditionError(f"{name} must be {n}x{n}, got {M.shape}")
    return M


# ---------------------------------------------------------------------------
# initial value problem


def _ivp_kernel(pair, Zt, t, s, Pplus, Pminus):
    if (0.0 <= s <= t) or (t <= s <= 0.0):
        return 0.5 * Zt @ checked_block_inverse(pair, s) @ Pplus
    if (-t <= s < 0.0) or (0.0 < s <= -t):
        return 0.5 * Zt @ checked_block_inverse(pair, -s) @ Pminus
    return np.zeros((Zt.shape[0], Pplus.shape[1]))


def green_ivp(problem, t, s, *, pair=None):
    """Kernel ``G(t, s)`` of the initial value problem ``u(0) = delta``.

    The solution is ``u(t) = X(t) delta + int_{-t}^{t} G(t, s) gamma(s) ds``
    as an oriented integral, for either sign of ``t``.  For ``s`` between 0
    and ``t`` (inclusive) the kernel uses ``blk(s)^-1 P+``; for ``s`` strictly
    between 0 and ``-t`` it uses ``blk(-s)^-1 P-``; it vanishes elsewhere.

    For a scalar operator the ``(0, n-1)`` entry is returned.
    """
    sys, pair, scalar = _resolve(problem, pair)
    t, s = float(t), float(s)
    Pplus, Pminus = _stacks(sys)
    G = _ivp_kernel(pair, pair.Z(t), t, s, Pplus, Pminus)
    return float(G[0, -1]) if scalar else G


def solve_ivp(problem, gamma, delta, t, *, tol=QUAD_TOL, pair=None):
    """``u(t)`` for the forced system with ``u(0) = delta`` via the kernel."""
    sys, pair, scalar = _resolve(problem, pair)
    n = sys.n
    gamma = _lift_scalar_forcing(gamma, n) if scalar else as_forcing(gamma, n)
    delta = _lift_scalar_vector(delta, n, "delta") if scalar else np.asarray(delta, float).reshape(n)
    t = float(t)
    Zt = pair.Z(t)
    Pplus, Pminus = _stacks(sys)

    # branch fixed per panel so that s = 0 does not bring in the other branch
    def near(s):
        return Zt @ (checked_block_inverse(pair, s) @ (Pplus @ gamma(s)))

    def far(s):
        return Zt @ (checked_block_inverse(pair, -s) @ (Pminus @ gamma(s)))

    total = 0.5 * (adaptive_simpson(near, 0.0, t, tol) + adaptive_simpson(far, -t, 0.0, tol))
    u = pair.X(t) @ delta + total
    return float(u[0]) if scalar else u


# ---------------------------------------------------------------------------
# boundary value problem


@dataclass(frozen=True)
class BoundaryMatrix:
    """``M_X = C X(-T) + K X(T)`` with its determinant and invertibility."""

    matrix: np.ndarray
    det: float
    invertible: bool


def mx_matrix(problem, C, K, T, *, pair=None):
    """``M_X = C X(-T) + K X(T)``; solvability holds iff it is invertible.

    ``M_X`` counts as singular when ``|det M_X| <= 1e-12 (||C X(-T)||_F +
    ||K X(T)||_F)^n`` or when it fails the scaled test of
    :func:`~reflectode.matfun.is_invertible`.
    """
    sys, pair, _ = _resolve(problem, pair)
    T = float(T)
    if T <= 0:
        raise PreconditionError("T must be positive")
    C, K = _square(C, sys.n, "C"), _square(K, sys.n, "K")
    left, right = C @ pair.X(-T), K @ pair.X(T)
    M = left + right
    det = float(np.linalg.det(M))
    # scale by the summands: cancellation between them is what makes M_X singular
    scale = (fro(left) + fro(right)) ** sys.n
    invertible = bool(abs(det) > MX_THRESHOLD * scale and is_invertible(M))
    return BoundaryMatrix(M, det, invertible)


# (condition, W1 coefficients, W2 coefficients); each coefficient triple
# multiplies (X(t) M^-1 C Z(-T), X(t) M^-1 K Z(T), Z(t)).  Listed in the
# standard order; the first match wins on region boundaries.
BVP_REGIONS = (
    ("0 <= s <= t", lambda t, s: 0.0 <= s <= t, (0, -1, 1), (1, 0, 0)),
    ("0 <= -s <= t", lambda t, s: 0.0 <= -s <= t, (1, 0, 0), (0, -1, 1)),
    ("0 <= s <= -t", lambda t, s: 0.0 <= s <= -t, (0, -1, 0), (1, 0, -1)),
    ("0 <= -s <= -t", lambda t, s: 0.0 <= -s <= -t, (1, 0, -1), (0, -1, 0)),
    ("|t| <= s", lambda t, s: abs(t) <= s, (0, -1, 0), (1, 0, 0)),
    ("|t| <= -s", lambda t, s: abs(t) <= -s, (1, 0, 0), (0, -1, 0)),
)


def bvp_region(t, s):
    """Index (0-5) of the region containing ``(t, s)``."""
    for i, (_, cond, _, _) in enumerate(BVP_REGIONS):
        if cond(t, s):
            return i
    raise PreconditionError(f"no region contains (t, s) = ({t}, {s})")  # unreachable for finite input


class PiecewiseGreen:
    """Region-dispatching evaluator ``(t, s) -> G(t, s)``.

    Build with :meth:`ivp` or :meth:`bvp`.  Calling the object returns the
    ``n x n`` kernel (or the scalar entry for scalar operators).
    """

    def __init__(self, kind, problem, C=None, K=None, T=None, pair=None):
        if kind not in ("ivp", "bvp"):
            raise PreconditionError(f"unknown kind {kind!r}")
        self.kind = kind
        self.system, self.pair, self.scalar = _resolve(problem, pair)
        self._Pplus, self._Pminus = _stacks(self.system)
        self.C = self.K = self.T = self.M_X = None
        if kind == "bvp":
            if C is None or K is None or T is None:
                raise PreconditionError("bvp kernel needs C, K and T")
            n = self.system.n
            self.C, self.K, self.T = _square(C, n, "C"), _square(K, n, "K"), float(T)
            bm = mx_matrix(self.system, self.C, self.K, self.T, pair=self.pair)
            if not bm.invertible:
                raise UnsolvableBVPError(f"M_X is singular (det = {bm.det:.3e})")
            self.M_X = bm.matrix
            Minv = np.linalg.inv(self.M_X)
            self._MC = Minv @ self.C @ self.pair.Z(-self.T)
            self._MK = Minv @ self.K @ self.pair.Z(self.T)

    @classmethod
    def ivp(cls, problem, pair=None):
        return cls("ivp", problem, pair=pair)

    @classmethod
    def bvp(cls, problem, C, K, T, pair=None):
        return cls("bvp", problem, C, K, T, pair=pair)

    def _check_domain(self, t, s):
        lim = self.T * (1 + DOMAIN_SLACK)
        if abs(t) > lim or abs(s) > lim:
            raise PreconditionError(f"(t, s) = ({t}, {s}) lies outside [-T, T]^2 with T = {self.T}")

    def weights(self, t):
        """``(a, k, z)`` at ``t``: ``X(t) M^-1 C Z(-T)``, ``X(t) M^-1 K Z(T)``, ``Z(t)``."""
        Xt = self.pair.X(t)
        return Xt @ self._MC, Xt @ self._MK, self.pair.Z(t)

    def _bvp_kernel(self, t, s, abz):
        _, _, c1, c2 = BVP_REGIONS[bvp_region(t, s)]
        W1 = sum(c * m for c, m in zip(c1, abz) if c)
        W2 = sum(c * m for c, m in zip(c2, abz) if c)
        out = 0.0
        if not np.isscalar(W1):
            out = out + W1 @ checked_block_inverse(self.pair, s) @ self._Pplus
        if not np.isscalar(W2):
            out = out + W2 @ checked_block_inverse(self.pair, -s) @ self._Pminus
        return 0.5 * out

    def matrix(self, t, s):
        """Full ``n x n`` kernel, also for scalar operators."""
        t, s = float(t), float(s)
        if self.kind == "ivp":
            return _ivp_kernel(self.pair, self.pair.Z(t), t, s, self._Pplus, self._Pminus)
        self._check_domain(t, s)
        return self._bvp_kernel(t, s, self.weights(t))

    def __call__(self, t, s):
        G = self.matrix(t, s)
        return float(G[0, -1]) if self.scalar else G

    def grid(self, ts, ss):
        """Array of shape ``(len(ts), len(ss), n, n)``."""
        return np.array([[self.matrix(t, s) for s in ss] for t in ts])


def green_bvp(problem, C, K, T, t, s, *, pair=None):
    """Kernel of ``F u'(t) + G u'(-t) + A u(t) + B u(-t) = gamma``,
    ``C u(-T) + K u(T) = delta`` at ``(t, s)`` in ``[-T, T]^2``.

    Raises:
        UnsolvableBVPError: ``M_X`` is singular.
    """
    return PiecewiseGreen.bvp(problem, C, K, T, pair=pair)(t, s)


def solve_bvp(problem, C, K, T, gamma, delta, t, *, tol=QUAD_TOL, pair=None, kernel=None):
    """``u(t) = X(t) M_X^-1 delta + int_{-T}^{T} G(t, s) gamma(s) ds``.

    The integral is split at ``-|t|``, ``0`` and ``|t|`` where the kernel has
    jumps.  Pass ``kernel`` (a bvp :class:`PiecewiseGreen`) to reuse ``M_X``
    and cached evaluations across many ``t``.
    """
    if kernel is None:
        kernel = PiecewiseGreen.bvp(problem, C, K, T, pair=pair)
    sys, n, scalar = kernel.system, kernel.system.n, kernel.scalar
    gamma = _lift_scalar_forcing(gamma, n) if scalar else as_forcing(gamma, n)
    delta = _lift_scalar_vector(delta, n, "delta") if scalar else np.asarray(delta, float).reshape(n)
    t = float(t)
    T = kernel.T
    kernel._check_domain(t, 0.0)
    abz = kernel.weights(t)
    a = abs(t)
    # evaluate each panel strictly inside its region
    panels = [(-T, -a), (-a, 0.0), (0.0, a), (a, T)]
    total = np.zeros(n)
    for lo, hi in panels:
        if hi <= lo:
            continue
        mid = 0.5 * (lo + hi)
        _, _, c1, c2 = BVP_REGIONS[bvp_region(t, mid)]
        W1 = sum(c * m for c, m in zip(c1, abz) if c)
        W2 = sum(c * m for c, m in zip(c2, abz) if c)

        def integrand(s, W1=W1, W2=W2):
            g = gamma(s)
            out = np.zeros(n)
            if not np.isscalar(W1):
                out += W1 @ (checked_block_inverse(kernel.pair, s) @ (kernel._Pplus @ g))
            if not np.isscalar(W2):
                out += W2 @ (checked_block_inverse(kernel.pair, -s) @ (kernel._Pminus @ g))
            return 0.5 * out

        total += adaptive_simpson(integrand, lo, hi, tol / 4)
    u = kernel.pair.X(t) @ np.linalg.solve(kernel.M_X, delta) + total
    return float(u[0]) if scalar else u


__all__ = [
    "green_ivp",
    "solve_ivp",
    "mx_matrix",
    "BoundaryMatrix",
    "green_bvp",
    "solve_bvp",
    "PiecewiseGreen",
    "BVP_REGIONS",
    "bvp_region",
]
