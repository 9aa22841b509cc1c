"""Brute-force verification by way of the doubled ordinary system.

With ``w(t) = (u(t), u(-t))`` a system with reflection becomes the ordinary
linear system

    [[F, -G], [G, -F]] w' + [[A, B], [B, A]] w = (gamma(t), gamma(-t)),

which is integrated here with fixed-step classical Runge-Kutta.  Any ``w``
with ``v(0) = u(0)`` keeps ``v(t) = u(-t)``; this is checked, not imposed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .varpar import as_forcing

RESIDUAL_STEP = 1e-5
H_REL = 1e-4
H_MIN, H_MAX = 1e-6, 1e-3


@dataclass(frozen=True)
class DoubledODE:
    """``w' = coefficient @ w + forcing(t)`` in dimension ``2n``."""

    coefficient: np.ndarray
    J: np.ndarray
    forcing: object = None

    @property
    def dim(self):
        return self.coefficient.shape[0]

    def rhs(self, t, w):
        out = self.coefficient @ w
        if self.forcing is not None:
            g = self.forcing(t)
            out = out + (g if out.ndim == 1 else g[:, None])
        return out


def lift(sys, gamma=None):
    """Doubled system of ``sys`` with optional forcing ``gamma``."""
    F, G, A, B = sys.F, sys.G, sys.A, sys.B
    J = np.block([[F, -G], [G, -F]])
    rhs = np.block([[A, B], [B, A]])
    coefficient = -np.linalg.solve(J, rhs)
    forcing = None
    if gamma is not None:
        gamma = as_forcing(gamma, sys.n)
        Jinv = np.linalg.inv(J)

        def forcing(t):
            return Jinv @ np.concatenate([gamma(t), gamma(-t)])

    return DoubledODE(coefficient, J, forcing)


def default_step(t_end):
    return float(np.clip(H_REL * abs(t_end), H_MIN, H_MAX))


def _rk4_maps(K, h):
    """Exact linear maps of one RK4 step: ``w+ = Phi w + G0 g0 + Gm gm + G1 g1``."""
    m = K.shape[0]
    eye = np.eye(m)
    zero = np.zeros((m, m))

    def step(w, g0, gm, g1):
        k1 = K @ w + g0
        k2 = K @ (w + 0.5 * h * k1) + gm
        k3 = K @ (w + 0.5 * h * k2) + gm
        k4 = K @ (w + h * k3) + g1
        return w + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    Phi = step(eye, zero, zero, zero)
    G0 = step(zero, eye, zero, zero)
    Gm = step(zero, zero, eye, zero)
    G1 = step(zero, zero, zero, eye)
    return Phi, G0, Gm, G1


class Trajectory:
    """Grid values of ``w`` with cubic Hermite dense output.

    ``w0`` may be a vector or a matrix (one trajectory per column).
    """

    def __init__(self, ode, times, states, forcing_values=None):
        self.ode = ode
        self.times = times
        self.states = states
        K = ode.coefficient
        if states.ndim == 2:
            derivs = states @ K.T
        else:
            derivs = np.einsum("ij,njk->nik", K, states)
        if forcing_values is not None:
            derivs = derivs + (forcing_values if states.ndim == 2 else forcing_values[:, :, None])
        self.derivs = derivs
        self._ascending = times[-1] >= times[0]

    @property
    def t_end(self):
        return float(self.times[-1])

    def __call__(self, t):
        t = float(t)
        ts = self.times if self._ascending else self.times[::-1]
        lo_t, hi_t = ts[0], ts[-1]
        if t < lo_t - 1e-12 or t > hi_t + 1e-12:
            raise PreconditionError(f"t = {t} outside the integrated range [{lo_t}, {hi_t}]")
        i = int(np.searchsorted(ts, t, side="right")) - 1
        i = min(max(i, 0), len(ts) - 2)
        if not self._ascending:
            i = len(ts) - 2 - i
        t0, t1 = self.times[i], self.times[i + 1]
        h = t1 - t0
        if h == 0.0:
            return self.states[i].copy()
        x = (t - t0) / h
        h00 = (1 + 2 * x) * (1 - x) ** 2
        h10 = x * (1 - x) ** 2
        h01 = x * x * (3 - 2 * x)
        h11 = x * x * (x - 1)
        return (
            h00 * self.states[i]
            + h10 * h * self.derivs[i]
            + h01 * self.states[i + 1]
            + h11 * h * self.derivs[i + 1]
        )

    def u(self, t):
        """``u(t)`` for ``t`` of either sign, read from ``v`` on the far side."""
        n = self.ode.dim // 2
        t = float(t)
        if t == 0.0 or (t > 0) == (self.t_end > 0):
            return self(t)[:n]
        return self(-t)[n:]


def integrate(ode, w0, t_end, h=None):
    """Classical RK4 with fixed step from 0 to ``t_end`` (either sign).

    The default step is ``1e-4 |t_end|`` clamped to ``[1e-6, 1e-3]``; the
    last step is shortened to land on ``t_end``.
    """
    w0 = np.asarray(w0, dtype=float)
    if w0.shape[0] != ode.dim:
        raise PreconditionError(f"w0 has leading dimension {w0.shape[0]}, expected {ode.dim}")
    t_end = float(t_end)
    if h is None:
        h = default_step(t_end)
    if h <= 0:
        raise PreconditionError("h must be positive")
    if t_end == 0.0:
        g0 = None if ode.forcing is None else np.array([ode.forcing(0.0)] * 2)
        return Trajectory(ode, np.array([0.0, 0.0]), np.array([w0, w0]), g0)
    steps = max(1, int(np.ceil(abs(t_end) / h - 1e-9)))
    hs = t_end / steps
    times = np.linspace(0.0, t_end, steps + 1)
    K = ode.coefficient
    Phi, G0, Gm, G1 = _rk4_maps(K, hs)
    states = np.empty((steps + 1,) + w0.shape)
    states[0] = w0
    w = w0
    g = None
    if ode.forcing is None:
        for i in range(steps):
            w = Phi @ w
            states[i + 1] = w
    else:
        g = np.array([ode.forcing(t) for t in times])
        gm = np.array([ode.forcing(t + 0.5 * hs) for t in times[:-1]])
        drive = g[:-1] @ G0.T + gm @ Gm.T + g[1:] @ G1.T
        if w0.ndim == 2:
            drive = drive[:, :, None]
        for i in range(steps):
            w = Phi @ w + drive[i]
            states[i + 1] = w
    return Trajectory(ode, times, states, g)


def fundamental_oracle(sys, t_max, h=None):
    """Callable ``t -> X(t)`` on ``[-t_max, t_max]`` from the doubled system
    started at ``(Id, Id)``."""
    ode = lift(sys)
    n = sys.n
    w0 = np.vstack([np.eye(n), np.eye(n)])
    traj = integrate(ode, w0, abs(t_max), h)
    return traj.u


def ivp_oracle(sys, gamma, c, t_max, h=None):
    """Callable ``t -> u(t)`` on ``[-t_max, t_max]`` for ``u(0) = c``.

    Integrates forward and backward so that both halves use ``u`` directly.
    """
    c = np.asarray(c, dtype=float).reshape(sys.n)
    ode = lift(sys, gamma)
    w0 = np.concatenate([c, c])
    fwd = integrate(ode, w0, abs(t_max), h)
    bwd = integrate(ode, w0, -abs(t_max), h)
    n = sys.n

    def u(t):
        t = float(t)
        return (fwd(t) if t >= 0 else bwd(t))[:n]

    u.forward, u.backward = fwd, bwd
    return u


def shoot_bvp(sys, gamma, C, K, T, delta, h=None):
    """Callable ``t -> u(t)`` solving ``C u(-T) + K u(T) = delta`` by linear
    shooting on the doubled system."""
    n = sys.n
    C = np.atleast_2d(np.asarray(C, dtype=float))
    K = np.atleast_2d(np.asarray(K, dtype=float))
    delta = np.asarray(delta, dtype=float).reshape(n)
    hom = fundamental_oracle(sys, T, h)
    part = ivp_oracle(sys, gamma, np.zeros(n), T, h)
    M = C @ hom(-T) + K @ hom(T)
    c = np.linalg.solve(M, delta - C @ part(-T) - K @ part(T))
    return ivp_oracle(sys, gamma, c, T, h)


def residual(sys, gamma, u, grid, h=RESIDUAL_STEP):
    """Max over ``grid`` of ``|F u'(t) + G u'(-t) + A u(t) + B u(-t) - gamma(t)|_inf``
    with central differences of step ``h``, divided by ``1 + max |u|`` (the
    max over all ``u(+-t)`` used)."""
    gamma = as_forcing(gamma, sys.n)

    def U(t):
        return np.atleast_1d(np.asarray(u(t), dtype=float)).reshape(sys.n)

    def dU(t):
        return (U(t + h) - U(t - h)) / (2.0 * h)

    worst, size = 0.0, 0.0
    for t in grid:
        t = float(t)
        up, um = U(t), U(-t)
        size = max(size, float(np.max(np.abs(up))), float(np.max(np.abs(um))))
        r = sys.F @ dU(t) + sys.G @ dU(-t) + sys.A @ up + sys.B @ um - gamma(t)
        worst = max(worst, float(np.max(np.abs(r))))
    return worst / (1.0 + size)


__all__ = [
    "DoubledODE",
    "lift",
    "integrate",
    "Trajectory",
    "default_step",
    "fundamental_oracle",
    "ivp_oracle",
    "shoot_bvp",
    "residual",
]
