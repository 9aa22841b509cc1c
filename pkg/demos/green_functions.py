"""
Green's functions and forced problems
=====================================

Solve ``x'(t) + x(-t) = h(t)`` on ``[-1, 1]`` with ``x(-1) = x(1)`` through
its Green's function, then check the answer by shooting on the doubled
ordinary system.  The second half solves a forced 2x2 initial value problem
by variation of parameters.
"""

import math

import numpy as np

from reflectode import PiecewiseGreen, ReflectionOperator, ReflectionSystem, green_bvp, solve_bvp, vp_solve_grid
from reflectode.oracle import ivp_oracle, residual, shoot_bvp

m, T = 1.0, 1.0
L = ReflectionOperator.from_coefficients(a=[0, 1], b=[m])
C, K = [[1.0]], [[-1.0]]

# closed form on the region |s| < t: (cos m(T-s-t) + sin m(T+s-t)) / (2 sin mT)
t, s = 0.5, 0.25
print("G(0.5, 0.25) =", green_bvp(L, C, K, T, t, s))
print("closed form  =", (math.cos(m * (T - s - t)) + math.sin(m * (T + s - t))) / (2 * math.sin(m * T)))

kernel = PiecewiseGreen.bvp(L, C, K, T)
ts = np.linspace(-T, T, 9)
x = np.array([solve_bvp(L, None, None, None, math.sin, [0.0], t, kernel=kernel) for t in ts])

scalar = ReflectionSystem.scalar(1.0, 0.0, 0.0, m)
shot = shoot_bvp(scalar, lambda t: [math.sin(t)], C, K, T, [0.0])
print("x(-1) - x(1)       =", f"{x[0] - x[-1]:.2e}")
print("max |x - shooting| =", f"{max(abs(x[i] - shot(t)[0]) for i, t in enumerate(ts)):.2e}")
u = lambda t: solve_bvp(L, None, None, None, math.sin, [0.0], t, kernel=kernel)  # noqa: E731
print("equation residual  =", f"{residual(scalar, lambda t: [math.sin(t)], u, np.linspace(-0.9, 0.9, 7)):.2e}")

# %%
# Variation of parameters
# -----------------------
# u' = 2.25 v(-t) + 1, v' = u(-t) + t, u(0) = (1, 0).  The forcing is split
# into even and odd parts; each part is carried by a different column block
# of the 4x4 block matrix.

sys2 = ReflectionSystem(np.eye(2), np.zeros((2, 2)), np.zeros((2, 2)), np.array([[0.0, -2.25], [-1.0, 0.0]]))
gamma = lambda t: [1.0, t]  # noqa: E731
c = [1.0, 0.0]
ts = np.linspace(-2, 2, 9)
us = vp_solve_grid(sys2, gamma, c, ts)
oracle = ivp_oracle(sys2, gamma, c, 2.0)
for t, u in zip(ts, us):
    print(f"t = {t:5.2f}  u = {np.round(u, 8)}  |u - RK4| = {np.linalg.norm(u - oracle(t)):.1e}")
