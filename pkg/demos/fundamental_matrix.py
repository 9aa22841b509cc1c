"""
Fundamental matrices that go singular
=====================================

For ordinary systems a fundamental matrix is invertible everywhere.  With a
reflection term it need not be.  The swap system ``u' = beta v(-t)``,
``v' = gamma u(-t)`` has ``det X(t) = cos(2 sqrt(beta gamma) t)``.
"""

import math

import numpy as np

from reflectode import FundamentalPair, ReflectionSystem, fundamental_series, singular_locus
from reflectode.oracle import fundamental_oracle

beta, gamma = 4.0, 1.0
z = np.zeros((2, 2))
swap = ReflectionSystem(np.eye(2), z, z, np.array([[0.0, -beta], [-gamma, 0.0]]))
w = math.sqrt(beta * gamma)

for t in (0.0, 0.2, 0.5):
    X = fundamental_series(swap, t)
    print(f"t = {t:4.1f}  det X = {np.linalg.det(X): .12f}  cos(2wt) = {math.cos(2 * w * t): .12f}")

roots = singular_locus(swap, (-2.0, 2.0), 0.05)
print("singular points in [-2, 2]:", np.round(roots, 10))
print("first positive zero, expected pi/(4w) =", math.pi / (4 * w))

# %%
# Cross-check against the doubled ordinary system
# -----------------------------------------------
# (u(t), u(-t)) solves an ordinary linear system of twice the size, which
# a plain RK4 integrator handles.

oracle = fundamental_oracle(swap, 2.0)
diff = max(np.abs(fundamental_series(swap, t) - oracle(t)).max() for t in np.linspace(-2, 2, 41))
print("max |series - RK4| on [-2, 2]:", f"{diff:.2e}")

# %%
# The block matrix stays invertible
# ---------------------------------
# Variation of parameters needs [[X_e, Y_o], [X_o, Y_e]] rather than X.  It
# is exp(tK) for a trace-free K, so its determinant is 1 even where X is
# singular, for commuting and non-commuting coefficients alike.

pair = FundamentalPair(swap)
print("det block at the first singular point of X:", pair.block_det(math.pi / (4 * w)))

A = np.array([[0.5, 1.0], [1.0, 0.0]])
B = np.array([[-0.5, 0.0], [0.0, 0.0]])
skew = ReflectionSystem(np.eye(2), z, A, B)
pair = FundamentalPair(skew)
print("M+ M- - M- M+ =", np.round(skew.Mplus @ skew.Mminus - skew.Mminus @ skew.Mplus, 3).tolist())
for t in (0.0, 1.0, 2.0):
    X, Xm, Y, Ym = pair.X(t), pair.X(-t), pair.Y(t), pair.Y(-t)
    defect = (X + Xm) @ (Y + Ym) / 4 - (X - Xm) @ (Y - Ym) / 4 - np.eye(2)
    print(f"t = {t}  det block = {pair.block_det(t):.12f}  |XeYe - XoYo - Id| = {np.linalg.norm(defect):.3f}")
