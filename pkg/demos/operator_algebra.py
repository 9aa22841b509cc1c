"""
Removing the reflection from a scalar operator
==============================================

An operator ``L = phi* P(D) + Q(D)`` mixes ``u(t)`` and ``u(-t)``.  Composing
it with a companion operator gives an ordinary constant-coefficient operator
whose kernel contains the kernel of ``L``.  This script walks through that
on two equations.
"""

import numpy as np

from reflectode import (
    ExpPoly,
    ReflectionOperator,
    apply_to_exppoly,
    compose,
    reduction,
    refined_reduction,
    solution_basis,
)

# x'(t) + 2 x(-t): a = coefficients of u^(k)(t), b = coefficients of u^(k)(-t)
L = ReflectionOperator.from_coefficients(a=[0, 1], b=[2])
L1 = reduction(L)
print("L        =", L)
print("L1       =", L1)
print("L1 L     =", compose(L1, L))  # D^2 + 4, no reflection left

# the kernel of L is one-dimensional inside span{cos 2t, sin 2t}
(f,) = solution_basis(L)
print("basis    =", f)
print("L f      =", apply_to_exppoly(L, f).max_abs_coeff())

ts = np.linspace(-1, 1, 5)
print("f(t)/(cos 2t - sin 2t) =", np.round(f(ts) / (np.cos(2 * ts) - np.sin(2 * ts)), 12))

# %%
# A fourth-order operator with a common factor
# --------------------------------------------
# (2 + phi*)(D^4 - 16) shares D^4 - 16 between its two parts.  The refined
# reduction pulls that factor out before composing, and the kernel is the
# whole of span{cos 2t, sin 2t, cosh 2t, sinh 2t}.

L = ReflectionOperator.from_coefficients(a=[-32, 0, 0, 0, 2], b=[-16, 0, 0, 0, 1])
Lhat, R = refined_reduction(L)
print("\nL        =", L)
print("common R =", R.format())
print("Lhat L   =", compose(Lhat, L))
basis = solution_basis(L)
print("dim ker L =", len(basis))
for g in basis:
    print("  ", g, "  residual", apply_to_exppoly(L, g).max_abs_coeff())

cosh2 = ExpPoly.exp(2.0) + ExpPoly.exp(-2.0)
print("L cosh 2t =", apply_to_exppoly(L, cosh2).max_abs_coeff())
