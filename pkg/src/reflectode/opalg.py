"""Exact algebra of operators ``L = phi* P(D) + Q(D)``.

``D`` is differentiation and ``phi*`` the reflection ``u(t) -> u(-t)``.  The
two generate a non-commutative algebra with ``D^k phi* = (-1)^k phi* D^k``,
so every element has the normal form ``phi* P(D) + Q(D)``.

A scalar equation ``sum a_k u^(k)(t) + sum b_k u^(k)(-t) = 0`` corresponds to
``Q = sum a_k D^k`` and ``P = sum b_k D^k``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ConvergenceError, UnsupportedCaseError
from .exppoly import COS, PLAIN, SIN, ExpPoly
from .poly import RationalPoly, gcd, roots_with_multiplicity

BASIS_TOL = 1e-8
XI_TOL = 1e-9
RANK_RTOL = 1e-8
CANDIDATE_RTOL = 1e-10


@dataclass(frozen=True)
class ReflectionOperator:
    """``phi* P(D) + Q(D)`` with exact rational coefficients."""

    P: RationalPoly = RationalPoly()
    Q: RationalPoly = RationalPoly()

    @classmethod
    def from_coefficients(cls, a=(), b=()):
        """Build from ``a_k`` (pure derivative part) and ``b_k`` (reflected part)."""
        return cls(P=RationalPoly(b), Q=RationalPoly(a))

    @classmethod
    def D(cls, k=1):
        return cls(Q=RationalPoly.monomial(k))

    @classmethod
    def phi(cls):
        return cls(P=RationalPoly.constant(1))

    @property
    def order(self):
        return max(self.P.degree, self.Q.degree)

    def a(self, k):
        return self.Q.coeff(k)

    def b(self, k):
        return self.P.coeff(k)

    def is_zero(self):
        return self.P.is_zero() and self.Q.is_zero()

    def is_pure_derivative(self):
        return self.P.is_zero()

    def __add__(self, other):
        return ReflectionOperator(self.P + other.P, self.Q + other.Q)

    def __sub__(self, other):
        return ReflectionOperator(self.P - other.P, self.Q - other.Q)

    def __neg__(self):
        return ReflectionOperator(-self.P, -self.Q)

    def scale(self, c):
        return ReflectionOperator(self.P * c, self.Q * c)

    def __matmul__(self, other):
        return compose(self, other)

    def __call__(self, f):
        return apply_to_exppoly(self, f)

    def format(self):
        parts = []
        if not self.P.is_zero():
            parts.append(f"phi*[{self.P.format()}]")
        if not self.Q.is_zero():
            parts.append(f"[{self.Q.format()}]")
        return " + ".join(parts) if parts else "0"

    def __str__(self):
        return self.format()


def compose(L1, L2):
    """``L1 L2`` in the normal form, using ``P(D) phi* = phi* P(-D)``.

    ``(phi* P1 + Q1)(phi* P2 + Q2) = phi* (P1 Q2 + Q1(-D) P2) + (P1(-D) P2 + Q1 Q2)``.
    """
    P = L1.P * L2.Q + L1.Q.reflect() * L2.P
    Q = L1.P.reflect() * L2.P + L1.Q * L2.Q
    return ReflectionOperator(P, Q)


def reduction(L):
    """``L1 = phi* P(D) - Q(-D)``; both ``L1 L`` and ``L L1`` are free of ``phi*``."""
    return ReflectionOperator(L.P, -L.Q.reflect())


def refined_reduction(L):
    """Reduction after removing the common factor ``R``.

    Returns ``(Lhat, R)`` with ``R = gcd(P(D), Q(D), P(-D), Q(-D))`` (monic) and
    ``Lhat = phi* P~(D) - Q~(-D)`` where ``P~ = P/R`` and ``Q~ = Q/R``.

    The roots of that gcd are symmetric about zero, so ``R(-D) = (-1)^deg R R(D)``.
    When the degree is odd (zero is a root of odd multiplicity) one factor
    ``D`` is left out of ``R``; otherwise ``R`` would not commute with
    ``phi*`` and ``Lhat L`` would be neither even nor equal to ``L Lhat``.
    """
    if L.is_zero():
        raise ValueError("refined_reduction needs a nonzero operator")
    R = gcd(L.P, L.Q, L.P.reflect(), L.Q.reflect())
    if R.degree % 2:
        R, rem = R.divmod(RationalPoly([0, 1]))
        assert rem.is_zero()
    Pt, rp = L.P.divmod(R)
    Qt, rq = L.Q.divmod(R)
    assert rp.is_zero() and rq.is_zero()
    return ReflectionOperator(Pt, -Qt.reflect()), R


def composed_coefficients(L):
    """Coefficients ``c_k`` of ``L1 L`` from the closed formula.

    Odd ``c_k`` vanish; for even ``k``
    ``c_k = 2 sum_{l < k/2} (-1)^l (b_l b_{k-l} - a_l a_{k-l}) + (-1)^(k/2) (b_{k/2}^2 - a_{k/2}^2)``.
    """
    n = L.order
    if n < 0:
        return RationalPoly()
    a, b = L.a, L.b
    out = []
    for k in range(2 * n + 1):
        if k % 2:
            out.append(Fraction(0))
            continue
        h = k // 2
        s = sum(((-1) ** l) * (b(l) * b(k - l) - a(l) * a(k - l)) for l in range(h))
        out.append(2 * s + ((-1) ** h) * (b(h) ** 2 - a(h) ** 2))
    return RationalPoly(out)


def apply_to_exppoly(L, f):
    """``L f = phi*(P(D) f) + Q(D) f``, computed term by term."""
    return f.apply_poly(L.P.coeffs).reflect() + f.apply_poly(L.Q.coeffs)


@dataclass(frozen=True)
class RootGroup:
    """One ``+-`` class of roots of ``Lhat L``.

    ``root`` is the representative with nonnegative real part (``x + iy``
    with ``y >= 0``); ``multiplicity`` is the multiplicity of each member.
    """

    root: complex
    multiplicity: int

    @property
    def is_real(self):
        return self.root.imag == 0.0


def _root_groups(S):
    """Root classes of ``Lhat L`` from ``S`` where ``Lhat L = S(D^2)``."""
    groups = []
    for s, mult in roots_with_multiplicity(S):
        scale = 1.0 + abs(s)
        if abs(s) <= 1e-12 * max(1.0, S.height()):
            raise UnsupportedCaseError(
                "0 is a root of the reduced operator; the explicit basis is not "
                "defined in that case (the generators would repeat)"
            )
        if abs(s.imag) <= 1e-10 * scale:
            s = complex(s.real, 0.0)
            if s.real > 0:
                groups.append(RootGroup(complex(math.sqrt(s.real), 0.0), mult))
            else:
                groups.append(RootGroup(complex(0.0, math.sqrt(-s.real)), mult))
        elif s.imag > 0:
            # conjugate root s* yields the same real functions
            z = cmath.sqrt(s)
            groups.append(RootGroup(z, mult))
    return groups


def _xi(Pt, Qt, r):
    tol = XI_TOL * (1.0 + max(Pt.height(), Qt.height()))
    return -1 if abs(Pt(r)) <= tol and abs(Qt(-r)) <= tol else 1


def _generators(group, sign):
    z, mu = group.root, group.multiplicity
    x, y = z.real, z.imag
    gens = []
    for k in range(mu):
        if y == 0.0:
            gens.append(ExpPoly.exp(sign * x, power=k))
        else:
            gens.append(ExpPoly.sin(y, rate=sign * x, power=k))
            gens.append(ExpPoly.cos(y, rate=sign * x, power=k))
    return gens


def _vector(f, keys):
    return np.array([f.coefficient(*k) for k in keys])


def _select_independent(candidates, keys, m):
    chosen, rows = [], []
    for f in candidates:
        if f.is_zero():
            continue
        v = _vector(f, keys)
        v = v / np.max(np.abs(v))
        sv = np.linalg.svd(np.array(rows + [v]), compute_uv=False)
        if sv[-1] > RANK_RTOL * sv[0]:
            rows.append(v)
            chosen.append(f)
            if len(chosen) == m:
                break
    return chosen, rows


def _kernel_space(groups):
    """Standard exp-polynomial basis of the kernel of ``Lhat L``."""
    space = []
    for g in groups:
        space += _generators(g, 1) + _generators(g, -1)
    if any(g.root.imag != 0.0 and g.root.real == 0.0 for g in groups):
        # +-iy give the same real functions: drop the repeats
        unique = []
        for f in space:
            if f not in unique:
                unique.append(f)
        space = unique
    return space


def _restricted_kernel(L, space):
    """Null space of ``L`` restricted to ``span(space)``, as exp-polynomials."""
    images = [apply_to_exppoly(L, f) for f in space]
    keys = sorted(set().union(*(f.keys() for f in space + images)), key=str)
    M = np.column_stack([_vector(f, keys) for f in images])
    _, sv, vt = np.linalg.svd(M)
    # rank is judged against the size of L on this space, not against sv[0],
    # which is itself roundoff when L annihilates the whole span
    radius = max((abs(k[1]) + abs(k[2]) for k in keys), default=0.0)
    size = sum((abs(float(L.a(k))) + abs(float(L.b(k)))) * max(1.0, radius) ** k for k in range(L.order + 1))
    scale = max(sv[0] if sv.size else 0.0, size, np.finfo(float).tiny)
    rank = int(np.sum(sv > RANK_RTOL * scale))
    out = []
    for row in vt[rank:]:
        f = ExpPoly()
        for c, v in zip(row, space):
            f = f + v.scale(c)
        out.append(f.chop(1e-14))
    return out, keys


def solution_basis(L):
    """Real basis of the solutions of ``L u = 0`` as exp-polynomials.

    Candidates are the generators ``Lhat(t^k e^(xi(l) l t))`` and their
    sine/cosine analogues for complex roots of ``Lhat L``, with the sign rule
    ``xi(r) = -1`` iff ``P~(r) = Q~(-r) = 0``.  The generators with the
    opposite sign are appended as spares, since generators can coincide (for
    instance both trigonometric generators of an imaginary root pair).

    The target dimension is the nullity of ``L`` restricted to the kernel of
    ``Lhat L``, which contains every solution.  A rank pass keeps the first
    independent candidates; if they still fall short (this happens when the
    common factor ``R`` is nontrivial) the basis is completed from that null
    space.  Every returned function is checked to be annihilated by ``L``.
    """
    Lhat, _ = refined_reduction(L)
    prod = compose(Lhat, L)
    assert prod.P.is_zero()
    red = prod.Q
    if red.is_zero():
        raise UnsupportedCaseError("Lhat L vanishes identically; the kernel is not finite-dimensional")
    if red.degree == 0:
        return []
    if red.coeff(0) == 0:
        raise UnsupportedCaseError("zero is a root of Lhat L; polynomial solutions are not handled")
    groups = _root_groups(red.substitute_square_root())
    kernel, keys = _restricted_kernel(L, _kernel_space(groups))
    dim = len(kernel)
    Pt, Qt = Lhat.P, -Lhat.Q.reflect()
    primary, spare = [], []
    for g in groups:
        xi = _xi(Pt, Qt, g.root)
        primary += [apply_to_exppoly(Lhat, f) for f in _generators(g, xi)]
        spare += [apply_to_exppoly(Lhat, f) for f in _generators(g, -xi)]
    candidates = primary + spare
    # cancellation inside Lhat leaves roundoff-sized images; treat them as zero
    floor = CANDIDATE_RTOL * max((f.max_abs_coeff() for f in candidates), default=0.0)
    candidates = [f.chop(floor) for f in candidates]
    chosen, _ = _select_independent(candidates, keys, dim)
    if len(chosen) < dim:
        chosen, _ = _select_independent(chosen + kernel, keys, dim)
    if len(chosen) != dim:
        raise ConvergenceError(f"found {len(chosen)} independent solutions, expected {dim}")
    basis = [f.normalized().chop(1e-13) for f in chosen]
    for f in basis:
        residual = apply_to_exppoly(L, f).max_abs_coeff()
        if residual > BASIS_TOL * f.max_abs_coeff():
            raise ConvergenceError(f"basis element {f} leaves residual {residual:.3e}")
    return basis


def reduced_half_degree(L):
    """``deg(Lhat L) / 2``."""
    Lhat, _ = refined_reduction(L)
    return compose(Lhat, L).Q.degree // 2


__all__ = [
    "ReflectionOperator",
    "compose",
    "reduction",
    "refined_reduction",
    "composed_coefficients",
    "apply_to_exppoly",
    "solution_basis",
    "reduced_half_degree",
    "COS",
    "SIN",
    "PLAIN",
]
