"""Univariate polynomials with exact rational coefficients, plus a numeric
root finder (Aberth-Ehrlich) for their double-precision images."""

from __future__ import annotations

import cmath
import warnings
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

from .errors import ConvergenceError

CLUSTER_RADIUS = 1e-6


def to_fraction(x):
    """Exact conversion; floats go through their shortest decimal repr so
    that ``0.1`` becomes ``1/10``."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, np.integer):
        return Fraction(int(x))
    if isinstance(x, np.floating):
        return Fraction(repr(float(x)))
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def _trim(coeffs):
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


@dataclass(frozen=True)
class RationalPoly:
    """Polynomial ``sum_k coeffs[k] * D**k`` with trailing zeros trimmed."""

    coeffs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(to_fraction(c) for c in self.coeffs))

    @classmethod
    def constant(cls, c):
        return cls((c,))

    @classmethod
    def monomial(cls, k, c=1):
        return cls((0,) * k + (c,))

    @property
    def degree(self):
        """Degree, with ``-1`` for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def coeff(self, k):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    @property
    def lead(self):
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __add__(self, other):
        other = _coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return RationalPoly(self.coeff(k) + other.coeff(k) for k in range(n))

    __radd__ = __add__

    def __neg__(self):
        return RationalPoly(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        if self.is_zero() or other.is_zero():
            return RationalPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return RationalPoly(out)

    __rmul__ = __mul__

    def reflect(self):
        """``P(-D)``."""
        return RationalPoly(c if k % 2 == 0 else -c for k, c in enumerate(self.coeffs))

    def monic(self):
        if self.is_zero():
            return self
        lead = self.lead
        return RationalPoly(c / lead for c in self.coeffs)

    def divmod(self, other):
        other = _coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        quot = [Fraction(0)] * max(len(rem) - dq, 0)
        lead = other.lead
        for k in range(len(rem) - 1, dq - 1, -1):
            c = rem[k] / lead
            if c:
                quot[k - dq] = c
                for j, b in enumerate(other.coeffs):
                    rem[k - dq + j] -= c * b
        return RationalPoly(quot), RationalPoly(rem[:dq] if dq > 0 else ())

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def derivative(self):
        return RationalPoly(k * c for k, c in enumerate(self.coeffs) if k > 0)

    def __call__(self, x):
        """Horner evaluation at a float/complex (or exact) point."""
        acc = 0
        if isinstance(x, (Fraction, int)):
            for c in reversed(self.coeffs):
                acc = acc * x + c
            return acc
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc

    def height(self):
        return max((abs(float(c)) for c in self.coeffs), default=0.0)

    def to_float(self):
        return np.array([float(c) for c in self.coeffs])

    def is_even(self):
        return all(c == 0 for c in self.coeffs[1::2])

    def substitute_square_root(self):
        """For an even polynomial ``P(D) = S(D**2)`` return ``S``."""
        if not self.is_even():
            raise ValueError("polynomial has odd-degree terms")
        return RationalPoly(self.coeffs[0::2])

    def format(self, var="D"):
        if self.is_zero():
            return "0"
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if k == 0:
                body = str(mag)
            else:
                mono = var if k == 1 else f"{var}^{k}"
                body = mono if mag == 1 else f"{mag}*{mono}"
            parts.append((sign, body))
        first_sign, first = parts[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __str__(self):
        return self.format()


def _coerce(x):
    if isinstance(x, RationalPoly):
        return x
    return RationalPoly.constant(x)


def gcd(*polys):
    """Monic greatest common divisor (zero polynomials are ignored)."""
    g = RationalPoly()
    for p in polys:
        p = _coerce(p)
        a, b = g, p
        while not b.is_zero():
            a, b = b, a % b
        g = a
    return g.monic()


def squarefree_decomposition(p):
    """Yun's algorithm: list of ``(factor, multiplicity)`` with monic,
    squarefree, pairwise coprime factors whose product (with multiplicity)
    is ``p`` up to its leading coefficient."""
    p = _coerce(p).monic()
    if p.degree <= 0:
        return []
    out = []
    dp = p.derivative()
    a = gcd(p, dp)
    b = p // a
    c = dp // a
    d = c - b.derivative()
    i = 1
    while b.degree > 0:
        a = gcd(b, d)
        if a.degree > 0:
            out.append((a, i))
        b = b // a
        c = d // a
        d = c - b.derivative()
        i += 1
    return out


def _horner_with_derivative(coeffs, z):
    p = 0j
    dp = 0j
    for c in reversed(coeffs):
        dp = dp * z + p
        p = p * z + c
    return p, dp


def aberth_roots(coeffs, tol=1e-15, max_iter=500):
    """All complex roots of ``sum coeffs[k] x**k`` (float coefficients,
    ascending powers) by the Aberth-Ehrlich simultaneous iteration.

    Intended for squarefree input; multiple roots converge only linearly.
    """
    coeffs = np.trim_zeros(np.asarray(coeffs, dtype=complex), "b")
    n = len(coeffs) - 1
    if n < 1:
        return np.array([], dtype=complex)
    coeffs = coeffs / coeffs[-1]
    if n == 1:
        return np.array([-coeffs[0]])
    # Fujiwara-style bound for the initial circle
    radius = 2.0 * max(abs(coeffs[n - k]) ** (1.0 / k) for k in range(1, n + 1))
    radius = max(radius, 1e-3)
    z = np.array([radius * cmath.exp(1j * (2 * np.pi * k / n + 0.4)) for k in range(n)])
    for _ in range(max_iter):
        done = True
        for k in range(n):
            p, dp = _horner_with_derivative(coeffs, z[k])
            if p == 0:
                continue
            ratio = p / dp if dp != 0 else p
            s = sum(1.0 / (z[k] - z[j]) for j in range(n) if j != k)
            w = ratio / (1.0 - ratio * s)
            z[k] -= w
            if abs(w) > tol * max(abs(z[k]), 1.0):
                done = False
        if done:
            break
    else:
        raise ConvergenceError("Aberth-Ehrlich iteration did not converge")
    return z


def roots_with_multiplicity(p, cluster_radius=CLUSTER_RADIUS):
    """Numeric roots of an exact polynomial with exact multiplicities.

    Multiplicities come from the squarefree decomposition; each squarefree
    factor is solved with :func:`aberth_roots` and polished by Newton steps
    on that factor.  Roots of different factors closer than
    ``cluster_radius`` trigger a warning, since the multiplicity assignment
    is then numerically ambiguous.
    """
    out = []
    for factor, mult in squarefree_decomposition(p):
        fc = factor.to_float()
        for z in aberth_roots(fc):
            for _ in range(3):
                v, dv = _horner_with_derivative(fc, z)
                if dv == 0:
                    break
                z = z - v / dv
            out.append((complex(z), mult))
    for i in range(len(out)):
        for j in range(i + 1, len(out)):
            d = abs(out[i][0] - out[j][0])
            if d < cluster_radius:
                warnings.warn(
                    f"roots {out[i][0]:.6g} and {out[j][0]:.6g} are {d:.2e} apart, "
                    f"inside the cluster radius {cluster_radius:.0e}",
                    RuntimeWarning,
                    stacklevel=2,
                )
    return out
