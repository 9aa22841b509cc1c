"""Exponential polynomials: finite sums of ``c t^k e^(a t) {1, cos(b t), sin(b t)}``.

The class is closed under differentiation and under the reflection
``t -> -t``, which is all the operator algebra needs.
"""

from __future__ import annotations

import numpy as np

PLAIN, COS, SIN = "plain", "cos", "sin"
_KIND_ORDER = {PLAIN: 0, COS: 1, SIN: 2}


def _clean(x):
    # -0.0 and 0.0 must map to the same key and print the same way
    return float(x) + 0.0


class ExpPoly:
    """Canonical sum of exp-polynomial terms.

    Terms are stored as a mapping ``(power, rate, freq, kind) -> coeff``.
    Canonical form: ``freq > 0`` for trigonometric kinds, ``freq == 0`` for
    plain terms and no zero coefficients.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms=()):
        acc = {}
        items = terms.items() if isinstance(terms, dict) else terms
        for item in items:
            if isinstance(terms, dict):
                (power, rate, freq, kind), coeff = item
            else:
                coeff, power, rate, freq, kind = item
            for key, c in _canonical_term(coeff, power, rate, freq, kind):
                acc[key] = acc.get(key, 0.0) + c
        self._terms = {k: v for k, v in acc.items() if v != 0.0}

    @classmethod
    def exp(cls, rate, power=0, coeff=1.0):
        return cls([(coeff, power, rate, 0.0, PLAIN)])

    @classmethod
    def cos(cls, freq, rate=0.0, power=0, coeff=1.0):
        return cls([(coeff, power, rate, freq, COS)])

    @classmethod
    def sin(cls, freq, rate=0.0, power=0, coeff=1.0):
        return cls([(coeff, power, rate, freq, SIN)])

    @property
    def terms(self):
        """Sorted list of ``(coeff, power, rate, freq, kind)`` tuples."""
        keys = sorted(self._terms, key=_sort_key)
        return [(self._terms[k],) + k for k in keys]

    def keys(self):
        return set(self._terms)

    def coefficient(self, power, rate, freq, kind):
        return self._terms.get((power, _clean(rate), _clean(freq), kind), 0.0)

    def max_abs_coeff(self):
        return max((abs(c) for c in self._terms.values()), default=0.0)

    def is_zero(self):
        return not self._terms

    def __len__(self):
        return len(self._terms)

    def __add__(self, other):
        merged = dict(self._terms)
        for k, v in other._terms.items():
            merged[k] = merged.get(k, 0.0) + v
        return ExpPoly(merged)

    def __neg__(self):
        return self.scale(-1.0)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = float(c)
        return ExpPoly({k: c * v for k, v in self._terms.items()})

    __rmul__ = scale

    def __mul__(self, c):
        return self.scale(c)

    def __eq__(self, other):
        if not isinstance(other, ExpPoly):
            return NotImplemented
        return self._terms == other._terms

    def derivative(self):
        out = []
        for (k, a, b, kind), c in self._terms.items():
            if k > 0:
                out.append((c * k, k - 1, a, b, kind))
            if a != 0.0:
                out.append((c * a, k, a, b, kind))
            if kind == COS:
                out.append((-c * b, k, a, b, SIN))
            elif kind == SIN:
                out.append((c * b, k, a, b, COS))
        return ExpPoly(out)

    def reflect(self):
        """``f(-t)``."""
        out = []
        for (k, a, b, kind), c in self._terms.items():
            sign = -1.0 if k % 2 else 1.0
            if kind == SIN:
                sign = -sign
            out.append((sign * c, k, -a, b, kind))
        return ExpPoly(out)

    def apply_poly(self, coeffs):
        """``sum_k coeffs[k] D^k f`` for numeric (or Fraction) coefficients."""
        total = ExpPoly()
        deriv = self
        for k, c in enumerate(coeffs):
            if k > 0:
                deriv = deriv.derivative()
            if c:
                total = total + deriv.scale(float(c))
        return total

    def chop(self, tol):
        """Drop terms whose coefficient is at most ``tol`` in magnitude."""
        return ExpPoly({k: v for k, v in self._terms.items() if abs(v) > tol})

    def normalized(self):
        """Scaled copy whose largest coefficient (in magnitude) is +1."""
        if self.is_zero():
            return self
        _, c = max(self._terms.items(), key=lambda kv: (abs(kv[1]), -_sort_key(kv[0])[0]))
        return self.scale(1.0 / c)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for (k, a, b, kind), c in self._terms.items():
            v = c * t**k * np.exp(a * t)
            if kind == COS:
                v = v * np.cos(b * t)
            elif kind == SIN:
                v = v * np.sin(b * t)
            out = out + v
        return out if out.ndim else float(out)

    def __repr__(self):
        return f"ExpPoly({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        text = ""
        for coeff, k, a, b, kind in self.terms:
            factors = []
            if k == 1:
                factors.append("t")
            elif k > 1:
                factors.append(f"t^{k}")
            if a != 0.0:
                factors.append(f"exp({_num(a)}*t)")
            if kind != PLAIN:
                arg = "t" if b == 1.0 else f"{_num(b)}*t"
                factors.append(f"{kind}({arg})")
            mag = abs(coeff)
            if factors:
                body = "*".join(factors) if np.isclose(mag, 1.0, rtol=1e-12, atol=0) else (
                    f"{_num(mag)}*" + "*".join(factors)
                )
            else:
                body = _num(mag)
            if not text:
                text = ("-" if coeff < 0 else "") + body
            else:
                text += (" - " if coeff < 0 else " + ") + body
        return text


def _num(x):
    return f"{x:.10g}"


def _sort_key(key):
    k, a, b, kind = key
    return (k, a, b, _KIND_ORDER[kind])


def _canonical_term(coeff, power, rate, freq, kind):
    coeff = float(coeff)
    if coeff == 0.0:
        return []
    power = int(power)
    if power < 0:
        raise ValueError("negative power")
    rate, freq = _clean(rate), _clean(freq)
    if kind == PLAIN:
        return [((power, rate, 0.0, PLAIN), coeff)]
    if kind not in (COS, SIN):
        raise ValueError(f"unknown kind {kind!r}")
    if freq == 0.0:
        return [((power, rate, 0.0, PLAIN), coeff)] if kind == COS else []
    if freq < 0.0:
        freq = -freq
        if kind == SIN:
            coeff = -coeff
    return [((power, rate, freq, kind), coeff)]
