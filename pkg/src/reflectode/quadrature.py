"""Adaptive Simpson quadrature for vector- and matrix-valued integrands."""

from __future__ import annotations

import numpy as np

from .errors import QuadratureError

QUAD_TOL = 1e-10
QUAD_MAX_DEPTH = 30
ROUNDOFF = 64 * np.finfo(float).eps


def _simpson(fa, fm, fb, h):
    return (h / 6.0) * (fa + 4.0 * fm + fb)


def _err(x):
    return float(np.max(np.abs(x))) if np.ndim(x) else abs(float(x))


def adaptive_simpson(f, a, b, tol=QUAD_TOL, max_depth=QUAD_MAX_DEPTH):
    """Oriented integral of ``f`` from ``a`` to ``b``.

    ``f`` may return scalars or arrays of a fixed shape; the error test uses
    the max-norm.  Each panel is split until the two-half Simpson estimate
    differs from the whole-panel estimate by at most ``15 * tol_panel``,
    where ``tol_panel`` halves with every split, or by less than a few ulps
    of the panel value.  The result includes the
    Richardson correction.  The subdivision rule is fixed, so results are
    bitwise reproducible.

    Raises:
        QuadratureError: some panel is still unresolved at ``max_depth``.
    """
    a, b = float(a), float(b)
    fa = np.asarray(f(a), dtype=float)
    if a == b:
        return np.zeros_like(fa)
    m = 0.5 * (a + b)
    fm = np.asarray(f(m), dtype=float)
    fb = np.asarray(f(b), dtype=float)
    whole = _simpson(fa, fm, fb, b - a)
    return _recurse(f, a, b, fa, fm, fb, whole, tol, max_depth)


def _recurse(f, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm, rm = 0.5 * (a + m), 0.5 * (m + b)
    flm = np.asarray(f(lm), dtype=float)
    frm = np.asarray(f(rm), dtype=float)
    left = _simpson(fa, flm, fm, m - a)
    right = _simpson(fm, frm, fb, b - m)
    delta = left + right - whole
    # roundoff floor: differences below a few ulps of the panel sum are noise
    floor = ROUNDOFF * (_err(left) + _err(right))
    if _err(delta) <= max(15.0 * tol, floor):
        return left + right + delta / 15.0
    if depth <= 0:
        raise QuadratureError(
            f"adaptive Simpson did not resolve [{a:.17g}, {b:.17g}] "
            f"(error estimate {_err(delta) / 15.0:.3e})"
        )
    return _recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + _recurse(
        f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1
    )


def integrate_panels(f, breakpoints, tol=QUAD_TOL, max_depth=QUAD_MAX_DEPTH):
    """Sum of :func:`adaptive_simpson` over consecutive breakpoints.

    Breakpoints are sorted and deduplicated; the tolerance is shared evenly
    between panels.
    """
    pts = sorted(set(float(p) for p in breakpoints))
    if len(pts) < 2:
        return np.zeros_like(np.asarray(f(pts[0]), dtype=float))
    share = tol / (len(pts) - 1)
    total = None
    for lo, hi in zip(pts[:-1], pts[1:]):
        part = adaptive_simpson(f, lo, hi, share, max_depth)
        total = part if total is None else total + part
    return total
