"""Command-line front end.

Usage::

    reflectode solve-ivp --input problem.ini [--output out.csv]
    reflectode solve-bvp --input problem.ini
    reflectode green-ivp --input problem.ini --grid-s 21
    reflectode green-bvp --input problem.ini
    reflectode basis --input problem.ini        # or --equation "x' + 2 x(-t)"
    reflectode reduce --input problem.ini
    reflectode verify --input problem.ini

Exit codes: 0 success, 2 parse or usage error, 3 unsolvable boundary value
problem (singular ``M_X``), 4 singular block matrix on the integration path,
5 other numerical failure.  Errors go to stderr as ``error[<category>]: ...``.
"""

from __future__ import annotations

import argparse
import sys
from contextlib import contextmanager

import numpy as np

from .errors import (
    DegenerateReductionError,
    PreconditionError,
    ReflectionError,
    SingularPathError,
    UnsolvableBVPError,
    UnsupportedCaseError,
)
from .expression import ExpressionError, EvaluationError, parse_operator
from .green import PiecewiseGreen, solve_bvp, solve_ivp
from .opalg import composed_coefficients, reduction, refined_reduction, solution_basis
from .oracle import ivp_oracle, residual, shoot_bvp
from .problem import ProblemSpec, load
from .quadrature import QUAD_TOL
from .sysfun import FundamentalPair
from .varpar import vp_solve_grid

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_UNSOLVABLE = 3
EXIT_SINGULAR_PATH = 4
EXIT_NUMERICAL = 5

DEFAULT_POINTS = 201
DEFAULT_GRID_S = 21
DEFAULT_VERIFY_POINTS = 21
IVP_RANGE = (-2.0, 2.0)
DIGITS = 17

SUBCOMMANDS = ("solve-ivp", "solve-bvp", "green-ivp", "green-bvp", "basis", "reduce", "verify")
MODE_OF = {
    "solve-ivp": "ivp",
    "solve-bvp": "bvp",
    "green-ivp": "green-ivp",
    "green-bvp": "green-bvp",
    "basis": "basis",
    "reduce": "reduce",
    "verify": "verify",
}


class UsageError(ReflectionError):
    """Inconsistent command-line request."""


def exit_code_for(exc):
    """Map an exception to ``(exit code, category)``."""
    if isinstance(exc, UnsolvableBVPError):
        return EXIT_UNSOLVABLE, "unsolvable"
    if isinstance(exc, SingularPathError):
        return EXIT_SINGULAR_PATH, "singular-path"
    if isinstance(exc, EvaluationError):
        return EXIT_NUMERICAL, "numerical"
    if isinstance(exc, (UsageError, ExpressionError, PreconditionError, DegenerateReductionError,
                        UnsupportedCaseError, OSError)):
        return EXIT_USAGE, "usage"
    return EXIT_NUMERICAL, "numerical"


def fmt(x):
    return format(float(x), f".{DIGITS}g")


def write_csv(out, header, rows):
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(fmt(v) for v in row) + "\n")


def grid(spec, options, default_range):
    """``(t values, tol)`` from flags, falling back to ``[output]`` then defaults."""
    stored = spec.output

    def pick(name, default):
        value = options.get(name)
        if value is None:
            value = stored.get(name, default)
        return value

    lo = float(pick("t_min", default_range[0]))
    hi = float(pick("t_max", default_range[1]))
    points = int(pick("points", DEFAULT_POINTS))
    if points < 1:
        raise UsageError("--points must be at least 1")
    if hi < lo:
        raise UsageError("--t-max must not be smaller than --t-min")
    ts = np.linspace(lo, hi, points) if points > 1 else np.array([lo])
    return ts, float(pick("tol", QUAD_TOL))


def _bvp_range(spec):
    if spec.boundary is None:
        raise UsageError("this mode needs a [boundary] section")
    T = spec.boundary.T
    return (-T, T)


def _header_u(spec, sys):
    if spec.is_scalar:
        return ["t", "u"]
    return ["t"] + [f"u{i + 1}" for i in range(sys.n)]


def _header_g(spec, n):
    if spec.is_scalar:
        return ["t", "s", "G"]
    return ["t", "s"] + [f"G{i + 1}{j + 1}" for i in range(n) for j in range(n)]


def _pick_u(spec, u):
    u = np.atleast_1d(u)
    return u[:1] if spec.is_scalar else u


def _pick_g(spec, G):
    return [G[0, -1]] if spec.is_scalar else G.ravel()


def ivp_solution(spec, ts, tol):
    sys = spec.system()
    pair = FundamentalPair(sys)
    gamma, delta = spec.forcing(), spec.delta_vector()
    return sys, list(vp_solve_grid(sys, gamma, delta, ts, tol=tol, pair=pair))


def bvp_solution(spec, ts, tol):
    sys = spec.system()
    C, K, T = spec.boundary_matrices()
    pair = FundamentalPair(sys)
    kernel = PiecewiseGreen.bvp(sys, C, K, T, pair=pair)
    gamma, delta = spec.forcing(), spec.delta_vector()
    return sys, [solve_bvp(sys, C, K, T, gamma, delta, t, tol=tol, pair=pair, kernel=kernel) for t in ts]


def run_solve(spec, out, options, kind):
    if kind == "ivp":
        ts, tol = grid(spec, options, IVP_RANGE)
        sys, us = ivp_solution(spec, ts, tol)
    else:
        ts, tol = grid(spec, options, _bvp_range(spec))
        sys, us = bvp_solution(spec, ts, tol)
    rows = ([t, *_pick_u(spec, u)] for t, u in zip(ts, us))
    write_csv(out, _header_u(spec, sys), rows)


def run_green(spec, out, options, kind):
    sys = spec.system()
    if kind == "ivp":
        ts, _ = grid(spec, options, IVP_RANGE)
        kernel = PiecewiseGreen.ivp(sys)
    else:
        ts, _ = grid(spec, options, _bvp_range(spec))
        C, K, T = spec.boundary_matrices()
        kernel = PiecewiseGreen.bvp(sys, C, K, T)
    n_s = options.get("grid_s") or spec.output.get("grid_s", DEFAULT_GRID_S)
    if int(n_s) < 1:
        raise UsageError("--grid-s must be at least 1")
    # s covers the support of the kernel: [-T, T], or [-max|t|, max|t|] for ivp
    reach = kernel.T if kind == "bvp" else float(np.max(np.abs(ts)))
    ss = np.linspace(-reach, reach, int(n_s)) if int(n_s) > 1 else np.array([0.0])
    rows = ([t, s, *_pick_g(spec, kernel.matrix(t, s))] for t in ts for s in ss)
    write_csv(out, _header_g(spec, sys.n), rows)


def _operator(spec, options):
    if options.get("equation"):
        return parse_operator(options["equation"])
    if spec is None:
        raise UsageError("give --input with an [operator] section or --equation")
    return spec.reflection_operator()


def run_basis(spec, out, options):
    L = _operator(spec, options)
    out.write(f"operator: {L}\n")
    for f in solution_basis(L):
        out.write(f"{f}\n")


def run_reduce(spec, out, options):
    L = _operator(spec, options)
    L1 = reduction(L)
    Lhat, R = refined_reduction(L)
    c = composed_coefficients(L)
    out.write(f"L = {L}\n")
    out.write(f"L1 = {L1}\n")
    out.write(f"R = {R.format()}\n")
    out.write(f"Lhat = {Lhat}\n")
    out.write(f"L1 L = {c.format()}\n")
    out.write("k,c_k\n")
    for k in range(c.degree + 1):
        out.write(f"{k},{c.coeff(k)}\n")


def run_verify(spec, out, options):
    """Solve on a grid, then report the equation residual and the distance
    to the doubled-system oracle.

    Problems with a ``[boundary]`` section are checked as boundary value
    problems unless their mode is ``ivp``.
    """
    sys = spec.system()
    gamma = spec.forcing()
    pair = FundamentalPair(sys)
    if spec.boundary is not None and spec.mode != "ivp":
        rng = _bvp_range(spec)
        C, K, T = spec.boundary_matrices()
        kernel = PiecewiseGreen.bvp(sys, C, K, T, pair=pair)
        delta = spec.delta_vector()
        tol = float(options.get("tol") or spec.output.get("tol", QUAD_TOL))

        def u(t):
            return solve_bvp(sys, C, K, T, gamma, delta, t, tol=tol, pair=pair, kernel=kernel)

        reference = shoot_bvp(sys, gamma, C, K, T, delta)
        extent = T
    else:
        rng = IVP_RANGE
        delta = spec.delta_vector()
        tol = float(options.get("tol") or spec.output.get("tol", QUAD_TOL))

        def u(t):
            return solve_ivp(sys, gamma, delta, t, tol=tol, pair=pair)

        extent = None
        reference = None
    opts = dict(options)
    if opts.get("points") is None and "points" not in spec.output:
        opts["points"] = DEFAULT_VERIFY_POINTS
    ts, _ = grid(spec, opts, rng)
    h = 1e-5
    if extent is None:
        extent = float(np.max(np.abs(ts))) + 2 * h
        reference = ivp_oracle(sys, gamma, delta, extent)
    else:
        # keep the difference stencil inside [-T, T]
        ts = np.clip(ts, -extent + 2 * h, extent - 2 * h)
    res = residual(sys, gamma, u, ts, h=h)
    dev = max(float(np.max(np.abs(u(t) - reference(t)))) for t in ts)
    out.write(f"max_residual,{fmt(res)}\n")
    out.write(f"max_oracle_deviation,{fmt(dev)}\n")


def run(spec, mode, out=None, options=None):
    """Dispatch ``mode`` on ``spec`` and return an exit code.

    Errors are reported on stderr with a category; see :func:`exit_code_for`.
    """
    out = sys.stdout if out is None else out
    options = options or {}
    try:
        if mode == "ivp":
            run_solve(spec, out, options, "ivp")
        elif mode == "bvp":
            run_solve(spec, out, options, "bvp")
        elif mode == "green-ivp":
            run_green(spec, out, options, "ivp")
        elif mode == "green-bvp":
            run_green(spec, out, options, "bvp")
        elif mode == "basis":
            run_basis(spec, out, options)
        elif mode == "reduce":
            run_reduce(spec, out, options)
        elif mode == "verify":
            run_verify(spec, out, options)
        else:
            raise UsageError(f"unknown mode {mode!r}")
    except (ReflectionError, ArithmeticError, ValueError, OSError) as exc:
        code, category = exit_code_for(exc)
        sys.stderr.write(f"error[{category}]: {exc}\n")
        return code
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="reflectode",
        description="Linear differential equations and systems with reflection u(-t).",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--input", "-i", help="problem file")
        p.add_argument("--output", "-o", help="output file (default stdout)")
        if name in ("basis", "reduce"):
            p.add_argument("--equation", help="scalar equation, e.g. \"x' + 2 x(-t) = 0\"")
            continue
        p.add_argument("--t-min", type=float, dest="t_min")
        p.add_argument("--t-max", type=float, dest="t_max")
        p.add_argument("--points", type=int)
        p.add_argument("--tol", type=float)
        if name.startswith("green"):
            p.add_argument("--grid-s", type=int, dest="grid_s")
    return parser


@contextmanager
def _sink(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    options = {k: v for k, v in vars(args).items() if k not in ("command", "input", "output")}
    spec = None
    try:
        if args.input is not None:
            spec = load(args.input)
        elif args.command not in ("basis", "reduce") or not options.get("equation"):
            raise UsageError("--input is required")
    except (ReflectionError, ValueError, OSError) as exc:
        code, category = exit_code_for(exc)
        sys.stderr.write(f"error[{category}]: {exc}\n")
        return code
    if spec is None:
        equation = options["equation"]
        try:
            spec = ProblemSpec(n=parse_operator(equation).order, operator=equation)
        except (ReflectionError, ValueError) as exc:
            code, category = exit_code_for(exc)
            sys.stderr.write(f"error[{category}]: {exc}\n")
            return code
    try:
        with _sink(args.output) as out:
            return run(spec, MODE_OF[args.command], out, options)
    except OSError as exc:
        sys.stderr.write(f"error[usage]: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
