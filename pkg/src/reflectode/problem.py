"""Problem files: sectioned key-value text read with :mod:`configparser`.

A system problem::

    [system]
    n = 2
    F = 1 0  0 1
    G = 0 0  0 0
    A = 0 0  0 0
    B = 0 -1  -1 0

    [forcing]
    gamma = sin(t); 0
    delta = 1 0

    [boundary]
    C = 1 0  0 1
    K = -1 0  0 -1
    T = 1

    [output]
    t_min = -1
    t_max = 1
    points = 201

A scalar problem replaces ``[system]`` by ``[operator]`` with an
``equation`` such as ``x' + 2 x(-t) = 0``; its forcing has a single
expression, and ``delta`` and the boundary matrices refer to the companion
system ``(u, u', ..., u^(n-1))``.  A single ``delta`` entry sets ``u(0)`` and
leaves the derivatives at zero.

Matrices are whitespace-separated numbers in row-major order; expressions
are separated by ``;``.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import PreconditionError
from .expression import parse_expression, parse_operator
from .green import _lift_scalar_forcing, _lift_scalar_vector
from .sysfun import ReflectionSystem, companion_system
from .varpar import ForcingFunction

MODES = ("ivp", "bvp", "green-ivp", "green-bvp", "basis", "reduce", "verify")
MATRIX_KEYS = ("F", "G", "A", "B")
OUTPUT_KEYS = ("t_min", "t_max", "points", "tol", "grid_s")


class ProblemFormatError(PreconditionError):
    """The problem file is malformed or inconsistent."""


@dataclass(frozen=True)
class Boundary:
    C: tuple
    K: tuple
    T: float


@dataclass(frozen=True)
class ProblemSpec:
    """Everything needed to run one solver mode.

    Matrices are row-major tuples of floats so that specs compare and hash
    field by field.  ``operator`` holds the scalar equation text when the
    problem is given as an operator; then ``n`` is the operator order and
    ``F``..``B`` are empty.
    """

    n: int
    F: tuple = ()
    G: tuple = ()
    A: tuple = ()
    B: tuple = ()
    gamma: tuple = ()
    delta: tuple = ()
    boundary: Boundary | None = None
    mode: str | None = None
    operator: str | None = None
    output: dict = field(default_factory=dict, compare=True, hash=False)

    def __post_init__(self):
        if self.mode is not None and self.mode not in MODES:
            raise ProblemFormatError(f"unknown mode {self.mode!r}; expected one of {', '.join(MODES)}")
        if self.operator is None:
            for key in MATRIX_KEYS:
                if len(getattr(self, key)) != self.n * self.n:
                    raise ProblemFormatError(f"{key} needs {self.n * self.n} entries, got {len(getattr(self, key))}")
            if self.gamma and len(self.gamma) != self.n:
                raise ProblemFormatError(f"gamma needs {self.n} expressions, got {len(self.gamma)}")
        elif len(self.gamma) > 1:
            raise ProblemFormatError("a scalar equation takes a single forcing expression")
        if self.delta and len(self.delta) != self.n and not (self.is_scalar and len(self.delta) == 1):
            raise ProblemFormatError(f"delta needs {self.n} entries, got {len(self.delta)}")
        if self.boundary is not None:
            for key in ("C", "K"):
                size = len(getattr(self.boundary, key))
                if size != self.n * self.n:
                    raise ProblemFormatError(f"{key} needs {self.n * self.n} entries, got {size}")
            if not self.boundary.T > 0:
                raise ProblemFormatError("T must be positive")
        if self.mode in ("bvp", "green-bvp") and self.boundary is None:
            raise ProblemFormatError(f"mode {self.mode!r} needs a [boundary] section")

    # -- derived objects -------------------------------------------------

    @property
    def is_scalar(self):
        return self.operator is not None

    def reflection_operator(self):
        if self.operator is None:
            raise ProblemFormatError("problem has no [operator] section")
        return parse_operator(self.operator)

    def system(self):
        """The :class:`ReflectionSystem` (companion system for scalar problems)."""
        if self.is_scalar:
            return companion_system(self.reflection_operator())
        mats = [np.array(getattr(self, k), dtype=float).reshape(self.n, self.n) for k in MATRIX_KEYS]
        return ReflectionSystem(*mats)

    def forcing(self):
        """Forcing of the (companion) system as a :class:`ForcingFunction`."""
        exprs = [parse_expression(src) for src in self.gamma]
        if self.is_scalar:
            h = exprs[0] if exprs else None
            return _lift_scalar_forcing(h, self.n)
        if not exprs:
            return ForcingFunction.zero(self.n)
        desc = "; ".join(self.gamma)
        return ForcingFunction(lambda t: np.array([e(t) for e in exprs]), self.n, description=desc)

    def delta_vector(self):
        if not self.delta:
            return np.zeros(self.n)
        return _lift_scalar_vector(self.delta, self.n, "delta")

    def boundary_matrices(self):
        if self.boundary is None:
            raise ProblemFormatError("problem has no [boundary] section")
        out = [np.array(getattr(self.boundary, key), dtype=float).reshape(self.n, self.n) for key in ("C", "K")]
        return out[0], out[1], self.boundary.T


# ---------------------------------------------------------------- reading


def _numbers(text, key):
    try:
        return tuple(float(x) for x in text.split())
    except ValueError as exc:
        raise ProblemFormatError(f"{key}: {exc}") from exc


def _exprs(text):
    parts = [p.strip() for p in text.split(";")]
    return tuple(p for p in parts if p)


def _output_value(key, text):
    if key == "points" or key == "grid_s":
        return int(text)
    return float(text)


def loads(text):
    """Parse problem text into a :class:`ProblemSpec`.

    Raises:
        ProblemFormatError: missing sections or keys, bad numbers, or
            inconsistent sizes.
    """
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ProblemFormatError(str(exc)) from exc
    known = {"system", "operator", "forcing", "boundary", "output"}
    extra = set(cp.sections()) - known
    if extra:
        raise ProblemFormatError(f"unknown section(s): {', '.join(sorted(extra))}")
    kwargs = {}
    if cp.has_section("operator"):
        if cp.has_section("system"):
            raise ProblemFormatError("give either [system] or [operator], not both")
        equation = cp.get("operator", "equation", fallback=None)
        if not equation:
            raise ProblemFormatError("[operator] needs an 'equation' key")
        kwargs["operator"] = equation.strip()
        kwargs["n"] = parse_operator(equation).order
    elif cp.has_section("system"):
        sec = cp["system"]
        try:
            n = int(sec["n"])
        except (KeyError, ValueError) as exc:
            raise ProblemFormatError("[system] needs an integer 'n'") from exc
        kwargs["n"] = n
        for key in MATRIX_KEYS:
            if key not in sec:
                raise ProblemFormatError(f"[system] is missing {key}")
            kwargs[key] = _numbers(sec[key], key)
    else:
        raise ProblemFormatError("problem needs a [system] or [operator] section")
    if cp.has_section("forcing"):
        sec = cp["forcing"]
        if "gamma" in sec:
            kwargs["gamma"] = _exprs(sec["gamma"])
        if "delta" in sec:
            kwargs["delta"] = _numbers(sec["delta"], "delta")
    if cp.has_section("boundary"):
        sec = cp["boundary"]
        try:
            kwargs["boundary"] = Boundary(
                _numbers(sec["C"], "C"), _numbers(sec["K"], "K"), float(sec["T"])
            )
        except KeyError as exc:
            raise ProblemFormatError(f"[boundary] is missing {exc.args[0]}") from exc
        except ValueError as exc:
            raise ProblemFormatError(f"[boundary]: {exc}") from exc
    if cp.has_section("output"):
        sec = cp["output"]
        if "mode" in sec:
            kwargs["mode"] = sec["mode"].strip()
        out = {}
        for key in OUTPUT_KEYS:
            if key in sec:
                try:
                    out[key] = _output_value(key, sec[key])
                except ValueError as exc:
                    raise ProblemFormatError(f"[output] {key}: {exc}") from exc
        kwargs["output"] = out
    for src in kwargs.get("gamma", ()):
        parse_expression(src)
    return ProblemSpec(**kwargs)


def load(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


# ---------------------------------------------------------------- writing


def _fmt(values):
    return " ".join(repr(float(v)) for v in values)


def dumps(spec):
    """Text form of ``spec``; ``loads(dumps(spec)) == spec``."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    if spec.is_scalar:
        cp["operator"] = {"equation": spec.operator}
    else:
        cp["system"] = {"n": str(spec.n), **{k: _fmt(getattr(spec, k)) for k in MATRIX_KEYS}}
    forcing = {}
    if spec.gamma:
        forcing["gamma"] = "; ".join(spec.gamma)
    if spec.delta:
        forcing["delta"] = _fmt(spec.delta)
    if forcing:
        cp["forcing"] = forcing
    if spec.boundary is not None:
        b = spec.boundary
        cp["boundary"] = {"C": _fmt(b.C), "K": _fmt(b.K), "T": repr(float(b.T))}
    output = {k: repr(v) for k, v in spec.output.items()}
    if spec.mode is not None:
        output["mode"] = spec.mode
    if output:
        cp["output"] = output
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def dump(spec, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(spec))


def with_mode(spec, mode):
    return replace(spec, mode=mode)


__all__ = [
    "Boundary",
    "ProblemSpec",
    "ProblemFormatError",
    "MODES",
    "loads",
    "load",
    "dumps",
    "dump",
    "with_mode",
]
