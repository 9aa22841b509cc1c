"""Forcing-term expressions and scalar operator equations.

Expressions in ``t`` follow the grammar::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | '+' unary | power
    power  := atom ('^' unary)?
    atom   := NUMBER | 't' | 'pi' | FUNC '(' expr ')' | '(' expr ')'

``^`` binds tighter than unary minus and is right-associative, so ``-2^2``
is ``-4`` and ``2^3^2`` is ``512``.  Error positions are byte offsets into
the UTF-8 source.

Operator equations such as ``x'' + 2 x(-t) - 3/2 x' = 0`` are parsed by
:func:`parse_operator` into a :class:`~reflectode.opalg.ReflectionOperator`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import ReflectionError

FUNCTIONS = {
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
    "sinh": math.sinh,
    "cosh": math.cosh,
}
CONSTANTS = {"pi": math.pi}
VARIABLE = "t"


class ExpressionError(ReflectionError, ValueError):
    """Base class for expression errors."""


class ExpressionSyntaxError(ExpressionError):
    """Malformed input; ``offset`` is the byte offset of the problem."""

    def __init__(self, message, offset, source=""):
        self.offset = offset
        self.source = source
        super().__init__(f"{message} at byte {offset}")


class UnknownIdentifierError(ExpressionSyntaxError):
    def __init__(self, name, offset, source=""):
        self.name = name
        super().__init__(f"unknown identifier {name!r}", offset, source)


class EvaluationError(ExpressionError, ArithmeticError):
    """Evaluation failed (division by zero, overflow, domain error)."""


# ---------------------------------------------------------------- AST nodes


@dataclass(frozen=True)
class Num:
    value: float

    def eval(self, t):
        return self.value

    def __str__(self):
        return repr(self.value)


@dataclass(frozen=True)
class Var:
    def eval(self, t):
        return t

    def __str__(self):
        return VARIABLE


@dataclass(frozen=True)
class Const:
    name: str

    def eval(self, t):
        return CONSTANTS[self.name]

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Neg:
    operand: object

    def eval(self, t):
        return -self.operand.eval(t)

    def __str__(self):
        return f"(-{self.operand})"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object

    def eval(self, t):
        a = self.left.eval(t)
        b = self.right.eval(t)
        try:
            if self.op == "+":
                return a + b
            if self.op == "-":
                return a - b
            if self.op == "*":
                return a * b
            if self.op == "/":
                if b == 0:
                    raise EvaluationError(f"division by zero in {self}")
                return a / b
            return _power(a, b)
        except OverflowError as exc:
            raise EvaluationError(f"overflow in {self}") from exc

    def __str__(self):
        return f"({self.left} {self.op} {self.right})"


@dataclass(frozen=True)
class Call:
    name: str
    arg: object

    def eval(self, t):
        x = self.arg.eval(t)
        try:
            return FUNCTIONS[self.name](x)
        except (OverflowError, ValueError) as exc:
            raise EvaluationError(f"{self.name}({x!r}) failed: {exc}") from exc

    def __str__(self):
        return f"{self.name}({self.arg})"


def _power(a, b):
    if a == 0 and b < 0:
        raise EvaluationError("zero raised to a negative power")
    if a < 0 and b != int(b):
        raise EvaluationError(f"negative base {a!r} with non-integer exponent {b!r}")
    return math.pow(a, b)


class Expression:
    """Parsed expression in the variable ``t``.

    Calling the object evaluates it; the result is always a finite float or
    an :class:`EvaluationError` is raised.
    """

    def __init__(self, source, tree):
        self.source = source
        self.tree = tree

    def __call__(self, t):
        value = float(self.tree.eval(float(t)))
        if not math.isfinite(value):
            raise EvaluationError(f"{self.source!r} is not finite at t = {t!r}")
        return value

    def __str__(self):
        return self.source

    def __repr__(self):
        return f"Expression({self.source!r})"

    def __eq__(self, other):
        return isinstance(other, Expression) and self.tree == other.tree

    def __hash__(self):
        return hash(self.tree)


# ---------------------------------------------------------------- tokenizer

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()=',])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    offset: int


def _byte_offset(src, index):
    return len(src[:index].encode("utf-8"))


def tokenize(src):
    """Split ``src`` into tokens; the last one has kind ``"end"``."""
    tokens = []
    i = 0
    while i < len(src):
        m = _TOKEN.match(src, i)
        if m is None:
            raise ExpressionSyntaxError(f"unexpected character {src[i]!r}", _byte_offset(src, i), src)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, m.group(), _byte_offset(src, i)))
        i = m.end()
    tokens.append(Token("end", "", _byte_offset(src, len(src))))
    return tokens


class _Parser:
    def __init__(self, src):
        self.src = src
        self.tokens = tokenize(src)
        self.pos = 0

    @property
    def tok(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tok
        self.pos += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.tok
        return ExpressionSyntaxError(message, tok.offset, self.src)

    def expect(self, text):
        if self.tok.text != text:
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        return self.advance()

    def at(self, *texts):
        return self.tok.kind == "op" and self.tok.text in texts

    def expr(self):
        node = self.term()
        while self.at("+", "-"):
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.at("*", "/"):
            op = self.advance().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.at("-"):
            self.advance()
            return Neg(self.unary())
        if self.at("+"):
            self.advance()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.at("^"):
            self.advance()
            # the exponent is parsed at unary level: right-associative, allows 2^-1
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        tok = self.tok
        if tok.kind == "num":
            self.advance()
            return Num(float(tok.text))
        if tok.kind == "name":
            self.advance()
            if tok.text == VARIABLE:
                return Var()
            if tok.text in CONSTANTS:
                return Const(tok.text)
            if tok.text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(tok.text, arg)
            raise UnknownIdentifierError(tok.text, tok.offset, self.src)
        if self.at("("):
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        if tok.kind == "end":
            raise self.error("unexpected end of input")
        raise self.error(f"unexpected {tok.text!r}")


def parse_expression(src):
    """Parse ``src`` into an :class:`Expression`.

    Raises:
        ExpressionSyntaxError: malformed input, with the byte offset.
        UnknownIdentifierError: a name other than ``t``, ``pi`` or a
            supported function.
    """
    parser = _Parser(src)
    tree = parser.expr()
    if parser.tok.kind != "end":
        raise parser.error(f"unexpected {parser.tok.text!r}")
    return Expression(src, tree)


# ---------------------------------------------------------------- operators


def _fraction(text):
    return Fraction(text)


def parse_operator(src, unknown="x"):
    """Parse a scalar equation with reflection into a ``ReflectionOperator``.

    Terms are ``[c [*]] x<primes>[(t) | (-t)]`` where ``c`` is a number or a
    ratio of numbers and the primes count derivatives.  A trailing ``= 0``
    is accepted.  Coefficients are kept exact.

    Example:
        ``"x' + 2 x(-t) = 0"`` gives ``phi*[2] + [D]``.
    """
    from .opalg import ReflectionOperator

    parser = _Parser(src)
    a, b = {}, {}
    first = True
    while True:
        sign = Fraction(1)
        if parser.at("+", "-"):
            sign = Fraction(-1) if parser.advance().text == "-" else Fraction(1)
        elif not first:
            break
        first = False
        if parser.at("+", "-"):
            if parser.advance().text == "-":
                sign = -sign
        coeff = Fraction(1)
        if parser.tok.kind == "num":
            coeff = _fraction(parser.advance().text)
            if parser.at("/"):
                parser.advance()
                tok = parser.tok
                if tok.kind != "num":
                    raise parser.error("expected a number after '/'")
                den = _fraction(parser.advance().text)
                if den == 0:
                    raise parser.error("zero denominator", tok)
                coeff /= den
            if parser.at("*"):
                parser.advance()
        tok = parser.tok
        if tok.kind != "name" or tok.text != unknown:
            if tok.kind == "name":
                raise UnknownIdentifierError(tok.text, tok.offset, src)
            raise parser.error(f"expected {unknown!r}")
        parser.advance()
        order = 0
        while parser.at("'"):
            parser.advance()
            order += 1
        reflected = False
        if parser.at("("):
            parser.advance()
            if parser.at("-"):
                parser.advance()
                reflected = True
            if parser.tok.text != VARIABLE:
                raise parser.error("expected 't' or '-t'")
            parser.advance()
            parser.expect(")")
        table = b if reflected else a
        table[order] = table.get(order, Fraction(0)) + sign * coeff
    if parser.at("="):
        parser.advance()
        tok = parser.tok
        if tok.kind != "num" or Fraction(tok.text) != 0:
            raise parser.error("right-hand side must be 0")
        parser.advance()
    if parser.tok.kind != "end":
        raise parser.error(f"unexpected {parser.tok.text!r}")

    def dense(table):
        if not table:
            return []
        return [table.get(k, Fraction(0)) for k in range(max(table) + 1)]

    return ReflectionOperator.from_coefficients(a=dense(a), b=dense(b))


__all__ = [
    "Expression",
    "ExpressionError",
    "ExpressionSyntaxError",
    "UnknownIdentifierError",
    "EvaluationError",
    "parse_expression",
    "parse_operator",
    "tokenize",
]
