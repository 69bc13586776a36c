"""Recursive-descent parser and evaluator for closed-form utility expressions.

Grammar (whitespace-insensitive):

    expr   := term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := atom ('^' number)?
    atom   := number | identifier | '(' expr ')' | '-' atom

'^' binds tighter than '*', which binds tighter than '+'/'-'; unary minus
binds tighter than '^' (so "-x^2" squares the negated atom — write "-(x^2)"
for the additive inverse of a square). Exponents are numeric literals.
Fractional powers are defined only for nonnegative bases.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence, Union

import numpy as np


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at offset {position}")
        self.position = position


class EvalError(ValueError):
    pass


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Add:
    left: "UtilityExpr"
    right: "UtilityExpr"


@dataclass(frozen=True)
class Sub:
    left: "UtilityExpr"
    right: "UtilityExpr"


@dataclass(frozen=True)
class Mul:
    left: "UtilityExpr"
    right: "UtilityExpr"


@dataclass(frozen=True)
class Neg:
    operand: "UtilityExpr"


@dataclass(frozen=True)
class Pow:
    base: "UtilityExpr"
    exponent: float


UtilityExpr = Union[Const, Var, Add, Sub, Mul, Neg, Pow]

_NUMBER = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


class _Parser:
    def __init__(self, source: str):
        self.src = source
        self.pos = 0

    def _skip_ws(self) -> None:
        while self.pos < len(self.src) and self.src[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> str:
        self._skip_ws()
        return self.src[self.pos] if self.pos < len(self.src) else ""

    def _expect(self, ch: str) -> None:
        if self._peek() != ch:
            raise ParseError(f"expected {ch!r}", self.pos)
        self.pos += 1

    def parse(self) -> UtilityExpr:
        node = self.expr()
        self._skip_ws()
        if self.pos != len(self.src):
            raise ParseError("unexpected trailing input", self.pos)
        return node

    def expr(self) -> UtilityExpr:
        node = self.term()
        while self._peek() in ("+", "-"):
            op = self.src[self.pos]
            self.pos += 1
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def term(self) -> UtilityExpr:
        node = self.factor()
        while self._peek() == "*":
            self.pos += 1
            node = Mul(node, self.factor())
        return node

    def factor(self) -> UtilityExpr:
        node = self.atom()
        if self._peek() == "^":
            self.pos += 1
            self._skip_ws()
            m = _NUMBER.match(self.src, self.pos)
            if not m:
                raise ParseError("expected numeric exponent", self.pos)
            self.pos = m.end()
            node = Pow(node, float(m.group()))
        return node

    def atom(self) -> UtilityExpr:
        ch = self._peek()
        if ch == "(":
            self.pos += 1
            node = self.expr()
            self._expect(")")
            return node
        if ch == "-":
            self.pos += 1
            return Neg(self.atom())
        m = _NUMBER.match(self.src, self.pos)
        if m:
            self.pos = m.end()
            return Const(float(m.group()))
        m = _IDENT.match(self.src, self.pos)
        if m:
            self.pos = m.end()
            return Var(m.group())
        raise ParseError("expected number, identifier, '(' or '-'", self.pos)


def parse_utility(source: str) -> UtilityExpr:
    """Parse an expression string into an AST; raises ParseError with position."""
    return _Parser(source).parse()


def variables(expr: UtilityExpr) -> set[str]:
    if isinstance(expr, Var):
        return {expr.name}
    if isinstance(expr, Const):
        return set()
    if isinstance(expr, (Add, Sub, Mul)):
        return variables(expr.left) | variables(expr.right)
    if isinstance(expr, Neg):
        return variables(expr.operand)
    return variables(expr.base)


def _pow(base: float, exponent: float) -> float:
    if base < 0 and exponent != int(exponent):
        raise EvalError(f"fractional power of negative base {base!r}")
    try:
        return base**exponent
    except OverflowError:
        raise EvalError(f"power overflow: {base!r}^{exponent!r}") from None


def eval_utility(expr: UtilityExpr, bindings: Mapping[str, float]) -> float:
    """Evaluate an AST under variable bindings; result must be finite."""
    v = _eval(expr, bindings)
    if not math.isfinite(v):
        raise EvalError(f"non-finite result {v!r}")
    return v


def _eval(expr: UtilityExpr, bindings: Mapping[str, float]) -> float:
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Var):
        try:
            return float(bindings[expr.name])
        except KeyError:
            raise EvalError(f"unbound variable {expr.name!r}") from None
    if isinstance(expr, Add):
        return _eval(expr.left, bindings) + _eval(expr.right, bindings)
    if isinstance(expr, Sub):
        return _eval(expr.left, bindings) - _eval(expr.right, bindings)
    if isinstance(expr, Mul):
        return _eval(expr.left, bindings) * _eval(expr.right, bindings)
    if isinstance(expr, Neg):
        return -_eval(expr.operand, bindings)
    return _pow(_eval(expr.base, bindings), expr.exponent)


def _literal(x: float) -> str:
    # emit literals the tokenizer accepts (no sign, no bare exponent forms)
    s = repr(float(x))
    if s.startswith("-") or "inf" in s or "nan" in s:
        raise ValueError(f"cannot print literal {x!r}")
    return s


def pretty(expr: UtilityExpr) -> str:
    """Print an AST so that parse_utility(pretty(e)) is structurally equal to e."""
    if isinstance(expr, Const):
        return _literal(expr.value)
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Add):
        return f"{pretty(expr.left)} + {_wrap_addend(expr.right)}"
    if isinstance(expr, Sub):
        return f"{pretty(expr.left)} - {_wrap_addend(expr.right)}"
    if isinstance(expr, Mul):
        return f"{_wrap_factor(expr.left)}*{_wrap_factor(expr.right)}"
    if isinstance(expr, Neg):
        return f"-{_wrap_atom(expr.operand)}"
    return f"{_wrap_atom(expr.base)}^{_literal(expr.exponent)}"


def _wrap_addend(e: UtilityExpr) -> str:
    # right operand of +/-: parenthesize anything the flat grammar would
    # re-associate into the left spine
    if isinstance(e, (Add, Sub)):
        return f"({pretty(e)})"
    return pretty(e)


def _wrap_factor(e: UtilityExpr) -> str:
    if isinstance(e, (Add, Sub, Mul)):
        return f"({pretty(e)})"
    return pretty(e)


def _wrap_atom(e: UtilityExpr) -> str:
    if isinstance(e, (Const, Var)):
        return pretty(e)
    if isinstance(e, Neg):
        # '-' is itself an atom prefix, so "-x" is a valid power base
        return pretty(e)
    return f"({pretty(e)})"


def compile_utility(
    expr: UtilityExpr, var_order: Sequence[str]
) -> Callable[[np.ndarray], float]:
    """Compile an AST to a fast callable over a flat profile vector.

    var_order fixes the variable-to-coordinate assignment. Every variable in
    the expression must appear in var_order.
    """
    index = {name: i for i, name in enumerate(var_order)}
    missing = variables(expr) - set(index)
    if missing:
        raise EvalError(f"undeclared variables: {sorted(missing)}")

    def emit(e: UtilityExpr) -> str:
        if isinstance(e, Const):
            return repr(e.value)
        if isinstance(e, Var):
            return f"v[{index[e.name]}]"
        if isinstance(e, Add):
            return f"({emit(e.left)} + {emit(e.right)})"
        if isinstance(e, Sub):
            return f"({emit(e.left)} - {emit(e.right)})"
        if isinstance(e, Mul):
            return f"({emit(e.left)} * {emit(e.right)})"
        if isinstance(e, Neg):
            return f"(-{emit(e.operand)})"
        if e.exponent == int(e.exponent):
            return f"({emit(e.base)})**{int(e.exponent)}"
        return f"_fpow({emit(e.base)}, {repr(e.exponent)})"

    src = f"def _u(v):\n    return {emit(expr)}\n"
    namespace: dict = {"_fpow": _pow}
    exec(compile(src, "<utility>", "exec"), namespace)
    return namespace["_u"]
