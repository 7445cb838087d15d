"""
One-variable arithmetic expressions.

A small recursive-descent parser turns strings such as
"exp(x/2) / (1 + x^2)^(3/8)" into an expression tree. The tree can be
evaluated with numpy (vectorised, float64) or with mpmath (arbitrary
precision, no overflow), and composed with another expression by
substituting the variable.

Grammar:
    expr  := term (('+' | '-') term)*
    term  := unary (('*' | '/') unary)*
    unary := ('+' | '-') unary | power
    power := atom (('^' | '**') unary)?
    atom  := NUMBER | 'x' | CONSTANT | FUNCTION '(' expr ')' | '(' expr ')'
"""

import re
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import mpmath
import numpy as np

from ..core.errors import ExpressionError

_TOKEN_RE = re.compile(
    r"\s*(?:"
    r"(?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][-+]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>\*\*|[-+*/^()])"
    r")"
)


class Token(NamedTuple):
    type: str
    value: str
    column: int


class _Backend(NamedTuple):
    functions: dict
    constants: dict
    number: Callable
    power: Callable


_NUMPY = _Backend(
    functions={
        "sin": np.sin, "cos": np.cos, "tan": np.tan,
        "sinh": np.sinh, "cosh": np.cosh, "tanh": np.tanh,
        "atan": np.arctan, "sqrt": np.sqrt, "exp": np.exp,
        "log": np.log, "abs": np.abs,
    },
    constants={"pi": np.pi, "e": np.e},
    number=np.float64,
    power=np.power,
)

_MPMATH = _Backend(
    functions={
        "sin": mpmath.sin, "cos": mpmath.cos, "tan": mpmath.tan,
        "sinh": mpmath.sinh, "cosh": mpmath.cosh, "tanh": mpmath.tanh,
        "atan": mpmath.atan, "sqrt": mpmath.sqrt, "exp": mpmath.exp,
        "log": mpmath.log, "abs": mpmath.fabs,
    },
    constants={"pi": mpmath.pi, "e": mpmath.e},
    number=mpmath.mpf,
    power=lambda base, exponent: base ** exponent,
)

FUNCTIONS = frozenset(_NUMPY.functions)
CONSTANTS = frozenset(_NUMPY.constants)
VARIABLE = "x"


# ---------------------------------------------------------------------------
# Tree nodes
# ---------------------------------------------------------------------------

class Node:
    """Base expression node."""

    def evaluate(self, x, backend: _Backend):
        raise NotImplementedError

    def substitute(self, replacement: "Node") -> "Node":
        return self


@dataclass(frozen=True)
class Literal(Node):
    text: str

    def evaluate(self, x, backend):
        return backend.number(self.text)

    def __str__(self):
        return self.text


@dataclass(frozen=True)
class Constant(Node):
    name: str

    def evaluate(self, x, backend):
        return backend.constants[self.name]

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Variable(Node):

    def evaluate(self, x, backend):
        return x

    def substitute(self, replacement):
        return replacement

    def __str__(self):
        return VARIABLE


@dataclass(frozen=True)
class Negate(Node):
    operand: Node

    def evaluate(self, x, backend):
        return -self.operand.evaluate(x, backend)

    def substitute(self, replacement):
        return Negate(self.operand.substitute(replacement))

    def __str__(self):
        return f"(-{self.operand})"


@dataclass(frozen=True)
class Binary(Node):
    op: str
    left: Node
    right: Node

    def evaluate(self, x, backend):
        a = self.left.evaluate(x, backend)
        b = self.right.evaluate(x, backend)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        if self.op == "*":
            return a * b
        if self.op == "/":
            return a / b
        return backend.power(a, b)

    def substitute(self, replacement):
        return Binary(self.op, self.left.substitute(replacement),
                      self.right.substitute(replacement))

    def __str__(self):
        return f"({self.left}{self.op}{self.right})"


@dataclass(frozen=True)
class Call(Node):
    function: str
    argument: Node

    def evaluate(self, x, backend):
        return backend.functions[self.function](self.argument.evaluate(x, backend))

    def substitute(self, replacement):
        return Call(self.function, self.argument.substitute(replacement))

    def __str__(self):
        return f"{self.function}({self.argument})"


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _tokenize(source: str) -> list[Token]:
    tokens = []
    position = 0
    stripped = source.rstrip()
    while position < len(stripped):
        match = _TOKEN_RE.match(stripped, position)
        if match is None or match.end() == position:
            raise ExpressionError(source, position, "unexpected character")
        kind = match.lastgroup
        tokens.append(Token(kind, match.group(kind), match.start(kind)))
        position = match.end()
    tokens.append(Token("end", "", len(stripped)))
    return tokens


class _Parser:
    """Recursive-descent parser over a token list."""

    def __init__(self, source: str):
        self.source = source
        self.tokens = _tokenize(source)
        self.index = 0

    @property
    def token(self) -> Token:
        return self.tokens[self.index]

    def _advance(self) -> Token:
        token = self.token
        self.index += 1
        return token

    def _expect(self, value: str) -> None:
        if self.token.value != value:
            raise ExpressionError(self.source, self.token.column, f"expected '{value}'")
        self._advance()

    def parse(self) -> Node:
        if self.token.type == "end":
            raise ExpressionError(self.source, 0, "empty expression")
        node = self._expr()
        if self.token.type != "end":
            raise ExpressionError(self.source, self.token.column,
                                  f"unexpected '{self.token.value}'")
        return node

    def _expr(self) -> Node:
        node = self._term()
        while self.token.value in ("+", "-"):
            op = self._advance().value
            node = Binary(op, node, self._term())
        return node

    def _term(self) -> Node:
        node = self._unary()
        while self.token.value in ("*", "/"):
            op = self._advance().value
            node = Binary(op, node, self._unary())
        return node

    def _unary(self) -> Node:
        if self.token.value == "-":
            self._advance()
            return Negate(self._unary())
        if self.token.value == "+":
            self._advance()
            return self._unary()
        return self._power()

    def _power(self) -> Node:
        base = self._atom()
        if self.token.value in ("^", "**"):
            self._advance()
            return Binary("^", base, self._unary())
        return base

    def _atom(self) -> Node:
        token = self.token
        if token.type == "number":
            self._advance()
            return Literal(token.value)
        if token.type == "name":
            self._advance()
            if token.value == VARIABLE:
                return Variable()
            if token.value in CONSTANTS:
                return Constant(token.value)
            if token.value in FUNCTIONS:
                self._expect("(")
                argument = self._expr()
                self._expect(")")
                return Call(token.value, argument)
            raise ExpressionError(self.source, token.column,
                                  f"unknown name '{token.value}'")
        if token.value == "(":
            self._advance()
            node = self._expr()
            self._expect(")")
            return node
        if token.type == "end":
            raise ExpressionError(self.source, token.column, "unexpected end of input")
        raise ExpressionError(self.source, token.column, f"unexpected '{token.value}'")


# ---------------------------------------------------------------------------
# Public wrapper
# ---------------------------------------------------------------------------

class Expression:
    """
    Callable one-variable function backed by an expression tree.

    Calling the expression evaluates it with numpy and always returns a
    float array shaped like the input. `evaluate_mp` evaluates the same
    tree in mpmath arithmetic.
    """

    def __init__(self, root: Node, source: Optional[str] = None, name: Optional[str] = None):
        self.root = root
        self.source = source if source is not None else str(root)
        self.name = name or self.source

    def __call__(self, x):
        x_arr = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            value = self.root.evaluate(x_arr, _NUMPY)
            result = np.asarray(value, dtype=float) + np.zeros_like(x_arr)
        return result if result.ndim else float(result)

    def evaluate_mp(self, x):
        """Evaluate at a scalar in mpmath arithmetic."""
        return self.root.evaluate(mpmath.mpf(x) if not isinstance(x, mpmath.mpf) else x, _MPMATH)

    def compose(self, inner: "Expression", name: Optional[str] = None) -> "Expression":
        """Return self(inner(x))."""
        root = self.root.substitute(inner.root)
        return Expression(root, name=name or f"{self.name}∘{inner.name}")

    @property
    def is_constant(self) -> bool:
        return VARIABLE not in _variables(self.root)

    def __repr__(self) -> str:
        return f"Expression({self.source!r})"

    def __str__(self) -> str:
        return self.source


def _variables(node: Node) -> set[str]:
    if isinstance(node, Variable):
        return {VARIABLE}
    if isinstance(node, Negate):
        return _variables(node.operand)
    if isinstance(node, Binary):
        return _variables(node.left) | _variables(node.right)
    if isinstance(node, Call):
        return _variables(node.argument)
    return set()


def parse(source: str, name: Optional[str] = None) -> Expression:
    """
    Parse a one-variable expression.

    Raises:
        ExpressionError: on any syntax error, with the offending column.
    """
    return Expression(_Parser(source).parse(), source=source.strip(), name=name)
