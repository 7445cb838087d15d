"""
Named inside, outside and weighting functions.

Inside functions are registered together with their inverse on [0, inf)
so that a function of the nodes F = f o g^-1 can be formed for any
outside function f. Every name accepted here is also accepted by the
command line; anything else is parsed as an expression in x.
"""

from dataclasses import dataclass
from typing import Callable, Optional, Union

from ..core.errors import ExpressionError, UnknownFunctionError
from .expression import Expression, parse


@dataclass(frozen=True)
class InsideFunction:
    name: str
    expression: Expression
    inverse: Expression


def _inside(name: str, source: str, inverse: str) -> InsideFunction:
    return InsideFunction(name, parse(source, name=name), parse(inverse, name=f"{name}^-1"))


INSIDE_FUNCTIONS: dict[str, InsideFunction] = {
    entry.name: entry
    for entry in (
        _inside("sqrt", "sqrt(x)", "x^2"),
        _inside("id", "x", "x"),
        _inside("x15", "x^(3/2)", "x^(2/3)"),
        _inside("square", "x^2", "sqrt(x)"),
    )
}

# g1..g4 of the exponential-weight convergence study.
ALIASES = {"g1": "sqrt", "g2": "id", "g3": "x15", "g4": "square"}

FUNCTIONS: dict[str, str] = {
    "xcossqrt": "x*cos(sqrt(x))",
    "xcoshsqrt": "x*cosh(sqrt(x))",
    "f1": "sin(sqrt(x))",
    "f2": "exp(x)/(1+x^2)",
    "h1": "1",
    "h2": "exp(x/2)/(1+x^2)^(3/8)",
}


def names() -> list[str]:
    """Every registered name, aliases included."""
    return sorted(set(INSIDE_FUNCTIONS) | set(ALIASES) | set(FUNCTIONS))


def inside_function(name: str) -> InsideFunction:
    """Registered inside function with its inverse."""
    key = ALIASES.get(name, name)
    try:
        return INSIDE_FUNCTIONS[key]
    except KeyError:
        raise UnknownFunctionError(
            "registry", f"'{name}' is not an invertible inside function"
        ) from None


def resolve(name_or_expr: Union[str, Expression, Callable]) -> Callable:
    """
    Turn a registered name or an expression string into a callable.

    Callables (including Expression) pass through unchanged.

    Raises:
        UnknownFunctionError: neither a registered name nor a valid expression
    """
    if not isinstance(name_or_expr, str):
        return name_or_expr
    text = name_or_expr.strip()
    key = ALIASES.get(text, text)
    if key in INSIDE_FUNCTIONS:
        return INSIDE_FUNCTIONS[key].expression
    if key in FUNCTIONS:
        return parse(FUNCTIONS[key], name=key)
    try:
        return parse(text)
    except ExpressionError as exc:
        raise UnknownFunctionError(
            "resolve", f"'{text}' is not a registered function ({exc.message})"
        ) from exc


def compose(f: Union[str, Expression], g: str, name: Optional[str] = None) -> Expression:
    """F = f o g^-1 as an expression of the nodes."""
    outer = resolve(f)
    if not isinstance(outer, Expression):
        raise UnknownFunctionError("compose", "outside function must be an expression")
    inside = inside_function(g)
    return outer.compose(inside.inverse, name=name or f"{outer.name}∘{inside.name}^-1")
