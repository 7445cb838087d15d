"""
Exception hierarchy for opquad.

Every error names the operation that raised it so a single line is
enough to diagnose a failure from the command line.
"""

from typing import Optional


class OpquadError(Exception):
    """Base class for all opquad errors."""

    def __init__(self, operation: str, message: str):
        self.operation = operation
        self.message = message
        super().__init__(f"{operation}: {message}")


class UsageError(OpquadError):
    """Invalid input supplied by the caller."""


class UnsupportedFamilyError(UsageError):
    """Requested basis family is not known."""

    def __init__(self, name: str):
        super().__init__("family", f"unsupported basis family '{name}'")
        self.name = name


class UnknownFunctionError(UsageError):
    """A function name is neither registered nor a parseable expression."""


class ExpressionError(UsageError):
    """Syntax error in a one-variable expression."""

    def __init__(self, source: str, column: Optional[int], message: str):
        where = f" at column {column}" if column is not None else ""
        super().__init__("parse", f"{message}{where} in '{source}'")
        self.source = source
        self.column = column


class NumericalError(OpquadError):
    """A numerical procedure failed or its preconditions were violated."""


class NonConvergentElementError(NumericalError):
    """Successive integrator refinements disagree beyond tolerance."""


class EigenNoConvergenceError(NumericalError):
    """Eigensolver exceeded its iteration cap."""


class SingularNodeError(NumericalError):
    """Outside function is not finite at some node."""


class ZeroWeightingError(NumericalError):
    """Weighting function vanishes at some node."""


class NodeTooCloseError(NumericalError):
    """A node lies within the guard distance of a declared singularity."""


class OracleNoConvergenceError(NumericalError):
    """Reference integral did not reach the requested tolerance."""


class InsufficientDataError(OpquadError):
    """Too few finite errors to classify a convergence trend."""
