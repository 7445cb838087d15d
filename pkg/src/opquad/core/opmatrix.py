"""
Finite matrix approximations of multiplication operators.

Matrix elements [M_n[g]]_ij = integral of phi_i g phi_j w and Fourier
coefficients v_i = integral of h phi_i w are computed numerically:

  1. Gauss rules of the basis family's own weight at escalating orders
     (64, 128, 256, 512). The weight is absorbed exactly, so polynomial
     integrands are exact once the order is high enough. Two successive
     orders agreeing to the relative tolerance are accepted.
  2. Otherwise adaptive Gauss-Kronrod-15 bisection on the compactified
     domain (x = (1 - t)/t on [0, inf)), which handles integrable endpoint
     behaviour such as sqrt(x).

All entries of a matrix are integrated together as one vector-valued
integral. Arithmetic is IEEE double precision; orders above ~64 may be
tolerance-limited.
"""

from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np
import scipy.integrate

from .basis import BasisFamily, basis_values, family, gauss_rule
from .errors import NonConvergentElementError, UsageError

DEFAULT_TOL = 1e-10
ESCALATION_ORDERS = (64, 128, 256, 512)
SIGN_THRESHOLD = 1e-10
TRIDIAGONAL_THRESHOLD = 1e-12

_ADAPTIVE_LIMIT = 2000
_NEGLIGIBLE_WEIGHT = 1e-300


def function_label(func: Callable) -> str:
    """Printable name of an inside/outside/weighting function."""
    for attribute in ("name", "source", "__name__"):
        label = getattr(func, attribute, None)
        if isinstance(label, str):
            return label
    return repr(func)


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float)
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class MultiplicationMatrix:
    """
    Symmetric (n+1)x(n+1) matrix M_n[g] with provenance.

    `element_tolerance` is the achieved relative accuracy of the entries
    (0 for matrices assembled exactly from a recurrence);
    `max_asymmetry` is the largest |A_ij - A_ji| seen before symmetrising.
    """

    order: int
    entries: np.ndarray
    basis: BasisFamily
    inside_function: Callable
    element_tolerance: float = 0.0
    requested_tolerance: float = DEFAULT_TOL
    max_asymmetry: float = 0.0

    def __post_init__(self):
        entries = _frozen(self.entries)
        if entries.shape != (self.order + 1, self.order + 1):
            raise UsageError("matrix", f"expected shape {(self.order + 1,) * 2}, got {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise NonConvergentElementError("build_matrix", "matrix has non-finite entries")
        if not np.array_equal(entries, entries.T):
            raise UsageError("matrix", "entries are not symmetric")
        object.__setattr__(self, "entries", entries)

    @property
    def size(self) -> int:
        return self.order + 1

    @property
    def label(self) -> str:
        return function_label(self.inside_function)

    def truncate(self, n: int) -> "MultiplicationMatrix":
        """Leading principal (n+1)x(n+1) section, i.e. M_n[g] from M_N[g]."""
        if not 0 <= n <= self.order:
            raise UsageError("truncate", f"order {n} outside 0..{self.order}")
        return MultiplicationMatrix(
            order=n,
            entries=self.entries[: n + 1, : n + 1],
            basis=self.basis,
            inside_function=self.inside_function,
            element_tolerance=self.element_tolerance,
            requested_tolerance=self.requested_tolerance,
            max_asymmetry=self.max_asymmetry,
        )

    def is_tridiagonal(self, threshold: float = TRIDIAGONAL_THRESHOLD) -> bool:
        """True when every entry with |i-j| >= 2 is below threshold."""
        return bool(np.all(np.abs(np.triu(self.entries, 2)) <= threshold))


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    """Fourier coefficients v_i = <phi_i, h> for i = 0..n."""

    values: np.ndarray
    basis: BasisFamily
    source_function: Callable
    element_tolerance: float = 0.0

    def __post_init__(self):
        values = _frozen(self.values)
        if values.ndim != 1 or not np.all(np.isfinite(values)):
            raise NonConvergentElementError("fourier_coeffs", "coefficients must be a finite vector")
        object.__setattr__(self, "values", values)

    @property
    def order(self) -> int:
        return len(self.values) - 1

    def truncate(self, n: int) -> "CoefficientVector":
        """First n+1 components."""
        if not 0 <= n <= self.order:
            raise UsageError("truncate", f"order {n} outside 0..{self.order}")
        return CoefficientVector(self.values[: n + 1], self.basis,
                                 self.source_function, self.element_tolerance)


def basis_vector(basis: BasisFamily, k: int, n: int) -> CoefficientVector:
    """Coefficients of phi_k in a basis truncated at n (the unit vector e_k)."""
    values = np.zeros(n + 1)
    values[k] = 1.0
    return CoefficientVector(values, basis, lambda x: basis_values(basis, k, x)[k])


class SignReport(NamedTuple):
    """Entrywise signs (+1, 0, -1) of a matrix and whether none is negative."""

    signs: np.ndarray
    all_nonnegative: bool

    def symbols(self) -> list[list[str]]:
        glyph = {1: "+", 0: "0", -1: "-"}
        return [[glyph[int(s)] for s in row] for row in self.signs]

    def __str__(self) -> str:
        return "\n".join(" ".join(row) for row in self.symbols())


# ---------------------------------------------------------------------------
# Integration engine
# ---------------------------------------------------------------------------

def _gauss_integral(basis: BasisFamily, func: Callable, n: int, order: int,
                    bilinear: bool) -> np.ndarray:
    nodes, weights = gauss_rule(basis, order)
    keep = weights > 0.0
    nodes, weights = nodes[keep], weights[keep]
    phi = basis_values(basis, n, nodes)
    with np.errstate(all="ignore"):
        weighted = np.asarray(func(nodes), dtype=float) * weights
        if bilinear:
            return (phi * weighted) @ phi.T
        return phi @ weighted


def _adaptive_integral(basis: BasisFamily, func: Callable, n: int, tol: float,
                       bilinear: bool, operation: str) -> tuple[np.ndarray, float]:
    lower, upper = basis.domain

    def integrand(x: float) -> np.ndarray:
        point = np.array([x])
        sqrt_w = basis.sqrt_weight(point)
        phi = basis_values(basis, n, point, scale=sqrt_w)[:, 0]
        with np.errstate(all="ignore"):
            if bilinear:
                value = func(x) * np.outer(phi, phi)
            else:
                value = func(x) * sqrt_w[0] * phi
        if not np.all(np.isfinite(value)) and basis.weight(x) < _NEGLIGIBLE_WEIGHT:
            value = np.where(np.isfinite(value), value, 0.0)
        return value

    result, error, info = scipy.integrate.quad_vec(
        integrand, lower, upper,
        epsrel=tol, norm="max", quadrature="gk15",
        limit=_ADAPTIVE_LIMIT, full_output=True,
    )
    scale = float(np.max(np.abs(result))) if np.size(result) else 0.0
    if info.status not in (0, 2) or not np.all(np.isfinite(result)):
        raise NonConvergentElementError(
            operation,
            f"adaptive integration failed ({getattr(info, 'message', info.status)}); "
            f"error estimate {error:.3g} at scale {scale:.3g}",
        )
    achieved = error / scale if scale > 0 else 0.0
    return np.asarray(result, dtype=float), float(achieved)


def _integrate(basis: BasisFamily, func: Callable, n: int, tol: float,
               bilinear: bool, operation: str) -> tuple[np.ndarray, float]:
    """Gauss-rule escalation with adaptive fallback; returns (values, achieved tol)."""
    if tol <= 0:
        raise UsageError(operation, "tolerance must be positive")
    previous: Optional[np.ndarray] = None
    for order in ESCALATION_ORDERS:
        current = _gauss_integral(basis, func, n, order, bilinear)
        if not np.all(np.isfinite(current)):
            previous = None
            continue
        if previous is not None:
            scale = float(np.max(np.abs(current)))
            difference = float(np.max(np.abs(current - previous)))
            if difference <= tol * scale:
                return current, (difference / scale if scale > 0 else 0.0)
        previous = current
    return _adaptive_integral(basis, func, n, tol, bilinear, operation)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def element(basis: BasisFamily, g: Callable, i: int, j: int, tol: float = DEFAULT_TOL) -> float:
    """
    Single matrix element [M[g]]_ij = integral of phi_i g phi_j w.

    Raises:
        NonConvergentElementError: when neither the Gauss escalation nor
            the adaptive fallback reaches tol.
    """
    if i < 0 or j < 0:
        raise UsageError("element", "indices must be nonnegative")
    values, _ = _integrate(family(basis), g, max(i, j), tol, bilinear=True, operation="element")
    return float(values[i, j])


def build_matrix(basis: BasisFamily, g: Callable, n: int, tol: float = DEFAULT_TOL) -> MultiplicationMatrix:
    """
    Assemble M_n[g], symmetrised as (A + A^T)/2.

    The precondition that g phi_i is square integrable is not checked;
    a diverging escalation surfaces as NonConvergentElementError.
    """
    if n < 0:
        raise UsageError("build_matrix", "order must be nonnegative")
    basis = family(basis)
    raw, achieved = _integrate(basis, g, n, tol, bilinear=True, operation="build_matrix")
    return MultiplicationMatrix(
        order=n,
        entries=(raw + raw.T) / 2.0,
        basis=basis,
        inside_function=g,
        element_tolerance=achieved,
        requested_tolerance=tol,
        max_asymmetry=float(np.max(np.abs(raw - raw.T))),
    )


def fourier_coeffs(basis: BasisFamily, h: Callable, n: int, tol: float = DEFAULT_TOL) -> CoefficientVector:
    """Coefficients v_i = <phi_i, h> for i = 0..n."""
    if n < 0:
        raise UsageError("fourier_coeffs", "order must be nonnegative")
    basis = family(basis)
    values, achieved = _integrate(basis, h, n, tol, bilinear=False, operation="fourier_coeffs")
    return CoefficientVector(values, basis, h, achieved)


def sign_report(matrix: MultiplicationMatrix, threshold: float = SIGN_THRESHOLD) -> SignReport:
    """Entrywise sign pattern with zero-threshold threshold * max|entry|."""
    entries = matrix.entries
    cutoff = threshold * float(np.max(np.abs(entries))) if entries.size else 0.0
    signs = np.where(entries > cutoff, 1, np.where(entries < -cutoff, -1, 0)).astype(np.int8)
    return SignReport(signs=signs, all_nonnegative=bool(np.all(signs >= 0)))


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def matrix_to_dict(matrix: MultiplicationMatrix) -> dict:
    """JSON-ready mapping; entries are stored row-major."""
    return {
        "basis": matrix.basis.name,
        "g": matrix.label,
        "n": matrix.order,
        "entries": [float(v) for v in matrix.entries.ravel()],
        "tol": matrix.requested_tolerance,
        "achieved_tol": matrix.element_tolerance,
        "max_asymmetry": matrix.max_asymmetry,
    }


def matrix_from_dict(data: dict) -> MultiplicationMatrix:
    """Rebuild a matrix written by matrix_to_dict, entries bit-exact."""
    from ..functions.registry import resolve

    try:
        n = int(data["n"])
        entries = np.asarray(data["entries"], dtype=float).reshape(n + 1, n + 1)
        return MultiplicationMatrix(
            order=n,
            entries=entries,
            basis=family(data["basis"]),
            inside_function=resolve(data["g"]),
            element_tolerance=float(data.get("achieved_tol", 0.0)),
            requested_tolerance=float(data.get("tol", DEFAULT_TOL)),
            max_asymmetry=float(data.get("max_asymmetry", 0.0)),
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise UsageError("matrix", f"malformed matrix document: {exc}") from exc
