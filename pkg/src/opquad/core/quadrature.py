"""
Quadrature rules extracted from multiplication matrices.

Nodes are the eigenvalues lambda_j of M_n[g]. With a weighting function
h and its Fourier coefficients v, the weights are

    w_j = |v* u_j|^2 / h(lambda_j)^2,

which reduces to the Gaussian |[u_j]_0|^2 for h = 1, v = e_0.

Convergence of the reweighted rule for a fast-growing F is guaranteed when
|F| <= h^2 and h^2 is bounded below by a positive constant on the
essential range of g. Only h(lambda_j) != 0 at the nodes is enforced here.
"""

from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from ..functions.expression import Expression, Variable
from .basis import BasisFamily, family, jacobi_matrix
from .errors import NodeTooCloseError, SingularNodeError, UsageError, ZeroWeightingError
from .opmatrix import (
    DEFAULT_TOL,
    CoefficientVector,
    MultiplicationMatrix,
    basis_vector,
    build_matrix,
    fourier_coeffs,
    function_label,
)
from .spectral import SpectralDecomposition, apply_function, eigh, entry_of_function, node_values

ZERO_WEIGHTING = 1e-300
NEGATIVE_WEIGHT_TOLERANCE = 1e-14
GUARD_FACTOR = 1e-8

Coefficients = Union[CoefficientVector, np.ndarray, list]


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """
    Nodes (ascending eigenvalues) and weights with provenance.

    coefficients are the Fourier coefficients v of the weighting function
    the weights were formed with; e_0 for the basic rule.
    """

    nodes: np.ndarray
    weights: np.ndarray
    weighting: str = "1"
    order: int = 0
    basis: Optional[BasisFamily] = None
    inside_function: Optional[str] = None
    coefficients: Optional[np.ndarray] = None

    def __post_init__(self):
        for name in ("nodes", "weights", "coefficients"):
            if getattr(self, name) is None:
                continue
            array = np.array(getattr(self, name), dtype=float)
            array.flags.writeable = False
            object.__setattr__(self, name, array)
        if self.nodes.shape != self.weights.shape:
            raise UsageError("rule", "nodes and weights differ in length")

    def apply(self, f: Callable, operation: str = "integrate") -> float:
        """Sum_j w_j f(lambda_j)."""
        with np.errstate(all="ignore"):
            values = np.asarray(f(self.nodes), dtype=float) + np.zeros(len(self.nodes))
        bad = ~np.isfinite(values)
        if np.any(bad):
            node = float(self.nodes[np.argmax(bad)])
            raise SingularNodeError(operation, f"function is not finite at node {node:.17g}")
        return float(np.sum(self.weights * values))


def _is_identity(g: Callable) -> bool:
    return isinstance(g, Expression) and isinstance(g.root, Variable)


def substitute(outer: Callable, inner: Callable) -> Callable:
    """outer(inner(x)), as an expression when both sides are expressions."""
    if isinstance(outer, Expression) and isinstance(inner, Expression):
        return outer.compose(inner)
    return lambda x: outer(inner(x))


def operator_matrix(basis: BasisFamily, g: Callable, n: int, tol: float = DEFAULT_TOL) -> MultiplicationMatrix:
    """M_n[g]; the identity uses the exact Jacobi matrix."""
    basis = family(basis)
    if _is_identity(g):
        return jacobi_matrix(basis, n)
    return build_matrix(basis, g, n, tol)


def _projections(dec: SpectralDecomposition, v: Coefficients, operation: str) -> np.ndarray:
    values = v.values if isinstance(v, CoefficientVector) else np.asarray(v, dtype=float)
    if values.shape != (dec.size,):
        raise UsageError(operation, f"coefficient vector has length {values.size}, expected {dec.size}")
    return dec.eigenvectors.T @ values


def rule_from_matrix(dec: SpectralDecomposition, h: Optional[Callable] = None,
                     v: Optional[Coefficients] = None) -> QuadratureRule:
    """
    Quadrature rule from a decomposition.

    Leave h and v unset for the basic rule (h = 1, v = e_0).

    Raises:
        ZeroWeightingError: |h(lambda_j)| < 1e-300 at some node.
    """
    source = dec.source
    if h is None:
        h_values = np.ones(dec.size)
        weighting = "1"
    else:
        h_values = node_values(dec, h, "rule_from_matrix")
        weighting = function_label(h)
        small = np.abs(h_values) < ZERO_WEIGHTING
        if np.any(small):
            node = float(dec.eigenvalues[np.argmax(small)])
            raise ZeroWeightingError("rule_from_matrix", f"weighting function vanishes at node {node:.17g}")
    if v is None:
        projections = dec.eigenvectors[0, :]
        coefficients = np.eye(dec.size)[0]
    else:
        projections = _projections(dec, v, "rule_from_matrix")
        coefficients = v.values if isinstance(v, CoefficientVector) else np.asarray(v, dtype=float)
    weights = projections ** 2 / h_values ** 2
    return QuadratureRule(
        nodes=dec.eigenvalues,
        weights=weights,
        weighting=weighting,
        order=dec.size - 1,
        basis=source.basis if source is not None else None,
        inside_function=source.label if source is not None else None,
        coefficients=coefficients,
    )


def integrate_basic(basis: BasisFamily, g: Callable, f: Callable, n: int,
                    tol: float = DEFAULT_TOL) -> float:
    """[f(M_n[g])]_00 = sum_j |[u_j]_0|^2 f(lambda_j)."""
    rule = rule_from_matrix(eigh(operator_matrix(basis, g, n, tol)))
    return rule.apply(f, "integrate_basic")


def integrate_element(basis: BasisFamily, g: Callable, f: Callable, i: int, j: int, n: int,
                      tol: float = DEFAULT_TOL) -> float:
    """[f(M_n[g])]_ij, which tends to [M[f(g)]]_ij for polynomially bounded f."""
    return entry_of_function(eigh(operator_matrix(basis, g, n, tol)), f, i, j)


def integrate_bilinear(basis: BasisFamily, g: Callable, f: Callable, u: Coefficients,
                       v: Coefficients, n: int, tol: float = DEFAULT_TOL) -> float:
    """u* f(M_n[g]) v through the spectral sum."""
    dec = eigh(operator_matrix(basis, g, n, tol))
    values = node_values(dec, f, "integrate_bilinear")
    return float(np.sum(values * _projections(dec, u, "integrate_bilinear")
                        * _projections(dec, v, "integrate_bilinear")))


def integrate_product(basis: BasisFamily, g1: Callable, g2: Callable, f1: Callable, f2: Callable,
                      n: int, tol: float = DEFAULT_TOL) -> float:
    """[f1(M_n[g1]) f2(M_n[g2])]_00."""
    left = apply_function(eigh(operator_matrix(basis, g1, n, tol)), f1)
    right = apply_function(eigh(operator_matrix(basis, g2, n, tol)), f2)
    return float(left[0, :] @ right[:, 0])


def weighting_coefficients(basis: BasisFamily, g: Callable, h: Callable, n: int,
                           tol: float = DEFAULT_TOL) -> CoefficientVector:
    """Fourier coefficients of h(g(x)); a constant h gives c e_0 exactly."""
    basis = family(basis)
    if isinstance(h, Expression) and h.is_constant:
        constant = float(h(0.0))
        unit = basis_vector(basis, 0, n)
        return CoefficientVector(constant * unit.values, basis, h)
    return fourier_coeffs(basis, substitute(h, g), n, tol)


def integrate_reweighted(basis: BasisFamily, g: Callable, F: Callable, h: Callable, n: int,
                         tol: float = DEFAULT_TOL) -> float:
    """
    Reweighted rule v~* F(M_n[g]) v~ with v~ = h(M_n[g])^-1 v.

    h is a function of the nodes (in convergence studies h = h2 o g^-1);
    v holds the Fourier coefficients of h(g(x)).
    """
    dec = eigh(operator_matrix(basis, g, n, tol))
    v = weighting_coefficients(basis, g, h, n, tol)
    return rule_from_matrix(dec, h, v).apply(F, "integrate_reweighted")


def endpoint_clearance(rule: QuadratureRule, c: float) -> float:
    """min_j |lambda_j - c|."""
    return float(np.min(np.abs(rule.nodes - c)))


def default_guard(c: float) -> float:
    return GUARD_FACTOR * (1.0 + abs(c))


def check_clearance(rule: QuadratureRule, c: float, guard_tol: Optional[float] = None,
                    operation: str = "integrate_improper") -> float:
    """
    Return the clearance of c from the nodes.

    Raises:
        NodeTooCloseError: some node lies within guard_tol of c.
    """
    guard = default_guard(c) if guard_tol is None else guard_tol
    clearance = endpoint_clearance(rule, c)
    if clearance <= guard:
        raise NodeTooCloseError(
            operation,
            f"node within {clearance:.3g} of singularity at {c:.17g} (guard {guard:.3g})",
        )
    return clearance


def integrate_improper(basis: BasisFamily, g: Callable, f: Callable, c: float, p: float, n: int,
                       guard_tol: Optional[float] = None, tol: float = DEFAULT_TOL) -> float:
    """
    Basic rule for f singular at an endpoint c of the essential range of g,
    |f(x)| <= a + b/|x - c|^p with 0 <= p <= 1.

    Raises:
        NodeTooCloseError: some node lies within guard_tol of c.
    """
    if not 0.0 <= p <= 1.0:
        raise UsageError("integrate_improper", f"singularity order p={p} outside [0, 1]")
    rule = rule_from_matrix(eigh(operator_matrix(basis, g, n, tol)))
    check_clearance(rule, c, guard_tol)
    return rule.apply(f, "integrate_improper")


def rule_to_dict(rule: QuadratureRule) -> dict:
    return {
        "basis": rule.basis.name if rule.basis is not None else None,
        "g": rule.inside_function,
        "h": rule.weighting,
        "n": rule.order,
        "nodes": [float(x) for x in rule.nodes],
        "weights": [float(w) for w in rule.weights],
        "coefficients": (None if rule.coefficients is None
                         else [float(c) for c in rule.coefficients]),
    }
