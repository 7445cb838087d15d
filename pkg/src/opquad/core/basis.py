"""
Orthonormal basis families on one-dimensional weighted L2 spaces.

A family is defined by a unit-mass weight w on an interval and the
monic three-term recurrence

    p_{k+1}(x) = (x - alpha_k) p_k(x) - beta_k p_{k-1}(x).

The orthonormal functions phi_k have positive leading coefficient and
phi_0 = 1. Their Jacobi matrix M_n[id] has alpha_k on the diagonal and
sqrt(beta_{k+1}) on the off-diagonal. Forward evaluation is unscaled and
supported for n <= 64.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import TYPE_CHECKING, Callable, NamedTuple, Union

import numpy as np
import scipy.linalg

from ..functions.expression import Expression, parse
from .errors import EigenNoConvergenceError, UnsupportedFamilyError, UsageError

if TYPE_CHECKING:
    from .opmatrix import MultiplicationMatrix

MAX_SUPPORTED_ORDER = 64


@dataclass(frozen=True, eq=False)
class BasisFamily:
    """
    Orthonormal basis of L2_w(domain) given by a monic recurrence.

    `sqrt_weight` is carried alongside `weight` so that integrands can be
    formed as (phi_i sqrt(w)) (phi_j sqrt(w)) without overflowing the
    polynomial part far out on unbounded domains.
    """

    name: str
    domain: tuple[float, float]
    weight: Expression
    sqrt_weight: Expression
    alpha: Callable[[int], float]
    beta: Callable[[int], float]

    def __str__(self) -> str:
        return self.name


class Recurrence(NamedTuple):
    """Monic coefficients at index k and the orthonormal coupling to k+1."""

    alpha: float
    beta: float
    offdiagonal: float


def _laguerre_alpha(k: int) -> float:
    return 2.0 * k + 1.0


def _laguerre_beta(k: int) -> float:
    return float(k * k) if k > 0 else 1.0


def _hermite_alpha(k: int) -> float:
    return 0.0


def _hermite_beta(k: int) -> float:
    return k / 2.0 if k > 0 else 1.0


def _legendre_alpha(k: int) -> float:
    return 0.0


def _legendre_beta(k: int) -> float:
    return k * k / (4.0 * k * k - 1.0) if k > 0 else 1.0


LAGUERRE = BasisFamily(
    name="laguerre",
    domain=(0.0, math.inf),
    weight=parse("exp(-x)"),
    sqrt_weight=parse("exp(-x/2)"),
    alpha=_laguerre_alpha,
    beta=_laguerre_beta,
)

HERMITE = BasisFamily(
    name="hermite",
    domain=(-math.inf, math.inf),
    weight=parse("exp(-x^2)/sqrt(pi)"),
    sqrt_weight=parse("exp(-x^2/2)/pi^(1/4)"),
    alpha=_hermite_alpha,
    beta=_hermite_beta,
)

LEGENDRE = BasisFamily(
    name="legendre",
    domain=(-1.0, 1.0),
    weight=parse("1/2"),
    sqrt_weight=parse("sqrt(1/2)"),
    alpha=_legendre_alpha,
    beta=_legendre_beta,
)

FAMILIES: dict[str, BasisFamily] = {f.name: f for f in (LAGUERRE, HERMITE, LEGENDRE)}


def family(name: Union[str, BasisFamily]) -> BasisFamily:
    """Look up a shipped family by case-insensitive name."""
    if isinstance(name, BasisFamily):
        return name
    try:
        return FAMILIES[name.strip().lower()]
    except KeyError:
        raise UnsupportedFamilyError(name) from None


def custom_family(
    name: str,
    domain: tuple[float, float],
    weight: Union[str, Expression],
    sqrt_weight: Union[str, Expression],
    alpha: Callable[[int], float],
    beta: Callable[[int], float],
) -> BasisFamily:
    """
    Build a family from a user-supplied monic recurrence.

    The weight must already have unit mass and beta(0) must return 1.
    """
    to_expr = lambda e: parse(e) if isinstance(e, str) else e
    return BasisFamily(name, domain, to_expr(weight), to_expr(sqrt_weight), alpha, beta)


def recurrence_coeffs(basis: BasisFamily, k: int) -> Recurrence:
    """
    Return (alpha_k, beta_k) of the monic recurrence and the orthonormal
    off-diagonal entry sqrt(beta_{k+1}) coupling phi_k and phi_{k+1}.
    """
    if k < 0:
        raise UsageError("recurrence_coeffs", "index must be nonnegative")
    return Recurrence(
        alpha=float(basis.alpha(k)),
        beta=float(basis.beta(k)),
        offdiagonal=math.sqrt(basis.beta(k + 1)),
    )


def jacobi_entries(basis: BasisFamily, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal (n+1) and off-diagonal (n) of M_n[id]."""
    if n < 0:
        raise UsageError("jacobi_matrix", "order must be nonnegative")
    diagonal = np.array([basis.alpha(k) for k in range(n + 1)], dtype=float)
    offdiagonal = np.sqrt(np.array([basis.beta(k) for k in range(1, n + 1)], dtype=float))
    return diagonal, offdiagonal


def basis_values(basis: BasisFamily, n: int, x, scale=1.0) -> np.ndarray:
    """
    Evaluate phi_0..phi_n at points x by forward recurrence.

    Args:
        basis: The family
        n: Highest index
        x: Points (any shape)
        scale: Factor applied to phi_0; the recurrence is linear so every
            row is multiplied by it. Pass sqrt(w(x)) for weighted values.

    Returns:
        Array of shape (n+1,) + shape(x)
    """
    x = np.asarray(x, dtype=float)
    diagonal, offdiagonal = jacobi_entries(basis, n)
    values = np.empty((n + 1,) + x.shape)
    with np.errstate(over="ignore", invalid="ignore"):
        values[0] = np.broadcast_to(np.asarray(scale, dtype=float), x.shape)
        if n >= 1:
            values[1] = (x - diagonal[0]) * values[0] / offdiagonal[0]
        for k in range(1, n):
            values[k + 1] = ((x - diagonal[k]) * values[k]
                             - offdiagonal[k - 1] * values[k - 1]) / offdiagonal[k]
    return values


def eval_basis(basis: BasisFamily, k: int, x):
    """Return phi_k(x); overflow is not trapped."""
    if k < 0:
        raise UsageError("eval_basis", "index must be nonnegative")
    value = basis_values(basis, k, x)[k]
    return value if value.ndim else float(value)


def jacobi_matrix(basis: BasisFamily, n: int) -> "MultiplicationMatrix":
    """Assemble the symmetric tridiagonal M_n[id] from the recurrence."""
    from .opmatrix import MultiplicationMatrix

    diagonal, offdiagonal = jacobi_entries(basis, n)
    entries = np.diag(diagonal) + np.diag(offdiagonal, 1) + np.diag(offdiagonal, -1)
    return MultiplicationMatrix(
        order=n,
        entries=entries,
        basis=basis,
        inside_function=parse("x", name="id"),
        element_tolerance=0.0,
    )


@lru_cache(maxsize=None)
def gauss_rule(basis: BasisFamily, order: int) -> tuple[np.ndarray, np.ndarray]:
    """
    Order-point Gauss rule of the family by Golub-Welsch.

    Nodes are the eigenvalues of M_{order-1}[id]; weights are the squared
    first eigenvector components (the weight has unit mass).
    """
    if order < 1:
        raise UsageError("gauss_rule", "a rule needs at least one node")
    if order == 1:
        nodes, weights = np.array([float(basis.alpha(0))]), np.ones(1)
        nodes.flags.writeable = False
        weights.flags.writeable = False
        return nodes, weights
    diagonal, offdiagonal = jacobi_entries(basis, order - 1)
    try:
        nodes, vectors = scipy.linalg.eigh_tridiagonal(
            diagonal, offdiagonal, lapack_driver="stev"
        )
    except np.linalg.LinAlgError as exc:
        raise EigenNoConvergenceError("gauss_rule", str(exc)) from exc
    weights = vectors[0, :] ** 2
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights
