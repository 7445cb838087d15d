"""
Symmetric eigendecomposition and matrix functions f(M) = U f(Lambda) U^T.

Tridiagonal matrices (every M_n[id]) go through LAPACK's implicit QL/QR
driver; general dense matrices through cyclic Jacobi rotations. Output is
deterministic: eigenvalues ascending, each eigenvector signed so its
largest-magnitude component is positive.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.linalg

from .errors import EigenNoConvergenceError, SingularNodeError, UsageError
from .opmatrix import MultiplicationMatrix

MAX_SWEEPS = 30
TRIDIAGONAL_THRESHOLD = 1e-12

_EPS = np.finfo(float).eps


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Ascending eigenvalues with orthonormal eigenvectors as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    source: Optional[MultiplicationMatrix] = None
    method: str = "jacobi"
    sweeps: int = 0

    def __post_init__(self):
        for name in ("eigenvalues", "eigenvectors"):
            array = np.array(getattr(self, name), dtype=float)
            array.flags.writeable = False
            object.__setattr__(self, name, array)

    @property
    def size(self) -> int:
        return len(self.eigenvalues)


def _rotate(a: np.ndarray, v: np.ndarray, p: int, q: int, c: float, s: float) -> None:
    """Apply the plane rotation J(p, q) as A <- J^T A J, V <- V J in place."""
    col_p, col_q = a[:, p].copy(), a[:, q].copy()
    a[:, p] = c * col_p - s * col_q
    a[:, q] = s * col_p + c * col_q
    row_p, row_q = a[p, :].copy(), a[q, :].copy()
    a[p, :] = c * row_p - s * row_q
    a[q, :] = s * row_p + c * row_q
    a[p, q] = a[q, p] = 0.0
    vec_p, vec_q = v[:, p].copy(), v[:, q].copy()
    v[:, p] = c * vec_p - s * vec_q
    v[:, q] = s * vec_p + c * vec_q


def _jacobi(matrix: np.ndarray, max_sweeps: int = MAX_SWEEPS) -> tuple[np.ndarray, np.ndarray, int]:
    """
    Cyclic Jacobi eigenvalue iteration.

    A rotation is skipped when |a_pq| is negligible next to sqrt(|a_pp a_qq|);
    convergence is a full sweep without rotations.
    """
    a = np.array(matrix, dtype=float)
    size = a.shape[0]
    v = np.eye(size)
    norm = float(np.linalg.norm(a))
    for sweep in range(1, max_sweeps + 1):
        rotations = 0
        for p in range(size - 1):
            for q in range(p + 1, size):
                apq = a[p, q]
                app, aqq = a[p, p], a[q, q]
                if abs(apq) <= _EPS * (math.sqrt(abs(app * aqq)) + _EPS * norm):
                    continue
                theta = (aqq - app) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.hypot(t, 1.0)
                _rotate(a, v, p, q, c, t * c)
                rotations += 1
        if rotations == 0:
            return np.diag(a).copy(), v, sweep
    raise EigenNoConvergenceError("eigh", f"Jacobi rotations did not converge in {max_sweeps} sweeps")


def _canonical(eigenvalues: np.ndarray, eigenvectors: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(eigenvalues, kind="stable")
    eigenvalues = eigenvalues[order]
    eigenvectors = eigenvectors[:, order]
    pivots = np.argmax(np.abs(eigenvectors), axis=0)
    signs = np.sign(eigenvectors[pivots, np.arange(eigenvectors.shape[1])])
    signs[signs == 0] = 1.0
    return eigenvalues, eigenvectors * signs


def eigh(matrix: MultiplicationMatrix) -> SpectralDecomposition:
    """
    Eigendecomposition of a multiplication matrix.

    Raises:
        EigenNoConvergenceError: iteration cap exceeded on either path.
    """
    entries = matrix.entries
    if matrix.size == 1:
        return SpectralDecomposition(entries[0].copy(), np.ones((1, 1)), matrix, "trivial", 0)

    scale = max(1.0, float(np.max(np.abs(entries))))
    if matrix.is_tridiagonal(TRIDIAGONAL_THRESHOLD * scale):
        try:
            values, vectors = scipy.linalg.eigh_tridiagonal(
                np.diag(entries).copy(), np.diag(entries, 1).copy(), lapack_driver="stev"
            )
        except np.linalg.LinAlgError as exc:
            raise EigenNoConvergenceError("eigh", f"implicit QL did not converge: {exc}") from exc
        method, sweeps = "tridiagonal", 0
    else:
        values, vectors, sweeps = _jacobi(entries)
        method = "jacobi"

    values, vectors = _canonical(values, vectors)
    return SpectralDecomposition(values, vectors, matrix, method, sweeps)


def node_values(dec: SpectralDecomposition, f: Callable, operation: str = "apply_function") -> np.ndarray:
    """f evaluated at every eigenvalue; non-finite values are rejected."""
    with np.errstate(all="ignore"):
        values = np.asarray(f(dec.eigenvalues), dtype=float) + np.zeros(dec.size)
    bad = ~np.isfinite(values)
    if np.any(bad):
        node = float(dec.eigenvalues[np.argmax(bad)])
        raise SingularNodeError(operation, f"function is not finite at node {node:.17g}")
    return values


def apply_function(dec: SpectralDecomposition, f: Callable) -> np.ndarray:
    """Return U diag(f(lambda)) U^T, exactly symmetric."""
    values = node_values(dec, f, "apply_function")
    u = dec.eigenvectors
    result = (u * values) @ u.T
    return (result + result.T) / 2.0


def entry_of_function(dec: SpectralDecomposition, f: Callable, i: int, j: int) -> float:
    """Return [f(M)]_ij = sum_k f(lambda_k) u_ik u_jk without forming f(M)."""
    if not (0 <= i < dec.size and 0 <= j < dec.size):
        raise UsageError("entry_of_function", f"index ({i}, {j}) outside a {dec.size}x{dec.size} matrix")
    values = node_values(dec, f, "entry_of_function")
    u = dec.eigenvectors
    return float(np.sum(values * u[i] * u[j]))


def decomposition_to_dict(dec: SpectralDecomposition) -> dict:
    return {
        "eigenvalues": [float(v) for v in dec.eigenvalues],
        "eigenvectors": [float(v) for v in dec.eigenvectors.ravel()],
    }


def decomposition_from_dict(data: dict) -> SpectralDecomposition:
    try:
        eigenvalues = np.asarray(data["eigenvalues"], dtype=float)
        size = len(eigenvalues)
        eigenvectors = np.asarray(data["eigenvectors"], dtype=float).reshape(size, size)
    except (KeyError, ValueError, TypeError) as exc:
        raise UsageError("decomposition", f"malformed decomposition document: {exc}") from exc
    return SpectralDecomposition(eigenvalues, eigenvectors, None, "loaded", 0)
