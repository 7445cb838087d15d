"""
opquad - Numerical integration through multiplication-operator matrices.

An integral of f(g(x)) against a weight w is approximated from the
eigendecomposition of the matrix M_n[g] of the multiplication operator
in an orthonormal polynomial basis:
  - build_matrix()          : M_n[g] with elements integral phi_i g phi_j w
  - jacobi_matrix()         : exact M_n[id] from the three-term recurrence
  - eigh()                  : ascending eigenvalues and canonical eigenvectors
  - rule_from_matrix()      : nodes and weights, basic or reweighted
  - integrate_basic()       : [f(M_n[g])]_00
  - integrate_bilinear()    : u* f(M_n[g]) v
  - integrate_product()     : [f1(M_n[g1]) f2(M_n[g2])]_00
  - integrate_reweighted()  : rule with weights |v* u_j|^2 / h(lambda_j)^2
  - integrate_improper()    : basic rule guarded against an endpoint singularity
  - run_study()             : n-sweep against an mpmath reference
"""

from .core.errors import (
    OpquadError,
    UsageError,
    NumericalError,
    UnsupportedFamilyError,
    UnknownFunctionError,
    ExpressionError,
    NonConvergentElementError,
    EigenNoConvergenceError,
    SingularNodeError,
    ZeroWeightingError,
    NodeTooCloseError,
    OracleNoConvergenceError,
    InsufficientDataError,
)
from .core.basis import (
    BasisFamily,
    LAGUERRE,
    HERMITE,
    LEGENDRE,
    family,
    custom_family,
    recurrence_coeffs,
    eval_basis,
    jacobi_matrix,
    gauss_rule,
)
from .core.opmatrix import (
    MultiplicationMatrix,
    CoefficientVector,
    SignReport,
    element,
    build_matrix,
    fourier_coeffs,
    basis_vector,
    sign_report,
)
from .core.spectral import SpectralDecomposition, eigh, apply_function, entry_of_function
from .core.quadrature import (
    QuadratureRule,
    rule_from_matrix,
    operator_matrix,
    integrate_basic,
    integrate_element,
    integrate_bilinear,
    integrate_product,
    integrate_reweighted,
    endpoint_clearance,
    integrate_improper,
)
from .functions.expression import Expression, parse
from .functions.registry import resolve, compose
from .study.harness import StudyConfig, StudyReport, run_study, classify_trend, reference_value
from .study.presets import PRESETS, preset

__version__ = "0.2.0"

__all__ = [
    "OpquadError",
    "UsageError",
    "NumericalError",
    "UnsupportedFamilyError",
    "UnknownFunctionError",
    "ExpressionError",
    "NonConvergentElementError",
    "EigenNoConvergenceError",
    "SingularNodeError",
    "ZeroWeightingError",
    "NodeTooCloseError",
    "OracleNoConvergenceError",
    "InsufficientDataError",
    "BasisFamily",
    "LAGUERRE",
    "HERMITE",
    "LEGENDRE",
    "family",
    "custom_family",
    "recurrence_coeffs",
    "eval_basis",
    "jacobi_matrix",
    "gauss_rule",
    "MultiplicationMatrix",
    "CoefficientVector",
    "SignReport",
    "element",
    "build_matrix",
    "fourier_coeffs",
    "basis_vector",
    "sign_report",
    "SpectralDecomposition",
    "eigh",
    "apply_function",
    "entry_of_function",
    "QuadratureRule",
    "rule_from_matrix",
    "operator_matrix",
    "integrate_basic",
    "integrate_element",
    "integrate_bilinear",
    "integrate_product",
    "integrate_reweighted",
    "endpoint_clearance",
    "integrate_improper",
    "Expression",
    "parse",
    "resolve",
    "compose",
    "StudyConfig",
    "StudyReport",
    "run_study",
    "classify_trend",
    "reference_value",
    "PRESETS",
    "preset",
]
