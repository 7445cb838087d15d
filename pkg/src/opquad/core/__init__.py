"""Core numerics: basis families, operator matrices, eigendecomposition, rules."""
from .errors import OpquadError, UsageError, NumericalError
from .basis import BasisFamily, family, custom_family, eval_basis, jacobi_matrix, gauss_rule
from .opmatrix import MultiplicationMatrix, CoefficientVector, build_matrix, fourier_coeffs
from .spectral import SpectralDecomposition, eigh, apply_function, entry_of_function
from .quadrature import QuadratureRule, rule_from_matrix
from .timer import StageCollector, StageRecord, stage_timer, default_collector
