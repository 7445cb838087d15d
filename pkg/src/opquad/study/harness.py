"""
Convergence studies: n-sweeps of a quadrature rule against a reference.

For each inside function g the study builds M_N[g] once at the largest
order N of the sweep and evaluates every smaller order on its leading
principal sections, so a sweep costs one matrix build plus one
eigendecomposition per order. The outside and weighting functions are
turned into functions of the nodes through the registered inverse of g.
"""

import math
import re
from dataclasses import dataclass, field
from statistics import median
from typing import Callable, NamedTuple, Optional, Sequence, Union

import mpmath

from ..core.basis import family
from ..core.errors import (
    InsufficientDataError,
    OpquadError,
    OracleNoConvergenceError,
    UsageError,
)
from ..core.opmatrix import DEFAULT_TOL
from ..core.quadrature import operator_matrix, rule_from_matrix, weighting_coefficients
from ..core.spectral import eigh
from ..core.timer import StageCollector, stage_timer
from ..functions.expression import Expression
from ..functions.registry import compose, inside_function, resolve

CONVERGING = "converging"
DIVERGING = "diverging"
STAGNANT = "stagnant"
INSUFFICIENT = "insufficient-data"

ERROR_FLOOR = 1e-15
MIN_TREND_POINTS = 4
ORACLE_DIGITS = 30
ORACLE_MAX_DEGREE = 10


def parse_n_range(text: str) -> tuple[int, int, int]:
    """Parse 'A:B' or 'A:B:S' (inclusive, stride S) into (start, stop, step)."""
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise UsageError("n-range", f"expected A:B[:S], got '{text}'")
    try:
        values = [int(p) for p in parts]
    except ValueError:
        raise UsageError("n-range", f"expected integers in '{text}'") from None
    if len(values) == 2:
        values.append(1)
    return tuple(values)


@dataclass(frozen=True)
class StudyConfig:
    """One convergence study: a basis, several inside functions, one F and h."""

    inside: tuple[str, ...]
    outside: str
    weighting: str = "1"
    basis: str = "laguerre"
    n_range: tuple[int, int, int] = (2, 30, 1)
    tol: float = DEFAULT_TOL
    reference: Optional[float] = None
    reference_tol: float = DEFAULT_TOL

    def __post_init__(self):
        object.__setattr__(self, "inside", tuple(self.inside))
        object.__setattr__(self, "n_range", tuple(int(v) for v in self.n_range))
        start, stop, step = self.n_range
        if not self.inside:
            raise UsageError("study", "at least one inside function is required")
        if start < 0 or stop < start or step < 1:
            raise UsageError("study", f"n range {start}:{stop}:{step} is empty or descending")
        if self.tol <= 0 or self.reference_tol <= 0:
            raise UsageError("study", "tolerances must be positive")

    @property
    def orders(self) -> list[int]:
        start, stop, step = self.n_range
        return list(range(start, stop + 1, step))

    @property
    def reweighted(self) -> bool:
        h = resolve(self.weighting)
        return not (isinstance(h, Expression) and h.is_constant)

    def to_dict(self) -> dict:
        return {
            "basis": self.basis,
            "inside": list(self.inside),
            "outside": self.outside,
            "weighting": self.weighting,
            "n_range": list(self.n_range),
            "tol": self.tol,
            "reference": self.reference,
            "reference_tol": self.reference_tol,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "StudyConfig":
        """Build from a mapping; n_range may be a list or an 'A:B[:S]' string."""
        try:
            n_range = data.get("n_range", (2, 30, 1))
            if isinstance(n_range, str):
                n_range = parse_n_range(n_range)
            elif len(n_range) == 2:
                n_range = (*n_range, 1)
            reference = data.get("reference")
            return cls(
                inside=tuple(data["inside"]),
                outside=data["outside"],
                weighting=data.get("weighting", "1"),
                basis=data.get("basis", "laguerre"),
                n_range=tuple(n_range),
                tol=float(data.get("tol", DEFAULT_TOL)),
                reference=None if reference is None else float(reference),
                reference_tol=float(data.get("reference_tol", DEFAULT_TOL)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError("study", f"malformed study configuration: {exc}") from exc


class StudyRow(NamedTuple):
    g: str
    n: int
    approx: float
    reference: float
    abs_error: float
    rel_error: float
    status: str = "ok"

    @property
    def ok(self) -> bool:
        return self.status == "ok"


@dataclass
class StudyReport:
    config: StudyConfig
    rows: list[StudyRow] = field(default_factory=list)
    trends: dict[str, str] = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)

    def rows_for(self, g: str) -> list[StudyRow]:
        return [row for row in self.rows if row.g == g]

    def errors_for(self, g: str) -> list[float]:
        return [row.abs_error for row in self.rows_for(g)]

    def error_at(self, g: str, n: int) -> float:
        for row in self.rows_for(g):
            if row.n == n:
                return row.abs_error
        raise KeyError((g, n))


# ---------------------------------------------------------------------------
# Reference oracle
# ---------------------------------------------------------------------------

def _breakpoints(lower: float, upper: float) -> list:
    if math.isinf(lower) and math.isinf(upper):
        return [-mpmath.inf, 0, mpmath.inf]
    if math.isinf(upper):
        return [lower, lower + 1, mpmath.inf]
    if math.isinf(lower):
        return [-mpmath.inf, upper - 1, upper]
    return [lower, upper]


def reference_value(basis, g: Union[str, Expression], F: Union[str, Expression],
                    tol: float = DEFAULT_TOL, max_degree: int = ORACLE_MAX_DEGREE) -> float:
    """
    Integral of F(g(x)) w(x) over the family's domain.

    Computed by tanh-sinh quadrature in mpmath arithmetic, which neither
    overflows for exponentially growing F nor shares any code with the
    matrix machinery.

    Raises:
        OracleNoConvergenceError: the error estimate exceeds tol relative
            to the value.
    """
    basis = family(basis)
    g, F = resolve(g), resolve(F)
    if not (isinstance(g, Expression) and isinstance(F, Expression)):
        raise UsageError("reference_value", "the oracle needs expressions for g and F")

    def integrand(x):
        return F.evaluate_mp(g.evaluate_mp(x)) * basis.weight.evaluate_mp(x)

    try:
        with mpmath.workdps(ORACLE_DIGITS):
            value, error = mpmath.quad(
                integrand, _breakpoints(*basis.domain),
                error=True, maxdegree=max_degree,
            )
            value, error = float(value), float(error)
    except (ValueError, ZeroDivisionError, TypeError, OverflowError) as exc:
        raise OracleNoConvergenceError("reference_value", f"integrand evaluation failed: {exc}") from exc
    if not math.isfinite(value) or error > tol * max(abs(value), tol):
        raise OracleNoConvergenceError(
            "reference_value", f"estimate {value:.17g} has error {error:.3g} above tol {tol:.3g}"
        )
    return value


# ---------------------------------------------------------------------------
# Trend classification
# ---------------------------------------------------------------------------

def classify_trend(errors: Sequence[float]) -> str:
    """
    Label an error-versus-n sweep.

    Non-finite entries (failed rows) are skipped; errors are floored at
    1e-15 so that exact results do not read as growth.

    Raises:
        InsufficientDataError: fewer than four finite errors.
    """
    finite = [max(float(e), ERROR_FLOOR) for e in errors if math.isfinite(e)]
    if len(finite) < MIN_TREND_POINTS:
        raise InsufficientDataError(
            "classify_trend", f"need {MIN_TREND_POINTS} finite errors, got {len(finite)}"
        )
    quarter = max(1, len(finite) // 4)
    first = median(finite[:quarter])
    last = median(finite[-quarter:])
    if last < 0.1 * first and finite[-1] < finite[0]:
        return CONVERGING
    if last > 10.0 * first:
        return DIVERGING
    return STAGNANT


# ---------------------------------------------------------------------------
# Sweep
# ---------------------------------------------------------------------------

def _status(exc: OpquadError) -> str:
    name = type(exc).__name__.removesuffix("Error")
    return re.sub(r"(?<!^)(?=[A-Z])", "-", name).lower()


def _failed(g: str, n: int, reference: float, exc: OpquadError) -> StudyRow:
    nan = float("nan")
    return StudyRow(g, n, nan, reference, nan, nan, _status(exc))


def _row(g: str, n: int, approx: float, reference: float) -> StudyRow:
    abs_error = abs(approx - reference)
    rel_error = abs_error / abs(reference) if reference != 0 else float("nan")
    return StudyRow(g, n, approx, reference, abs_error, rel_error)


def _sweep_inside(cfg: StudyConfig, g_id: str, collector: Optional[StageCollector],
                  echo: Optional[Callable[[StudyRow], None]], provenance: dict) -> list[StudyRow]:
    basis = family(cfg.basis)
    g = inside_function(g_id).expression
    F = compose(cfg.outside, g_id)
    H = compose(cfg.weighting, g_id) if cfg.reweighted else None
    orders = cfg.orders
    nan = float("nan")

    try:
        if cfg.reference is not None:
            reference = cfg.reference
        else:
            with stage_timer("reference", collector, g=g_id):
                reference = reference_value(basis, g, F, cfg.reference_tol)
        provenance["references"][g_id] = reference

        with stage_timer("build_matrix", collector, g=g_id, n=orders[-1]):
            matrix = operator_matrix(basis, g, orders[-1], cfg.tol)
        provenance["achieved_tol"][g_id] = matrix.element_tolerance
        coefficients = None
        if H is not None:
            with stage_timer("fourier_coeffs", collector, g=g_id, n=orders[-1]):
                coefficients = weighting_coefficients(basis, g, H, orders[-1], cfg.tol)
    except OpquadError as exc:
        reference = provenance["references"].get(g_id, nan)
        rows = [_failed(g_id, n, reference, exc) for n in orders]
        if echo is not None:
            for row in rows:
                echo(row)
        return rows

    rows = []
    for n in orders:
        try:
            with stage_timer("evaluate", collector, g=g_id, n=n):
                dec = eigh(matrix.truncate(n))
                if coefficients is None:
                    rule = rule_from_matrix(dec)
                else:
                    rule = rule_from_matrix(dec, H, coefficients.truncate(n))
                row = _row(g_id, n, rule.apply(F, "run_study"), reference)
        except OpquadError as exc:
            row = _failed(g_id, n, reference, exc)
        rows.append(row)
        if echo is not None:
            echo(row)
    return rows


def run_study(cfg: StudyConfig, collector: Optional[StageCollector] = None,
              echo: Optional[Callable[[StudyRow], None]] = None) -> StudyReport:
    """
    Run every (g, n) combination of a study.

    Args:
        cfg: The study configuration
        collector: Receives stage timings (default: a fresh collector per call)
        echo: Called with every row as soon as it is computed

    Failed rows carry NaN errors and the failing error kind as status;
    they never abort the sweep.
    """
    collector = collector if collector is not None else StageCollector()
    provenance = {
        "basis": family(cfg.basis).name,
        "rule": "reweighted" if cfg.reweighted else "basic",
        "tol": cfg.tol,
        "oracle": f"mpmath tanh-sinh quadrature, {ORACLE_DIGITS} digits, "
                  f"relative tol {cfg.reference_tol:g}",
        "references": {},
        "achieved_tol": {},
    }
    rows: list[StudyRow] = []
    for g_id in cfg.inside:
        rows.extend(_sweep_inside(cfg, g_id, collector, echo, provenance))
    rows.sort(key=lambda row: (row.g, row.n))

    trends = {}
    for g_id in cfg.inside:
        try:
            trends[g_id] = classify_trend([row.abs_error for row in rows if row.g == g_id])
        except InsufficientDataError:
            trends[g_id] = INSUFFICIENT
    return StudyReport(cfg, rows, trends, provenance)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def _json_float(value: float) -> Optional[float]:
    return value if math.isfinite(value) else None


def report_to_dict(report: StudyReport) -> dict:
    """JSON-ready mapping; NaN errors of failed rows become null."""
    return {
        "config": report.config.to_dict(),
        "provenance": report.provenance,
        "trends": dict(report.trends),
        "rows": [
            {
                "g": row.g,
                "n": row.n,
                "approx": _json_float(row.approx),
                "reference": _json_float(row.reference),
                "abs_error": _json_float(row.abs_error),
                "rel_error": _json_float(row.rel_error),
                "status": row.status,
            }
            for row in report.rows
        ],
    }
