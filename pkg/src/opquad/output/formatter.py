"""
Output rendering for matrices, rules and study reports.

Handles console output and file persistence; all formatting decisions are
centralized here. Numbers are written with 17 significant digits so that
every float64 survives a write/read cycle bit-exactly.
Color output uses ANSI codes via colorama for Windows compatibility.
Console width is detected dynamically from the terminal.
"""

import csv
import io
import json
import math
import shutil
import sys
from pathlib import Path
from typing import Optional, TextIO

import numpy as np

from ..core.basis import BasisFamily, family
from ..core.errors import UsageError
from ..core.opmatrix import MultiplicationMatrix, matrix_from_dict, matrix_to_dict
from ..core.quadrature import QuadratureRule, rule_to_dict
from ..core.timer import StageCollector
from ..study.harness import CONVERGING, DIVERGING, StudyReport, StudyRow, report_to_dict

try:
    import colorama
    colorama.init(autoreset=True)
    _COLOR_AVAILABLE = True
except ImportError:
    _COLOR_AVAILABLE = False


class _Color:
    """ANSI color constants. Empty strings when color is unavailable."""

    if _COLOR_AVAILABLE:
        RESET   = colorama.Style.RESET_ALL
        DIM     = colorama.Style.DIM
        BOLD    = colorama.Style.BRIGHT
        CYAN    = colorama.Fore.CYAN
        GREEN   = colorama.Fore.GREEN
        YELLOW  = colorama.Fore.YELLOW
        RED     = colorama.Fore.RED
        WHITE   = colorama.Fore.WHITE
        MAGENTA = colorama.Fore.MAGENTA
    else:
        RESET = DIM = BOLD = CYAN = GREEN = YELLOW = RED = WHITE = MAGENTA = ""


def _console_width() -> int:
    return shutil.get_terminal_size(fallback=(80, 24)).columns


def _separator(char: str = "-") -> str:
    return char * _console_width()


_ACCURATE_REL_ERROR = 1e-6      # ok rows below this -> green
                                # other ok rows -> yellow, failed rows -> red


def number(value: float) -> str:
    """17 significant digits; non-finite values as nan/inf."""
    return f"{float(value):.17g}"


# ---------------------------------------------------------------------------
# Console
# ---------------------------------------------------------------------------

def _color_for_row(row: StudyRow) -> str:
    if not row.ok:
        return _Color.RED
    if math.isfinite(row.rel_error) and row.rel_error < _ACCURATE_REL_ERROR:
        return _Color.GREEN
    return _Color.YELLOW


def _color_for_trend(trend: str) -> str:
    if trend == CONVERGING:
        return _Color.GREEN
    if trend == DIVERGING:
        return _Color.RED
    return _Color.YELLOW


def _format_duration(ns: int) -> str:
    if ns < 1_000_000:
        return f"{ns / 1_000:.3f} us"
    if ns < 1_000_000_000:
        return f"{ns / 1_000_000:.3f} ms"
    return f"{ns / 1_000_000_000:.6f} s"


def format_row(row: StudyRow) -> str:
    """Render a study row as a compact colored one-line string."""
    color = _color_for_row(row)
    label = f"{_Color.CYAN}{row.g:<8}{_Color.RESET} n={row.n:<4}"
    if not row.ok:
        return f"  {label} {color}{row.status}{_Color.RESET}"
    return (f"  {label} {row.approx:>24.17g}  "
            f"{color}abs {row.abs_error:9.3e}  rel {row.rel_error:9.3e}{_Color.RESET}")


def print_row(row: StudyRow, file: Optional[TextIO] = None) -> None:
    """Print a single study row immediately."""
    print(format_row(row), file=file)


def print_timings(collector: StageCollector, file: Optional[TextIO] = None) -> None:
    """Print per-stage call counts and total time."""
    for stage in collector.grouped():
        stats = collector.stats(stage)
        print(f"  {_Color.CYAN}{stage:<16}{_Color.RESET}"
              f" calls {_Color.WHITE}{stats['count']:>5}{_Color.RESET}"
              f"  total {_format_duration(stats['total_ns'])}"
              f"  {_Color.DIM}avg {_format_duration(stats['avg_ns'])}{_Color.RESET}", file=file)


def print_report(report: StudyReport, collector: Optional[StageCollector] = None,
                 file: Optional[TextIO] = None) -> None:
    """Print a study summary: trend, final error and failures per inside function."""
    thick = _separator("=")
    thin = _separator("-")
    cfg = report.config
    print(f"{_Color.MAGENTA}{thick}{_Color.RESET}", file=file)
    print(f"  {_Color.BOLD}{_Color.WHITE}opquad{_Color.RESET} | Convergence Study", file=file)
    print(f"  {_Color.DIM}{report.provenance.get('basis', cfg.basis)}, F={cfg.outside}, "
          f"h={cfg.weighting}, n={cfg.n_range[0]}..{cfg.n_range[1]}{_Color.RESET}", file=file)
    print(f"{_Color.MAGENTA}{thick}{_Color.RESET}", file=file)

    for g_id in cfg.inside:
        rows = report.rows_for(g_id)
        ok_rows = [row for row in rows if row.ok]
        trend = report.trends.get(g_id, "")
        final = f"{ok_rows[-1].abs_error:.3e}" if ok_rows else "n/a"
        print(f"  {_Color.CYAN}{_Color.BOLD}{g_id}{_Color.RESET}", file=file)
        print(f"    trend       : {_color_for_trend(trend)}{trend}{_Color.RESET}", file=file)
        print(f"    final error : {_Color.WHITE}{final}{_Color.RESET}", file=file)
        failed = len(rows) - len(ok_rows)
        if failed:
            print(f"    failed rows : {_Color.RED}{failed}{_Color.RESET}", file=file)
        print(f"{_Color.DIM}{thin}{_Color.RESET}", file=file)

    if collector is not None and collector.all():
        print_timings(collector, file=file)
        print(f"{_Color.MAGENTA}{thick}{_Color.RESET}", file=file)


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def _csv_text(rows: list[list[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerows(rows)
    return buffer.getvalue()


def _json_text(payload: dict) -> str:
    return json.dumps(payload, indent=2, allow_nan=False) + "\n"


def render_matrix(matrix: MultiplicationMatrix, fmt: str = "csv") -> str:
    """One CSV line per matrix row, or the JSON document of matrix_to_dict."""
    if fmt == "json":
        return _json_text(matrix_to_dict(matrix))
    return _csv_text([[number(v) for v in row] for row in matrix.entries])


def render_rule(rule: QuadratureRule, fmt: str = "csv", value: Optional[float] = None) -> str:
    """CSV 'node,weight' in ascending node order, or JSON with provenance."""
    if fmt == "json":
        payload = rule_to_dict(rule)
        if value is not None:
            payload["value"] = value
        return _json_text(payload)
    rows = [["node", "weight"]]
    rows.extend([number(x), number(w)] for x, w in zip(rule.nodes, rule.weights))
    return _csv_text(rows)


def render_value(value: float, fmt: str = "csv", **provenance) -> str:
    if fmt == "json":
        return _json_text({**provenance, "value": value})
    return number(value) + "\n"


def render_report(report: StudyReport, fmt: str = "csv") -> str:
    """Report CSV with one row per (g, n), trend included, or the JSON mirror."""
    if fmt == "json":
        return _json_text(report_to_dict(report))
    rows = [["g", "n", "approx", "reference", "abs_error", "rel_error", "status", "trend"]]
    for row in report.rows:
        rows.append([row.g, str(row.n), number(row.approx), number(row.reference),
                     number(row.abs_error), number(row.rel_error), row.status,
                     report.trends.get(row.g, "")])
    return _csv_text(rows)


def render_plot(report: StudyReport) -> str:
    """Plot-ready CSV of log10 absolute error per (g, n); failed rows are omitted."""
    rows = [["g", "n", "log10_abs_error"]]
    for row in report.rows:
        if row.ok:
            rows.append([row.g, str(row.n), number(math.log10(max(row.abs_error, 1e-300)))])
    return _csv_text(rows)


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------

def save_text(text: str, path: str, announce: bool = True) -> Path:
    """
    Write text to a file, creating parent directories.

    Args:
        text: Rendered document
        path: File path to write (will overwrite if exists)
        announce: Print a confirmation line to stdout

    Raises:
        UsageError: the path cannot be written.
    """
    output_path = Path(path)
    try:
        output_path.parent.mkdir(parents=True, exist_ok=True)
        output_path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise UsageError("save", f"cannot write '{path}': {exc.strerror}") from exc
    if announce:
        print(f"  {_Color.GREEN}[opquad] Results saved -> {output_path.resolve()}{_Color.RESET}")
    return output_path


def emit(text: str, path: Optional[str] = None) -> None:
    """Write a rendered document to path, or to stdout when path is None."""
    if path is None:
        sys.stdout.write(text)
    else:
        save_text(text, path)


def plot_path(path: str) -> Path:
    """Companion path of a report file for its plot CSV."""
    report = Path(path)
    return report.with_name(f"{report.stem}.plot.csv")


def read_matrix(path: str, basis: Optional[BasisFamily] = None,
                inside_function=None) -> MultiplicationMatrix:
    """
    Read a matrix written by render_matrix.

    JSON documents carry their own provenance; CSV needs basis and g.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError("read_matrix", f"cannot read '{path}': {exc.strerror}") from exc
    if text.lstrip().startswith("{"):
        try:
            return matrix_from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise UsageError("read_matrix", f"invalid JSON in '{path}': {exc.msg}") from exc
    if basis is None or inside_function is None:
        raise UsageError("read_matrix", "CSV matrices need --family and --g")
    try:
        entries = np.array([[float(v) for v in row] for row in csv.reader(io.StringIO(text)) if row])
    except ValueError as exc:
        raise UsageError("read_matrix", f"non-numeric entry in '{path}'") from exc
    return MultiplicationMatrix(
        order=len(entries) - 1,
        entries=entries,
        basis=family(basis),
        inside_function=inside_function,
    )


def read_rule(path: str) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights from a 'node,weight' CSV."""
    with open(path, encoding="utf-8", newline="") as file:
        reader = csv.DictReader(file)
        if reader.fieldnames != ["node", "weight"]:
            raise UsageError("read_rule", f"'{path}' is not a node,weight CSV")
        pairs = [(float(r["node"]), float(r["weight"])) for r in reader]
    nodes, weights = zip(*pairs) if pairs else ((), ())
    return np.array(nodes), np.array(weights)
