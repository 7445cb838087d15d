"""
Tests for console output, rendering and file persistence.
"""

import json
import os

import numpy as np
import pytest

import sys
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "../src"))

from opquad.core.basis import LAGUERRE, jacobi_matrix
from opquad.core.errors import UsageError
from opquad.core.opmatrix import build_matrix
from opquad.core.quadrature import rule_from_matrix
from opquad.core.spectral import eigh
from opquad.core.timer import StageCollector, StageRecord
from opquad.functions.registry import resolve
from opquad.output.formatter import (
    format_row,
    number,
    plot_path,
    print_report,
    print_row,
    read_matrix,
    read_rule,
    render_matrix,
    render_plot,
    render_report,
    render_rule,
    render_value,
    save_text,
)
from opquad.study.harness import StudyConfig, StudyReport, StudyRow


def small_report() -> StudyReport:
    cfg = StudyConfig(inside=("g2",), outside="f1", n_range=(2, 5, 1))
    rows = [
        StudyRow("g2", 2, 0.69, 0.7, 0.01, 0.01 / 0.7),
        StudyRow("g2", 3, float("nan"), 0.7, float("nan"), float("nan"), "singular-node"),
        StudyRow("g2", 4, 0.699, 0.7, 1e-3, 1e-3 / 0.7),
        StudyRow("g2", 5, 0.6999, 0.7, 1e-4, 1e-4 / 0.7),
    ]
    return StudyReport(cfg, rows, {"g2": "converging"}, {"basis": "laguerre"})


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

class TestRender:
    def test_number_keeps_every_bit(self):
        value = 0.1 + 0.2
        assert float(number(value)) == value
        assert number(float("nan")) == "nan"

    def test_matrix_csv(self):
        text = render_matrix(jacobi_matrix(LAGUERRE, 2))
        assert text.splitlines() == ["1,1,0", "1,3,2", "0,2,5"]

    def test_matrix_json(self):
        data = json.loads(render_matrix(jacobi_matrix(LAGUERRE, 1), "json"))
        assert data["entries"] == [1.0, 1.0, 1.0, 3.0]
        assert data["g"] == "id"

    def test_rule_csv(self):
        rule = rule_from_matrix(eigh(jacobi_matrix(LAGUERRE, 1)))
        lines = render_rule(rule).splitlines()
        assert lines[0] == "node,weight"
        assert len(lines) == 3
        assert float(lines[1].split(",")[0]) < float(lines[2].split(",")[0])

    def test_rule_json_carries_value(self):
        rule = rule_from_matrix(eigh(jacobi_matrix(LAGUERRE, 1)))
        data = json.loads(render_rule(rule, "json", value=1.0))
        assert data["value"] == 1.0
        assert data["basis"] == "laguerre"

    def test_value(self):
        assert render_value(0.5) == "0.5\n"
        assert json.loads(render_value(0.5, "json", f="f1"))["f"] == "f1"

    def test_report_csv(self):
        lines = render_report(small_report()).splitlines()
        assert lines[0] == "g,n,approx,reference,abs_error,rel_error,status,trend"
        assert lines[2].split(",")[6:] == ["singular-node", "converging"]
        assert len(lines) == 5

    def test_report_json_has_no_nan(self):
        data = json.loads(render_report(small_report(), "json"))
        assert data["rows"][1]["approx"] is None
        assert data["trends"] == {"g2": "converging"}

    def test_plot_omits_failed_rows(self):
        lines = render_plot(small_report()).splitlines()
        assert lines[0] == "g,n,log10_abs_error"
        assert [line.split(",")[1] for line in lines[1:]] == ["2", "4", "5"]
        assert float(lines[2].split(",")[2]) == pytest.approx(-3.0)


# ---------------------------------------------------------------------------
# Console
# ---------------------------------------------------------------------------

class TestConsole:
    def test_print_row(self, capsys):
        print_row(small_report().rows[0])
        out = capsys.readouterr().out
        assert "g2" in out
        assert "n=2" in out

    def test_failed_row_shows_status(self):
        assert "singular-node" in format_row(small_report().rows[1])

    def test_print_report_with_timings(self, capsys):
        col = StageCollector()
        col.add(StageRecord("evaluate", 0, 2_000_000))
        print_report(small_report(), col)
        out = capsys.readouterr().out
        assert "Convergence Study" in out
        assert "converging" in out
        assert "failed rows" in out
        assert "evaluate" in out


# ---------------------------------------------------------------------------
# File output
# ---------------------------------------------------------------------------

class TestFileOutput:
    def test_save_creates_parent_directories(self, tmp_path, capsys):
        path = save_text("x\n", str(tmp_path / "deep" / "out.csv"))
        assert path.read_text() == "x\n"
        assert "Results saved" in capsys.readouterr().out

    def test_unwritable_path(self, tmp_path):
        blocker = tmp_path / "plain.txt"
        blocker.write_text("x")
        with pytest.raises(UsageError) as info:
            save_text("y\n", str(blocker / "out.csv"))
        assert info.value.operation == "save"

    def test_plot_path(self):
        assert str(plot_path("runs/f2.csv")).endswith("f2.plot.csv")

    def test_json_matrix_round_trip(self, tmp_path):
        m = build_matrix(LAGUERRE, resolve("sqrt"), 3)
        path = tmp_path / "m.json"
        path.write_text(render_matrix(m, "json"))
        back = read_matrix(str(path))
        np.testing.assert_array_equal(back.entries, m.entries)

    def test_csv_matrix_round_trip(self, tmp_path):
        m = build_matrix(LAGUERRE, resolve("sqrt"), 3)
        path = tmp_path / "m.csv"
        path.write_text(render_matrix(m))
        back = read_matrix(str(path), LAGUERRE, resolve("sqrt"))
        np.testing.assert_array_equal(back.entries, m.entries)
        with pytest.raises(UsageError):
            read_matrix(str(path))

    def test_missing_matrix_file(self, tmp_path):
        with pytest.raises(UsageError):
            read_matrix(str(tmp_path / "absent.json"))

    def test_rule_round_trip(self, tmp_path):
        rule = rule_from_matrix(eigh(build_matrix(LAGUERRE, resolve("sqrt"), 4)))
        path = tmp_path / "rule.csv"
        path.write_text(render_rule(rule))
        nodes, weights = read_rule(str(path))
        np.testing.assert_array_equal(nodes, rule.nodes)
        np.testing.assert_array_equal(weights, rule.weights)

    def test_rule_reader_checks_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(UsageError):
            read_rule(str(path))
