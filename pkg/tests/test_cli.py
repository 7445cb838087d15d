"""
Tests for the opquad command line: output, files and exit status.
"""

import csv
import json
import os

import numpy as np
import pytest

import sys
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "../src"))

from opquad.interfaces.cli import EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE, main
from opquad.output.formatter import read_rule


# ---------------------------------------------------------------------------
# Matrices and rules
# ---------------------------------------------------------------------------

class TestMatrixCommands:
    def test_jacobi_json(self, capsys):
        assert main(["jacobi", "--n", "4", "--format", "json"]) == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        entries = np.array(data["entries"]).reshape(5, 5)
        np.testing.assert_array_equal(np.diag(entries), [1, 3, 5, 7, 9])
        np.testing.assert_array_equal(np.diag(entries, 1), [1, 2, 3, 4])

    def test_matrix_signs(self, capsys):
        assert main(["matrix", "--g", "sqrt", "--n", "2", "--signs"]) == EXIT_OK
        assert capsys.readouterr().out.splitlines() == ["+ + -", "+ + +", "- + +"]

    def test_matrix_file_then_rule_matches_single_shot(self, tmp_path, capsys):
        matrix_file = str(tmp_path / "m.json")
        from_file = str(tmp_path / "from_file.csv")
        single = str(tmp_path / "single.csv")
        assert main(["matrix", "--g", "sqrt", "--n", "4", "--format", "json", "--out", matrix_file]) == EXIT_OK
        assert main(["rule", "--matrix", matrix_file, "--out", from_file]) == EXIT_OK
        assert main(["integrate", "--g", "sqrt", "--f", "1", "--n", "4", "--emit-rule",
                     "--out", single]) == EXIT_OK
        nodes_a, weights_a = read_rule(from_file)
        nodes_b, weights_b = read_rule(single)
        np.testing.assert_allclose(nodes_a, nodes_b, rtol=0, atol=1e-14)
        np.testing.assert_allclose(weights_a, weights_b, rtol=0, atol=1e-14)

    def test_reweighted_rule(self, capsys):
        assert main(["rule", "--n", "3", "--h", "h2", "--format", "json"]) == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert data["h"] == "h2"
        assert len(data["weights"]) == 4


# ---------------------------------------------------------------------------
# integrate
# ---------------------------------------------------------------------------

class TestIntegrate:
    def test_unit_function(self, capsys):
        assert main(["integrate", "--f", "1", "--n", "5"]) == EXIT_OK
        assert float(capsys.readouterr().out) == pytest.approx(1.0, abs=1e-12)

    def test_json_value_with_provenance(self, capsys):
        assert main(["integrate", "--f", "x^3", "--n", "3", "--format", "json"]) == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert data["value"] == pytest.approx(6.0, rel=1e-12)
        assert data["basis"] == "laguerre"
        assert data["n"] == 3

    def test_guarded_improper_integral(self, capsys):
        argv = ["integrate", "--f", "x^(-1/2)", "--n", "25", "--singular-at", "0", "--p", "0.5"]
        assert main(argv) == EXIT_OK
        assert 1.5 < float(capsys.readouterr().out) < 1.7725

    def test_reweighted_value(self, capsys):
        assert main(["integrate", "--f", "f2", "--h", "h2", "--n", "10"]) == EXIT_OK
        assert float(capsys.readouterr().out) > 0


# ---------------------------------------------------------------------------
# study
# ---------------------------------------------------------------------------

class TestStudyCommand:
    def test_writes_report_and_plot(self, tmp_path, capsys):
        out = tmp_path / "poly.csv"
        argv = ["study", "--g", "g2,g4", "--f", "x^2", "--n-range", "2:6", "--out", str(out)]
        assert main(argv) == EXIT_OK
        with open(out, newline="") as file:
            rows = list(csv.DictReader(file))
        assert len(rows) == 10
        assert {row["status"] for row in rows} == {"ok"}
        assert (tmp_path / "poly.plot.csv").exists()
        assert "Convergence Study" in capsys.readouterr().err

    @pytest.mark.parametrize("name", ["appendix-b-f2-h1", "expweight-f2-h1"])
    def test_preset_names(self, name, tmp_path):
        out = tmp_path / "f2h1.csv"
        assert main(["study", "--preset", name, "--n-range", "2:5", "--out", str(out)]) == EXIT_OK
        with open(out, newline="") as file:
            rows = list(csv.DictReader(file))
        assert len(rows) == 16
        assert {row["g"] for row in rows} == {"g1", "g2", "g3", "g4"}

    def test_config_file_and_trend_column(self, tmp_path, capsys):
        config = tmp_path / "study.json"
        config.write_text(json.dumps({"inside": ["g1"], "outside": "f2", "n_range": "2:25"}))
        assert main(["study", "--config", str(config)]) == EXIT_OK
        rows = list(csv.DictReader(capsys.readouterr().out.splitlines()))
        assert len(rows) == 24
        assert {row["trend"] for row in rows} == {"diverging"}


# ---------------------------------------------------------------------------
# Exit status
# ---------------------------------------------------------------------------

class TestExitStatus:
    @pytest.mark.parametrize("argv", [
        [],
        ["integrate", "--n", "3"],
        ["integrate", "--f", "1", "--family", "chebyshev"],
        ["integrate", "--f", "nonsense(", "--n", "3"],
        ["integrate", "--f", "1", "--singular-at", "0"],
        ["integrate", "--f", "1", "--singular-at", "0", "--p", "2"],
        ["jacobi", "--n", "-1"],
        ["integrate", "--f", "1", "--n", "-1"],
        ["rule", "--n", "-1"],
        ["study", "--g", "g1"],
        ["study", "--preset", "appendix-b-f1-h1", "--n-range", "9:2"],
    ])
    def test_usage_errors(self, argv, capsys):
        assert main(argv) == EXIT_USAGE
        assert capsys.readouterr().err.startswith("opquad: ")

    def test_unwritable_output(self, tmp_path, capsys):
        blocker = tmp_path / "plain.txt"
        blocker.write_text("x")
        assert main(["jacobi", "--n", "2", "--out", str(blocker / "m.csv")]) == EXIT_USAGE
        assert capsys.readouterr().err.startswith("opquad: save: ")

    def test_numerical_error(self, capsys):
        assert main(["integrate", "--f", "log(x - 10)", "--n", "5"]) == EXIT_NUMERICAL
        err = capsys.readouterr().err
        assert err.startswith("opquad: ")
        assert "not finite" in err

    def test_help(self, capsys):
        assert main(["--help"]) == EXIT_OK
        assert "integrate" in capsys.readouterr().out
