"""
命令行接口测试
"""

import csv
import io
import json
import math

import pytest
from loguru import logger

from qgindex.main import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, main

from .conftest import INTERVAL_DIRICHLET, INTERVAL_NEUMANN, KIRCHHOFF_TRIANGLE, ROBIN_INTERVAL, STAR3


def _rows(text):
    lines = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


class TestValidate:
    def test_valid_file(self, graph_file, capsys):
        assert main(["validate", graph_file(STAR3)]) == EXIT_OK
        out = capsys.readouterr().out
        assert "PASS vertex c (kirchhoff, d=3)" in out
        assert out.splitlines()[-1] == "PASS graph star3 V=4 E=3 scale-invariant"

    def test_robin_file(self, graph_file, capsys):
        assert main(["validate", graph_file(ROBIN_INTERVAL)]) == EXIT_OK
        assert capsys.readouterr().out.splitlines()[-1].endswith("robin")

    def test_syntax_error(self, graph_file, capsys):
        assert main(["validate", graph_file("edge e1 v1 1.0\n")]) == EXIT_FAILURE
        assert capsys.readouterr().out.startswith("FAIL syntax: 第 1 行第 15 列")

    def test_structure_error(self, graph_file, capsys):
        text = "vertex a neumann\nvertex b neumann\nvertex c neumann\nedge e1 a b 1.0\n"
        assert main(["validate", graph_file(text)]) == EXIT_FAILURE
        assert capsys.readouterr().out.startswith("FAIL structure:")


class TestSpectrum:
    def test_dirichlet_interval(self, graph_file, capsys):
        assert main(["spectrum", graph_file(INTERVAL_DIRICHLET), "--kmax", "10"]) == EXIT_OK
        out = capsys.readouterr().out
        rows = _rows(out)
        assert [row["multiplicity"] for row in rows] == ["1", "1", "1"]
        for row, n in zip(rows, (1, 2, 3)):
            assert float(row["k"]) == pytest.approx(n * math.pi, abs=1e-8)
        assert out.splitlines()[-1] == "# N0,N0_dual,Ntilde=0,1,1"

    def test_output_is_byte_stable(self, graph_file, capsys):
        path = graph_file(STAR3)
        main(["spectrum", path, "--kmax", "12"])
        first = capsys.readouterr().out
        main(["spectrum", path, "--kmax", "12"])
        assert capsys.readouterr().out == first

    def test_robin_trailer_is_partial(self, graph_file, capsys):
        assert main(["spectrum", graph_file(ROBIN_INTERVAL), "--kmax", "4"]) == EXIT_OK
        assert capsys.readouterr().out.splitlines()[-1] == "# N0,N0_dual,Ntilde=0,,"

    def test_missing_kmax(self, graph_file):
        assert main(["spectrum", graph_file(STAR3)]) == EXIT_USAGE

    def test_bad_kmax(self, graph_file):
        assert main(["spectrum", graph_file(STAR3), "--kmax", "-1"]) == EXIT_FAILURE


class TestScattering:
    def test_interval_entries(self, graph_file, capsys):
        assert main(["scattering", graph_file(INTERVAL_NEUMANN)]) == EXIT_OK
        rows = _rows(capsys.readouterr().out)
        entries = {(int(r["row"]), int(r["col"])): complex(float(r["re"]), float(r["im"])) for r in rows}
        assert sorted(entries) == [(0, 1), (1, 0)]
        assert all(value == pytest.approx(1.0, abs=1e-12) for value in entries.values())

    def test_star_is_unitary(self, graph_file, capsys):
        assert main(["scattering", graph_file(STAR3), "--k", "2.5"]) == EXIT_OK
        rows = _rows(capsys.readouterr().out)
        norms = {}
        for r in rows:
            col = int(r["col"])
            norms[col] = norms.get(col, 0.0) + float(r["re"]) ** 2 + float(r["im"]) ** 2
        assert sorted(norms) == list(range(6))
        assert all(value == pytest.approx(1.0) for value in norms.values())


class TestHeatTrace:
    def test_triangle_both_methods(self, graph_file, capsys):
        args = ["heat-trace", graph_file(KIRCHHOFF_TRIANGLE), "--t", "0.02,0.05", "--method", "both"]
        assert main(args) == EXIT_OK
        rows = _rows(capsys.readouterr().out)
        assert [float(row["t"]) for row in rows] == [0.02, 0.05]
        for row in rows:
            assert float(row["discrepancy"]) < 1e-6
            assert float(row["constant"]) == pytest.approx(0.0, abs=1e-12)

    def test_neumann_interval_constant(self, graph_file, capsys):
        assert main(["heat-trace", graph_file(INTERVAL_NEUMANN), "--t", "0.01"]) == EXIT_OK
        row = _rows(capsys.readouterr().out)[0]
        assert float(row["constant"]) == pytest.approx(0.5, abs=1e-12)
        assert "discrepancy" not in row

    def test_robin_paths_rejected(self, graph_file):
        assert main(["heat-trace", graph_file(ROBIN_INTERVAL), "--t", "0.05"]) == EXIT_FAILURE

    def test_robin_spectral(self, graph_file, capsys):
        args = ["heat-trace", graph_file(ROBIN_INTERVAL), "--t", "0.05", "--method", "spectral"]
        assert main(args) == EXIT_OK
        row = _rows(capsys.readouterr().out)[0]
        assert row["constant"] == "nan"
        assert float(row["total"]) > 0.0

    @pytest.mark.parametrize("value", ["0", "-0.1", "abc"])
    def test_bad_times(self, graph_file, value):
        assert main(["heat-trace", graph_file(STAR3), "--t", value]) == EXIT_USAGE

    def test_bad_cutoff(self, graph_file):
        assert main(["heat-trace", graph_file(STAR3), "--t", "0.02", "--cutoff", "-1"]) == EXIT_USAGE


class TestIndex:
    def test_neumann_interval(self, graph_file, capsys):
        assert main(["index", graph_file(INTERVAL_NEUMANN)]) == EXIT_OK
        row = _rows(capsys.readouterr().out)[0]
        assert row["index_formula"] == "1"
        assert row["index_kernels"] == "1"
        assert float(row["index_heat"]) == pytest.approx(1.0, abs=1e-6)
        assert row["verdict"] == "PASS"

    def test_robin_fails(self, graph_file, capsys):
        assert main(["index", graph_file(ROBIN_INTERVAL)]) == EXIT_FAILURE
        row = _rows(capsys.readouterr().out)[0]
        assert row["verdict"] == "FAIL"
        assert row["N0"] == ""


class TestVerify:
    def test_triangle_passes(self, graph_file, capsys):
        assert main(["verify", graph_file(KIRCHHOFF_TRIANGLE)]) == EXIT_OK
        rows = _rows(capsys.readouterr().out)
        assert rows
        assert {row["status"] for row in rows} == {"PASS"}

    def test_category_filter(self, graph_file, capsys):
        assert main(["verify", graph_file(STAR3), "--category", "graph"]) == EXIT_OK
        rows = _rows(capsys.readouterr().out)
        assert {row["check"] for row in rows} == {"graph_incidence_index", "graph_euler_insertion"}

    def test_robin_skips(self, graph_file, capsys):
        assert main(["verify", graph_file(ROBIN_INTERVAL)]) == EXIT_OK
        statuses = {row["check"]: row["status"] for row in _rows(capsys.readouterr().out)}
        assert statuses["spec_weyl"] == "SKIP"
        assert statuses["scat_global_unitary"] == "PASS"

    def test_rule_file(self, graph_file, tmp_path, capsys):
        rules = tmp_path / "rules.json"
        rules.write_text(json.dumps([{"rule_id": "spec_weyl", "enabled": False}]), encoding="utf-8")
        assert main(["verify", graph_file(INTERVAL_NEUMANN), "--rules", str(rules), "--category", "spectrum"]) == EXIT_OK
        checks = [row["check"] for row in _rows(capsys.readouterr().out)]
        assert "spec_weyl" not in checks
        assert "spec_root_residual" in checks


class TestUsage:
    def test_no_command(self):
        assert main([]) == EXIT_USAGE

    def test_unknown_flag(self, graph_file):
        assert main(["index", graph_file(STAR3), "--bogus"]) == EXIT_USAGE

    def test_missing_file(self, tmp_path):
        assert main(["index", str(tmp_path / "missing.qg")]) == EXIT_USAGE

    def test_missing_config(self, graph_file, tmp_path):
        assert main(["--config", str(tmp_path / "none.yaml"), "validate", graph_file(STAR3)]) == EXIT_USAGE

    def test_config_changes_output_digits(self, graph_file, tmp_path, capsys):
        config = tmp_path / "config.yaml"
        config.write_text("output:\n  significant_digits: 6\n", encoding="utf-8")
        assert main(["--config", str(config), "spectrum", graph_file(INTERVAL_DIRICHLET), "--kmax", "4"]) == EXIT_OK
        rows = _rows(capsys.readouterr().out)
        assert rows[0]["k"] == "3.14159"

    def test_logging_section_applied(self, graph_file, tmp_path, capsys):
        config = tmp_path / "config.yaml"
        config.write_text(
            f"log_directory: {tmp_path / 'logs'}\n"
            "logging:\n"
            "  level: DEBUG\n"
            "  console_enabled: false\n"
            "  file_enabled: true\n"
            "  format: '{level}|{message}'\n",
            encoding="utf-8",
        )
        assert main(["--config", str(config), "validate", graph_file(STAR3)]) == EXIT_OK
        logger.remove()
        assert "执行命令" not in capsys.readouterr().err
        lines = (tmp_path / "logs" / "qgindex.log").read_text(encoding="utf-8").splitlines()
        assert "DEBUG|执行命令 validate" in lines

    def test_version(self, capsys):
        assert main(["--version"]) == EXIT_OK
        assert "QGIndex" in capsys.readouterr().out
