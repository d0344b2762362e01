import json
import os

import pytest

from squeezecheck import config
from squeezecheck.cli import EXIT_CONFIG, EXIT_NON_CONVERGENCE, EXIT_PARTIAL, EXIT_SUCCESS, main

BASELINE_CONFIG = os.path.join(os.path.dirname(__file__), "resources", "configs", "baseline.yaml")


def test_dump_liouvillian(tmp_path):
    out = tmp_path / "liouvillian.txt"
    assert main(["dump-liouvillian", "--n-max", "1", "--out", str(out)]) == EXIT_SUCCESS
    assert out.read_text().startswith("# n_max 1\n")


def test_scan_writes_rows_and_sidecar(tmp_path, capsys):
    out = tmp_path / "baseline.csv"
    code = main(["scan", "--config", BASELINE_CONFIG, "--param", "sweep.points=3", "--out", str(out)])

    assert code == EXIT_SUCCESS
    lines = out.read_text().splitlines()
    assert lines[0] == ",".join(config.CSV_COLUMNS)
    assert len(lines) == 4
    assert os.path.exists(f"{out}.meta.json")
    assert "Scan statistics" in capsys.readouterr().out


def test_scan_to_stdout(capsys):
    code = main(["scan", "--config", BASELINE_CONFIG, "--param", "sweep.points=2", "outputs=[var_min]", "--format", "json"])

    assert code == EXIT_SUCCESS
    rows = json.loads(capsys.readouterr().out)
    assert len(rows) == 2
    assert list(rows[0]) == ["family", "axis_value", "var_min", "converged", "flag"]


def test_verbose_scan_keeps_stdout_parseable(capsys):
    code = main(["scan", "--param", "sweep.points=2", "--format", "json", "--verbose"])

    assert code == EXIT_SUCCESS
    captured = capsys.readouterr()
    assert len(json.loads(captured.out)) == 2
    assert "Scan statistics" in captured.err


def test_unwritable_output_exits_with_config_error(tmp_path, capsys):
    out = tmp_path / "missing" / "scan.csv"
    assert main(["scan", "--param", "sweep.points=2", "--out", str(out)]) == EXIT_CONFIG
    assert "error" in capsys.readouterr().err


def test_partial_and_failed_scans(tmp_path):
    def run(values):
        return main(
            ["scan", "--param", "sweep.axis=p_c", f"sweep.values={values}", "--n-cap", "8", "--out", str(tmp_path / "scan.csv")]
        )

    assert run("[0.0, 1.5]") == EXIT_PARTIAL
    assert run("[1.4, 1.5]") == EXIT_NON_CONVERGENCE


def test_invalid_parameter_exits_with_config_error(capsys):
    assert main(["scan", "--config", BASELINE_CONFIG, "--param", "kappa=-1"]) == EXIT_CONFIG
    assert main(["scan", "--config", BASELINE_CONFIG, "--param", "unknown=1"]) == EXIT_CONFIG
    assert "error" in capsys.readouterr().err


def test_threshold_without_sign_change():
    assert main(["threshold", "--bracket", "0", "1", "--in-gamma"]) == EXIT_CONFIG


def test_detect_writes_json(tmp_path):
    out = tmp_path / "detect.json"
    code = main(["detect", "--eta", "0.5", "--lo-points", "20", "--phases", "32", "--out", str(out)])

    assert code == EXIT_SUCCESS
    report = json.loads(out.read_text())
    assert report["var_min"] < 0
    assert report["detectable"]
    assert 0 <= report["lo_phase"] < 3.2


def test_threshold_at_fixed_detuning(capsys):
    code = main(
        ["threshold", "--axis", "gamma_d", "--bracket", "0", "12", "--in-gamma", "--delta-x", "-19", "--rel-tol", "1e-2"]
    )

    assert code == EXIT_SUCCESS
    line = [line for line in capsys.readouterr().out.splitlines() if line.startswith("gamma_d =")][0]
    assert float(line.split("=")[-1].split()[0]) == pytest.approx(7.47, abs=0.15)
