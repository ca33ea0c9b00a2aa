import json
import subprocess
import sys

import pytest

from rabi_balance import solve_rabi_ground, ModelParams
from rabi_balance.cli import SWEEP_COLUMNS, main


def run_cli(args):
    return main(args)


def test_solve_plain_output(capsys):
    assert run_cli(["solve", "--lambda", "0.5", "--omega0", "1"]) == 0
    out = capsys.readouterr().out
    assert "energy = -0.6332942354616301" in out
    assert "parity_label = +1" in out
    assert "converged = True" in out


def test_solve_json_output(capsys):
    assert run_cli(["solve", "--lambda", "0", "--omega0", "1", "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["energy"] == pytest.approx(-0.5, abs=1e-12)
    assert data["converged"] is True


def test_missing_required_flag_is_usage_error(capsys):
    assert run_cli(["solve", "--omega0", "1"]) == 1
    assert "lambda" in capsys.readouterr().err


def test_bad_range_syntax_is_usage_error():
    assert run_cli(["solve", "--lambda", "0:1", "--omega0", "1"]) == 1
    assert run_cli(["solve", "--lambda", "zebra", "--omega0", "1"]) == 1


def test_single_point_command_rejects_ranges():
    assert run_cli(["solve", "--lambda", "0:1:3", "--omega0", "1"]) == 1


def test_unknown_format_is_usage_error():
    assert run_cli(["solve", "--lambda", "0.5", "--omega0", "1",
                    "--format", "xml"]) == 1


def test_nonconverged_solve_exits_2(capsys):
    code = run_cli(["solve", "--lambda", "2", "--omega0", "1", "--dim", "8"])
    assert code == 2
    out = capsys.readouterr().out
    assert "converged = False" in out  # best-effort fields still printed


def test_balance_report_passes(capsys):
    assert run_cli(["balance", "--lambda", "0.5", "--omega0", "1"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["passed"] is True
    assert "p1" in data["report"]["properties"]
    assert "b2_literal" not in data["report"]["properties"]


def test_balance_paper_literal_adds_diagnostics(capsys):
    assert run_cli(["balance", "--lambda", "0.5", "--omega0", "1",
                    "--paper-literal"]) == 0
    data = json.loads(capsys.readouterr().out)
    props = data["report"]["properties"]
    assert {"b2_literal", "p4_literal", "wigner_energy_literal"} <= set(props)
    assert props["b2_literal"]["satisfied"] is False
    assert data["passed"] is True


def test_variational_json(capsys):
    assert run_cli(["variational", "--lambda", "0.5", "--omega0", "1"]) == 0
    data = json.loads(capsys.readouterr().out)
    res = data["result"]
    assert res["gap"] >= -1e-9
    assert res["grad_norm"] < 1e-6
    assert res["trial"]["beta"] == pytest.approx(-0.266, abs=1e-2)


def test_converge_table(capsys):
    assert run_cli(["converge", "--lambda", "1", "--omega0", "2"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "dim,e_exact,delta"
    first = lines[1].split(",")
    assert first[0] == "16"
    assert first[2] == ""  # no predecessor delta on the first row
    assert float(lines[-1].split(",")[2]) == pytest.approx(0.0, abs=1e-10)


def test_converge_unmet_tolerance_exits_2(capsys):
    assert run_cli(["converge", "--lambda", "2", "--omega0", "1",
                    "--dim", "32"]) == 2


def test_sweep_header_and_determinism(tmp_path):
    out_a = tmp_path / "a.csv"
    out_b = tmp_path / "b.csv"
    args = ["sweep", "--lambda", "0:1:2", "--omega0", "0.5:1.5:2",
            "--jobs", "1"]
    assert run_cli(args + ["--out", str(out_a)]) == 0
    assert run_cli(args + ["--out", str(out_b)]) == 0
    assert out_a.read_bytes() == out_b.read_bytes()
    lines = out_a.read_text().splitlines()
    assert lines[0] == ",".join(SWEEP_COLUMNS)
    assert len(lines) == 5
    # grid order: first swept axis slowest
    lam_col = [line.split(",")[1] for line in lines[1:]]
    assert lam_col == ["0", "0", "1", "1"]


def test_sweep_worker_pool_matches_serial(tmp_path):
    out_a = tmp_path / "serial.csv"
    out_b = tmp_path / "pool.csv"
    args = ["sweep", "--lambda", "0:1:2", "--omega0", "1"]
    assert run_cli(args + ["--jobs", "1", "--out", str(out_a)]) == 0
    assert run_cli(args + ["--jobs", "2", "--out", str(out_b)]) == 0
    assert out_a.read_bytes() == out_b.read_bytes()


def test_sweep_agrees_with_solve(tmp_path):
    out = tmp_path / "s.csv"
    assert run_cli(["sweep", "--lambda", "0.5", "--omega0", "1",
                    "--jobs", "1", "--out", str(out)]) == 0
    row = out.read_text().splitlines()[1].split(",")
    cols = dict(zip(SWEEP_COLUMNS, row))
    sol = solve_rabi_ground(ModelParams(omega=1.0, lam=0.5, omega0=1.0))
    assert float(cols["e_exact"]) == pytest.approx(sol.energy, abs=1e-14)
    assert cols["parity_label"] == "+1"
    assert cols["p1_ok"] == "1" and cols["w_bound_ok"] == "1"


def test_sweep_json_format(capsys):
    assert run_cli(["sweep", "--lambda", "0.5", "--omega0", "1",
                    "--jobs", "1", "--format", "json"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert len(rows) == 1
    assert set(SWEEP_COLUMNS) <= set(rows[0])


def test_sweep_rejects_three_swept_axes():
    assert run_cli(["sweep", "--omega", "1:2:2", "--lambda", "0:1:2",
                    "--omega0", "0:1:2"]) == 1


def test_sweep_failure_leaves_no_file(tmp_path):
    out = tmp_path / "fail.csv"
    code = run_cli(["sweep", "--lambda", "1:2:2", "--omega0", "1",
                    "--dim", "8", "--jobs", "1", "--out", str(out)])
    assert code == 2
    assert not out.exists()


def test_config_file_with_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"lambda": 0.5, "omega0": 5.0, "format": "json"}))
    assert run_cli(["solve", "--config", str(cfg), "--omega0", "1"]) == 0
    data = json.loads(capsys.readouterr().out)  # flag overrode omega0=5
    assert data["energy"] == pytest.approx(-0.6332942354616301, abs=1e-12)


def test_config_file_unknown_key_rejected(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"lambda": 0.5, "omega0": 1.0, "lambda_max": 2}))
    assert run_cli(["solve", "--config", str(cfg)]) == 1


def test_config_file_invalid_json_rejected(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text("{not json")
    assert run_cli(["solve", "--config", str(cfg)]) == 1


def test_solve_out_file(tmp_path):
    out = tmp_path / "solve.txt"
    assert run_cli(["solve", "--lambda", "0", "--omega0", "1",
                    "--out", str(out)]) == 0
    assert "energy = -0.5" in out.read_text()


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "rabi_balance.cli", "solve",
         "--lambda", "0", "--omega0", "1"],
        capture_output=True, text=True, timeout=120,
    )
    assert proc.returncode == 0
    assert "energy = -0.5" in proc.stdout
