import json
import math
import subprocess
import sys

import pytest

from critfish.cli import fig1_config, fig2_config, main
from critfish.sweep import rows_from_csv


def test_selftest_green(capsys):
    assert main(["selftest"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out
    assert out.count("PASS") == 6


def test_point_prints_row_json(capsys):
    code = main([
        "point", "--model", "lmg", "-N", "6", "--omega", "1.0",
        "-g", "0.8", "--beta-gap", "10", "--estimators", "qfi_spectral,cfi_sx2",
    ])
    assert code == 0
    row = json.loads(capsys.readouterr().out)
    assert row["model"] == "lmg" and row["N"] == 6
    assert row["status"] == "ok"
    assert row["qfi_spectral_total"] > 0
    assert row["cfi_sx2"] > 0
    assert row["qfi_fidelity"] is None  # not requested


def test_point_zero_temperature(capsys):
    code = main([
        "point", "--model", "lmg", "-N", "4", "-g", "0.5",
        "--beta", "inf", "--estimators", "qfi_fidelity",
    ])
    assert code == 0
    row = json.loads(capsys.readouterr().out)
    assert row["beta"] == "inf"
    assert row["qfi_fidelity"] > 0


def test_point_beyond_criticality_exits_two(capsys):
    code = main(["point", "--model", "toy", "-N", "64", "-g", "1.2", "--beta", "1"])
    assert code == 2
    captured = capsys.readouterr()
    assert "BeyondCriticality" in captured.err
    assert json.loads(captured.out)["status"] == "cell:BeyondCriticality"


def test_unknown_flags_exit_one(capsys):
    with pytest.raises(SystemExit) as info:
        main(["point", "--model", "lmg", "--frequency", "2"])
    assert info.value.code == 1
    assert "usage" in capsys.readouterr().err


def test_bad_estimator_is_config_error(capsys):
    code = main(["point", "--model", "lmg", "-N", "4", "-g", "0.5",
                 "--beta", "1", "--estimators", "qfi_magic"])
    assert code == 1
    assert "configuration error" in capsys.readouterr().err


def test_sweep_subcommand_runs_config_file(tmp_path, capsys):
    config_path = tmp_path / "sweep.json"
    out_path = tmp_path / "rows.csv"
    config_path.write_text(json.dumps({
        "model": "lmg",
        "size": 4,
        "g_grid": [0.4, 0.8],
        "temp_grid": [2.0],
        "temp_mode": "beta",
        "estimators": ["qfi_spectral"],
        "output": {"path": str(out_path), "format": "csv"},
    }))
    assert main(["sweep", "--config", str(config_path)]) == 0
    with open(out_path, encoding="utf-8") as handle:
        rows = rows_from_csv(handle)
    assert len(rows) == 2
    assert all(r.status == "ok" for r in rows)


def test_sweep_flags_override_config(tmp_path):
    config_path = tmp_path / "sweep.json"
    out_path = tmp_path / "rows.json"
    config_path.write_text(json.dumps({
        "model": "lmg", "size": 4, "g_grid": [0.4], "temp_grid": [2.0],
        "temp_mode": "beta", "estimators": ["qfi_spectral"],
        "output": {"path": "ignored.csv"},
    }))
    assert main(["sweep", "--config", str(config_path), "--out", str(out_path),
                 "--format", "json"]) == 0
    rows = json.loads(out_path.read_text())
    assert len(rows) == 1 and rows[0]["model"] == "lmg"


def test_sweep_missing_config_file(capsys):
    assert main(["sweep", "--config", "/nonexistent.json"]) == 1


def test_sweep_invalid_json(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert main(["sweep", "--config", str(path)]) == 1
    assert "not valid JSON" in capsys.readouterr().err


def test_sweep_config_error_exit(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"model": "lmg", "size": 4, "g_grid": [],
                                "temp_grid": [1.0], "output": {"path": "x.csv"}}))
    assert main(["sweep", "--config", str(path)]) == 1
    assert "g_grid" in capsys.readouterr().err


def test_fig_presets_shapes():
    cfg1 = fig1_config("lmg", 20)
    assert len(cfg1.g_grid) == 60
    assert math.inf in cfg1.temp_grid and 180.0 in cfg1.temp_grid
    assert len(cfg1.temp_grid) == 23
    cfg2 = fig2_config("ising", 6, 180.0)
    assert cfg2.temp_grid == (math.inf, 180.0)
    assert set(cfg2.estimators) == {"qfi_spectral", "qfi_fidelity", "cfi_sx2", "fi_errprop"}


def test_fig1_writes_csv(tmp_path):
    out = tmp_path / "fig1.csv"
    assert main(["fig1", "--model", "lmg", "-N", "6", "--out", str(out),
                 "--g-count", "4", "--temp-count", "3"]) == 0
    with open(out, encoding="utf-8") as handle:
        rows = rows_from_csv(handle)
    assert len(rows) == 4 * 5  # g-count x (temp-count + inf + 180)


def test_fig2_writes_stdout(capsys):
    assert main(["fig2", "--model", "lmg", "-N", "4", "--out", "-",
                 "--g-count", "3"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("model,")
    assert len(out.strip().splitlines()) == 1 + 3 * 2


def test_json_format_inferred_from_extension(tmp_path):
    out = tmp_path / "fig2.json"
    assert main(["fig2", "--model", "lmg", "-N", "4", "--out", str(out),
                 "--g-count", "2"]) == 0
    rows = json.loads(out.read_text())
    assert len(rows) == 4


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "critfish", "point", "--model", "lmg", "-N", "4",
         "-g", "0.3", "--beta", "2", "--estimators", "qfi_spectral"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["status"] == "ok"
