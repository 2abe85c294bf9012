import io
import json
import math

import numpy as np
import pytest

from critfish.errors import ConfigError
from critfish.sweep import (
    COLUMNS,
    SweepRow,
    make_config,
    rows_from_csv,
    rows_to_csv,
    rows_to_json_objects,
    run_sweep,
)

BASE = {
    "model": "toy",
    "size": 96,
    "g_grid": [0.3, 0.5],
    "temp_grid": [1.0, "inf"],
    "temp_mode": "beta",
    "estimators": ["qfi_spectral", "qfi_fidelity", "toy_analytic"],
    "delta_omega": 1e-3,
}


def config(**overrides):
    raw = dict(BASE)
    raw.update(overrides)
    return make_config(raw)


# ------------------------------------------------------------- configuration

def test_config_defaults_and_grids():
    cfg = config()
    assert cfg.omega == 1.0
    assert cfg.g_grid == (0.3, 0.5)
    assert cfg.temp_grid == (1.0, math.inf)
    assert cfg.fd_rtol == 1e-3


def test_config_grid_from_linear_spec():
    cfg = config(model="lmg", size=8, estimators=["qfi_spectral"],
                 g_grid={"min": 0.0, "max": 1.0, "count": 5})
    assert cfg.g_grid == (0.0, 0.25, 0.5, 0.75, 1.0)


def test_config_grid_log_approach_to_critical():
    cfg = config(g_grid={"min": 0.9, "max": 0.999, "count": 4,
                         "spacing": "log-approach-to-critical"})
    got = np.array(cfg.g_grid)
    want = 1.0 - 10.0 ** -np.linspace(1.0, 3.0, 4)
    assert np.allclose(got, want, rtol=1e-12)
    assert np.all(np.diff(got) > 0)


@pytest.mark.parametrize(
    "overrides,field",
    [
        ({"model": "xy"}, "model"),
        ({"size": 0}, "size"),
        ({"size": "adaptive", "model": "lmg"}, "size"),
        ({"g_grid": []}, "g_grid"),
        ({"g_grid": [-0.1]}, "g_grid[0]"),
        ({"g_grid": [1.5]}, "g_grid[0]"),
        ({"g_grid": {"min": 0, "max": 1, "count": 0}}, "g_grid"),
        ({"temp_grid": []}, "temp_grid"),
        ({"temp_grid": [0.0]}, "temp_grid[0]"),
        ({"temp_grid": ["soon"]}, "temp_grid[0]"),
        ({"temp_mode": "kelvin"}, "temp_mode"),
        ({"estimators": []}, "estimators"),
        ({"estimators": ["qfi_exact"]}, "estimators[0]"),
        ({"estimators": ["toy_analytic"], "model": "lmg", "size": 8}, "estimators"),
        ({"omega": -1.0}, "omega"),
        ({"delta_omega": 0.0}, "delta_omega"),
        ({"fd_rtol": -1.0}, "fd_rtol"),
        ({"workers": 0}, "workers"),
        ({"surprise": 1}, ""),
    ],
)
def test_config_rejections_carry_field_paths(overrides, field):
    with pytest.raises(ConfigError) as info:
        config(**overrides)
    assert info.value.field == field


def test_config_beyond_critical_escape_hatch():
    cfg = make_config(dict(BASE, g_grid=[1.5]), enforce_critical=False)
    rows = run_sweep(cfg)
    assert rows[0].status == "cell:BeyondCriticality"
    assert rows[0].qfi_fidelity is None


# ------------------------------------------------------------------- running

def test_rows_in_grid_order_and_all_ok():
    rows = run_sweep(config())
    assert [(r.g, r.beta) for r in rows] == [
        (0.3, 1.0), (0.3, math.inf), (0.5, 1.0), (0.5, math.inf)]
    finite = [r for r in rows if not math.isinf(r.beta)]
    assert all(r.status == "ok" for r in finite)


def test_zero_temperature_rows_flag_spectral_estimator():
    rows = run_sweep(config())
    cold = [r for r in rows if math.isinf(r.beta)]
    assert cold
    for row in cold:
        assert row.qfi_spectral_total is None
        assert "qfi_spectral:InvalidTemperature" in row.status
        assert row.qfi_fidelity is not None  # the T = 0 reference column


def test_numeric_and_analytic_columns_agree():
    rows = run_sweep(config())
    for row in rows:
        if math.isinf(row.beta):
            continue
        assert row.qfi_spectral_total == pytest.approx(row.analytic_total, rel=1e-5)
        assert row.qfi_fidelity == pytest.approx(row.analytic_total, rel=1e-3)
        assert row.qfi_quantum_part == pytest.approx(row.analytic_quantum_part, rel=1e-5)


def test_adaptive_truncation_column():
    cfg = config(size="adaptive", g_grid=[0.5], temp_grid=[2.0])
    rows = run_sweep(cfg)
    assert rows[0].N >= 64
    assert rows[0].status == "ok"


def test_beta_gap_ratio_mode():
    cfg = config(model="lmg", size=8, g_grid=[0.5], temp_grid=[10.0, "inf"],
                 temp_mode="beta_gap_ratio", estimators=["qfi_fidelity"])
    rows = run_sweep(cfg)
    warm, cold = rows
    assert warm.beta == pytest.approx(10.0 * warm.gap)
    assert warm.beta_gap_ratio == 10.0
    assert cold.beta == math.inf


def test_gap_ratio_recorded_in_explicit_beta_mode():
    rows = run_sweep(config(g_grid=[0.5], temp_grid=[2.0]))
    row = rows[0]
    assert row.beta_gap_ratio == pytest.approx(row.beta / row.gap)


def test_parallel_matches_serial():
    serial = run_sweep(config(workers=1))
    parallel = run_sweep(config(workers=2))
    assert serial == parallel


def test_thread_env_var_caps_workers(monkeypatch):
    from critfish.sweep import _worker_count

    monkeypatch.setenv("CRITFISH_THREADS", "2")
    assert _worker_count(config(workers=8)) == 2
    assert _worker_count(config(workers=1)) == 1
    monkeypatch.setenv("CRITFISH_THREADS", "")
    assert _worker_count(config(workers=3)) == 3
    monkeypatch.delenv("CRITFISH_THREADS")
    assert _worker_count(config(workers=5)) == 5


def test_determinism():
    a = run_sweep(config())
    b = run_sweep(config())
    assert a == b


# -------------------------------------------------------------------- tables

def test_csv_roundtrip_is_bit_exact():
    rows = run_sweep(config())
    buffer = io.StringIO()
    rows_to_csv(rows, buffer)
    text = buffer.getvalue()
    assert "\r" not in text and "NaN" not in text and "nan" not in text
    assert text.splitlines()[0] == ",".join(COLUMNS)
    back = rows_from_csv(io.StringIO(text))
    assert back == rows  # float equality: 17 significant digits round-trip


def test_csv_serializes_infinities_not_nan():
    rows = run_sweep(config())
    buffer = io.StringIO()
    rows_to_csv(rows, buffer)
    assert ",inf," in buffer.getvalue()


def test_csv_rejects_foreign_header():
    with pytest.raises(ValueError):
        rows_from_csv(io.StringIO("a,b,c\n1,2,3\n"))


def test_json_objects_are_json_safe():
    rows = run_sweep(config())
    objects = rows_to_json_objects(rows)
    text = json.dumps(objects)  # would raise on actual infinities with allow_nan=False
    parsed = json.loads(text)
    assert parsed[1]["beta"] == "inf"
    assert parsed[0]["qfi_spectral_total"] == pytest.approx(rows[0].qfi_spectral_total)
    assert set(parsed[0]) == set(COLUMNS)


def test_row_dataclass_columns_stable():
    # the CSV contract: exactly these columns, in this order
    assert COLUMNS == (
        "model", "N", "omega", "g", "beta", "beta_gap_ratio", "gap",
        "qfi_fidelity", "qfi_spectral_total", "qfi_classical_part",
        "qfi_quantum_part", "cfi_sx2", "fi_errprop", "analytic_total",
        "analytic_quantum_part", "analytic_classical_part",
        "analytic_errprop", "status",
    )
    row = SweepRow(model="toy", N=4, omega=1.0, g=0.1)
    assert row.status == "ok"
