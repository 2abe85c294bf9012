"""Built-in oracle-agreement suite, runnable without pytest.

Re-derives a handful of closed-form values and cross-method identities
and checks the numerical stack against them.  One PASS/FAIL line per
check; returns 0 when everything is green.
"""

import io
import math

import numpy as np

from .analytic import ToyParams, fi_errprop_closed, qfi_eigenstate, qfi_thermal_classical, qfi_thermal_quantum
from .fisher import cfi_projective, fi_error_propagation, qfi_fidelity_fd, qfi_spectral
from .linalg import eigh
from .models import build_model, toy_converged_truncation
from .sweep import make_config, measurement_observable, rows_from_csv, rows_to_csv, run_sweep
from .thermal import gibbs


def _rel_err(value, reference):
    return abs(value - reference) / max(abs(reference), 1e-300)


def _check_toy_oracle():
    params = ToyParams(omega=1.0, g=0.6, beta=1.0 / ToyParams(1.0, 0.6, 1.0).effective_frequency)
    n_max = toy_converged_truncation(params.omega, params.g, params.beta)
    model = build_model("toy", params.omega, params.g, n_max)
    numeric = qfi_spectral(model, gibbs(eigh(model.H), params.beta)).total
    exact = qfi_thermal_quantum(params) + qfi_thermal_classical(params)
    err = _rel_err(numeric, exact)
    return err <= 1e-6, f"relative error {err:.2e} (n_max={n_max})"


def _check_zero_temperature_limits():
    params = ToyParams(omega=1.0, g=0.5, beta=math.inf)
    ground = qfi_eigenstate(params, 0)
    if qfi_thermal_quantum(params) != ground:
        return False, "thermal quantum term at beta=inf is not the ground-state value"
    err_closed = _rel_err(fi_errprop_closed(params), ground)
    if err_closed > 1e-12:
        return False, f"error-propagation closed form off by {err_closed:.2e} at T=0"
    n_max = toy_converged_truncation(1.0, 0.5, math.inf)
    numeric = qfi_fidelity_fd(
        lambda w: build_model("toy", w, 0.5, n_max), 1.0, math.inf, delta_omega=1e-2
    )
    err_fd = _rel_err(numeric, ground)
    return err_fd <= 1e-4, f"fidelity route off by {err_fd:.2e} from {ground}"


def _check_commuting_case():
    beta, size = 2.0, 8
    model = build_model("lmg", 1.0, 0.0, size)
    state = gibbs(eigh(model.H), beta)
    breakdown = qfi_spectral(model, state)
    levels = np.arange(size + 1) - size / 2.0
    mean = float(np.dot(state.probs, levels))
    variance = float(np.dot(state.probs, (levels - mean) ** 2))
    if breakdown.quantum_part != 0.0:
        return False, f"quantum part {breakdown.quantum_part} is not exactly zero"
    err = _rel_err(breakdown.total, beta ** 2 * variance)
    return err <= 1e-10, f"total vs beta^2 Var relative error {err:.2e}"


def _check_cross_method():
    model_kind, size, g, beta = "lmg", 8, 0.7, 3.0
    model = build_model(model_kind, 1.0, g, size)
    spectral = qfi_spectral(model, gibbs(eigh(model.H), beta)).total
    fd = qfi_fidelity_fd(
        lambda w: build_model(model_kind, w, g, size), 1.0, beta, delta_omega=1e-3
    )
    err = _rel_err(fd, spectral)
    return err <= 1e-4, f"spectral vs fidelity relative error {err:.2e}"


def _check_estimator_ordering():
    model_kind, size, g, beta = "lmg", 8, 0.9, 3.0
    factory = lambda w: build_model(model_kind, w, g, size)
    observable = measurement_observable(model_kind, size)
    qfi = qfi_spectral(build_model(model_kind, 1.0, g, size), gibbs(eigh(factory(1.0).H), beta)).total
    cfi = cfi_projective(factory, 1.0, beta, observable, delta_omega=1e-3)
    errprop = fi_error_propagation(factory, 1.0, beta, observable, delta_omega=1e-3)
    slack = 1e-6
    ok = errprop <= cfi + slack and cfi <= qfi + slack
    return ok, f"errprop={errprop:.6g}, cfi={cfi:.6g}, qfi={qfi:.6g}"


def _check_table_roundtrip():
    config = make_config(
        {
            "model": "toy",
            "size": 96,
            "g_grid": [0.3, 0.5],
            "temp_grid": [1.0, "inf"],
            "temp_mode": "beta",
            "estimators": ["qfi_spectral", "qfi_fidelity", "toy_analytic"],
            "delta_omega": 1e-3,
        }
    )
    serial = run_sweep(config)
    parallel = run_sweep(make_config(
        {
            "model": "toy",
            "size": 96,
            "g_grid": [0.3, 0.5],
            "temp_grid": [1.0, "inf"],
            "temp_mode": "beta",
            "estimators": ["qfi_spectral", "qfi_fidelity", "toy_analytic"],
            "delta_omega": 1e-3,
            "workers": 2,
        }
    ))
    if serial != parallel:
        return False, "parallel run differs from serial run"
    buffer = io.StringIO()
    rows_to_csv(serial, buffer)
    buffer.seek(0)
    if rows_from_csv(buffer) != serial:
        return False, "CSV round-trip altered the table"
    return True, f"{len(serial)} rows, serial == parallel, CSV round-trip exact"


CHECKS = (
    ("toy closed forms vs spectral estimator", _check_toy_oracle),
    ("zero-temperature identities", _check_zero_temperature_limits),
    ("commuting case (g = 0)", _check_commuting_case),
    ("spectral vs fidelity cross-method", _check_cross_method),
    ("estimator ordering", _check_estimator_ordering),
    ("table round-trip and parallel determinism", _check_table_roundtrip),
)


def run(stream):
    failures = 0
    for name, check in CHECKS:
        try:
            ok, detail = check()
        except Exception as exc:  # a crash is a failure, not an abort
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        stream.write(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}\n")
        failures += 0 if ok else 1
    stream.write(f"{len(CHECKS) - failures}/{len(CHECKS)} checks passed\n")
    return 0 if failures == 0 else 1
