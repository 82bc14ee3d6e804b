import numpy as np
import pytest

from polariton import (OVERRIDE_BUNDLES, PRESETS, ParameterError, SweepSpec,
                       SystemParams, TruncationConfig, bundle_params,
                       compare_oracle, g_k_zero, preset_params, run_sweep,
                       solve_point)

CFG3 = TruncationConfig(3, 3)


def test_preset_values():
    a1 = PRESETS["A1"].params
    assert (a1.delta_a, a1.delta_b, a1.delta_q) == (-3.0, 3.0, -6.0)
    assert (a1.f, a1.eta_a, a1.eta_b) == (5.0, 0.7, 0.0)
    assert (a1.kappa_a, a1.kappa_b, a1.gamma) == (1.5, 6.0, 1.0)
    assert PRESETS["A1"].driven_mode == "SMR"
    a2 = PRESETS["A2"].params
    assert (a2.delta_a, a2.delta_b, a2.delta_q) == (5.0, -5.0, 3.0)
    assert (a2.f, a2.eta_b, a2.kappa_a, a2.kappa_b) == (7.0, 0.5, 7.5, 6.0)
    assert PRESETS["A2"].driven_mode == "QD"
    a3 = PRESETS["A3"].params
    assert (a3.delta_a, a3.delta_b, a3.delta_q) == (4.0, -4.0, 7.0)
    assert (a3.f, a3.eta_b, a3.kappa_a, a3.kappa_b) == (6.4, 0.22, 3.5, 0.002)
    # each preset drives exactly one mode
    for preset in PRESETS.values():
        assert (preset.params.eta_a == 0.0) or (preset.params.eta_b == 0.0)


def test_bundles_resolve():
    p, driven = bundle_params("oracle-comparison")
    assert (p.g, p.kappa_a, p.kappa_b) == (4.5, 6.0, 6.0)
    assert driven == "QD"
    for name in OVERRIDE_BUNDLES:
        bundle_params(name)
    with pytest.raises(ParameterError):
        bundle_params("nonexistent")


def test_sweepspec_validation():
    with pytest.raises(ParameterError):
        SweepSpec(swept="g", preset="A2", start=0, stop=1, count=1)
    with pytest.raises(ParameterError):
        SweepSpec(swept="g", start=0, stop=1, count=5)  # no preset/params
    with pytest.raises(ParameterError):
        SweepSpec(swept="g", preset="A2", params=SystemParams(), start=0, stop=1, count=5)
    with pytest.raises(ParameterError):
        SweepSpec(swept="eta_a", preset="A2", start=0, stop=1, count=5)  # QD-driven preset
    with pytest.raises(ParameterError):
        SweepSpec(swept="nothing", preset="A2", start=0, stop=1, count=5)
    with pytest.raises(ParameterError):
        SweepSpec(swept="g", preset="A2", values=())


def test_single_point_sweep_matches_direct_calls():
    spec = SweepSpec(swept="g", preset="A2", values=(4.5,), truncation=CFG3,
                     modes=("a", "b", "c"), orders=(2,))
    result = run_sweep(spec)
    assert len(result.rows) == 1
    row = result.rows[0]
    rho, _ = solve_point(preset_params("A2", g=4.5), CFG3, "QD")
    for mode in ("a", "b", "c"):
        assert row[f"g2_{mode}"] == g_k_zero(rho, mode, 2).value
    assert row["case"] == 7


def test_determinism_and_row_independence():
    values = (3.0, 5.0, 4.0, 4.5)
    spec = SweepSpec(swept="g", preset="A2", values=values, truncation=CFG3,
                     modes=("a", "b"), orders=(2,))
    r1 = run_sweep(spec)
    r2 = run_sweep(spec)
    assert r1.rows == r2.rows  # bitwise identical floats
    sorted_spec = SweepSpec(swept="g", preset="A2", values=tuple(sorted(values)),
                            truncation=CFG3, modes=("a", "b"), orders=(2,))
    r3 = run_sweep(sorted_spec)
    assert r1.rows == r3.rows  # shuffled grid, same sorted table


def test_threaded_sweep_matches_serial():
    spec = SweepSpec(swept="g", preset="A2", values=(4.0, 4.5, 5.0), truncation=CFG3,
                     modes=("a", "c"), orders=(2,))
    serial = run_sweep(spec, threads=1)
    threaded = run_sweep(spec, threads=2)
    assert serial.rows == threaded.rows


def test_sweep_records_point_errors_without_aborting():
    # zero drive: the steady state is vacuum, so every correlation cell is
    # below the occupancy floor
    params = SystemParams(kappa_a=1.0, kappa_b=1.0, gamma=1.0)
    spec = SweepSpec(swept="g", params=params, values=(0.5, 1.0),
                     truncation=TruncationConfig(2, 2), modes=("a",), orders=(2,))
    result = run_sweep(spec)
    assert len(result.rows) == 2
    assert all(row["error"] for row in result.rows)
    assert len(result.failed_rows) == 2


def test_resonant_and_offset_detuning_sweeps():
    spec = SweepSpec(swept="delta_smr", preset="A2", values=(1.0,), resonant=True)
    p = spec.point_params(1.0)
    assert (p.delta_a, p.delta_b, p.delta_q) == (1.0, 1.0, 1.0)
    spec = SweepSpec(swept="delta_smr", preset="A2", values=(1.0,), resonant=False)
    p = spec.point_params(1.0)
    assert (p.delta_a, p.delta_b, p.delta_q) == (1.0, -9.0, -1.0)


def test_compare_oracle_linear_limit():
    # g = 0 sweep: both methods give Poissonian phonons
    spec = SweepSpec(swept="delta_smr", preset="A2", values=(1.5, 2.5),
                     overrides={"g": 0.0, "kappa_a": 6.0, "kappa_b": 6.0},
                     resonant=True, truncation=TruncationConfig(5, 5))
    result = compare_oracle(spec)
    for row in result.rows:
        assert not row["me_error"] and not row["oracle_error"]
        assert row["me_g2_b"] == pytest.approx(1.0, abs=1e-6)
        assert row["oracle_g2_b"] == pytest.approx(1.0, abs=1e-6)


def test_compare_oracle_reports_precondition_violations_per_point():
    spec = SweepSpec(swept="delta_smr", preset="A2", values=(1.0, 2.0),
                     overrides={"g": 4.5}, resonant=True, truncation=CFG3)
    result = compare_oracle(spec)  # A2 has unequal kappas: oracle must refuse
    for row in result.rows:
        assert row["oracle_error"] and "kappa" in row["oracle_error"]
        assert not row["me_error"]
        assert np.isfinite(row["me_g2_b"])


def test_compare_oracle_extrema_summary():
    spec = SweepSpec(swept="delta_smr", preset="A2", start=4.6, stop=5.6, count=21,
                     overrides={"g": 4.5, "kappa_a": 6.0, "kappa_b": 6.0, "eta_b": 0.1},
                     resonant=True, truncation=CFG3)
    result = compare_oracle(spec, threads=2)
    assert result.summary["grid_step"] == pytest.approx(0.05)
    me_min = result.summary["me_g2_b"]["local_minima"]
    or_min = result.summary["oracle_g2_b"]["local_minima"]
    assert me_min and or_min
    assert abs(me_min[0][0] - or_min[0][0]) <= 0.05 + 1e-12


def test_empty_grid_rejected():
    with pytest.raises(ParameterError):
        SweepSpec(swept="delta_smr", preset="A2", values=(), resonant=True)


def test_threads_env_fallback(monkeypatch):
    from polariton.scenarios import _resolve_threads
    monkeypatch.delenv("POLARITON_THREADS", raising=False)
    assert _resolve_threads(None) == 1
    assert _resolve_threads(4) == 4
    monkeypatch.setenv("POLARITON_THREADS", "3")
    assert _resolve_threads(None) == 3
    assert _resolve_threads(2) == 2  # explicit argument wins
    monkeypatch.setenv("POLARITON_THREADS", "junk")
    assert _resolve_threads(None) == 1


def test_run_sweep_rejects_omega_m():
    spec = SweepSpec(swept="omega_m", preset="A1", values=(1560.0, 1561.0))
    with pytest.raises(ParameterError):
        run_sweep(spec)
