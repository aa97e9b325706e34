"""Regime phenomenology on full-resolution sweeps. Run with `pytest -m slow`."""

import numpy as np
import pytest

from coupling_sweep import (
    NM_ONSET,
    SPEEDUP_ONSET,
    NMLabel,
    SpeedLabel,
    SweepAxis,
    SweepSpec,
    find_crossover,
    locate_by_scan,
    multi_interval_detection,
    run_sweep,
    write_sweep_csv,
)
from run_config import resolve_config

pytestmark = pytest.mark.slow


def _preset_sweep(preset, workers=4, **overrides):
    config = resolve_config(overrides=dict(preset=preset, **overrides))
    return run_sweep(config.sweep_spec(), config.solver_config(), workers=workers)


def _assert_qsl_identity(result):
    general, closed = result.grid('qsl_ratio_general'), result.grid('qsl_ratio_closed')
    assert np.nanmax(np.abs(general - closed)) <= 1e-8
    n_blp = result.grid('n_blp')
    np.testing.assert_allclose(general[n_blp == 0.0], 1.0, rtol=0, atol=1e-12)


def test_memoryless_crossover_in_kappa(memoryless_params, coarse_solver):
    curve = _preset_sweep('memoryless_kappa')
    n_blp = curve.grid('n_blp')[:, 0]
    onset = int(np.argmax(n_blp > 1e-6))
    peak = int(np.argmax(n_blp))
    assert 0 < onset < peak
    assert np.all(n_blp[:onset] <= 1e-6)
    # Backflow grows from the onset up to a broad maximum near the end of the axis
    assert np.all(np.diff(n_blp[onset:peak + 1]) >= -1e-9)
    assert curve.axis1_values[peak] >= 2.5
    assert np.all(n_blp[peak:] >= 0.99 * n_blp[peak])
    _assert_qsl_identity(curve)

    base = memoryless_params()
    bisected = find_crossover(base, 'kappa', (0.5, 3.0), tol=1e-3, solver=coarse_solver)
    scanned = locate_by_scan(base, 'kappa', (0.5, 3.0), step=0.005, solver=coarse_solver)
    assert abs(bisected.critical_value - scanned.critical_value) <= 0.01


def test_speedup_onset_coincides_with_backflow_onset(memoryless_params, coarse_solver):
    base = memoryless_params()
    nm = find_crossover(base, 'kappa', (0.5, 3.0), predicate=NM_ONSET, tol=1e-3, solver=coarse_solver)
    speed = find_crossover(base, 'kappa', (0.5, 3.0), predicate=SPEEDUP_ONSET, tol=1e-3, solver=coarse_solver)
    assert abs(nm.critical_value - speed.critical_value) <= 0.02


def test_second_layer_coupling_suppresses_backflow():
    curve = _preset_sweep('memoryless_omega')
    n_blp = curve.grid('n_blp')[:, 0]
    assert np.all(np.diff(n_blp) <= 1e-9)
    assert n_blp[-1] <= 1e-6
    _assert_qsl_identity(curve)


@pytest.mark.parametrize('kappa', [2.0, 2.2])
def test_backflow_vanishes_and_revives_along_omega(kappa):
    curve = _preset_sweep('memoryless_omega', kappa=kappa)
    n_blp = curve.grid('n_blp')[:, 0]
    assert np.all(n_blp[0] >= n_blp - 1e-12)
    labels = [i.label for i in multi_interval_detection(curve)]
    assert len(labels) >= 3
    assert all(a != b for a, b in zip(labels, labels[1:]))
    assert labels[0] == NMLabel.NON_MARKOVIAN.value


def test_memory_makes_backflow_non_monotone_in_kappa():
    curve = _preset_sweep('memory_kappa')
    n_blp = curve.grid('n_blp')[:, 0]
    interior = (n_blp[1:-1] > n_blp[:-2]) & (n_blp[1:-1] > n_blp[2:])
    assert interior.any()
    _assert_qsl_identity(curve)


def test_memory_speedup_onset_coincides_with_backflow_onset(memory_params, coarse_solver):
    config = resolve_config(overrides={'preset': 'memory_kappa_speedup', 'dense_grid_points': 401})
    bracket = (config.bracket_low, config.bracket_high)
    speed = find_crossover(config.model_params(), config.crossover_parameter, bracket,
                           predicate=config.predicate, tol=1e-3, thresholds=config.thresholds(),
                           solver=config.solver_config())
    nm = find_crossover(memory_params(), 'kappa', bracket, predicate=NM_ONSET, tol=1e-3, solver=coarse_solver)
    assert speed.predicate == SPEEDUP_ONSET
    assert 0.5 < speed.critical_value < 1.0
    assert abs(nm.critical_value - speed.critical_value) <= 0.02


def test_strong_kappa_keeps_speedup_for_every_omega():
    curve = _preset_sweep('memoryless_omega', kappa=2.4)
    assert {p.speed_label for p in curve.points} == {SpeedLabel.SPEEDUP}
    assert np.all(curve.grid('qsl_ratio_general') < 1.0)
    _assert_qsl_identity(curve)


def test_memory_makes_speed_limit_non_monotone_in_kappa():
    curve = _preset_sweep('memory_kappa')
    steps = np.diff(curve.grid('qsl_ratio_general')[:, 0])
    assert np.any(steps < -1e-9)
    assert np.any(steps > 1e-9)


def test_short_memory_stays_markovian_at_large_omega():
    curve = _preset_sweep('memory_omega')
    intervals = multi_interval_detection(curve)
    assert intervals[-1].label == NMLabel.MARKOVIAN.value
    assert intervals[-1].stop == 3.0


def test_phase_diagram_rows_start_markovian(tmp_path):
    serial = _preset_sweep('memoryless_phase', workers=1, dense_grid_points=401)
    n_blp = serial.grid('n_blp')
    assert np.all(n_blp[:, 0] <= 1e-6)
    _assert_qsl_identity(serial)

    parallel = _preset_sweep('memoryless_phase', workers=4, dense_grid_points=401)
    write_sweep_csv(serial, tmp_path / 'serial.csv')
    write_sweep_csv(parallel, tmp_path / 'parallel.csv')
    assert (tmp_path / 'serial.csv').read_bytes() == (tmp_path / 'parallel.csv').read_bytes()


def test_halving_threshold_keeps_boundary_within_resolution(memoryless_params, coarse_solver):
    base = memoryless_params()
    spec = SweepSpec(base, SweepAxis('kappa', 0.0, 3.0, 121))
    curve = run_sweep(spec, coarse_solver, workers=4)
    n_blp = curve.grid('n_blp')[:, 0]
    step = curve.axis1_values[1] - curve.axis1_values[0]
    onset = curve.axis1_values[np.argmax(n_blp > 1e-6)]
    onset_half = curve.axis1_values[np.argmax(n_blp > 5e-7)]
    assert abs(onset - onset_half) <= step
