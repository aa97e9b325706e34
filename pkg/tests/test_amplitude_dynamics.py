import numpy as np
import pandas as pd
import pytest

from amplitude_dynamics import (
    SolverConfig,
    integrate,
    integrate_expm,
    integrate_volterra,
    trajectory_columns,
    write_trajectory_csv,
)
from hierarchical_model import MEMORY_KEEPING_BASIS, MEMORYLESS_BASIS, MemoryKeeping, ModelParams, build_generator
from simulation_errors import NonPhysicalParameter, VariantMismatch


def test_weak_coupling_matches_damped_jc(memoryless_params, solver, damped_jc):
    traj = integrate(build_generator(memoryless_params(kappa=0.0)), solver, 4.0)
    assert len(traj.times) == 2001
    assert traj.survival[0] == 1.0
    np.testing.assert_allclose(traj.survival, damped_jc(traj.times, 0.2), rtol=0, atol=1e-8)


def test_expm_oracle_matches_damped_jc(memoryless_params, damped_jc):
    times = np.linspace(0.0, 4.0, 65)
    traj = integrate_expm(build_generator(memoryless_params(kappa=0.0)), times)
    np.testing.assert_array_equal(traj.states[0], [1, 0, 0, 0])
    np.testing.assert_allclose(traj.survival, damped_jc(times, 0.2), rtol=0, atol=1e-10)


@pytest.mark.parametrize('env', [None, MemoryKeeping()])
def test_decoupled_qubit_never_decays(memoryless_params, solver, env):
    params = memoryless_params(kappa=2.0, omega_c=1.0, kappa0=0.0)
    if env is not None:
        params = ModelParams(kappa0=0.0, kappa=2.0, omega_c=1.0, env=env)
    traj = integrate(build_generator(params), solver, params.tau)
    np.testing.assert_allclose(traj.survival, 1.0, rtol=0, atol=1e-14)


def test_symmetric_second_layer_keeps_c1_equal_c2(memoryless_params, solver):
    traj = integrate(build_generator(memoryless_params(kappa=2.2, omega_c=0.7)), solver, 4.0)
    np.testing.assert_allclose(traj.states[:, 2], traj.states[:, 3], rtol=0, atol=1e-10)


def test_adaptive_integrator_matches_expm_on_random_parameters():
    rng = np.random.default_rng(20240611)
    config = SolverConfig(dense_grid_points=65)
    worst = 0.0
    for _ in range(50):
        kappa0 = rng.uniform(0.0, 0.25)
        kappa, omega_c = rng.uniform(0.0, 3.0, size=2)
        gen = build_generator(ModelParams(kappa0=kappa0, kappa=kappa, omega_c=omega_c))
        traj = integrate(gen, config, 4.0)
        oracle = integrate_expm(gen, traj.times)
        worst = max(worst, np.max(np.abs(traj.states - oracle.states)))
    assert worst <= 1e-8


def test_memoryless_tracked_norm_never_increases(memoryless_params, solver):
    for kappa, omega_c in [(0.0, 0.0), (2.4, 0.0), (2.0, 1.2), (3.0, 3.0)]:
        traj = integrate(build_generator(memoryless_params(kappa=kappa, omega_c=omega_c)), solver, 4.0)
        assert np.all(np.diff(traj.tracked_norm) <= 1e-9)
        assert np.all((traj.survival >= 0) & (traj.survival <= 1 + 1e-12))


def test_memory_keeping_tracked_norm_bounded(memory_params, solver):
    traj = integrate(build_generator(memory_params(kappa=2.0, omega_c=1.0)), solver, 4.0)
    assert traj.generator.basis_labels == MEMORY_KEEPING_BASIS
    assert np.all(traj.tracked_norm <= 1 + 1e-9)
    assert np.all(traj.tracked_norm >= 0)


def test_halving_tolerances_moves_survival_less_than_coarse_tolerance(memoryless_params):
    gen = build_generator(memoryless_params(kappa=2.4))
    coarse = integrate(gen, SolverConfig(rel_tol=1e-6, abs_tol=1e-6), 4.0)
    fine = integrate(gen, SolverConfig(rel_tol=5e-7, abs_tol=5e-7), 4.0)
    assert np.max(np.abs(coarse.survival - fine.survival)) < 1e-6


def test_integrate_is_deterministic(memory_params, solver):
    gen = build_generator(memory_params(kappa=1.5, omega_c=0.5))
    first, second = integrate(gen, solver, 4.0), integrate(gen, solver, 4.0)
    np.testing.assert_array_equal(first.states, second.states)


def test_state_at_between_grid_points(memoryless_params, solver):
    gen = build_generator(memoryless_params(kappa=2.4))
    traj = integrate(gen, solver, 4.0)
    t = 1.2345
    np.testing.assert_allclose(traj.state_at(t), integrate_expm(gen, [0.0, t]).states[1], rtol=0, atol=1e-9)


def test_segment_is_inclusive(memoryless_params, solver):
    traj = integrate(build_generator(memoryless_params(kappa=1.0)), solver, 4.0)
    part = traj.segment(100, 200)
    assert len(part.times) == 101
    assert part.times[0] == traj.times[100] and part.times[-1] == traj.times[200]


def test_solver_config_rejects_bad_values():
    with pytest.raises(NonPhysicalParameter):
        SolverConfig(rel_tol=0.0).validate()
    with pytest.raises(NonPhysicalParameter) as err:
        SolverConfig(dense_grid_points=1).validate()
    assert err.value.field == 'dense_grid_points'


def test_expm_rejects_grid_not_starting_at_zero(memoryless_params):
    with pytest.raises(NonPhysicalParameter):
        integrate_expm(build_generator(memoryless_params()), [0.5, 1.0])


def _volterra_gap(params, dt):
    traj = integrate_volterra(params, dt, params.tau)
    oracle = integrate_expm(build_generator(params), traj.times)
    return np.max(np.abs(traj.survival - oracle.survival))


def test_volterra_agrees_with_augmented_system(memory_params):
    params = memory_params(kappa=2.0, omega_c=1.0)
    quadrature = integrate_volterra(params, 1e-3, 4.0)
    augmented = integrate(build_generator(params), SolverConfig(dense_grid_points=4001), 4.0)
    assert len(quadrature.times) == 4001
    np.testing.assert_allclose(quadrature.times, augmented.times, rtol=0, atol=1e-12)
    assert np.max(np.abs(quadrature.survival - augmented.survival)) <= 1e-5


def test_volterra_converges_at_second_order(memory_params):
    params = memory_params(kappa=2.0, omega_c=1.0)
    ratio = _volterra_gap(params, 2e-3) / _volterra_gap(params, 1e-3)
    assert 3.0 < ratio < 5.0


def test_volterra_decoupled_qubit(memory_params):
    traj = integrate_volterra(memory_params(kappa=2.0, omega_c=1.0, kappa0=0.0), 1e-2, 4.0)
    np.testing.assert_allclose(traj.survival, 1.0, rtol=0, atol=1e-14)


def test_volterra_without_reservoir_coupling(memory_params):
    params = memory_params(kappa=2.0, omega_c=1.0, upsilon=0.0)
    traj = integrate_volterra(params, 1e-3, 4.0)
    np.testing.assert_array_equal(traj.states[:, 4:], 0)
    # Lossless second layer: z rows of the generator vanish as well
    np.testing.assert_array_equal(build_generator(params).entries[4:, :4], 0)


@pytest.mark.slow
def test_volterra_without_reservoir_coupling_matches_exact_solution(memory_params):
    params = memory_params(kappa=2.0, omega_c=1.0, upsilon=0.0)
    assert _volterra_gap(params, 1e-4) <= 1e-8


def test_volterra_rejects_memoryless(memoryless_params):
    with pytest.raises(VariantMismatch) as err:
        integrate_volterra(memoryless_params(kappa=1.0), 1e-3, 4.0)
    assert err.value.exit_code == 6


def test_trajectory_csv_columns(memoryless_params, solver, tmp_path):
    traj = integrate(build_generator(memoryless_params(kappa=2.4)), solver, 4.0)
    path = tmp_path / 'trajectory.csv'
    write_trajectory_csv(traj, path)
    frame = pd.read_csv(path)
    assert list(frame.columns) == trajectory_columns(MEMORYLESS_BASIS)
    assert list(frame.columns) == [
        'time', 're_a', 'im_a', 're_c0', 'im_c0', 're_c1', 'im_c1', 're_c2', 'im_c2', 'survival',
    ]
    assert len(frame) == 2001
    assert frame['survival'].iloc[0] == 1.0
    np.testing.assert_allclose(frame['survival'].to_numpy(), traj.survival, rtol=0, atol=1e-15)
