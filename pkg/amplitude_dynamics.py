#!/usr/bin/env python3
"""
Amplitude dynamics

Integrates x' = M x from the excited-qubit initial vector over [0, tau] and
provides two independent oracles: the matrix exponential and a direct
trapezoidal quadrature of the memory-kernel convolutions.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np
import pandas as pd
from scipy.integrate import solve_ivp
from scipy.linalg import expm, lu_factor, lu_solve

from hierarchical_model import GeneratorMatrix, MemoryKeeping, ModelParams, build_generator
from simulation_errors import NonPhysicalParameter, StepSizeUnderflow, VariantMismatch

logger = logging.getLogger(__name__)

# Steps shorter than this fraction of tau mean the problem blew up.
STEP_UNDERFLOW_FRACTION = 1e-12


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and output resolution for the adaptive integrator."""
    rel_tol: float = 1e-10
    abs_tol: float = 1e-10
    max_step: float = math.inf
    dense_grid_points: int = 2001

    def validate(self) -> 'SolverConfig':
        for field in ('rel_tol', 'abs_tol', 'max_step'):
            value = getattr(self, field)
            if not value > 0:
                raise NonPhysicalParameter(field, value, "must be > 0")
        if int(self.dense_grid_points) != self.dense_grid_points or self.dense_grid_points < 2:
            raise NonPhysicalParameter('dense_grid_points', self.dense_grid_points, "need an integer >= 2")
        return self


@dataclass(eq=False)
class AmplitudeTrajectory:
    """
    Dense record of the amplitudes on a fixed time grid.

    states[k] is the full state vector in generator basis order at times[k].
    The generator is kept so the state can be propagated exactly to any
    time between grid points.
    """
    times: np.ndarray
    states: np.ndarray
    generator: GeneratorMatrix

    def __post_init__(self):
        self.survival = np.abs(self.states[:, 0])

    @property
    def tau(self) -> float:
        return float(self.times[-1])

    @property
    def population(self) -> np.ndarray:
        """Excited-state population |a(t)|^2."""
        return self.survival ** 2

    @property
    def tracked_norm(self) -> np.ndarray:
        """Sum of |amplitude|^2 over the physical amplitudes, memory variables excluded."""
        idx = list(self.generator.amplitude_indices)
        return np.sum(np.abs(self.states[:, idx]) ** 2, axis=1)

    def derivatives(self) -> np.ndarray:
        """Exact time derivative M x at every grid point."""
        return self.states @ self.generator.entries.T

    def state_at(self, t: float) -> np.ndarray:
        """State at an arbitrary time, propagated exactly from the nearest earlier grid point."""
        k = int(np.searchsorted(self.times, t, side='right')) - 1
        k = min(max(k, 0), len(self.times) - 1)
        dt = t - self.times[k]
        if dt == 0.0:
            return self.states[k]
        return expm(self.generator.entries * dt) @ self.states[k]

    def segment(self, start: int, stop: int) -> 'AmplitudeTrajectory':
        """Sub-trajectory over grid indices start..stop inclusive."""
        return AmplitudeTrajectory(
            times=self.times[start:stop + 1],
            states=self.states[start:stop + 1],
            generator=self.generator,
        )

    def to_frame(self) -> pd.DataFrame:
        """Columns: time, re_/im_ per basis label in generator order, survival."""
        columns = {'time': self.times}
        for i, label in enumerate(self.generator.basis_labels):
            columns[f're_{label}'] = self.states[:, i].real
            columns[f'im_{label}'] = self.states[:, i].imag
        columns['survival'] = self.survival
        return pd.DataFrame(columns)


def trajectory_columns(basis_labels: Sequence[str]) -> List[str]:
    columns = ['time']
    for label in basis_labels:
        columns += [f're_{label}', f'im_{label}']
    return columns + ['survival']


def write_trajectory_csv(traj: AmplitudeTrajectory, path) -> None:
    traj.to_frame().to_csv(path, index=False, float_format='%.17g')
    logger.info(f"Wrote {len(traj.times)} trajectory rows to {path}")


def _check_times(times) -> np.ndarray:
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or len(times) < 1 or times[0] != 0.0:
        raise NonPhysicalParameter('times', times[:1].tolist(), "time grid must start at 0")
    if np.any(np.diff(times) <= 0):
        raise NonPhysicalParameter('times', None, "time grid must be strictly increasing")
    return times


def integrate(gen: GeneratorMatrix, config: SolverConfig, tau: float) -> AmplitudeTrajectory:
    """
    Adaptive Runge-Kutta solution of x' = M x resampled onto a uniform grid.

    Uses the 8(5,3) Dormand-Prince pair with its dense interpolant.

    Raises:
        StepSizeUnderflow: the solver failed or needed steps below 1e-12*tau
    """
    config.validate()
    if not tau > 0:
        raise NonPhysicalParameter('tau', tau, "evolution horizon must be > 0")

    m = gen.entries
    x0 = gen.initial_vector()
    times = np.linspace(0.0, tau, int(config.dense_grid_points))

    sol = solve_ivp(
        lambda t, x: m @ x,
        (0.0, tau),
        x0,
        method='DOP853',
        t_eval=times,
        dense_output=True,
        rtol=config.rel_tol,
        atol=config.abs_tol,
        max_step=config.max_step,
    )
    if not sol.success:
        raise StepSizeUnderflow(f"integrator failed: {sol.message}")

    # The final step is clipped to land on tau and may legitimately be tiny.
    steps = np.diff(sol.sol.ts)[:-1]
    if steps.size and steps.min() < STEP_UNDERFLOW_FRACTION * tau:
        raise StepSizeUnderflow(f"step size {steps.min():.3e} below {STEP_UNDERFLOW_FRACTION:g}*tau")

    states = sol.y.T.copy()
    states[0] = x0
    logger.debug(f"DOP853 finished with {sol.nfev} evaluations over {len(sol.sol.ts) - 1} steps")
    return AmplitudeTrajectory(times=times, states=states, generator=gen)


def integrate_expm(gen: GeneratorMatrix, times) -> AmplitudeTrajectory:
    """x(t) = exp(M t) x(0) evaluated independently at every requested time."""
    times = _check_times(times)
    x0 = gen.initial_vector()
    states = np.empty((len(times), gen.dim), dtype=complex)
    for k, t in enumerate(times):
        states[k] = x0 if t == 0.0 else expm(gen.entries * t) @ x0
    return AmplitudeTrajectory(times=times, states=states, generator=gen)


def integrate_volterra(params: ModelParams, dt: float, tau: float) -> AmplitudeTrajectory:
    """
    Direct quadrature of the integro-differential equations of the memory-keeping model.

    The convolution integrals z_n(t) = int_0^t f_n(t-s) c_n(s) ds are summed
    with the trapezoidal rule over the full history using exact kernel
    values, and the local part of the system is advanced with the implicit
    trapezoidal rule. Both are second order in dt.

    Args:
        params: memory-keeping model parameters
        dt: requested step; shrunk so that an integer number of steps spans tau
        tau: evolution horizon

    Returns:
        Trajectory in the (h, c0, c1, c2, z1, z2) basis
    """
    if not isinstance(params.env, MemoryKeeping):
        raise VariantMismatch("Volterra quadrature needs a memory-keeping second-layer environment")
    if not dt > 0:
        raise NonPhysicalParameter('dt', dt, "step must be > 0")
    if not tau > 0:
        raise NonPhysicalParameter('tau', tau, "evolution horizon must be > 0")

    env = params.env
    n_steps = max(1, math.ceil(tau / dt - 1e-9))
    h = tau / n_steps
    times = h * np.arange(n_steps + 1)

    k0, k, om = params.kappa0, params.kappa, params.omega_c
    local = np.array([
        [0, -1j * k0, 0, 0],
        [-1j * k0, -params.gamma0 / 2, -1j * k, -1j * k],
        [0, -1j * k, 0, -1j * om],
        [0, -1j * k, -1j * om, 0],
    ], dtype=complex)

    f1 = env.kernel(1, times)
    f2 = env.kernel(2, times)

    # Implicit part: the newest history sample enters with weight h/2 * f_n(0).
    implicit = np.zeros((4, 4), dtype=complex)
    implicit[2, 2] = 0.5 * h * f1[0]
    implicit[3, 3] = 0.5 * h * f2[0]
    lhs = lu_factor(np.eye(4) - 0.5 * h * (local - implicit))

    y = np.zeros((n_steps + 1, 4), dtype=complex)
    z = np.zeros((n_steps + 1, 2), dtype=complex)
    y[0, 0] = 1.0

    for step in range(n_steps):
        # History part of z_n(t_{step+1}), every sample except the newest one.
        r1 = h * (0.5 * f1[step + 1] * y[0, 2] + np.dot(f1[step:0:-1], y[1:step + 1, 2]))
        r2 = h * (0.5 * f2[step + 1] * y[0, 3] + np.dot(f2[step:0:-1], y[1:step + 1, 3]))

        memory_now = np.array([0, 0, z[step, 0], z[step, 1]])
        rhs = y[step] + 0.5 * h * (local @ y[step] - memory_now) - 0.5 * h * np.array([0, 0, r1, r2])
        y[step + 1] = lu_solve(lhs, rhs)

        z[step + 1, 0] = r1 + 0.5 * h * f1[0] * y[step + 1, 2]
        z[step + 1, 1] = r2 + 0.5 * h * f2[0] * y[step + 1, 3]

    logger.debug(f"Volterra quadrature finished: {n_steps} steps of {h:.3e}")
    return AmplitudeTrajectory(
        times=times,
        states=np.hstack([y, z]),
        generator=build_generator(params),
    )
