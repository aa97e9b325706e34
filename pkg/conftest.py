"""Shared fixtures: weak-coupling parameter sets and analytic reference solutions."""

import numpy as np
import pytest

from amplitude_dynamics import SolverConfig
from hierarchical_model import MemoryKeeping, Memoryless, ModelParams


def damped_jc_amplitude(t, kappa0: float, gamma0: float = 1.0):
    """Solution of a'' + (gamma0/2) a' + kappa0^2 a = 0 with a(0)=1, a'(0)=0 (weak coupling)."""
    root = np.sqrt(gamma0 ** 2 / 16 - kappa0 ** 2)
    r_plus, r_minus = -gamma0 / 4 + root, -gamma0 / 4 - root
    t = np.asarray(t, dtype=float)
    return (r_plus * np.exp(r_minus * t) - r_minus * np.exp(r_plus * t)) / (r_plus - r_minus)


@pytest.fixture
def solver():
    return SolverConfig()


@pytest.fixture
def coarse_solver():
    """Same tolerances on a lighter output grid, for sweeps."""
    return SolverConfig(dense_grid_points=401)


@pytest.fixture
def memoryless_params():
    def make(kappa=0.0, omega_c=0.0, kappa0=0.2, gamma=1.0, tau=4.0):
        return ModelParams(kappa0=kappa0, kappa=kappa, omega_c=omega_c, env=Memoryless(gamma=gamma), tau=tau)
    return make


@pytest.fixture
def memory_params():
    def make(kappa=0.0, omega_c=0.0, kappa0=0.2, upsilon=1.0, lam=0.1, tau=4.0):
        env = MemoryKeeping(upsilon1=upsilon, upsilon2=upsilon, lambda1=lam, lambda2=lam)
        return ModelParams(kappa0=kappa0, kappa=kappa, omega_c=omega_c, env=env, tau=tau)
    return make


@pytest.fixture
def damped_jc():
    return damped_jc_amplitude
