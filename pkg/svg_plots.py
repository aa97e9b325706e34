#!/usr/bin/env python3
"""
Static SVG rendering of trajectories, 1-D sweep curves and phase diagrams.
"""

import logging

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt
import numpy as np

from amplitude_dynamics import AmplitudeTrajectory
from coupling_sweep import SweepResult

logger = logging.getLogger(__name__)

AXIS_LABELS = {
    'kappa': r'$\kappa/\Gamma_0$',
    'omega_c': r'$\Omega/\Gamma_0$',
    'kappa0': r'$\kappa_0/\Gamma_0$',
}


def _save(fig, path) -> None:
    fig.savefig(path, format='svg')
    plt.close(fig)
    logger.info(f"Wrote plot to {path}")


def plot_survival(traj: AmplitudeTrajectory, path) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(traj.times, traj.survival, lw=1.5)
    ax.set_xlabel(r'$\Gamma_0 t$')
    ax.set_ylabel(r'$|a(t)|$')
    ax.set_xlim(traj.times[0], traj.times[-1])
    ax.set_ylim(0, 1.02)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    _save(fig, path)


def plot_sweep_curve(result: SweepResult, path) -> None:
    """N and tau_QSL/tau against the swept coupling, on twin axes."""
    x = result.axis1_values
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(x, result.grid('n_blp')[:, 0], color='tab:blue', label=r'$\mathcal{N}(\Phi)$')
    ax.set_xlabel(AXIS_LABELS.get(result.spec.axis1.name, result.spec.axis1.name))
    ax.set_ylabel(r'$\mathcal{N}(\Phi)$', color='tab:blue')
    twin = ax.twinx()
    twin.plot(x, result.grid('qsl_ratio_general')[:, 0], color='tab:red', ls='--')
    twin.set_ylabel(r'$\tau_{QSL}/\tau$', color='tab:red')
    twin.set_ylim(0, 1.05)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    _save(fig, path)


def plot_phase_diagram(result: SweepResult, path) -> None:
    """Heat map of N over (axis2, axis1) with the eps_nm boundary contour."""
    n_grid = result.grid('n_blp')
    x, y = result.axis2_values, result.axis1_values
    fig, ax = plt.subplots(figsize=(6, 5))
    mesh = ax.pcolormesh(x, y, n_grid, shading='nearest', cmap='viridis')
    fig.colorbar(mesh, ax=ax, label=r'$\mathcal{N}(\Phi)$')
    eps = result.spec.thresholds.eps_nm
    if np.nanmin(n_grid) <= eps < np.nanmax(n_grid):
        ax.contour(x, y, n_grid, levels=[eps], colors='white', linewidths=1.0)
    ax.set_xlabel(AXIS_LABELS.get(result.spec.axis2.name, result.spec.axis2.name))
    ax.set_ylabel(AXIS_LABELS.get(result.spec.axis1.name, result.spec.axis1.name))
    fig.tight_layout()
    _save(fig, path)
