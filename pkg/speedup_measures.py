#!/usr/bin/env python3
"""
Speedup measures

Reduced qubit state under the amplitude-damping map, trace distance,
trace-distance (information backflow) non-Markovianity and the quantum speed
limit ratio tau_QSL/tau, the latter both from its general definition and
from its closed form in terms of the population backflow.
"""

import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy import optimize
from scipy.integrate import simpson

from amplitude_dynamics import AmplitudeTrajectory
from simulation_errors import InvalidState, NonPhysicalParameter

logger = logging.getLogger(__name__)

STATE_TOL = 1e-12
ROOT_TIME_TOL = 1e-10
# Below this |a| the derivative of |a| is taken from the one-sided limit.
AMPLITUDE_ZERO = 1e-13
DEGENERATE_TOL = 1e-15


@dataclass(frozen=True, eq=False)
class QubitDensity:
    """2x2 density matrix in the basis {|1>, |0>}."""
    matrix: np.ndarray

    def validate(self) -> 'QubitDensity':
        m = np.asarray(self.matrix)
        if m.shape != (2, 2):
            raise InvalidState(f"expected a 2x2 matrix, got shape {m.shape}")
        if not np.allclose(m, m.conj().T, rtol=0, atol=STATE_TOL):
            raise InvalidState("density matrix is not Hermitian")
        if abs(np.trace(m) - 1) > STATE_TOL:
            raise InvalidState(f"trace is {np.trace(m).real:.15g}, expected 1")
        if np.linalg.eigvalsh(m).min() < -STATE_TOL:
            raise InvalidState("density matrix has a negative eigenvalue")
        return self

    @classmethod
    def from_pure(cls, psi) -> 'QubitDensity':
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def excited(cls) -> 'QubitDensity':
        return cls.from_pure([1, 0])

    @classmethod
    def ground(cls) -> 'QubitDensity':
        return cls.from_pure([0, 1])

    @property
    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


@dataclass(frozen=True)
class QslEstimate:
    ratio: float
    degenerate: bool = False


@dataclass(frozen=True)
class MeasureReport:
    """All measures at one parameter point."""
    n_blp: float
    n_population: float
    qsl_ratio_general: float
    qsl_ratio_closed: float
    survival_tau: float
    crossing_times: Tuple[float, ...]
    degenerate: bool

    def to_record(self) -> Dict[str, Any]:
        record = asdict(self)
        record['crossing_times'] = list(self.crossing_times)
        return record


@dataclass(frozen=True)
class BackflowProfile:
    """
    Survival sampled at the boundaries of its monotone pieces.

    breakpoints are 0, every sign change of d|a|/dt and tau; between two
    consecutive breakpoints |a(t)| is monotone.
    """
    breakpoints: np.ndarray
    survival: np.ndarray
    crossing_times: Tuple[float, ...]

    @property
    def rises(self) -> np.ndarray:
        return np.clip(np.diff(self.survival), 0.0, None)

    @property
    def population_steps(self) -> np.ndarray:
        return np.diff(self.survival ** 2)


def optimal_pair() -> Tuple[QubitDensity, QubitDensity]:
    """(|0> + |1>)/sqrt2 and (|0> - |1>)/sqrt2 in the {|1>, |0>} basis."""
    return QubitDensity.from_pure([1, 1]), QubitDensity.from_pure([-1, 1])


def reduced_state(survival_amp: complex, rho0: QubitDensity) -> QubitDensity:
    """Image of rho0 under the amplitude-damping map with excited amplitude a."""
    rho0.validate()
    a = complex(survival_amp)
    if abs(a) > 1 + STATE_TOL:
        raise NonPhysicalParameter('survival_amp', a, "|a| must not exceed 1")
    p = min(abs(a) ** 2, 1.0)
    r = rho0.matrix
    out = np.array([
        [r[0, 0] * p, r[0, 1] * np.conj(a)],
        [r[1, 0] * a, r[1, 1] + r[0, 0] * (1 - p)],
    ], dtype=complex)
    return QubitDensity(out)


def trace_norm(m) -> float:
    return float(np.linalg.svd(np.asarray(m), compute_uv=False).sum())


def trace_distance(r1: QubitDensity, r2: QubitDensity) -> float:
    return 0.5 * trace_norm(r1.matrix - r2.matrix)


def bures_angle(rho0: QubitDensity, rho: QubitDensity) -> float:
    """arccos sqrt(<phi0|rho|phi0>) for a pure initial state rho0 = |phi0><phi0|."""
    if abs(rho0.purity - 1) > 1e-9:
        raise InvalidState("Bures angle needs a pure initial state")
    _, vecs = np.linalg.eigh(rho0.matrix)
    phi0 = vecs[:, -1]
    fidelity = float(np.real(phi0.conj() @ rho.matrix @ phi0))
    return float(np.arccos(np.sqrt(np.clip(fidelity, 0.0, 1.0))))


def _survival_rate(x: np.ndarray, xdot: np.ndarray, toward: float = 1.0) -> float:
    """d|a|/dt; at a zero of a the one-sided limit +-|a'| is signed by `toward`."""
    a = x[0]
    mod = abs(a)
    if mod < AMPLITUDE_ZERO:
        return float(np.copysign(abs(xdot[0]), toward))
    return float(np.real(np.conj(a) * xdot[0]) / mod)


def survival_rates(traj: AmplitudeTrajectory) -> np.ndarray:
    """Analytic d|a|/dt at every grid point, from the right-hand side M x."""
    xdot = traj.derivatives()
    rates = np.empty(len(traj.times))
    survival = traj.survival
    for k in range(len(traj.times)):
        ahead = survival[min(k + 1, len(survival) - 1)] - survival[k]
        rates[k] = _survival_rate(traj.states[k], xdot[k], toward=ahead if ahead != 0 else -1.0)
    return rates


def _rate_at(traj: AmplitudeTrajectory, t: float) -> float:
    x = traj.state_at(t)
    xdot = traj.generator.entries @ x
    if abs(x[0]) < AMPLITUDE_ZERO:
        return 0.0
    return _survival_rate(x, xdot)


def _bracketed_rate(traj: AmplitudeTrajectory, t_lo: float, t_hi: float, rate_lo: float, rate_hi: float):
    """Rate function whose bracket ends carry the grid rates that detected the sign change."""
    def rate(t: float) -> float:
        if t == t_lo:
            return rate_lo
        if t == t_hi:
            return rate_hi
        return _rate_at(traj, t)
    return rate


def backflow_profile(traj: AmplitudeTrajectory) -> BackflowProfile:
    """
    Locate the turning points of |a(t)| and sample it there.

    Sign changes of the analytic derivative between neighbouring grid points
    are refined by bisection to ROOT_TIME_TOL.
    """
    times = traj.times
    rates = survival_rates(traj)
    crossings: List[float] = []
    values: List[float] = []

    for k in range(len(times) - 1):
        if 0 < k and rates[k] == 0.0 and rates[k - 1] * rates[k + 1] < 0:
            crossings.append(float(times[k]))
            values.append(float(traj.survival[k]))
            continue
        if rates[k] * rates[k + 1] < 0:
            t_root = optimize.bisect(_bracketed_rate(traj, times[k], times[k + 1], rates[k], rates[k + 1]),
                                     times[k], times[k + 1], xtol=ROOT_TIME_TOL)
            crossings.append(float(t_root))
            values.append(float(abs(traj.state_at(t_root)[0])))

    breakpoints = np.array([times[0], *crossings, times[-1]])
    survival = np.array([traj.survival[0], *values, traj.survival[-1]])
    return BackflowProfile(breakpoints=breakpoints, survival=survival, crossing_times=tuple(crossings))


def non_markovianity(traj: AmplitudeTrajectory, profile: Optional[BackflowProfile] = None) -> float:
    """Integral of the positive part of d|a|/dt over [0, tau], summed rise by rise."""
    if np.all(np.diff(traj.survival) <= 0):
        return 0.0
    profile = profile or backflow_profile(traj)
    return float(profile.rises.sum())


def population_backflow(traj: AmplitudeTrajectory, profile: Optional[BackflowProfile] = None) -> float:
    """Integral of the positive part of d|a|^2/dt over [0, tau]."""
    if np.all(np.diff(traj.survival) <= 0):
        return 0.0
    profile = profile or backflow_profile(traj)
    return float(np.clip(profile.population_steps, 0.0, None).sum())


def population_variation(traj: AmplitudeTrajectory, profile: Optional[BackflowProfile] = None) -> float:
    """Integral of |d|a|^2/dt| over [0, tau], summed over the monotone pieces."""
    if np.all(np.diff(traj.survival) <= 0):
        return float(traj.population[0] - traj.population[-1])
    profile = profile or backflow_profile(traj)
    return float(np.abs(profile.population_steps).sum())


def closed_form_ratio(population_tau: float, backflow: float) -> QslEstimate:
    """tau_QSL/tau = (1 - |a(tau)|^2) / (2 N + 1 - |a(tau)|^2)."""
    decayed = 1.0 - population_tau
    denominator = 2.0 * backflow + decayed
    if denominator <= DEGENERATE_TOL:
        return QslEstimate(ratio=0.0, degenerate=True)
    return QslEstimate(ratio=float(np.clip(decayed / denominator, 0.0, 1.0)))


def _rho_dot_norm(a: complex, adot: complex, rho0: QubitDensity) -> float:
    """Largest singular value of d rho/dt for the amplitude-damping map."""
    r = rho0.matrix
    dp = 2.0 * np.real(np.conj(a) * adot)
    rho_dot = np.array([
        [r[0, 0] * dp, r[0, 1] * np.conj(adot)],
        [r[1, 0] * adot, -r[0, 0] * dp],
    ], dtype=complex)
    return float(np.linalg.svd(rho_dot, compute_uv=False)[0])


def qsl_general(traj: AmplitudeTrajectory, rho0: Optional[QubitDensity] = None,
                profile: Optional[BackflowProfile] = None) -> QslEstimate:
    """
    tau_QSL/tau from the Bures angle and the time-averaged operator norm of d rho/dt.

    For the excited initial state the operator norm is |d|a|^2/dt| and its
    integral is the total variation of the population, summed exactly over
    the monotone pieces. Any other pure rho0 falls back to singular values
    on the grid integrated with Simpson's rule.
    """
    rho0 = (rho0 or QubitDensity.excited()).validate()
    a_tau = traj.states[-1, 0]
    sin2 = np.sin(bures_angle(rho0, reduced_state(a_tau, rho0))) ** 2
    excited = np.allclose(rho0.matrix, QubitDensity.excited().matrix, rtol=0, atol=STATE_TOL)

    if excited:
        total_variation = population_variation(traj, profile)
    else:
        xdot = traj.derivatives()
        norms = [_rho_dot_norm(x[0], xd[0], rho0) for x, xd in zip(traj.states, xdot)]
        total_variation = float(simpson(norms, x=traj.times))

    if total_variation <= DEGENERATE_TOL:
        logger.debug("Frozen evolution, reporting tau_QSL/tau = 0")
        return QslEstimate(ratio=0.0, degenerate=True)
    return QslEstimate(ratio=float(np.clip(sin2 / total_variation, 0.0, 1.0)))


def qsl_closed_form(traj: AmplitudeTrajectory, profile: Optional[BackflowProfile] = None) -> QslEstimate:
    """Closed form with the population backflow, exact for the excited initial state."""
    return closed_form_ratio(float(traj.population[-1]), population_backflow(traj, profile))


def measure_report(traj: AmplitudeTrajectory) -> MeasureReport:
    """Evaluate every measure on one trajectory, locating turning points only once."""
    profile = backflow_profile(traj)
    general = qsl_general(traj, profile=profile)
    closed = qsl_closed_form(traj, profile=profile)
    return MeasureReport(
        n_blp=non_markovianity(traj, profile),
        n_population=population_backflow(traj, profile),
        qsl_ratio_general=general.ratio,
        qsl_ratio_closed=closed.ratio,
        survival_tau=float(traj.survival[-1]),
        crossing_times=profile.crossing_times,
        degenerate=general.degenerate or closed.degenerate,
    )
