#!/usr/bin/env python3
"""
Hierarchical environment model

A qubit couples with strength kappa0 to a lossy cavity m0 (loss rate gamma0),
which couples with strength kappa to two cavities m1, m2 that are themselves
coupled with strength omega_c. The second-layer cavities decay either into
memoryless reservoirs (rate gamma) or into Lorentzian reservoirs with memory
(coupling upsilon_n, inverse correlation time lambda_n).

All rates are in units of gamma0 and all times in units of 1/gamma0, so
gamma0 is always exactly 1. Cavities are resonant with the qubit.
"""

import dataclasses
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Tuple, Union

import numpy as np

from simulation_errors import NonPhysicalParameter

logger = logging.getLogger(__name__)

SWEEPABLE_PARAMETERS = ('kappa', 'omega_c', 'kappa0')

MEMORYLESS_BASIS = ('a', 'c0', 'c1', 'c2')
MEMORY_KEEPING_BASIS = ('h', 'c0', 'c1', 'c2', 'z1', 'z2')


@dataclass(frozen=True)
class Memoryless:
    """Second-layer cavities leak into memoryless reservoirs with rate gamma."""
    gamma: float = 1.0

    name = 'memoryless'


@dataclass(frozen=True)
class MemoryKeeping:
    """Second-layer cavities leak into Lorentzian reservoirs with memory."""
    upsilon1: float = 1.0
    upsilon2: float = 1.0
    lambda1: float = 0.1
    lambda2: float = 0.1

    name = 'memory_keeping'

    def kernel(self, n: int, lag):
        """Reservoir correlation function f_n(lag) = upsilon_n*lambda_n/2 * exp(-lambda_n*|lag|)."""
        upsilon, lam = (self.upsilon1, self.lambda1) if n == 1 else (self.upsilon2, self.lambda2)
        return 0.5 * upsilon * lam * np.exp(-lam * np.abs(lag))


SecondLayerEnv = Union[Memoryless, MemoryKeeping]


@dataclass(frozen=True)
class ModelParams:
    """
    Physical parameters of the qubit plus hierarchical environment.

    Attributes:
        kappa0: qubit <-> m0 coupling
        kappa: m0 <-> m1 and m0 <-> m2 coupling
        omega_c: m1 <-> m2 coupling
        env: second-layer reservoir variant
        tau: evolution horizon
        gamma0: loss rate of m0, the unit of every rate
    """
    kappa0: float = 0.2
    kappa: float = 0.0
    omega_c: float = 0.0
    env: SecondLayerEnv = Memoryless()
    tau: float = 4.0
    gamma0: float = 1.0

    @property
    def is_memory_keeping(self) -> bool:
        return isinstance(self.env, MemoryKeeping)

    def with_value(self, name: str, value: float) -> 'ModelParams':
        """Return a copy with one sweepable coupling replaced."""
        if name not in SWEEPABLE_PARAMETERS:
            raise NonPhysicalParameter(name, value, f"not a sweepable parameter, expected one of {SWEEPABLE_PARAMETERS}")
        return dataclasses.replace(self, **{name: float(value)})


class RegimeLabel(str, Enum):
    WEAK = 'Weak'
    STRONG = 'Strong'
    BOUNDARY = 'Boundary'


@dataclass(frozen=True, eq=False)
class GeneratorMatrix:
    """Constant complex matrix M of the amplitude dynamics x' = M x."""
    entries: np.ndarray
    basis_labels: Tuple[str, ...]

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def amplitude_indices(self) -> Tuple[int, ...]:
        """Indices of physical amplitudes, i.e. everything except the memory variables z_n."""
        return tuple(i for i, label in enumerate(self.basis_labels) if not label.startswith('z'))

    def initial_vector(self) -> np.ndarray:
        """Qubit excited, every cavity and memory variable empty."""
        x0 = np.zeros(self.dim, dtype=complex)
        x0[0] = 1.0
        return x0

    def __eq__(self, other) -> bool:
        if not isinstance(other, GeneratorMatrix):
            return NotImplemented
        return self.basis_labels == other.basis_labels and np.array_equal(self.entries, other.entries)

    __hash__ = None


def _require_non_negative(field: str, value: float):
    if not np.isfinite(value) or value < 0:
        raise NonPhysicalParameter(field, value, "rate must be finite and >= 0")


def _require_positive(field: str, value: float, reason: str):
    if not np.isfinite(value) or value <= 0:
        raise NonPhysicalParameter(field, value, reason)


def validate(params: ModelParams) -> ModelParams:
    """
    Check every physical constraint on the parameters.

    Returns:
        The same params object when valid

    Raises:
        NonPhysicalParameter naming the first offending field
    """
    if params.gamma0 != 1.0:
        raise NonPhysicalParameter('gamma0', params.gamma0, "rates are expressed in units of gamma0, which must be exactly 1")
    for field in ('kappa0', 'kappa', 'omega_c'):
        _require_non_negative(field, getattr(params, field))
    _require_positive('tau', params.tau, "evolution horizon must be > 0")

    env = params.env
    if isinstance(env, Memoryless):
        _require_non_negative('gamma', env.gamma)
    elif isinstance(env, MemoryKeeping):
        _require_non_negative('upsilon1', env.upsilon1)
        _require_non_negative('upsilon2', env.upsilon2)
        _require_positive('lambda1', env.lambda1, "correlation time 1/lambda1 must be finite")
        _require_positive('lambda2', env.lambda2, "correlation time 1/lambda2 must be finite")
    else:
        raise NonPhysicalParameter('env', env, "unknown second-layer environment variant")
    return params


def classify_regime(params: ModelParams) -> RegimeLabel:
    """Weak below kappa0 = gamma0/4, strong above, boundary at equality."""
    threshold = params.gamma0 / 4
    if params.kappa0 < threshold:
        return RegimeLabel.WEAK
    if params.kappa0 > threshold:
        return RegimeLabel.STRONG
    return RegimeLabel.BOUNDARY


def build_generator(params: ModelParams) -> GeneratorMatrix:
    """
    Build the generator of the single-excitation amplitude equations.

    Memoryless basis is (a, c0, c1, c2). The memory-keeping basis appends
    z1, z2, the exponential-kernel convolutions of c1, c2, which turns the
    integro-differential equations into an exact constant-coefficient system.
    """
    k0, k, om = params.kappa0, params.kappa, params.omega_c
    half_gamma0 = params.gamma0 / 2
    env = params.env

    if isinstance(env, Memoryless):
        half_gamma = env.gamma / 2
        m = np.array([
            [0, -1j * k0, 0, 0],
            [-1j * k0, -half_gamma0, -1j * k, -1j * k],
            [0, -1j * k, -half_gamma, -1j * om],
            [0, -1j * k, -1j * om, -half_gamma],
        ], dtype=complex)
        return GeneratorMatrix(entries=m, basis_labels=MEMORYLESS_BASIS)

    m = np.zeros((6, 6), dtype=complex)
    m[0, 1] = -1j * k0
    m[1, 0] = -1j * k0
    m[1, 1] = -half_gamma0
    m[1, 2] = m[1, 3] = -1j * k
    m[2, 1] = m[3, 1] = -1j * k
    m[2, 3] = m[3, 2] = -1j * om
    m[2, 4] = m[3, 5] = -1.0
    m[4, 2] = env.upsilon1 * env.lambda1 / 2
    m[4, 4] = -env.lambda1
    m[5, 3] = env.upsilon2 * env.lambda2 / 2
    m[5, 5] = -env.lambda2
    return GeneratorMatrix(entries=m, basis_labels=MEMORY_KEEPING_BASIS)
