#!/usr/bin/env python3
"""
Run configuration

A flat JSON object whose keys are the field names below. Values are merged
in the order defaults -> preset -> config file -> command-line flags.
All rates are pre-scaled in units of gamma0.
"""

import json
import logging
import math
import os
import typing
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from amplitude_dynamics import SolverConfig
from coupling_sweep import PREDICATES, SweepAxis, SweepSpec, Thresholds
from hierarchical_model import MemoryKeeping, Memoryless, ModelParams
from simulation_errors import ConfigError
from sweep_presets import get_preset

logger = logging.getLogger(__name__)

SUBCOMMANDS = ('simulate', 'measure', 'crossover', 'phase')
ENV_VARIANTS = ('memoryless', 'memory_keeping')


@dataclass(frozen=True)
class RunConfig:
    subcommand: str = 'simulate'

    # model
    kappa0: float = 0.2
    kappa: float = 0.0
    omega_c: float = 0.0
    gamma0: float = 1.0
    tau: float = 4.0
    env: str = 'memoryless'
    gamma: float = 1.0
    upsilon1: float = 1.0
    upsilon2: float = 1.0
    lambda1: float = 0.1
    lambda2: float = 0.1

    # solver
    rel_tol: float = 1e-10
    abs_tol: float = 1e-10
    max_step: Optional[float] = None
    dense_grid_points: int = 2001
    volterra_dt: Optional[float] = None

    # sweep
    axis1_name: str = 'kappa'
    axis1_min: float = 0.0
    axis1_max: float = 3.0
    axis1_count: int = 121
    axis2_name: Optional[str] = None
    axis2_min: float = 0.0
    axis2_max: float = 3.0
    axis2_count: int = 121
    eps_nm: float = 1e-6
    eps_qsl: float = 1e-6

    # crossover
    crossover_parameter: str = 'kappa'
    bracket_low: float = 0.5
    bracket_high: float = 3.0
    predicate: str = 'nm_onset'
    crossover_tol: float = 1e-3

    # output
    output_dir: str = 'output'
    plot: bool = False
    workers: int = 1
    interactive: bool = False
    preset: Optional[str] = None

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise ConfigError(f"subcommand must be one of {SUBCOMMANDS}, got {self.subcommand!r}", field='subcommand')
        if self.env not in ENV_VARIANTS:
            raise ConfigError(f"env must be one of {ENV_VARIANTS}, got {self.env!r}", field='env')
        if self.predicate not in PREDICATES:
            raise ConfigError(f"predicate must be one of {PREDICATES}, got {self.predicate!r}", field='predicate')
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}", field='workers')

    @classmethod
    def from_mapping(cls, values: Mapping[str, Any]) -> 'RunConfig':
        """Build a config from flat key/values, rejecting unknown keys and wrong types."""
        hints = typing.get_type_hints(cls)
        unknown = sorted(set(values) - set(hints))
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}", field=unknown[0])
        return cls(**{key: _coerce(key, value, hints[key]) for key, value in values.items()})

    def to_canonical_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2) + '\n'

    def model_params(self) -> ModelParams:
        if self.env == 'memoryless':
            env = Memoryless(gamma=self.gamma)
        else:
            env = MemoryKeeping(upsilon1=self.upsilon1, upsilon2=self.upsilon2,
                                lambda1=self.lambda1, lambda2=self.lambda2)
        return ModelParams(kappa0=self.kappa0, kappa=self.kappa, omega_c=self.omega_c,
                           env=env, tau=self.tau, gamma0=self.gamma0)

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            rel_tol=self.rel_tol,
            abs_tol=self.abs_tol,
            max_step=math.inf if self.max_step is None else self.max_step,
            dense_grid_points=self.dense_grid_points,
        )

    def thresholds(self) -> Thresholds:
        return Thresholds(eps_nm=self.eps_nm, eps_qsl=self.eps_qsl)

    def sweep_spec(self) -> SweepSpec:
        axis2 = None
        if self.axis2_name:
            axis2 = SweepAxis(self.axis2_name, self.axis2_min, self.axis2_max, self.axis2_count)
        return SweepSpec(
            base=self.model_params(),
            axis1=SweepAxis(self.axis1_name, self.axis1_min, self.axis1_max, self.axis1_count),
            axis2=axis2,
            thresholds=self.thresholds(),
        )

    def prepare_output_dir(self) -> Path:
        out = Path(self.output_dir)
        try:
            out.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise ConfigError(f"cannot create output directory {out}: {e}", field='output_dir') from e
        if not os.access(out, os.W_OK):
            raise ConfigError(f"output directory {out} is not writable", field='output_dir')
        return out


def _coerce(key: str, value: Any, hint) -> Any:
    optional = type(None) in typing.get_args(hint)
    if value is None:
        if optional:
            return None
        raise ConfigError(f"{key} must not be null", field=key)
    target = next((t for t in typing.get_args(hint) if t is not type(None)), hint)

    if target is bool:
        if isinstance(value, bool):
            return value
    elif target is int:
        if isinstance(value, int) and not isinstance(value, bool):
            return value
        if isinstance(value, float) and value.is_integer():
            return int(value)
    elif target is float:
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return float(value)
    elif target is str:
        if isinstance(value, str):
            return value
    raise ConfigError(f"{key} expects {target.__name__}, got {value!r}", field=key)


def load_config_file(path) -> Dict[str, Any]:
    """Read a flat JSON object from disk."""
    try:
        with open(path, 'r', encoding='utf-8') as f:
            values = json.load(f)
    except FileNotFoundError:
        raise ConfigError(f"config file {path} not found", field='config') from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {path} is not valid JSON: {e}", field='config') from e
    if not isinstance(values, dict):
        raise ConfigError(f"config file {path} must hold a flat JSON object", field='config')
    nested = [k for k, v in values.items() if isinstance(v, (dict, list))]
    if nested:
        raise ConfigError(f"config keys must be flat, nested values under: {', '.join(nested)}", field=nested[0])
    return values


def resolve_config(config_path=None, overrides: Optional[Mapping[str, Any]] = None) -> RunConfig:
    """
    Merge defaults, preset, config file and flag overrides into one RunConfig.

    Args:
        config_path: optional flat JSON config file
        overrides: values given on the command line; None entries are ignored
    """
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    file_values = load_config_file(config_path) if config_path else {}

    merged: Dict[str, Any] = {}
    preset_name = overrides.get('preset', file_values.get('preset'))
    if preset_name:
        merged.update(get_preset(preset_name))
    merged.update(file_values)
    merged.update(overrides)

    config = RunConfig.from_mapping(merged)
    logger.debug(f"Resolved configuration: {asdict(config)}")
    return config


def write_canonical_config(config: RunConfig, path) -> None:
    with open(path, 'w', encoding='utf-8') as f:
        f.write(config.to_canonical_json())
    logger.info(f"Wrote canonical configuration to {path}")
