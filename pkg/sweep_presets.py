#!/usr/bin/env python3
"""
Named parameter presets for the standard sweeps.

Each preset is a flat mapping of RunConfig keys; it seeds a run before the
config file and the command-line flags are applied.
"""

from typing import Any, Dict

from simulation_errors import ConfigError

_WEAK_MEMORYLESS = {
    'kappa0': 0.2, 'gamma0': 1.0, 'tau': 4.0,
    'env': 'memoryless', 'gamma': 1.0,
}

_WEAK_MEMORY_SHORT = {
    'kappa0': 0.2, 'gamma0': 1.0, 'tau': 4.0,
    'env': 'memory_keeping', 'upsilon1': 1.0, 'upsilon2': 1.0, 'lambda1': 0.1, 'lambda2': 0.1,
}

_WEAK_MEMORY_LONG = dict(_WEAK_MEMORY_SHORT, lambda1=1.0, lambda2=1.0)

_KAPPA_AXIS = {'axis1_name': 'kappa', 'axis1_min': 0.0, 'axis1_max': 3.0, 'axis1_count': 121}
_OMEGA_AXIS = {'axis1_name': 'omega_c', 'axis1_min': 0.0, 'axis1_max': 3.0, 'axis1_count': 121}

PRESETS: Dict[str, Dict[str, Any]] = {
    # N against kappa at fixed omega_c
    'memoryless_kappa': dict(_WEAK_MEMORYLESS, omega_c=0.0, **_KAPPA_AXIS,
                             crossover_parameter='kappa', bracket_low=0.5, bracket_high=3.0),
    # N against omega_c at fixed kappa
    'memoryless_omega': dict(_WEAK_MEMORYLESS, kappa=1.8, **_OMEGA_AXIS),
    # omega_c rows, kappa columns
    'memoryless_phase': dict(_WEAK_MEMORYLESS, **_OMEGA_AXIS,
                             axis2_name='kappa', axis2_min=0.0, axis2_max=3.0, axis2_count=121),
    'memory_kappa': dict(_WEAK_MEMORY_SHORT, omega_c=0.0, **_KAPPA_AXIS,
                         crossover_parameter='kappa', bracket_low=0.5, bracket_high=3.0),
    'memory_omega': dict(_WEAK_MEMORY_LONG, kappa=1.5, **_OMEGA_AXIS),
}

# Speedup crossovers along the kappa curves.
PRESETS['memoryless_kappa_speedup'] = dict(PRESETS['memoryless_kappa'], predicate='speedup_onset')
PRESETS['memory_kappa_speedup'] = dict(PRESETS['memory_kappa'], predicate='speedup_onset')


def get_preset(name: str) -> Dict[str, Any]:
    try:
        return dict(PRESETS[name])
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}, available: {', '.join(sorted(PRESETS))}") from None
