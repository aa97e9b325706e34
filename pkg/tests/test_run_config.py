import json
import math

import pytest

from hierarchical_model import MemoryKeeping, Memoryless
from run_config import RunConfig, load_config_file, resolve_config, write_canonical_config
from simulation_errors import ConfigError
from sweep_presets import PRESETS, get_preset


def _write(path, values):
    path.write_text(json.dumps(values), encoding='utf-8')
    return path


def test_defaults_describe_weak_memoryless_model():
    config = resolve_config()
    params = config.model_params()
    assert params.kappa0 == 0.2 and params.tau == 4.0
    assert isinstance(params.env, Memoryless)
    assert config.solver_config().max_step == math.inf
    assert config.solver_config().dense_grid_points == 2001


def test_merge_order_preset_file_flags(tmp_path):
    path = _write(tmp_path / 'run.json', {'preset': 'memoryless_kappa', 'kappa': 1.0, 'axis1_count': 31})
    config = resolve_config(path, {'kappa': 2.4, 'tau': None})
    assert config.kappa == 2.4
    assert config.axis1_count == 31
    assert config.tau == 4.0
    assert config.bracket_low == 0.5 and config.bracket_high == 3.0


def test_flag_preset_wins_over_file_preset(tmp_path):
    path = _write(tmp_path / 'run.json', {'preset': 'memoryless_kappa'})
    config = resolve_config(path, {'preset': 'memory_omega'})
    assert config.preset == 'memory_omega'
    assert isinstance(config.model_params().env, MemoryKeeping)
    assert config.model_params().env.lambda1 == 1.0
    assert config.kappa == 1.5


def test_unknown_keys_are_rejected(tmp_path):
    with pytest.raises(ConfigError) as err:
        resolve_config(_write(tmp_path / 'run.json', {'kapa': 1.0}))
    assert err.value.field == 'kapa'


@pytest.mark.parametrize('values', [
    {'kappa': 'strong'},
    {'axis1_count': 2.5},
    {'plot': 1},
    {'tau': None},
])
def test_wrong_types_are_rejected(tmp_path, values):
    with pytest.raises(ConfigError):
        resolve_config(_write(tmp_path / 'run.json', values))


def test_integers_accepted_for_floats(tmp_path):
    config = resolve_config(_write(tmp_path / 'run.json', {'kappa': 2, 'axis1_count': 11.0}))
    assert config.kappa == 2.0 and isinstance(config.kappa, float)
    assert config.axis1_count == 11 and isinstance(config.axis1_count, int)


def test_nested_and_malformed_files(tmp_path):
    with pytest.raises(ConfigError):
        load_config_file(_write(tmp_path / 'nested.json', {'model': {'kappa': 1.0}}))
    broken = tmp_path / 'broken.json'
    broken.write_text('{"kappa": ', encoding='utf-8')
    with pytest.raises(ConfigError):
        load_config_file(broken)
    with pytest.raises(ConfigError):
        load_config_file(tmp_path / 'missing.json')


@pytest.mark.parametrize('values', [
    {'subcommand': 'plot'},
    {'env': 'thermal'},
    {'predicate': 'revival'},
    {'workers': 0},
])
def test_enumerated_fields_are_checked(values):
    with pytest.raises(ConfigError):
        RunConfig.from_mapping(values)


def test_unknown_preset():
    with pytest.raises(ConfigError):
        get_preset('no_such_preset')


def test_speedup_presets_only_switch_the_predicate():
    twins = sorted(name for name in PRESETS if name.endswith('_speedup'))
    assert twins == ['memory_kappa_speedup', 'memoryless_kappa_speedup']
    for name in twins:
        base = PRESETS[name[:-len('_speedup')]]
        assert PRESETS[name]['predicate'] == 'speedup_onset'
        assert PRESETS[name] != base
        assert {k: v for k, v in PRESETS[name].items() if k != 'predicate'} == base


def test_canonical_form_round_trips(tmp_path):
    config = resolve_config(_write(tmp_path / 'run.json', {'preset': 'memoryless_phase', 'axis1_count': 5, 'max_step': 0.1}))
    echoed = tmp_path / 'echoed.json'
    write_canonical_config(config, echoed)
    again = resolve_config(echoed)
    assert again == config
    second = tmp_path / 'second.json'
    write_canonical_config(again, second)
    assert echoed.read_bytes() == second.read_bytes()


def test_sweep_spec_from_config():
    config = resolve_config(overrides={'preset': 'memoryless_phase', 'axis1_count': 3, 'axis2_count': 4})
    spec = config.sweep_spec().validate()
    assert spec.axis1.name == 'omega_c' and spec.axis2.name == 'kappa'
    assert len(spec.grid_params()) == 12


def test_output_dir_is_created(tmp_path):
    out = tmp_path / 'nested' / 'runs'
    assert RunConfig(output_dir=str(out)).prepare_output_dir() == out
    assert out.is_dir()


def test_output_dir_blocked_by_file(tmp_path):
    blocker = tmp_path / 'taken'
    blocker.write_text('x', encoding='utf-8')
    with pytest.raises(ConfigError) as err:
        RunConfig(output_dir=str(blocker / 'out')).prepare_output_dir()
    assert err.value.field == 'output_dir'
