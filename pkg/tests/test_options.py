import math
import os

import pytest

import core.options as Options
from core.errors import ConfigError
from model.network_modules.layout import NetworkConfig


def test_empty_config_resolves_to_defaults():
    opt = Options.validate_config('')
    assert opt['preset'] == Options.DEFAULTS['preset']
    assert opt['seed'] == 1
    assert opt['network']['bw_hz'] == 1e9


def test_comments_are_stripped():
    opt = Options.validate_config('{\n  // which experiment\n  "preset": "aclr-sweep", // trailing\n  "seed": 9\n}')
    assert opt['preset'] == 'aclr-sweep'
    assert opt['seed'] == 9


def test_parse_error_reports_position():
    with pytest.raises(ConfigError) as e:
        Options.validate_config('{\n  "seed": ,\n}')
    assert 'line 2' in e.value.errors[0]


def test_unknown_key_is_reported():
    with pytest.raises(ConfigError) as e:
        Options.validate_config('{"network": {"bandwith_hz": 1e9}}')
    assert e.value.errors == ['unknown key "network.bandwith_hz"']
    assert e.value.exit_code == 1


def test_every_violation_is_listed():
    with pytest.raises(ConfigError) as e:
        Options.validate_config('{"network": {"bw_hz": -1, "n_ttis": 0}, "jobs": 0}')
    msgs = '\n'.join(e.value.errors)
    assert 'network.bw_hz must be positive' in msgs
    assert 'network.n_ttis must be positive' in msgs
    assert 'jobs must be positive' in msgs


def test_unknown_key_does_not_hide_value_errors():
    with pytest.raises(ConfigError) as e:
        Options.validate_config('{"netwrok": {}, "network": {"bw_hz": -1}, "link": {"fft_size": 1024}}')
    errors = e.value.errors
    assert 'unknown key "netwrok"' in errors
    assert any(m.startswith('network.bw_hz must be positive') for m in errors)
    assert any(m.startswith('link:') for m in errors)
    # a section with a value violation is not reported a second time by its builder
    assert not any(m.startswith('network:') for m in errors)


def test_type_errors():
    with pytest.raises(ConfigError) as e:
        Options.validate_config('{"seed": "one"}')
    assert 'seed: expected int, got string' in e.value.errors[0]


def test_bits_lists_accept_infinity():
    opt = Options.validate_config('{"network": {"bits": ["inf", null, 3]}}')
    assert opt['network']['bits'] == ['inf', None, 3]
    with pytest.raises(ConfigError):
        Options.validate_config('{"network": {"bits": [0]}}')
    with pytest.raises(ConfigError):
        Options.validate_config('{"power": {"low_res_bits": "inf"}}')


def test_builder_invariants_are_reported():
    with pytest.raises(ConfigError) as e:
        Options.validate_config('{"link": {"fft_size": 1024}}')
    assert any(m.startswith('link:') for m in e.value.errors)


def test_overrides():
    tree = Options.apply_overrides(Options.parse_text('{"seed": 2}'),
                                   ['network.n_drops=3', 'network.scheduler=TDMA_PF', 'tx.lpf_orders=[1, 2]'])
    opt = Options.resolve(tree)
    assert opt['network']['n_drops'] == 3
    assert opt['network']['scheduler'] == 'TDMA_PF'
    assert opt['tx']['lpf_orders'] == [1, 2]
    with pytest.raises(ConfigError):
        Options.apply_overrides({}, ['seed'])


def test_ranges():
    assert Options.parse_range('0:10:5') == [0.0, 5.0, 10.0]
    assert Options.parse_range('-1:1') == [-1.0, 0.0, 1.0]
    assert Options.parse_range('3, 7,10') == [3.0, 7.0, 10.0]
    with pytest.raises(ConfigError):
        Options.parse_range('5:1')
    assert Options.parse_bits_list('2,3,inf') == [2, 3, 'inf']
    with pytest.raises(ConfigError):
        Options.parse_bits_list('2,x')


def test_typed_builders():
    opt = Options.validate_config('{"network": {"scheduler": "SDMA_GREEDY"}, "seed": 4}')
    cfg = Options.network_config(opt, n_beams_max=2)
    assert isinstance(cfg, NetworkConfig)
    assert cfg.n_beams_max == 2 and cfg.seed == 4 and cfg.bs_array == (8, 8)
    num = Options.numerology(opt, 200)
    assert num.n_sc == 2400
    assert Options.dac_chain(opt, 'inf').n_bits == math.inf
    tx, rx = Options.front_end_configs(opt)
    assert tx.n_antennas == rx.n_antennas == 16


def test_alpha_overrides():
    opt = Options.validate_config('{"quantization": {"alpha_override": {"3": 0.05}}}')
    assert Options.alpha_overrides(opt) == {3: 0.05}
    with pytest.raises(ConfigError):
        Options.validate_config('{"quantization": {"alpha_override": {"3": 1.5}}}')


def test_preset_files_are_valid():
    root = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'AQNM', 'config')
    names = sorted(f for f in os.listdir(root) if f.endswith('.json'))
    assert len(names) >= len(Options.PRESETS)
    for name in names:
        with open(os.path.join(root, name)) as f:
            opt = Options.validate_config(f.read())
        assert opt['preset'] in Options.PRESETS
