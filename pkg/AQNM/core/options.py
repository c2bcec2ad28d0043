'''
Built-in defaults, strict validation and typed views of a run configuration.

The configuration is JSON with ``//`` line comments. Every key a user gives
must exist in DEFAULTS (free-form tables excepted); values are merged over the
defaults and then checked, and all violations are reported together.
'''
import copy
import json
import math
import re
from collections import OrderedDict

from core.errors import ConfigError, SimulationError
from model.quantization import MAX_BITS, parse_bits
from model.power_model import ConverterSpec, LpfSpec, RxFrontEndConfig, TxFrontEndConfig
from model.link_modules.ofdm_link import OfdmNumerology
from model.link_modules.tx_chain import ChannelPlan, DacChainConfig, EVM_THRESHOLDS_PCT
from model.network_modules.layout import NetworkConfig, PathlossParams

PRESETS = ('power-table', 'aqnm-curves', 'link-validate', 'sdma-link', 'cell-ofdma',
           'cell-sdma', 'tx-psd', 'aclr-sweep', 'evm-sweep')

DEFAULTS = OrderedDict([
    ('name', 'aqnm'),
    ('preset', 'power-table'),
    ('seed', 1),
    ('jobs', 1),
    ('path', OrderedDict([('log', 'logs'), ('results', 'results'), ('tb_logger', 'tb_logger')])),
    ('quantization', OrderedDict([
        ('alpha_override', OrderedDict()),
        ('bits', [1, 2, 3, 4, 5, 6, 7, 8]),
        ('mc_samples', 200000),
        ('snr_db', [-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0]),
        ('bf_gain_db', 0.0),
    ])),
    ('power', OrderedDict([
        ('hybrid_streams', 2),
        ('low_res_bits', 4),
        ('p_bb_out_dbm', 10.0),
        ('cell_edge_rx_dbm', -87.0),
        ('tx', OrderedDict([
            ('eirp_dbm', 30.0), ('n_antennas', 16), ('p_bb_in_dbm', 10.0), ('il_ps_db', 10.0),
            ('il_mix_db', 6.0), ('p_lo_mw', 10.0), ('eta_pae', 0.2), ('dac_fom_fj', 67.6),
            ('dac_bits', 8), ('fs_hz', 1e9), ('lpf_fom_mw_per_ghz', 1.3), ('lpf_order', 1),
            ('lpf_fc_ghz', 0.4),
        ])),
        ('rx', OrderedDict([
            ('n_antennas', 16), ('g_lna_db', 10.0), ('nf_lna_db', 3.0), ('fom_lna_per_mw', 6.5),
            ('il_ps_db', 10.0), ('vga_fom', 5280.0), ('vga_area_mm2', 0.01), ('bw_ghz', 1.0),
            ('vga_gain_range_db', 82.0), ('p_lo_mw', 10.0), ('adc_fom_fj', 65.0), ('adc_bits', 8),
            ('fs_hz', 1e9),
        ])),
    ])),
    ('link', OrderedDict([
        ('fft_size', 4096), ('scs_hz', 120e3), ('chip_rate_hz', 491.52e6), ('sc_per_prb', 12),
        ('max_prbs', 275), ('used_prbs', [274]), ('n_symbols', 20), ('n_pilots', 2),
        ('fir_taps', 129), ('fir_guard_hz', 8e6),
        ('adc_bits', [2, 3, 4, 5]),
        ('dac_extra_bits', 2),
        ('snr_db', [-5.0, -1.0, 3.0, 7.0, 10.0, 13.0, 16.0, 19.0, 22.0, 25.0]),
        ('dual_bits', [3, 4]),
        ('dual_snr_db', [10.0, 20.0, 30.0, 35.0]),
        ('dual_trials', 4),
        ('sdma', OrderedDict([
            ('bits', [3, 4]),
            ('used_prbs', 200),
            ('gamma0_db', [0.0, 15.0]),
            ('sir_db', [0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 40.0]),
        ])),
    ])),
    ('tx', OrderedDict([
        ('interp_m', 2), ('zoh_oversample', 8), ('lpf_fc_hz', 400e6), ('interp_taps', 255),
        ('kaiser_beta', 8.0), ('used_prbs', 275), ('ch_bw_hz', 400e6), ('meas_bw_hz', 396e6),
        ('n_adjacent', 2), ('nperseg', 8192), ('n_symbols', 14),
        ('psd_bits', ['inf', 4]),
        ('psd_lpf_order', [0, 1]),
        ('aclr_bits', [1, 2, 3, 4, 5, 6, 7, 8, 'inf']),
        ('lpf_orders', [0, 1, 2, 3]),
        ('evm_bits', [3, 4, 5, 6]),
        ('evm_modulation', '256QAM'),
        ('evm_symbols', 8),
        ('inv_sigma_rf_db', [10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0, 45.0, 50.0]),
        ('evm_thresholds_pct', OrderedDict(EVM_THRESHOLDS_PCT)),
    ])),
    ('network', OrderedDict([
        ('area_m', 1000.0), ('cell_radius_m', 100.0), ('fc_hz', 28e9), ('bw_hz', 1e9),
        ('tx_power_dbm', 35.0), ('noise_figure_db', 8.0), ('extra_loss_db', 14.0),
        ('noise_psd_dbm_hz', -174.0),
        ('max_se_bps_hz', 7.4063), ('bs_array', [8, 8]), ('ue_array', [4, 4]),
        ('tti_s', 125e-6), ('overhead', 0.2), ('shannon_loss_db', 3.0),
        ('mean_ues_per_cell', 10.0), ('ue_drop', 'poisson'), ('min_distance_m', 10.0),
        ('n_beams_max', 4), ('sdma_beams', [2, 4]), ('scheduler', 'OFDMA_PF'),
        ('n_ttis', 200), ('n_drops', 20), ('mean_clusters', 2.0),
        ('bits', ['inf', 3, 4]),
        ('percentiles', [5.0, 10.0, 25.0, 50.0, 75.0, 90.0, 95.0]),
        ('pathloss', OrderedDict([
            ('los_a', 61.4), ('los_b', 2.0), ('los_sigma_db', 5.8),
            ('nlos_a', 72.0), ('nlos_b', 2.92), ('nlos_sigma_db', 8.7),
            ('los_decay_m', 67.1), ('outage_decay_m', 30.0), ('outage_offset', 5.2),
        ])),
    ])),
    ('output', OrderedDict([('timestamp', True)])),
    ('wandb', OrderedDict([('project', 'aqnm')])),
])

# tables whose keys are chosen by the user
FREE_TABLES = {'quantization.alpha_override', 'tx.evm_thresholds_pct'}

# bit-count lists ('inf' or null for infinite resolution)
BITS_LISTS = {'quantization.bits', 'link.adc_bits', 'link.dual_bits', 'link.sdma.bits',
              'tx.psd_bits', 'tx.aclr_bits', 'tx.evm_bits', 'network.bits'}
FINITE_BITS = {'power.low_res_bits', 'power.tx.dac_bits', 'power.rx.adc_bits'}

POSITIVE = {
    'jobs', 'quantization.mc_samples',
    'power.hybrid_streams', 'power.tx.n_antennas', 'power.tx.fs_hz', 'power.tx.lpf_fc_ghz',
    'power.tx.dac_fom_fj', 'power.tx.lpf_fom_mw_per_ghz', 'power.tx.eta_pae',
    'power.rx.n_antennas', 'power.rx.fs_hz', 'power.rx.adc_fom_fj', 'power.rx.bw_ghz',
    'link.fft_size', 'link.scs_hz', 'link.chip_rate_hz', 'link.sc_per_prb', 'link.max_prbs',
    'link.n_symbols', 'link.n_pilots', 'link.fir_taps', 'link.fir_guard_hz', 'link.dual_trials',
    'link.sdma.used_prbs',
    'tx.interp_m', 'tx.zoh_oversample', 'tx.lpf_fc_hz', 'tx.interp_taps', 'tx.used_prbs',
    'tx.ch_bw_hz', 'tx.meas_bw_hz', 'tx.n_adjacent', 'tx.nperseg', 'tx.n_symbols',
    'tx.evm_symbols',
    'network.area_m', 'network.cell_radius_m', 'network.fc_hz', 'network.bw_hz',
    'network.max_se_bps_hz', 'network.tti_s', 'network.mean_ues_per_cell', 'network.n_beams_max',
    'network.n_ttis', 'network.n_drops',
}
NONNEGATIVE = {'seed', 'link.dac_extra_bits', 'network.mean_clusters', 'network.min_distance_m',
               'network.extra_loss_db',
               'power.tx.il_ps_db', 'power.tx.il_mix_db', 'power.rx.il_ps_db'}


def strip_comments(text):
    '''remove // comments line by line'''
    return ''.join(line.split('//')[0] + '\n' for line in text.splitlines())


def _kind(value):
    if isinstance(value, bool):
        return 'bool'
    if isinstance(value, int):
        return 'int'
    if isinstance(value, float):
        return 'number'
    if isinstance(value, str):
        return 'string'
    if isinstance(value, list):
        return 'list'
    if isinstance(value, dict):
        return 'table'
    return 'null'


def _type_ok(default, value):
    want, got = _kind(default), _kind(value)
    if want == 'number':
        return got in ('int', 'number')
    return want == got


def _merge(defaults, user, prefix, errors):
    out = copy.deepcopy(defaults)
    for key, value in user.items():
        path = prefix + key
        if path in FREE_TABLES:
            if not isinstance(value, dict):
                errors.append('{}: expected a table'.format(path))
            else:
                out[key] = OrderedDict(value)
            continue
        if key not in defaults:
            errors.append('unknown key "{}"'.format(path))
            continue
        default = defaults[key]
        if path in BITS_LISTS:
            out[key] = value
            continue
        if isinstance(default, dict):
            if not isinstance(value, dict):
                errors.append('{}: expected a table'.format(path))
            else:
                out[key] = _merge(default, value, path + '.', errors)
            continue
        if not _type_ok(default, value):
            errors.append('{}: expected {}, got {}'.format(path, _kind(default), _kind(value)))
            continue
        if isinstance(default, list) and default and value:
            elem = default[0]
            bad = [v for v in value if not _type_ok(elem, v)]
            if bad:
                errors.append('{}: list items must be {}, got {!r}'.format(path, _kind(elem), bad[0]))
                continue
        out[key] = float(value) if isinstance(default, float) else value
    return out


def _lookup(opt, path):
    node = opt
    for part in path.split('.'):
        node = node[part]
    return node


def _check_bits(path, value, errors, allow_inf=True):
    try:
        b = parse_bits(value)
    except (SimulationError, ValueError, TypeError):
        errors.append('{}: {!r} is not a bit count'.format(path, value))
        return None
    if math.isinf(b):
        if not allow_inf:
            errors.append('{}: must be a finite bit count'.format(path))
            return None
        return b
    if not 1 <= b <= MAX_BITS:
        errors.append('{}: bit count must be in [1, {:d}], got {}'.format(path, MAX_BITS, b))
        return None
    return b


def _check_values(opt, errors):
    for path in sorted(POSITIVE):
        v = _lookup(opt, path)
        if not v > 0:
            errors.append('{} must be positive, got {}'.format(path, v))
    for path in sorted(NONNEGATIVE):
        v = _lookup(opt, path)
        if v < 0:
            errors.append('{} must be >= 0, got {}'.format(path, v))
    for path in sorted(BITS_LISTS):
        v = _lookup(opt, path)
        if not isinstance(v, list) or not v:
            errors.append('{}: expected a non-empty list of bit counts'.format(path))
            continue
        for item in v:
            _check_bits(path, item, errors)
    for path in sorted(FINITE_BITS):
        _check_bits(path, _lookup(opt, path), errors, allow_inf=False)
    for k, a in opt['quantization']['alpha_override'].items():
        _check_bits('quantization.alpha_override', k, errors)
        if _kind(a) not in ('int', 'number') or not 0 <= a < 1:
            errors.append('quantization.alpha_override.{}: alpha must be in [0, 1)'.format(k))
    for k, v in opt['tx']['evm_thresholds_pct'].items():
        if _kind(v) not in ('int', 'number') or not v > 0:
            errors.append('tx.evm_thresholds_pct.{}: must be a positive number'.format(k))
    if opt['preset'] not in PRESETS:
        errors.append('preset: must be one of {}'.format(', '.join(PRESETS)))
    if opt['network']['scheduler'] not in ('OFDMA_PF', 'SDMA_GREEDY', 'TDMA_PF'):
        errors.append('network.scheduler: unknown scheduler {!r}'.format(opt['network']['scheduler']))
    for path in ('network.bs_array', 'network.ue_array'):
        v = _lookup(opt, path)
        if len(v) != 2 or min(v) < 1:
            errors.append('{}: expected [rows, columns] with both >= 1'.format(path))
    if any(o < 0 for o in opt['tx']['lpf_orders'] + opt['tx']['psd_lpf_order']):
        errors.append('tx.lpf_orders: filter orders must be >= 0')
    if any(n < 1 for n in opt['link']['used_prbs']):
        errors.append('link.used_prbs: PRB counts must be >= 1')
    if any(n < 1 for n in opt['network']['sdma_beams']):
        errors.append('network.sdma_beams: beam counts must be >= 1')


# typed views -----------------------------------------------------------------

def front_end_configs(opt):
    '''(TxFrontEndConfig, RxFrontEndConfig) from the power section'''
    t, r = opt['power']['tx'], opt['power']['rx']
    tx = TxFrontEndConfig(eirp_dbm=t['eirp_dbm'], n_antennas=t['n_antennas'],
                          p_bb_in_dbm=t['p_bb_in_dbm'], il_ps_db=t['il_ps_db'],
                          il_mix_db=t['il_mix_db'], p_lo_mw=t['p_lo_mw'], eta_pae=t['eta_pae'],
                          dac=ConverterSpec(t['dac_fom_fj'], t['fs_hz'], t['dac_bits']),
                          lpf=LpfSpec(t['lpf_fom_mw_per_ghz'], t['lpf_order'], t['lpf_fc_ghz']))
    rx = RxFrontEndConfig(n_antennas=r['n_antennas'], g_lna_db=r['g_lna_db'],
                          nf_lna_db=r['nf_lna_db'], fom_lna_per_mw=r['fom_lna_per_mw'],
                          il_ps_db=r['il_ps_db'], vga_fom=r['vga_fom'],
                          vga_area_mm2=r['vga_area_mm2'], bw_ghz=r['bw_ghz'],
                          vga_gain_range_db=r['vga_gain_range_db'], p_lo_mw=r['p_lo_mw'],
                          adc=ConverterSpec(r['adc_fom_fj'], r['fs_hz'], r['adc_bits']))
    return tx, rx


def numerology(opt, used_prbs=None, section='link'):
    s = opt[section]
    lk = opt['link']
    if used_prbs is None:
        used_prbs = s['used_prbs'] if section == 'tx' else lk['used_prbs'][0]
    return OfdmNumerology(fft_size=lk['fft_size'], scs_hz=lk['scs_hz'],
                          chip_rate_hz=lk['chip_rate_hz'], sc_per_prb=lk['sc_per_prb'],
                          max_prbs=lk['max_prbs'], used_prbs=used_prbs)


def dac_chain(opt, n_bits, lpf_order=1):
    t = opt['tx']
    return DacChainConfig(interp_m=t['interp_m'], n_bits=parse_bits(n_bits),
                          zoh_oversample=t['zoh_oversample'], lpf_order=lpf_order,
                          lpf_fc_hz=t['lpf_fc_hz'], chip_rate_hz=opt['link']['chip_rate_hz'],
                          interp_taps=t['interp_taps'], kaiser_beta=t['kaiser_beta'])


def channel_plan(opt):
    t = opt['tx']
    return ChannelPlan(ch_bw_hz=t['ch_bw_hz'], meas_bw_hz=t['meas_bw_hz'], n_adjacent=t['n_adjacent'])


def network_config(opt, **overrides):
    n = opt['network']
    fields = {k: n[k] for k in ('area_m', 'cell_radius_m', 'fc_hz', 'bw_hz', 'tx_power_dbm',
                                'noise_figure_db', 'extra_loss_db', 'noise_psd_dbm_hz', 'max_se_bps_hz',
                                'tti_s', 'overhead', 'shannon_loss_db', 'mean_ues_per_cell', 'ue_drop',
                                'min_distance_m', 'n_beams_max', 'scheduler', 'n_ttis', 'mean_clusters')}
    fields.update(bs_array=tuple(n['bs_array']), ue_array=tuple(n['ue_array']),
                  seed=opt['seed'], pathloss=PathlossParams(**n['pathloss']))
    fields.update(overrides)
    return NetworkConfig(**fields)


def alpha_overrides(opt):
    return {parse_bits(k): float(v) for k, v in opt['quantization']['alpha_override'].items()}


def _check_builders(opt, errors):
    '''
    construct every typed config once so their own invariants are reported too;
    sections that already have a violation are skipped
    '''
    flagged = list(errors)
    link_prbs = opt['link']['used_prbs'] + [opt['link']['sdma']['used_prbs']]
    checks = [('power', lambda: front_end_configs(opt)),
              ('link', lambda: [numerology(opt, p) for p in link_prbs]),
              ('tx', lambda: (numerology(opt, section='tx'), dac_chain(opt, 'inf'), channel_plan(opt))),
              ('network', lambda: network_config(opt))]
    for section, build in checks:
        if any(re.search(r'(?<![\w.])' + section + r'\.', e) for e in flagged):
            continue
        try:
            build()
        except (SimulationError, ValueError, TypeError) as e:
            errors.append('{}: {}'.format(section, e))


def parse_text(text):
    '''raw JSON text (comments allowed) -> user tree; empty text is an empty tree'''
    body = strip_comments(text or '')
    if not body.strip():
        return OrderedDict()
    try:
        tree = json.loads(body, object_pairs_hook=OrderedDict)
    except json.JSONDecodeError as e:
        raise ConfigError(['parse error at line {:d} column {:d}: {}'.format(e.lineno, e.colno, e.msg)])
    if not isinstance(tree, dict):
        raise ConfigError(['top level must be a table'])
    return tree


def resolve(tree):
    '''merge a user tree over DEFAULTS and check it; raises ConfigError listing every violation'''
    errors = []
    # rejected keys keep their defaults, so every stage can run
    opt = _merge(DEFAULTS, tree, '', errors)
    _check_values(opt, errors)
    _check_builders(opt, errors)
    if errors:
        raise ConfigError(errors)
    return opt


def validate_config(text):
    return resolve(parse_text(text))


def set_path(tree, dotted, value):
    parts = dotted.split('.')
    node = tree
    for p in parts[:-1]:
        if not isinstance(node.get(p), dict):
            node[p] = OrderedDict()
        node = node[p]
    node[parts[-1]] = value


def apply_overrides(tree, items):
    '''
    "key.path=value" assignments; the value is read as JSON, falling back to
    a plain string.
    '''
    errors = []
    for item in items or []:
        if '=' not in item:
            errors.append('override {!r}: expected key=value'.format(item))
            continue
        key, raw = item.split('=', 1)
        try:
            value = json.loads(raw, object_pairs_hook=OrderedDict)
        except json.JSONDecodeError:
            value = raw
        set_path(tree, key.strip(), value)
    if errors:
        raise ConfigError(errors)
    return tree


def parse_range(text):
    '''"a:b[:step]" (inclusive, default step 1) or "a,b,c" -> list of floats'''
    text = text.strip()
    try:
        if ':' in text:
            parts = [float(p) for p in text.split(':')]
            if len(parts) not in (2, 3):
                raise ValueError(text)
            start, stop = parts[0], parts[1]
            step = parts[2] if len(parts) == 3 else 1.0
            if step <= 0 or stop < start:
                raise ValueError(text)
            n = int(math.floor((stop - start) / step + 1e-9)) + 1
            return [start + i * step for i in range(n)]
        return [float(p) for p in text.split(',') if p.strip()]
    except ValueError:
        raise ConfigError(['cannot read range {!r}; use a:b[:step] or a,b,c'.format(text)])


def parse_bits_list(text):
    '''"2,3,inf" -> [2, 3, 'inf']'''
    out = []
    for p in (p.strip() for p in text.split(',')):
        if not p:
            continue
        if p.lower().startswith('inf'):
            out.append('inf')
            continue
        try:
            out.append(int(p))
        except ValueError:
            raise ConfigError(['--bits: {!r} is not a bit count'.format(p)])
    return out


# keys that --bits and --snr write, per preset
BITS_KEY = {'aqnm-curves': 'quantization.bits', 'link-validate': 'link.adc_bits',
            'sdma-link': 'link.sdma.bits', 'cell-ofdma': 'network.bits', 'cell-sdma': 'network.bits',
            'tx-psd': 'tx.psd_bits', 'aclr-sweep': 'tx.aclr_bits', 'evm-sweep': 'tx.evm_bits'}
SNR_KEY = {'aqnm-curves': 'quantization.snr_db', 'link-validate': 'link.snr_db',
           'sdma-link': 'link.sdma.sir_db', 'evm-sweep': 'tx.inv_sigma_rf_db'}
