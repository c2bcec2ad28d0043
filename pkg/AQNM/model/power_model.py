'''
Front-end power budget of analog, hybrid and fully digital beamforming
transceivers. Powers are in mW unless the name says dBm.
'''
import math
import logging
from dataclasses import dataclass, field, replace

from core.errors import InvalidArgument, InfeasibleDrive

logger = logging.getLogger('base')

ANALOG = 'Analog'
HYBRID = 'Hybrid'
DIGITAL = 'Digital'


def db2lin(x_db):
    return 10 ** (x_db / 10)


def lin2db(x):
    return 10 * math.log10(x)


@dataclass(frozen=True)
class ArchSpec:
    kind: str
    n_streams: int

    def __post_init__(self):
        if self.kind not in (ANALOG, HYBRID, DIGITAL):
            raise InvalidArgument('unknown architecture {!r}'.format(self.kind))
        if self.n_streams < 1:
            raise InvalidArgument('n_streams must be >= 1')
        if self.kind == ANALOG and self.n_streams != 1:
            raise InvalidArgument('analog beamforming carries a single stream')

    @classmethod
    def analog(cls):
        return cls(ANALOG, 1)

    @classmethod
    def hybrid(cls, k):
        return cls(HYBRID, k)

    @classmethod
    def digital(cls, n_antennas):
        return cls(DIGITAL, n_antennas)

    @property
    def phase_shifters(self):
        return self.kind != DIGITAL

    def label(self):
        if self.kind == HYBRID:
            return 'Hybrid (K={:d})'.format(self.n_streams)
        return self.kind


def _check_digital(arch, n_antennas):
    if arch.kind == DIGITAL and arch.n_streams != n_antennas:
        raise InvalidArgument('digital beamforming needs one stream per antenna '
                              '({:d} != {:d})'.format(arch.n_streams, n_antennas))


@dataclass(frozen=True)
class ConverterSpec:
    fom_fj_per_conv: float
    fs_hz: float = 1e9
    n_bits: int = 8
    pairs: int = 1

    def __post_init__(self):
        if min(self.fom_fj_per_conv, self.fs_hz, self.n_bits, self.pairs) <= 0:
            raise InvalidArgument('converter parameters must be positive')


@dataclass(frozen=True)
class LpfSpec:
    fom_mw_per_ghz: float = 1.3
    order: int = 1
    fc_ghz: float = 0.4

    def __post_init__(self):
        if self.order < 0:
            raise InvalidArgument('filter order must be >= 0')


@dataclass(frozen=True)
class TxFrontEndConfig:
    eirp_dbm: float = 30.0
    n_antennas: int = 16
    p_bb_in_dbm: float = 10.0
    il_ps_db: float = 10.0
    il_mix_db: float = 6.0
    p_lo_mw: float = 10.0
    eta_pae: float = 0.2
    dac: ConverterSpec = field(default_factory=lambda: ConverterSpec(67.6))
    lpf: LpfSpec = field(default_factory=LpfSpec)

    def __post_init__(self):
        if not 0 < self.eta_pae <= 1:
            raise InvalidArgument('eta_pae must be in (0, 1]')
        if self.il_ps_db < 0 or self.il_mix_db < 0:
            raise InvalidArgument('insertion losses must be >= 0')
        if self.n_antennas < 1:
            raise InvalidArgument('n_antennas must be >= 1')


@dataclass(frozen=True)
class RxFrontEndConfig:
    n_antennas: int = 16
    g_lna_db: float = 10.0
    nf_lna_db: float = 3.0
    fom_lna_per_mw: float = 6.5
    il_ps_db: float = 10.0
    vga_fom: float = 5280.0
    vga_area_mm2: float = 0.01
    bw_ghz: float = 1.0
    vga_gain_range_db: float = 82.0
    p_lo_mw: float = 10.0
    adc: ConverterSpec = field(default_factory=lambda: ConverterSpec(65.0))

    def __post_init__(self):
        if min(self.n_antennas, self.fom_lna_per_mw, self.vga_fom, self.vga_area_mm2,
               self.bw_ghz, self.vga_gain_range_db, self.p_lo_mw) <= 0:
            raise InvalidArgument('receiver front-end parameters must be positive')


@dataclass(frozen=True)
class PowerBudget:
    rffe_mw: float
    gain_stage_mw: float
    converter_mw: float

    @property
    def total_mw(self):
        return self.rffe_mw + self.gain_stage_mw + self.converter_mw


def pa_input_power_dbm(cfg, arch):
    p = cfg.p_bb_in_dbm - 10 * math.log10(cfg.n_antennas) - cfg.il_mix_db
    if arch.phase_shifters:
        p -= cfg.il_ps_db
    return p


def pa_output_power_dbm(cfg):
    return cfg.eirp_dbm - 20 * math.log10(cfg.n_antennas)


def tx_rffe_power_mw(cfg, arch):
    _check_digital(arch, cfg.n_antennas)
    p_in = pa_input_power_dbm(cfg, arch)
    p_out = pa_output_power_dbm(cfg)
    if p_in > p_out:
        raise InfeasibleDrive('PA input {:.2f} dBm exceeds its output {:.2f} dBm'.format(p_in, p_out))
    p_dc_pa = (db2lin(p_out) - db2lin(p_in)) / cfg.eta_pae
    return cfg.n_antennas * p_dc_pa + arch.n_streams * cfg.p_lo_mw


def lna_gain_db(cfg, arch):
    # the LNA also has to make up for the phase shifter loss
    return cfg.g_lna_db + (cfg.il_ps_db if arch.phase_shifters else 0.0)


def rx_rffe_power_mw(cfg, arch):
    _check_digital(arch, cfg.n_antennas)
    if cfg.nf_lna_db <= 0:
        raise InvalidArgument('LNA noise figure must be > 0 dB')
    p_lna = db2lin(lna_gain_db(cfg, arch)) / (cfg.fom_lna_per_mw * (db2lin(cfg.nf_lna_db) - 1))
    return cfg.n_antennas * p_lna + arch.n_streams * cfg.p_lo_mw


def vga_power_mw(cfg, arch):
    p_vga = db2lin(cfg.vga_gain_range_db) * cfg.bw_ghz / (cfg.vga_fom * cfg.vga_area_mm2)
    return arch.n_streams * p_vga


def received_power_dbm(eirp_dbm, pathloss_db):
    return eirp_dbm - pathloss_db


def vga_gain_range_db(p_bb_out_dbm, n_rx, il_mix_db, g_lna_minus_il_ps_db, p_rx_dbm):
    '''gain the VGA must supply to bring the weakest cell-edge signal to the ADC drive level'''
    front = p_rx_dbm + 10 * math.log10(n_rx) + g_lna_minus_il_ps_db - il_mix_db
    return p_bb_out_dbm - front


def converter_power_mw(spec, n_streams):
    '''FoM f_s 2^n per converter, I and Q per pair'''
    return 2 * spec.pairs * n_streams * spec.fom_fj_per_conv * 1e-12 * spec.fs_hz * 2 ** spec.n_bits


def lpf_power_mw(spec, n_streams):
    return n_streams * spec.fom_mw_per_ghz * spec.order * spec.fc_ghz


def front_end_budget(tx_cfg, rx_cfg, arch):
    tx = PowerBudget(rffe_mw=tx_rffe_power_mw(tx_cfg, arch),
                     gain_stage_mw=lpf_power_mw(tx_cfg.lpf, arch.n_streams),
                     converter_mw=converter_power_mw(tx_cfg.dac, arch.n_streams))
    rx = PowerBudget(rffe_mw=rx_rffe_power_mw(rx_cfg, arch),
                     gain_stage_mw=vga_power_mw(rx_cfg, arch),
                     converter_mw=converter_power_mw(rx_cfg.adc, arch.n_streams))
    return tx, rx


def with_converter_bits(tx_cfg, rx_cfg, n_bits):
    return (replace(tx_cfg, dac=replace(tx_cfg.dac, n_bits=n_bits)),
            replace(rx_cfg, adc=replace(rx_cfg.adc, n_bits=n_bits)))


def power_table(tx_cfg, rx_cfg, hybrid_streams=2, low_res_bits=4):
    '''rows (arch, stage, mw) for analog, hybrid, digital and low-resolution digital'''
    n = tx_cfg.n_antennas
    if rx_cfg.n_antennas != n:
        raise InvalidArgument('Tx and Rx arrays must have the same size for the table')
    low_tx, low_rx = with_converter_bits(tx_cfg, rx_cfg, low_res_bits)
    cases = [(ArchSpec.analog().label(), ArchSpec.analog(), tx_cfg, rx_cfg),
             (ArchSpec.hybrid(hybrid_streams).label(), ArchSpec.hybrid(hybrid_streams), tx_cfg, rx_cfg),
             (ArchSpec.digital(n).label(), ArchSpec.digital(n), tx_cfg, rx_cfg),
             ('Digital low-res ({:d} bits)'.format(low_res_bits), ArchSpec.digital(n), low_tx, low_rx)]
    rows = []
    for label, arch, tcfg, rcfg in cases:
        tx, rx = front_end_budget(tcfg, rcfg, arch)
        rows += [(label, 'Tx RFFE', tx.rffe_mw), (label, 'Tx LPF', tx.gain_stage_mw),
                 (label, 'Tx DAC', tx.converter_mw), (label, 'Tx total', tx.total_mw),
                 (label, 'Rx RFFE', rx.rffe_mw), (label, 'Rx VGA', rx.gain_stage_mw),
                 (label, 'Rx ADC', rx.converter_mw), (label, 'Rx total', rx.total_mw)]
        logger.info('{:s}: Tx {:.2f} mW, Rx {:.2f} mW'.format(label, tx.total_mw, rx.total_mw))
    return rows
