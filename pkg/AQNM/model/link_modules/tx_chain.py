'''
Transmit DAC chain and its spectral / EVM measurements.

    chip-rate OFDM -> x m interpolation -> n-bit quantizer -> ZOH (x L) -> Butterworth LPF

The ZOH is emulated by repeating each DAC sample L times, so the analog
output lives at L * fs. Every stage treats the frame as one period of a
periodic signal, which keeps filters circular and makes frame edges vanish
from the spectrum.
'''
import math
import logging
from dataclasses import dataclass, field, replace
from typing import Dict, Optional

import numpy as np
from scipy import signal

from core.errors import InvalidArgument
from core.seeding import make_rng
from model.quantization import (INF_BITS, ComplexSampleBlock, QuantizerSpec, alpha_of,
                                quantize_array)
from model.link_modules.ofdm_link import (OfdmNumerology, ofdm_demodulate, ofdm_modulate,
                                          random_grid)

logger = logging.getLogger('base')

EVM_THRESHOLDS_PCT = {'QPSK': 17.5, '16QAM': 12.5, '64QAM': 8.0, '256QAM': 3.5}
ACLR_LIMIT_BS_DB = 28.0
ACLR_LIMIT_UE_DB = 17.0

# tx measurements use the full 400 MHz channel
TX_NUMEROLOGY = OfdmNumerology(used_prbs=275)


@dataclass(frozen=True)
class DacChainConfig:
    interp_m: int = 2
    n_bits: float = INF_BITS
    zoh_oversample: int = 8
    lpf_order: int = 1
    lpf_fc_hz: float = 400e6
    chip_rate_hz: float = 491.52e6
    interp_taps: int = 255
    kaiser_beta: float = 8.0

    def __post_init__(self):
        if self.interp_m < 1:
            raise InvalidArgument('interp_m must be >= 1')
        if self.zoh_oversample < 4:
            raise InvalidArgument('zoh_oversample must be >= 4')
        if self.lpf_order < 0:
            raise InvalidArgument('lpf_order must be >= 0')
        if self.lpf_fc_hz <= 0 or self.chip_rate_hz <= 0:
            raise InvalidArgument('rates must be positive')

    @property
    def dac_fs_hz(self):
        return self.interp_m * self.chip_rate_hz

    @property
    def analog_rate_hz(self):
        return self.zoh_oversample * self.dac_fs_hz


@dataclass(frozen=True)
class ChannelPlan:
    ch_bw_hz: float = 400e6
    meas_bw_hz: float = 396e6
    n_adjacent: int = 2

    def __post_init__(self):
        if not 0 < self.meas_bw_hz <= self.ch_bw_hz:
            raise InvalidArgument('meas_bw must lie in (0, ch_bw]')
        if self.n_adjacent < 1:
            raise InvalidArgument('n_adjacent must be >= 1')

    def band(self, index):
        centre = index * self.ch_bw_hz
        return centre - self.meas_bw_hz / 2, centre + self.meas_bw_hz / 2


@dataclass
class SpectrumReport:
    freqs_hz: np.ndarray
    psd_dbm_per_hz: np.ndarray
    aclr_db: Dict[int, float] = field(default_factory=dict)
    evm_pct: Optional[float] = None


def interpolator_taps(cfg):
    '''Kaiser-window anti-image filter at the DAC rate, cutoff at half the chip rate'''
    return signal.firwin(cfg.interp_taps, cfg.chip_rate_hz / 2, window=('kaiser', cfg.kaiser_beta),
                         fs=cfg.dac_fs_hz)


def interpolate(x, cfg):
    '''circular x m interpolation with group delay removed'''
    m = cfg.interp_m
    if m == 1:
        return np.asarray(x, dtype=np.complex128)
    h = interpolator_taps(cfg) * m
    delay = (len(h) - 1) // 2
    pad = delay // m + 1
    padded = np.pad(x, (pad, pad), mode='wrap')
    y = signal.upfirdn(h, padded, up=m)
    start = pad * m + delay
    return y[start:start + x.size * m]


def dac_convert(baseband, cfg):
    '''interpolate, quantize and hold; returns the analog-rate block'''
    if not math.isclose(baseband.sample_rate, cfg.chip_rate_hz, rel_tol=1e-9):
        raise InvalidArgument('baseband rate {:.6g} Hz differs from the chip rate {:.6g} Hz'.format(
            baseband.sample_rate, cfg.chip_rate_hz))
    y = interpolate(baseband.samples, cfg)
    y = quantize_array(y, QuantizerSpec.optimal(cfg.n_bits))
    return ComplexSampleBlock(np.repeat(y, cfg.zoh_oversample), cfg.analog_rate_hz)


def butterworth_response(order, fc_hz, f_hz):
    '''zero-phase Butterworth magnitude; order 0 means no filter'''
    if order < 0:
        raise InvalidArgument('filter order must be >= 0')
    f = np.asarray(f_hz, dtype=np.float64)
    if order == 0:
        return np.ones_like(f) + 0j
    return np.sqrt(1.0 / (1.0 + (np.abs(f) / fc_hz) ** (2 * order))) + 0j


def apply_lpf(block, order, fc_hz):
    if order == 0:
        return block
    X = np.fft.fft(block.samples)
    f = np.fft.fftfreq(len(block), d=1.0 / block.sample_rate)
    return block.with_samples(np.fft.ifft(X * butterworth_response(order, fc_hz, f)))


def analog_output(baseband, cfg):
    return apply_lpf(dac_convert(baseband, cfg), cfg.lpf_order, cfg.lpf_fc_hz)


def resample_to(block, rate_hz):
    '''ideal band-limited resampling of a periodic block (FFT bin selection)'''
    n_in = len(block)
    n_out = int(round(n_in * rate_hz / block.sample_rate))
    X = np.fft.fft(block.samples)
    f_in = np.fft.fftfreq(n_in, d=1.0 / block.sample_rate)
    f_out = np.fft.fftfreq(n_out, d=1.0 / rate_hz)
    idx = np.round(f_out * n_in / block.sample_rate).astype(int) % n_in
    if not np.allclose(f_in[idx], f_out):
        raise InvalidArgument('rates are not commensurate with the block length')
    return ComplexSampleBlock(np.fft.ifft(X[idx]) * (n_out / n_in), rate_hz)


def estimate_psd(block, nperseg=8192):
    '''two-sided Welch PSD (Hann, 50 % overlap); 1 unit of power is 1 mW'''
    if len(block) < 4 * nperseg:
        raise InvalidArgument('block of {} samples is shorter than 4 * nperseg = {}'.format(
            len(block), 4 * nperseg))
    f, pxx = signal.welch(block.samples, fs=block.sample_rate, window='hann', nperseg=nperseg,
                          noverlap=nperseg // 2, detrend=False, return_onesided=False,
                          scaling='density')
    f = np.fft.fftshift(f)
    pxx = np.fft.fftshift(pxx)
    with np.errstate(divide='ignore'):
        return SpectrumReport(freqs_hz=f, psd_dbm_per_hz=10 * np.log10(pxx))


def band_power(report, f_lo, f_hi):
    f = report.freqs_hz
    if f_lo < f[0] or f_hi > f[-1]:
        raise InvalidArgument('PSD span [{:.4g}, {:.4g}] Hz does not cover [{:.4g}, {:.4g}] Hz'.format(
            f[0], f[-1], f_lo, f_hi))
    df = f[1] - f[0]
    mask = (f >= f_lo) & (f < f_hi)
    return float(np.sum(10 ** (report.psd_dbm_per_hz[mask] / 10)) * df)


def measure_aclr(report, plan, adjacent_index):
    '''in-channel power over the power in adjacent channel i (negative i: lower side)'''
    if adjacent_index == 0:
        raise InvalidArgument('adjacent_index must be nonzero')
    p_in = band_power(report, *plan.band(0))
    p_adj = band_power(report, *plan.band(adjacent_index))
    aclr = 10 * math.log10(p_in / p_adj)
    report.aclr_db[adjacent_index] = aclr
    return aclr


def worst_aclr(report, plan, i):
    return min(measure_aclr(report, plan, i), measure_aclr(report, plan, -i))


def transmit_frame(num, n_symbols, modulation, rng):
    grid = random_grid(n_symbols, num, modulation, rng)
    return grid, ofdm_modulate(grid, num)


def measure_spectrum(cfg, plan=None, num=TX_NUMEROLOGY, n_symbols=14, nperseg=8192, seed=0,
                     spawn_key=()):
    plan = plan or ChannelPlan()
    _, frame = transmit_frame(num, n_symbols, '256QAM', make_rng(seed, *spawn_key))
    report = estimate_psd(analog_output(frame, cfg), nperseg)
    for i in range(1, plan.n_adjacent + 1):
        worst_aclr(report, plan, i)
    return report


def inband_error_power(baseband, cfg):
    '''power of Q(y) - (1 - alpha) y that falls inside the chip-rate band'''
    y = interpolate(baseband.samples, cfg)
    spec = QuantizerSpec.optimal(cfg.n_bits)
    e = quantize_array(y, spec) - (1 - spec.alpha) * y
    E = np.fft.fft(e) / e.size
    f = np.fft.fftfreq(e.size, d=1.0 / cfg.dac_fs_hz)
    return float(np.sum(np.abs(E[np.abs(f) < cfg.chip_rate_hz / 2]) ** 2))


def measure_evm(cfg, sigma_rf_sq, modulation='256QAM', num=TX_NUMEROLOGY, n_symbols=8, seed=0,
                spawn_key=()):
    '''
    EVM (percent) of the DAC chain plus additive RF impairment.

    sigma_rf_sq is the impairment power relative to the per-subcarrier symbol
    power. The reference response is the same chain at infinite resolution,
    so the quantizer gain loss appears in the error.
    '''
    if sigma_rf_sq < 0:
        raise InvalidArgument('sigma_rf_sq must be >= 0')
    rng = make_rng(seed, *spawn_key)
    grid, frame = transmit_frame(num, n_symbols, modulation, rng)
    # AGC ahead of the quantizer, shared by both passes
    scale = 1.0 / math.sqrt(np.mean(np.abs(interpolate(frame.samples, cfg)) ** 2))
    frame = frame.with_samples(frame.samples * scale)
    ref_cfg = _with_bits(cfg, INF_BITS)
    ref = resample_to(analog_output(frame, ref_cfg), cfg.chip_rate_hz)
    out = resample_to(analog_output(frame, cfg), cfg.chip_rate_hz)
    if sigma_rf_sq > 0:
        var = sigma_rf_sq * ref.power() * num.osr
        w = rng.standard_normal(len(out)) + 1j * rng.standard_normal(len(out))
        out = out.with_samples(out.samples + math.sqrt(var / 2) * w)
    offset = num.cp_len // 2
    Y_ref = ofdm_demodulate(ref, num, n_symbols, offset)
    Y = ofdm_demodulate(out, num, n_symbols, offset)
    H = np.mean(Y_ref / grid.symbols, axis=0)
    Z = Y / H
    I = grid.symbols
    return 100 * math.sqrt(np.mean(np.abs(Z - I) ** 2) / np.mean(np.abs(I) ** 2))


def _with_bits(cfg, n_bits):
    return replace(cfg, n_bits=n_bits)


def evm_prediction(alpha, sigma_rf_sq, sigma_v_sq, sig_power):
    if sig_power <= 0:
        raise InvalidArgument('signal power must be positive')
    if min(alpha, sigma_rf_sq, sigma_v_sq) < 0:
        raise InvalidArgument('inputs must be nonnegative')
    return 100 * math.sqrt(alpha ** 2 + (sigma_rf_sq + sigma_v_sq) / sig_power)


def evm_floor_pct(n_bits, cfg=None, num=TX_NUMEROLOGY, sigma_rf_sq=0.0):
    '''predicted EVM: the in-band share of the white DAC noise plus the gain error'''
    cfg = cfg or DacChainConfig()
    a = alpha_of(n_bits)
    sigma_v_sq = a * (1 - a) * num.occupied_bw_hz / cfg.dac_fs_hz
    return evm_prediction(a, sigma_rf_sq, sigma_v_sq, 1.0)


def max_supported_modulation(evm_pct, thresholds=None):
    '''highest modulation order whose EVM requirement is met, or None'''
    thresholds = thresholds or EVM_THRESHOLDS_PCT
    best = None
    for mod, limit in sorted(thresholds.items(), key=lambda kv: -kv[1]):
        if evm_pct <= limit:
            best = mod
    return best
