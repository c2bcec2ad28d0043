'''
Link-level OFDM receiver chain used to validate the quantization noise model:

    AGC -> n-bit ADC -> FIR low-pass -> OFDM demodulation -> single-tap equalizer

SNR convention: the input SNR is signal power over noise power across the
whole sampled (chip-rate) band. After the FFT only the occupied subcarriers
are kept, so with infinite resolution the post-equalization SNR is the input
SNR plus 10 log10(N_fft / N_sc).
'''
import math
import logging
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np
from scipy import signal

from core.errors import InvalidArgument, DegenerateInput
from core.seeding import make_rng
from model.quantization import (INF_BITS, ComplexSampleBlock, QuantizerSpec, alpha_of,
                                is_infinite, quantize)
from model.sinr_model import (dual_quantizer_snr, sinr_orthogonal_quantized,
                              sinr_sdma_quantized, LinkQuality)

logger = logging.getLogger('base')

MODULATIONS = {'QPSK': 4, '16QAM': 16, '64QAM': 64, '256QAM': 256}


def qam_constellation(modulation):
    '''square QAM alphabet with unit average energy'''
    if modulation not in MODULATIONS:
        raise InvalidArgument('unknown modulation {!r}'.format(modulation))
    side = int(math.isqrt(MODULATIONS[modulation]))
    axis = np.arange(-(side - 1), side, 2, dtype=np.float64)
    points = (axis[None, :] + 1j * axis[:, None]).ravel()
    return points / np.sqrt(np.mean(np.abs(points) ** 2))


@dataclass(frozen=True)
class OfdmNumerology:
    fft_size: int = 4096
    scs_hz: float = 120e3
    chip_rate_hz: float = 491.52e6
    sc_per_prb: int = 12
    max_prbs: int = 275
    used_prbs: int = 274
    cp_fraction: float = 288 / 4096

    def __post_init__(self):
        if self.fft_size < 1 or self.scs_hz <= 0:
            raise InvalidArgument('fft_size and scs_hz must be positive')
        if not math.isclose(self.chip_rate_hz, self.fft_size * self.scs_hz, rel_tol=1e-9):
            raise InvalidArgument('chip rate must equal fft_size * scs ({:.6g} != {:.6g})'.format(
                self.chip_rate_hz, self.fft_size * self.scs_hz))
        if not 1 <= self.used_prbs <= self.max_prbs:
            raise InvalidArgument('used_prbs must be in [1, max_prbs]')
        if self.n_sc > self.fft_size:
            raise InvalidArgument('occupied subcarriers exceed the FFT size')
        if not 0 <= self.cp_fraction < 1:
            raise InvalidArgument('cp_fraction must be in [0, 1)')

    @property
    def n_sc(self):
        return self.used_prbs * self.sc_per_prb

    @property
    def cp_len(self):
        return int(round(self.cp_fraction * self.fft_size))

    @property
    def symbol_len(self):
        return self.fft_size + self.cp_len

    @property
    def occupied_bw_hz(self):
        return self.n_sc * self.scs_hz

    @property
    def osr(self):
        return self.fft_size / self.n_sc

    def subcarrier_bins(self):
        '''FFT bin of each used subcarrier, centred on DC'''
        k = np.arange(self.n_sc) - self.n_sc // 2
        return np.mod(k, self.fft_size)


@dataclass(frozen=True)
class ResourceGrid:
    symbols: np.ndarray
    modulation: str = 'QPSK'

    @property
    def n_symbols(self):
        return self.symbols.shape[0]


def random_grid(n_symbols, num, modulation, rng):
    points = qam_constellation(modulation)
    idx = rng.integers(0, points.size, size=(n_symbols, num.n_sc))
    return ResourceGrid(points[idx], modulation)


@dataclass(frozen=True)
class LinkTrialConfig:
    snr_db: float = 10.0
    n_adc: float = INF_BITS
    n_dac: float = INF_BITS
    numerology: OfdmNumerology = OfdmNumerology()
    n_symbols: int = 20
    seed: int = 0
    spawn_key: Tuple[int, ...] = ()
    sir_db: Optional[float] = None
    gamma0_db: Optional[float] = None
    n_pilots: int = 2
    fir_taps: int = 129
    fir_guard_hz: float = 8e6
    channel_phase: Optional[float] = None

    def __post_init__(self):
        if self.n_symbols < 1:
            raise InvalidArgument('n_symbols must be >= 1')
        if self.n_pilots < 1:
            raise InvalidArgument('at least one pilot symbol is required')

    @property
    def psi(self):
        if self.sir_db is None or math.isinf(self.sir_db):
            return 0.0
        return 10 ** (-self.sir_db / 10)


def osr_gain_db(n_fft, n_sc):
    if n_sc <= 0 or n_sc > n_fft:
        raise InvalidArgument('need 0 < n_sc <= n_fft, got n_sc={} n_fft={}'.format(n_sc, n_fft))
    return 10 * math.log10(n_fft / n_sc)


def ofdm_modulate(grid, num, n_dac=INF_BITS):
    '''IFFT per symbol, cyclic prefix, unit average power, then the DAC quantizer'''
    sym = np.asarray(grid.symbols)
    if sym.ndim != 2 or sym.shape[1] != num.n_sc:
        raise InvalidArgument('grid shape {} does not match {} subcarriers'.format(sym.shape, num.n_sc))
    freq = np.zeros((sym.shape[0], num.fft_size), dtype=np.complex128)
    freq[:, num.subcarrier_bins()] = sym
    time = np.fft.ifft(freq, axis=1) * (num.fft_size / math.sqrt(num.n_sc))
    if num.cp_len:
        time = np.hstack([time[:, -num.cp_len:], time])
    block = ComplexSampleBlock(time.ravel(), num.chip_rate_hz)
    if is_infinite(n_dac):
        return block
    return quantize(agc_normalize(block), QuantizerSpec.optimal(n_dac))


def ofdm_demodulate(block, num, n_symbols, window_offset=0):
    '''
    FFT of every symbol with the window advanced window_offset samples into
    the cyclic prefix; the resulting phase ramp is removed.
    '''
    x = block.samples if isinstance(block, ComplexSampleBlock) else np.asarray(block)
    if x.size < n_symbols * num.symbol_len:
        raise InvalidArgument('block holds fewer than {} symbols'.format(n_symbols))
    if not 0 <= window_offset <= num.cp_len:
        raise InvalidArgument('window offset must lie inside the cyclic prefix')
    frames = x[:n_symbols * num.symbol_len].reshape(n_symbols, num.symbol_len)
    start = num.cp_len - window_offset
    spec = np.fft.fft(frames[:, start:start + num.fft_size], axis=1) * (math.sqrt(num.n_sc) / num.fft_size)
    bins = num.subcarrier_bins()
    ramp = np.exp(2j * np.pi * bins * window_offset / num.fft_size)
    return spec[:, bins] * ramp


def agc_normalize(block):
    p = block.power()
    if p == 0:
        raise DegenerateInput('cannot normalize an all-zero block')
    return block.with_samples(block.samples / math.sqrt(p))


def design_lowpass(cutoff_hz, fs_hz, taps=129):
    if not 0 < cutoff_hz < fs_hz / 2:
        raise InvalidArgument('cutoff {:.6g} Hz must lie in (0, fs/2 = {:.6g} Hz)'.format(cutoff_hz, fs_hz / 2))
    if taps < 3 or taps % 2 == 0:
        raise InvalidArgument('linear-phase design needs an odd tap count >= 3')
    return signal.firwin(taps, cutoff_hz, fs=fs_hz)


def circular_filter(x, taps):
    '''zero-delay circular convolution with a symmetric FIR'''
    h = (len(taps) - 1) // 2
    if x.size <= 2 * h:
        raise InvalidArgument('block shorter than the filter')
    padded = np.pad(x, (h, h), mode='wrap')
    return signal.fftconvolve(padded, taps, mode='valid')


def fir_lowpass(block, cutoff_hz, taps=129):
    '''windowed-sinc low-pass, group delay removed, block treated as periodic'''
    h = design_lowpass(cutoff_hz, block.sample_rate, taps)
    return block.with_samples(circular_filter(block.samples, h))


def fir_bin_response(taps, n_fft):
    '''real frequency response of the zero-delay FIR on the n_fft DFT grid'''
    h = (len(taps) - 1) // 2
    buf = np.zeros(n_fft)
    buf[:h + 1] = taps[h:]
    buf[-h:] = taps[:h]
    return np.fft.fft(buf).real


def _fir_cutoff(cfg):
    num = cfg.numerology
    return min(num.occupied_bw_hz / 2 + cfg.fir_guard_hz, 0.49 * num.chip_rate_hz)


def _awgn(rng, n, var):
    return np.sqrt(var / 2) * (rng.standard_normal(n) + 1j * rng.standard_normal(n))


def _flat_channel(cfg, x, rng):
    '''
    Flat channel between DAC and ADC: a carrier phase, uniform per trial
    unless fixed in the config, removed again by the pilot equalizer.
    '''
    theta = rng.uniform(0.0, 2 * np.pi) if cfg.channel_phase is None else cfg.channel_phase
    return x * np.exp(1j * theta)


def _receive(cfg, rx, grid_ref):
    '''AGC, ADC, FIR, FFT, equalize; returns post-equalization SINR in dB'''
    num = cfg.numerology
    rx = agc_normalize(rx)
    rx = quantize(rx, QuantizerSpec.optimal(cfg.n_adc))
    taps = design_lowpass(_fir_cutoff(cfg), num.chip_rate_hz, cfg.fir_taps)
    rx = rx.with_samples(circular_filter(rx.samples, taps))
    n_total = grid_ref.shape[0]
    Y = ofdm_demodulate(rx, num, n_total, window_offset=num.cp_len // 2)
    # known deterministic chain response, then one common gain from the pilots
    Y = Y / fir_bin_response(taps, num.fft_size)[num.subcarrier_bins()]
    P = grid_ref[:cfg.n_pilots]
    g = np.vdot(P, Y[:cfg.n_pilots]) / np.vdot(P, P).real
    Z = Y[cfg.n_pilots:] / g
    I = grid_ref[cfg.n_pilots:]
    return 10 * math.log10(np.mean(np.abs(I) ** 2) / np.mean(np.abs(Z - I) ** 2))


def run_link_trial(cfg):
    '''post-equalization SNR (dB) of one seeded single-stream trial'''
    rng = make_rng(cfg.seed, *cfg.spawn_key)
    num = cfg.numerology
    grid = random_grid(cfg.n_pilots + cfg.n_symbols, num, 'QPSK', rng)
    tx = ofdm_modulate(grid, num, cfg.n_dac)
    x = _flat_channel(cfg, tx.samples, rng)
    var = tx.power() / 10 ** (cfg.snr_db / 10)
    rx = tx.with_samples(x + _awgn(rng, x.size, var))
    return _receive(cfg, rx, grid.symbols)


def run_sdma_link_trial(cfg):
    '''
    Post-equalization SINR (dB) with an independent co-channel stream at
    psi times the desired power. gamma0 is the in-band SNR, the SINR an ideal
    receiver reaches without the interferer.
    '''
    if cfg.gamma0_db is None:
        raise InvalidArgument('SDMA trials need gamma0_db')
    rng = make_rng(cfg.seed, *cfg.spawn_key)
    num = cfg.numerology
    n_total = cfg.n_pilots + cfg.n_symbols
    grid = random_grid(n_total, num, 'QPSK', rng)
    interferer = random_grid(n_total, num, 'QPSK', rng)
    tx = ofdm_modulate(grid, num, cfg.n_dac)
    x = tx.samples
    if cfg.psi > 0:
        xi = ofdm_modulate(interferer, num, cfg.n_dac).samples
        x = x + xi * math.sqrt(cfg.psi * tx.power() / np.mean(np.abs(xi) ** 2))
    x = _flat_channel(cfg, x, rng)
    var = tx.power() * num.osr / 10 ** (cfg.gamma0_db / 10)
    rx = tx.with_samples(x + _awgn(rng, x.size, var))
    return _receive(cfg, rx, grid.symbols)


def predict_link_snr_db(cfg, alpha_adc=None, alpha_dac=None):
    '''
    (single-quantizer, cascade) predictions for run_link_trial.

    The single-quantizer value ignores the DAC; the cascade value also counts
    the DAC noise.
    '''
    num = cfg.numerology
    a_adc = alpha_of(cfg.n_adc) if alpha_adc is None else alpha_adc
    a_dac = alpha_of(cfg.n_dac) if alpha_dac is None else alpha_dac
    gamma = 10 ** (cfg.snr_db / 10)
    single = sinr_orthogonal_quantized(gamma * num.osr, a_adc, num.osr)
    cascade = dual_quantizer_snr(gamma, a_dac, a_adc, num.osr)
    return 10 * math.log10(single), 10 * math.log10(cascade)


def predict_sdma_sinr_db(cfg, alpha_adc=None):
    num = cfg.numerology
    a = alpha_of(cfg.n_adc) if alpha_adc is None else alpha_adc
    gamma_prime = 10 ** (cfg.gamma0_db / 10)
    q = LinkQuality(gamma_prime=gamma_prime, bf_gain=num.osr, psi=cfg.psi)
    return 10 * math.log10(sinr_sdma_quantized(q, a))


def trial_config(numerology=None, **kwargs):
    base = LinkTrialConfig()
    if numerology is not None:
        base = replace(base, numerology=numerology)
    return replace(base, **kwargs)
