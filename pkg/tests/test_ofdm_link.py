import math
from dataclasses import replace

import numpy as np
import pytest
from scipy import signal

from core.errors import DegenerateInput, InvalidArgument
from core.seeding import make_rng
from model.quantization import ComplexSampleBlock, alpha_of
from model.link_modules.ofdm_link import (MODULATIONS, OfdmNumerology, agc_normalize, design_lowpass,
                                          fir_bin_response, fir_lowpass, ofdm_demodulate, ofdm_modulate, osr_gain_db,
                                          predict_link_snr_db, predict_sdma_sinr_db, qam_constellation,
                                          random_grid, run_link_trial, run_sdma_link_trial, trial_config)

# 512-point FFT keeps the trials fast; 34 PRBs give an OSR of about 1.25
SMALL = OfdmNumerology(fft_size=512, chip_rate_hz=512 * 120e3, max_prbs=42, used_prbs=34)


def small_trial(**kwargs):
    base = dict(n_symbols=20, fir_taps=65, fir_guard_hz=2e6, seed=5, spawn_key=(1, 0))
    base.update(kwargs)
    return trial_config(SMALL, **base)


def test_osr_gain_of_the_used_bandwidths():
    assert osr_gain_db(4096, 3288) == pytest.approx(0.95, abs=0.01)
    assert osr_gain_db(4096, 2400) == pytest.approx(2.32, abs=0.01)
    with pytest.raises(InvalidArgument):
        osr_gain_db(4096, 5000)


def test_numerology_checks_chip_rate():
    with pytest.raises(InvalidArgument):
        OfdmNumerology(fft_size=512)
    assert OfdmNumerology().n_sc == 3288
    assert OfdmNumerology().cp_len == 288


@pytest.mark.parametrize('modulation', ['QPSK', '16QAM', '64QAM', '256QAM'])
def test_constellations_have_unit_energy(modulation):
    points = qam_constellation(modulation)
    assert np.mean(np.abs(points) ** 2) == pytest.approx(1.0)
    assert points.size == MODULATIONS[modulation]


def test_modulate_demodulate_recovers_the_grid():
    grid = random_grid(3, SMALL, '16QAM', make_rng(0, 7))
    block = ofdm_modulate(grid, SMALL)
    assert block.power() == pytest.approx(1.0, rel=0.05)
    for offset in (0, SMALL.cp_len // 2):
        np.testing.assert_allclose(ofdm_demodulate(block, SMALL, 3, offset), grid.symbols, atol=1e-9)


def test_demodulate_rejects_bad_window():
    grid = random_grid(1, SMALL, 'QPSK', make_rng(0, 7))
    block = ofdm_modulate(grid, SMALL)
    with pytest.raises(InvalidArgument):
        ofdm_demodulate(block, SMALL, 1, SMALL.cp_len + 1)
    with pytest.raises(InvalidArgument):
        ofdm_demodulate(block, SMALL, 2)


def test_agc_rejects_zero_block():
    with pytest.raises(DegenerateInput):
        agc_normalize(ComplexSampleBlock(np.zeros(8, dtype=complex), 1e6))


def test_lowpass_design_limits():
    with pytest.raises(InvalidArgument):
        design_lowpass(40e6, 61.44e6)
    with pytest.raises(InvalidArgument):
        design_lowpass(10e6, 61.44e6, taps=64)
    h = design_lowpass(10e6, 61.44e6, taps=65)
    assert fir_bin_response(h, 512)[0] == pytest.approx(1.0, abs=1e-3)


def test_fir_lowpass_keeps_passband_tones():
    n = 4096
    t = np.arange(n)
    inband = np.exp(2j * np.pi * 40 * t / n)
    outband = np.exp(2j * np.pi * 1600 * t / n)
    block = ComplexSampleBlock(inband + outband, float(n))
    y = fir_lowpass(block, 400.0).samples
    np.testing.assert_allclose(y, inband, atol=0.02)


def test_ideal_link_gains_the_oversampling_ratio():
    cfg = small_trial(snr_db=10.0)
    post = run_link_trial(cfg)
    assert post == pytest.approx(10.0 + osr_gain_db(SMALL.fft_size, SMALL.n_sc), abs=0.3)


@pytest.mark.parametrize('n_bits,snr_db', [(3, 10.0), (4, 20.0)])
def test_quantized_link_matches_the_model(n_bits, snr_db):
    cfg = small_trial(snr_db=snr_db, n_adc=n_bits)
    single, cascade = predict_link_snr_db(cfg)
    assert run_link_trial(cfg) == pytest.approx(single, abs=0.6)
    assert cascade == pytest.approx(single)


def test_dual_quantizer_prediction_is_lower():
    cfg = small_trial(snr_db=30.0, n_adc=4, n_dac=4)
    single, cascade = predict_link_snr_db(cfg)
    assert single - cascade > 2.0


@pytest.mark.parametrize('n_bits', [3, 4])
def test_matched_dac_and_adc_saturate_3_db_below_the_model(n_bits):
    cfg = small_trial(snr_db=35.0, n_adc=n_bits, n_dac=n_bits, channel_phase=np.pi / 4)
    single, _ = predict_link_snr_db(cfg)
    assert single - run_link_trial(cfg) == pytest.approx(3.0, abs=0.7)


def test_carrier_phase_is_equalized():
    a = run_link_trial(small_trial(snr_db=10.0, channel_phase=0.0))
    b = run_link_trial(small_trial(snr_db=10.0, channel_phase=1.0))
    assert a == pytest.approx(b, abs=0.15)


def test_trials_are_reproducible():
    cfg = small_trial(snr_db=5.0, n_adc=3)
    assert run_link_trial(cfg) == run_link_trial(cfg)
    other = small_trial(snr_db=5.0, n_adc=3, spawn_key=(1, 1))
    assert run_link_trial(other) != run_link_trial(cfg)


def test_sdma_trial_needs_gamma0():
    with pytest.raises(InvalidArgument):
        run_sdma_link_trial(small_trial())


def test_sdma_trial_at_low_snr_is_noise_limited():
    cfg = small_trial(n_adc=3, gamma0_db=0.0, sir_db=20.0)
    assert run_sdma_link_trial(cfg) == pytest.approx(predict_sdma_sinr_db(cfg), abs=0.5)


def test_sdma_prediction_drops_with_resolution():
    cfg = small_trial(n_adc=3, gamma0_db=15.0, sir_db=30.0)
    assert predict_sdma_sinr_db(cfg) < predict_sdma_sinr_db(cfg, alpha_of(4))


def test_sdma_loss_at_15_db_in_band_snr():
    cfg = trial_config(OfdmNumerology(used_prbs=200), gamma0_db=15.0, sir_db=40.0)
    ideal = predict_sdma_sinr_db(replace(cfg, n_adc=math.inf), 0.0)
    assert 1.3 <= ideal - predict_sdma_sinr_db(replace(cfg, n_adc=3)) <= 2.7
    assert ideal - predict_sdma_sinr_db(replace(cfg, n_adc=4)) < 1.0


def test_sdma_trial_loss_follows_the_model():
    # 25 of 42 PRBs gives the same oversampling as 200 of 275
    num = replace(SMALL, used_prbs=25)
    base = dict(n_symbols=20, fir_taps=65, fir_guard_hz=2e6, seed=5, spawn_key=(1, 0),
                gamma0_db=15.0, sir_db=40.0)
    ref = run_sdma_link_trial(trial_config(num, n_adc=math.inf, **base))
    loss = ref - run_sdma_link_trial(trial_config(num, n_adc=3, **base))
    cfg = trial_config(num, n_adc=3, **base)
    predicted = predict_sdma_sinr_db(replace(cfg, n_adc=math.inf), 0.0) - predict_sdma_sinr_db(cfg)
    assert loss == pytest.approx(predicted, abs=0.5)


def test_agc_gives_unit_power():
    rng = make_rng(2, 7)
    x = 37.0 * (rng.standard_normal(3000) + 1j * rng.standard_normal(3000))
    assert agc_normalize(ComplexSampleBlock(x, 1e6)).power() == pytest.approx(1.0, abs=1e-9)


def test_dac_error_power_of_the_modulator():
    grid = random_grid(20, SMALL, 'QPSK', make_rng(3, 7))
    y = agc_normalize(ofdm_modulate(grid, SMALL)).samples
    q = ofdm_modulate(grid, SMALL, n_dac=4).samples
    a = alpha_of(4)
    e = q - (1 - a) * y
    assert np.mean(np.abs(e) ** 2) == pytest.approx(a * (1 - a), rel=0.1)


def test_lowpass_stopband_at_one_and_a_half_cutoff():
    fs, fc = 61.44e6, 10e6
    h = design_lowpass(fc, fs)
    _, resp = signal.freqz(h, worN=[1.5 * fc], fs=fs)
    assert 20 * math.log10(abs(resp[0])) <= -40.0
