import math

import numpy as np
import pytest

from core.errors import InvalidArgument
from core.seeding import make_rng
from model.quantization import ComplexSampleBlock
from model.link_modules.ofdm_link import ofdm_modulate, random_grid
from model.link_modules.tx_chain import (ACLR_LIMIT_BS_DB, ACLR_LIMIT_UE_DB, EVM_THRESHOLDS_PCT, TX_NUMEROLOGY,
                                         ChannelPlan, DacChainConfig, SpectrumReport, analog_output,
                                         band_power, butterworth_response, dac_convert, estimate_psd, evm_floor_pct,
                                         evm_prediction, interpolate, max_supported_modulation, measure_aclr,
                                         measure_evm, measure_spectrum, resample_to)

N_SYMBOLS = 4


def spectrum(n_bits, order):
    return measure_spectrum(DacChainConfig(n_bits=n_bits, lpf_order=order), ChannelPlan(), TX_NUMEROLOGY,
                            n_symbols=N_SYMBOLS, seed=2, spawn_key=(3, 0))


def test_chain_rates():
    cfg = DacChainConfig()
    assert cfg.dac_fs_hz == pytest.approx(983.04e6)
    assert cfg.analog_rate_hz == pytest.approx(8 * 983.04e6)
    with pytest.raises(InvalidArgument):
        DacChainConfig(zoh_oversample=2)


def test_butterworth_response():
    f = np.array([0.0, 400e6, 800e6])
    h = np.abs(butterworth_response(2, 400e6, f))
    assert h[0] == pytest.approx(1.0)
    assert 20 * math.log10(h[1]) == pytest.approx(-3.01, abs=0.01)
    assert 20 * math.log10(h[2]) == pytest.approx(-12.3, abs=0.1)
    np.testing.assert_array_equal(np.abs(butterworth_response(0, 400e6, f)), 1.0)


def test_interpolation_keeps_the_baseband():
    grid = random_grid(2, TX_NUMEROLOGY, 'QPSK', make_rng(1, 3))
    frame = ofdm_modulate(grid, TX_NUMEROLOGY)
    cfg = DacChainConfig()
    y = interpolate(frame.samples, cfg)
    assert y.size == 2 * len(frame)
    back = resample_to(ComplexSampleBlock(y, cfg.dac_fs_hz), cfg.chip_rate_hz)
    err = np.mean(np.abs(back.samples - frame.samples) ** 2) / frame.power()
    assert err < 1e-3


def test_dac_convert_checks_rate():
    block = ComplexSampleBlock(np.ones(16, dtype=complex), 1e6)
    with pytest.raises(InvalidArgument):
        dac_convert(block, DacChainConfig())


def test_zoh_holds_each_sample():
    grid = random_grid(1, TX_NUMEROLOGY, 'QPSK', make_rng(1, 4))
    frame = ofdm_modulate(grid, TX_NUMEROLOGY)
    out = dac_convert(frame, DacChainConfig(n_bits=3, interp_m=1, zoh_oversample=4))
    held = out.samples.reshape(-1, 4)
    np.testing.assert_array_equal(held, np.repeat(held[:, :1], 4, axis=1))


def test_white_noise_psd_integrates_to_its_power():
    rng = make_rng(4, 3, 99)
    fs = 1e6
    x = (rng.standard_normal(1 << 15) + 1j * rng.standard_normal(1 << 15)) / math.sqrt(2)
    report = estimate_psd(ComplexSampleBlock(x, fs), nperseg=1024)
    assert np.median(report.psd_dbm_per_hz) == pytest.approx(-60.0, abs=0.5)
    assert band_power(report, report.freqs_hz[0], report.freqs_hz[-1]) == pytest.approx(1.0, rel=0.05)
    with pytest.raises(InvalidArgument):
        estimate_psd(ComplexSampleBlock(x[:4000], fs), nperseg=1024)


def test_band_power_outside_span():
    report = SpectrumReport(freqs_hz=np.linspace(-1e9, 1e9, 101), psd_dbm_per_hz=np.zeros(101))
    with pytest.raises(InvalidArgument):
        band_power(report, -2e9, 0.0)
    with pytest.raises(InvalidArgument):
        measure_aclr(report, ChannelPlan(), 0)


def test_three_bits_unfiltered_meets_the_ue_limit():
    report = spectrum(3, 0)
    assert min(report.aclr_db[1], report.aclr_db[-1]) >= ACLR_LIMIT_UE_DB


def test_six_bits_with_filter_meets_the_bs_limit():
    report = spectrum(6, 1)
    assert min(report.aclr_db[1], report.aclr_db[-1]) >= ACLR_LIMIT_BS_DB


def test_unfiltered_image_limits_the_second_channel():
    report = spectrum(math.inf, 0)
    assert min(report.aclr_db[2], report.aclr_db[-2]) < ACLR_LIMIT_BS_DB


def test_filter_improves_aclr():
    assert spectrum(4, 2).aclr_db[1] > spectrum(4, 0).aclr_db[1]


def test_analog_output_power_is_preserved_without_filter():
    grid = random_grid(1, TX_NUMEROLOGY, 'QPSK', make_rng(1, 5))
    frame = ofdm_modulate(grid, TX_NUMEROLOGY)
    out = analog_output(frame, DacChainConfig(lpf_order=0))
    assert out.power() == pytest.approx(frame.power(), rel=0.05)


@pytest.mark.parametrize('n_bits,floor', [(4, 6.9), (5, 3.76), (6, 2.04)])
def test_predicted_evm_floor(n_bits, floor):
    assert evm_floor_pct(n_bits) == pytest.approx(floor, abs=0.05)


def test_evm_prediction_inputs():
    assert evm_prediction(0.0, 0.01, 0.0, 1.0) == pytest.approx(10.0)
    with pytest.raises(InvalidArgument):
        evm_prediction(0.1, -0.1, 0.0, 1.0)
    with pytest.raises(InvalidArgument):
        evm_prediction(0.1, 0.0, 0.0, 0.0)


def test_measured_evm_floor_matches_prediction():
    cfg = DacChainConfig(n_bits=6)
    evm = measure_evm(cfg, 0.0, '256QAM', TX_NUMEROLOGY, n_symbols=2, seed=4, spawn_key=(3, 1))
    assert evm == pytest.approx(evm_floor_pct(6, cfg), rel=0.10)


def test_rf_impairment_dominates_at_low_quality():
    cfg = DacChainConfig(n_bits=8)
    evm = measure_evm(cfg, 0.01, '256QAM', TX_NUMEROLOGY, n_symbols=2, seed=4, spawn_key=(3, 2))
    assert evm == pytest.approx(10.0, rel=0.1)


def test_supported_modulation():
    assert max_supported_modulation(2.0) == '256QAM'
    assert max_supported_modulation(6.9) == '64QAM'
    assert max_supported_modulation(3.76) == '64QAM'
    assert max_supported_modulation(20.0) is None
    assert EVM_THRESHOLDS_PCT['256QAM'] == 3.5


def test_third_order_butterworth_at_twice_the_corner():
    h = abs(butterworth_response(3, 400e6, np.array([800e6]))[0])
    assert 20 * math.log10(h) == pytest.approx(-18.1, abs=0.05)


def test_aclr_improves_with_resolution():
    aclr = [spectrum(n, 1).aclr_db[1] for n in (3, 4, 5)]
    assert aclr[0] < aclr[1] < aclr[2]


def test_evm_falls_with_resolution():
    floors = [evm_floor_pct(n) for n in range(3, 9)]
    assert all(x > y for x, y in zip(floors, floors[1:]))
    measured = [measure_evm(DacChainConfig(n_bits=n), 0.0, '256QAM', TX_NUMEROLOGY, n_symbols=2, seed=4,
                            spawn_key=(3, 3)) for n in (4, 6)]
    assert measured[0] > measured[1]
