import pytest

from core.errors import InfeasibleDrive, InvalidArgument
from model.power_model import (ArchSpec, ConverterSpec, LpfSpec, RxFrontEndConfig, TxFrontEndConfig,
                               converter_power_mw, front_end_budget, lna_gain_db, lpf_power_mw,
                               pa_input_power_dbm, pa_output_power_dbm, power_table, received_power_dbm,
                               rx_rffe_power_mw, tx_rffe_power_mw, vga_gain_range_db, vga_power_mw)

TOTALS = {('Analog', 'Rx total'): 292.15, ('Hybrid (K=2)', 'Rx total'): 337.01,
          ('Digital', 'Rx total'): 742.35, ('Digital low-res (4 bits)', 'Rx total'): 242.85,
          ('Analog', 'Tx total'): 356.12, ('Hybrid (K=2)', 'Tx total'): 401.44,
          ('Digital', 'Tx total'): 1021.82, ('Digital low-res (4 bits)', 'Tx total'): 502.62}


@pytest.fixture
def table():
    rows = power_table(TxFrontEndConfig(), RxFrontEndConfig(), 2, 4)
    return {(arch, stage): mw for arch, stage, mw in rows}


def test_totals_match_reference(table):
    for key, ref in TOTALS.items():
        assert table[key] == pytest.approx(ref, rel=0.01), key


def test_stages_sum_to_total(table):
    for arch in ('Analog', 'Hybrid (K=2)', 'Digital'):
        tx = table[(arch, 'Tx RFFE')] + table[(arch, 'Tx LPF')] + table[(arch, 'Tx DAC')]
        assert tx == pytest.approx(table[(arch, 'Tx total')])
        rx = table[(arch, 'Rx RFFE')] + table[(arch, 'Rx VGA')] + table[(arch, 'Rx ADC')]
        assert rx == pytest.approx(table[(arch, 'Rx total')])


def test_low_resolution_digital_beats_analog_on_receive(table):
    assert table[('Digital low-res (4 bits)', 'Rx total')] < table[('Analog', 'Rx total')]
    assert table[('Digital', 'Rx total')] > table[('Hybrid (K=2)', 'Rx total')]


def test_converter_power_doubles_per_bit():
    spec = ConverterSpec(65.0, 1e9, 4)
    one = converter_power_mw(spec, 1)
    assert one == pytest.approx(2 * 65e-12 * 1e9 * 16)
    assert converter_power_mw(ConverterSpec(65.0, 1e9, 5), 1) == pytest.approx(2 * one)
    assert converter_power_mw(spec, 16) == pytest.approx(16 * one)


def test_lpf_power():
    assert lpf_power_mw(LpfSpec(1.3, 2, 0.4), 3) == pytest.approx(3 * 1.3 * 2 * 0.4)
    assert lpf_power_mw(LpfSpec(order=0), 16) == 0.0


def test_receive_front_end_power():
    rx = RxFrontEndConfig()
    p_lna = 10.0 / (6.5 * (10 ** 0.3 - 1))
    assert rx_rffe_power_mw(rx, ArchSpec.digital(16)) == pytest.approx(16 * p_lna + 16 * 10.0)
    # phase shifter loss is made up by 10 dB more LNA gain, one LO only
    assert rx_rffe_power_mw(rx, ArchSpec.analog()) == pytest.approx(16 * 10 * p_lna + 10.0)
    with pytest.raises(InvalidArgument):
        rx_rffe_power_mw(RxFrontEndConfig(nf_lna_db=0.0), ArchSpec.digital(16))


def test_vga_power_scales_with_streams():
    rx = RxFrontEndConfig()
    one = vga_power_mw(rx, ArchSpec.analog())
    assert vga_power_mw(rx, ArchSpec.digital(16)) == pytest.approx(16 * one)
    assert vga_power_mw(RxFrontEndConfig(vga_gain_range_db=72.0), ArchSpec.analog()) == pytest.approx(one / 10)


def test_received_power():
    assert received_power_dbm(33.0, 120.0) == pytest.approx(-87.0)


def test_phase_shifters_cost_drive_and_lna_gain():
    cfg = TxFrontEndConfig()
    assert pa_input_power_dbm(cfg, ArchSpec.analog()) == pytest.approx(
        pa_input_power_dbm(cfg, ArchSpec.digital(16)) - cfg.il_ps_db)
    rx = RxFrontEndConfig()
    assert lna_gain_db(rx, ArchSpec.hybrid(2)) == rx.g_lna_db + rx.il_ps_db
    assert lna_gain_db(rx, ArchSpec.digital(16)) == rx.g_lna_db


def test_pa_output_level():
    assert pa_output_power_dbm(TxFrontEndConfig()) == pytest.approx(30 - 20 * 1.2041199826559248)


def test_infeasible_drive():
    cfg = TxFrontEndConfig(p_bb_in_dbm=40.0)
    with pytest.raises(InfeasibleDrive):
        tx_rffe_power_mw(cfg, ArchSpec.digital(16))


def test_arch_validation():
    with pytest.raises(InvalidArgument):
        ArchSpec('Optical', 1)
    with pytest.raises(InvalidArgument):
        ArchSpec('Analog', 2)
    with pytest.raises(InvalidArgument):
        front_end_budget(TxFrontEndConfig(), RxFrontEndConfig(), ArchSpec.digital(8))
    with pytest.raises(InvalidArgument):
        TxFrontEndConfig(eta_pae=0.0)
    with pytest.raises(InvalidArgument):
        RxFrontEndConfig(nf_lna_db=3.0, bw_ghz=0.0)


def test_vga_gain_range():
    # 10 dBm ADC drive, 16 antennas, 10 dB net LNA gain, 6 dB mixer loss, cell edge at -87 dBm
    g = vga_gain_range_db(10.0, 16, 6.0, 10.0, -87.0)
    assert g == pytest.approx(80.96, abs=0.01)
    assert g == pytest.approx(82.0, abs=1.5)
