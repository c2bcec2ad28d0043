import os

import pandas as pd
import pytest

import sim


def run(tmp_path, *args):
    return sim.main(['--out', str(tmp_path), '--no-timestamp'] + list(args))


def test_power_table_writes_results(tmp_path):
    assert run(tmp_path, '--preset', 'power-table', '--check') == 0
    results = tmp_path / 'power_table' / 'results'
    text = (results / 'power_table.csv').read_text()
    assert text.startswith('# config: ')
    assert '# seed: 1' in text
    assert '# generated' not in text
    frame = pd.read_csv(results / 'power_table.csv', comment='#')
    assert list(frame.columns) == ['arch', 'stage', 'mw']
    assert len(frame) == 32
    assert (results / 'vga_gain_range.csv').exists()
    assert os.path.exists(tmp_path / 'power_table' / 'logs' / 'check.log')


def test_unknown_key_exits_with_one(tmp_path, capsys):
    config = tmp_path / 'bad.json'
    config.write_text('{"preset": "power-table", "netwrok": {}}')
    assert run(tmp_path, '--config', str(config)) == 1
    assert 'unknown key "netwrok"' in capsys.readouterr().err


def test_simulation_error_exits_with_two(tmp_path):
    assert run(tmp_path, '--preset', 'power-table', '-o', 'power.tx.p_bb_in_dbm=40') == 2


def test_failed_check_exits_with_three(tmp_path):
    assert run(tmp_path, '--preset', 'power-table', '-o', 'power.tx.eirp_dbm=33', '--check') == 3
    # without --check the failure is only logged
    assert run(tmp_path / 'again', '--preset', 'power-table', '-o', 'power.tx.eirp_dbm=33') == 0


def test_results_do_not_depend_on_worker_count(tmp_path):
    args = ['--preset', 'aqnm-curves', '--bits', '1,2,3', '-o', 'quantization.mc_samples=20000', '--seed', '3']
    assert run(tmp_path / 'one', *args, '--jobs', '1') == 0
    assert run(tmp_path / 'two', *args, '--jobs', '2') == 0
    for name in ('alpha_table.csv', 'aqnm_curves.csv'):
        one = (tmp_path / 'one' / 'aqnm_curves' / 'results' / name).read_bytes()
        two = (tmp_path / 'two' / 'aqnm_curves' / 'results' / name).read_bytes()
        assert one == two


def test_plot_scripts_are_emitted(tmp_path):
    assert run(tmp_path, '--preset', 'aqnm-curves', '--bits', '2,3', '-o', 'quantization.mc_samples=5000') == 0
    script = (tmp_path / 'aqnm_curves' / 'results' / 'aqnm_curves_plot.py').read_text()
    assert "read_csv(os.path.join(here, 'aqnm_curves.csv'), comment='#')" in script


@pytest.mark.parametrize('argv', [['--preset', 'nope'], ['--jobs', 'x']])
def test_bad_flags_are_rejected(argv):
    with pytest.raises(SystemExit):
        sim.main(argv)
