import math
import itertools
import logging
from collections import OrderedDict
from dataclasses import asdict, replace

import numpy as np
import pandas as pd

import core.metrics as Metrics
import core.options as Options
import data as Data
from core.seeding import STREAM_LINK, STREAM_QUANTIZER, STREAM_SDMA_LINK, STREAM_TX, make_rng
from model.base_model import BaseExperiment
from model.quantization import (QuantizerSpec, aqnm_noise, alpha_table, bits_label, is_infinite,
                                measure_alpha, parse_bits, quantize_array)
from model.sinr_model import sinr_orthogonal_quantized, sinr_saturation
from model.power_model import power_table, vga_gain_range_db
from model.link_modules.ofdm_link import (osr_gain_db, predict_link_snr_db, predict_sdma_sinr_db,
                                          run_link_trial, run_sdma_link_trial, trial_config)
from model.link_modules.tx_chain import (ACLR_LIMIT_BS_DB, ACLR_LIMIT_UE_DB, evm_floor_pct,
                                         max_supported_modulation, measure_evm, measure_spectrum)
from model.network_modules.network_sim import drop_job
from model.network_modules.scheduler import beams_in_use

logger = logging.getLogger('base')

# published totals of the power table, mW
REFERENCE_TOTALS_MW = OrderedDict([
    (('Analog', 'Rx total'), 292.15), (('Hybrid (K=2)', 'Rx total'), 337.01),
    (('Digital', 'Rx total'), 742.35), (('Digital low-res (4 bits)', 'Rx total'), 242.85),
    (('Analog', 'Tx total'), 356.12), (('Hybrid (K=2)', 'Tx total'), 401.44),
    (('Digital', 'Tx total'), 1021.82), (('Digital low-res (4 bits)', 'Tx total'), 502.62),
])


def _bits_key(b):
    return math.inf if is_infinite(b) else b


def _sorted_bits(values):
    return sorted({parse_bits(b) for b in values}, key=_bits_key)


# pure sweep jobs ---------------------------------------------------------------

def alpha_job(n_bits, n_samples, seed, key):
    '''brute-force alpha of the optimal uniform quantizer on complex Gaussian samples'''
    rng = make_rng(seed, *key)
    y = (rng.standard_normal(n_samples) + 1j * rng.standard_normal(n_samples)) / math.sqrt(2)
    spec = QuantizerSpec.optimal(n_bits)
    q = quantize_array(y, spec)
    v = aqnm_noise(y, q, spec.alpha)
    corr = abs(np.vdot(y, v)) / math.sqrt(np.vdot(y, y).real * max(np.vdot(v, v).real, 1e-300))
    return {'alpha_mse_mc': float(np.mean(np.abs(q - y) ** 2) / np.mean(np.abs(y) ** 2)),
            'alpha_fit_mc': measure_alpha(y, q), 'noise_corr': float(corr)}


def link_job(cfg, alpha_adc, alpha_dac):
    post = run_link_trial(cfg)
    single, cascade = predict_link_snr_db(cfg, alpha_adc, alpha_dac)
    return post, single, cascade


def sdma_job(cfg, alpha_adc):
    post = run_sdma_link_trial(cfg)
    ref = run_sdma_link_trial(replace(cfg, n_adc=math.inf))
    pred = predict_sdma_sinr_db(cfg, alpha_adc)
    pred_ref = predict_sdma_sinr_db(replace(cfg, n_adc=math.inf), 0.0)
    return post, ref, pred, pred_ref


def spectrum_job(cfg, plan, num, n_symbols, nperseg, seed, key):
    return measure_spectrum(cfg, plan, num, n_symbols, nperseg, seed, key)


def evm_job(cfg, sigma_rf_sq, modulation, num, n_symbols, seed, key):
    return measure_evm(cfg, sigma_rf_sq, modulation, num, n_symbols, seed, key)


# experiments -------------------------------------------------------------------

class PowerTable(BaseExperiment):
    def run(self):
        p = self.opt['power']
        tx, rx = Options.front_end_configs(self.opt)
        rows = power_table(tx, rx, p['hybrid_streams'], p['low_res_bits'])
        frame = pd.DataFrame(rows, columns=['arch', 'stage', 'mw'])
        self.save_table('power_table', frame)
        g = vga_gain_range_db(p['p_bb_out_dbm'], rx.n_antennas, tx.il_mix_db, rx.g_lna_db,
                              p['cell_edge_rx_dbm'])
        self.save_table('vga_gain_range', pd.DataFrame([{
            'p_bb_out_dbm': p['p_bb_out_dbm'], 'n_rx': rx.n_antennas, 'il_mix_db': tx.il_mix_db,
            'g_lna_minus_il_ps_db': rx.g_lna_db, 'p_rx_dbm': p['cell_edge_rx_dbm'],
            'gain_range_db': g}]))
        for (arch, stage, mw) in rows:
            if stage.endswith('total'):
                self.log_scalar('power/{}/{}'.format(arch, stage), mw)
        logger.info('VGA gain range {:.2f} dB'.format(g))

    def check(self):
        failures = []
        frame = self.tables['power_table']
        for (arch, stage), ref in REFERENCE_TOTALS_MW.items():
            got = frame[(frame.arch == arch) & (frame.stage == stage)].mw
            ok = len(got) == 1 and Metrics.relative_error(float(got.iloc[0]), ref) <= 0.01
            self.expect(failures, ok, '{} {} = {} mW within 1% of {} mW'.format(
                arch, stage, None if got.empty else round(float(got.iloc[0]), 2), ref))
        return failures


class AqnmCurves(BaseExperiment):
    '''alpha per resolution (closed form vs Monte Carlo) and the quantized SNR curves'''
    def run(self):
        q = self.opt['quantization']
        bits = [b for b in _sorted_bits(q['bits']) if not is_infinite(b)]
        alphas = alpha_table(bits, Options.alpha_overrides(self.opt))
        sweep = Data.create_dataset('alpha', alpha_job, [
            dict(n_bits=b, n_samples=q['mc_samples'], seed=self.seed, key=(STREAM_QUANTIZER, i))
            for i, b in enumerate(bits)])
        mc = Data.create_dataloader(sweep, self.jobs)
        rows = []
        for b, m in zip(bits, mc):
            spec = QuantizerSpec.optimal(b)
            rows.append(OrderedDict([('n_bits', b), ('step', spec.step), ('alpha', spec.alpha),
                                     ('alpha_used', alphas[b])] + list(m.items())))
            self.log_scalar('aqnm/alpha_mse_mc', m['alpha_mse_mc'], b)
        self.save_table('alpha_table', pd.DataFrame(rows),
                        plot=dict(x='n_bits', y='alpha', group=['n_bits'], xlabel='bits',
                                  ylabel='alpha', style='o'))
        G = 10 ** (q['bf_gain_db'] / 10)
        curves = []
        for b in bits:
            sat = 10 * math.log10(sinr_saturation(alphas[b], G))
            for s in q['snr_db']:
                gamma = 10 ** (s / 10)
                curves.append({'snr_db': s, 'n_bits': b,
                               'sinr_db': 10 * math.log10(sinr_orthogonal_quantized(gamma, alphas[b], G)),
                               'saturation_db': sat})
        self.save_table('aqnm_curves', pd.DataFrame(curves),
                        plot=dict(x='snr_db', y='sinr_db', group='n_bits', xlabel='SNR (dB)',
                                  ylabel='quantized SINR (dB)', label='bits'))

    def check(self):
        failures = []
        n = self.opt['quantization']['mc_samples']
        tol = max(1e-3, 4 / math.sqrt(2 * n))
        for _, r in self.tables['alpha_table'].iterrows():
            self.expect(failures, abs(r.alpha_mse_mc - r.alpha) <= tol,
                        'alpha({:d}) = {:.6f} matches Monte Carlo {:.6f} within {:.1e}'.format(
                            int(r.n_bits), r.alpha, r.alpha_mse_mc, tol))
            if r.n_bits >= 2:
                self.expect(failures, r.noise_corr < 0.02,
                            'quantization noise of {:d} bits uncorrelated with the input (|corr| = {:.4f})'.format(
                                int(r.n_bits), r.noise_corr))
        return failures


class LinkValidate(BaseExperiment):
    '''single-stream OFDM link: simulated post-equalization SNR against the model'''
    def run(self):
        lk = self.opt['link']
        overrides = Options.alpha_overrides(self.opt)
        points, meta = [], []
        i = 0
        for prbs in lk['used_prbs']:
            num = Options.numerology(self.opt, prbs)
            # the DAC runs dac_extra_bits above the ADC, or matches it in the dual case
            cases = [('single', b, b + lk['dac_extra_bits'], lk['snr_db'], 1) for b in _sorted_bits(lk['adc_bits'])]
            cases += [('dual', b, b, lk['dual_snr_db'], lk['dual_trials']) for b in _sorted_bits(lk['dual_bits'])]
            cases += [('ideal', math.inf, math.inf, lk['snr_db'], 1)]
            for mode, n_adc, n_dac, snrs, trials in cases:
                alphas = alpha_table([n_adc, n_dac], overrides)
                for s, trial in itertools.product(snrs, range(trials)):
                    cfg = trial_config(num, snr_db=s, n_adc=n_adc, n_dac=n_dac, n_symbols=lk['n_symbols'],
                                       n_pilots=lk['n_pilots'], fir_taps=lk['fir_taps'],
                                       fir_guard_hz=lk['fir_guard_hz'], seed=self.seed,
                                       spawn_key=(STREAM_LINK, i))
                    points.append(dict(cfg=cfg, alpha_adc=alphas[n_adc], alpha_dac=alphas[n_dac]))
                    meta.append((mode, s, trial, n_adc, n_dac, prbs, osr_gain_db(num.fft_size, num.n_sc)))
                    i += 1
        results = Data.create_dataloader(Data.create_dataset('link', link_job, points), self.jobs)
        rows = []
        for step, ((mode, s, trial, n_adc, n_dac, prbs, osr), (post, single, cascade)) in enumerate(zip(meta, results)):
            rows.append({'mode': mode, 'snr_db': s, 'trial': trial, 'n_adc': bits_label(n_adc),
                         'n_dac': bits_label(n_dac), 'used_prbs': prbs, 'osr_gain_db': osr, 'post_eq_db': post,
                         'predicted_db': single, 'predicted_cascade_db': cascade})
            self.log_scalar('link/{}/delta_db'.format(mode), post - single, step)
        self.save_table('link_validate', pd.DataFrame(rows),
                        plot=dict(x='snr_db', y='post_eq_db', group=['mode', 'n_adc', 'used_prbs'],
                                  xlabel='input SNR (dB)', ylabel='post-eq SNR (dB)', style='o',
                                  extra_body="for key, g in df.groupby(['mode', 'n_adc', 'used_prbs']):\n"
                                             "    ax.plot(g['snr_db'], g['predicted_db'], 'k--', lw=0.8)\n"))

    def check(self):
        failures = []
        df = self.tables['link_validate']
        for n_sc, ref in ((3288, 0.95), (2400, 2.32)):
            g = osr_gain_db(4096, n_sc)
            self.expect(failures, abs(g - ref) <= 0.01, 'OSR gain for {:d} subcarriers = {:.3f} dB'.format(n_sc, g))
        single = df[(df['mode'] == 'single') & (df.snr_db <= 25)]
        if len(single):
            delta = (single.post_eq_db - single.predicted_db).abs().max()
            self.expect(failures, delta <= 0.5, 'max |simulated - predicted| = {:.3f} dB <= 0.5 dB'.format(delta))
        ideal = df[df['mode'] == 'ideal']
        if len(ideal):
            delta = (ideal.post_eq_db - ideal.snr_db - ideal.osr_gain_db).abs().max()
            self.expect(failures, delta <= 0.3,
                        'infinite resolution: post-eq = input + OSR gain within {:.3f} dB'.format(delta))
        dual = df[(df['mode'] == 'dual') & df.n_adc.isin(['3', '4'])]
        for (n, prbs), g in dual.groupby(['n_adc', 'used_prbs']):
            if g.snr_db.max() < 30:
                continue
            top = g[g.snr_db == g.snr_db.max()]
            # trials with independent carrier phases, averaged on error power
            post = -Metrics.db(np.mean(Metrics.undb(-top.post_eq_db.to_numpy())))
            offset = float(top.predicted_db.mean() - post)
            self.expect(failures, 2.3 <= offset <= 3.7,
                        'dual {} bits, {} PRBs: {:.2f} dB below the single-quantizer prediction'.format(
                            n, prbs, offset))
        return failures


class SdmaLink(BaseExperiment):
    '''two co-channel streams at the link level: quantization loss against SIR'''
    def run(self):
        lk = self.opt['link']
        sd = lk['sdma']
        num = Options.numerology(self.opt, sd['used_prbs'])
        overrides = Options.alpha_overrides(self.opt)
        points, meta = [], []
        for n in _sorted_bits(sd['bits']):
            a = alpha_table([n], overrides)[n]
            for g0 in sd['gamma0_db']:
                for sir in sd['sir_db']:
                    cfg = trial_config(num, n_adc=n, n_dac=math.inf, gamma0_db=g0, sir_db=sir,
                                       n_symbols=lk['n_symbols'], n_pilots=lk['n_pilots'],
                                       fir_taps=lk['fir_taps'], fir_guard_hz=lk['fir_guard_hz'],
                                       seed=self.seed, spawn_key=(STREAM_SDMA_LINK, len(points)))
                    points.append(dict(cfg=cfg, alpha_adc=a))
                    meta.append((sir, g0, n))
        results = Data.create_dataloader(Data.create_dataset('sdma-link', sdma_job, points), self.jobs)
        rows = []
        for (sir, g0, n), (post, ref, pred, pred_ref) in zip(meta, results):
            rows.append({'sir_db': sir, 'gamma0_db': g0, 'n_adc': bits_label(n), 'n_dac': 'inf',
                         'used_prbs': num.used_prbs, 'post_eq_db': post, 'predicted_db': pred,
                         'reference_db': ref, 'loss_db': ref - post, 'predicted_loss_db': pred_ref - pred})
        self.save_table('sdma_link', pd.DataFrame(rows),
                        plot=dict(x='sir_db', y='post_eq_db', group=['gamma0_db', 'n_adc'],
                                  xlabel='SIR (dB)', ylabel='post-eq SINR (dB)', style='o'))

    def check(self):
        failures = []
        df = self.tables['sdma_link']
        low = df[(df.gamma0_db == 0) & (df.n_adc == '3')]
        if len(low):
            self.expect(failures, low.loss_db.max() < 0.5,
                        'gamma0 = 0 dB, 3 bits: loss {:.2f} dB < 0.5 dB at every SIR'.format(low.loss_db.max()))
        high = df[(df.gamma0_db == 15) & (df.sir_db >= 30)]
        for n, lo, hi in (('3', 1.3, 2.7), ('4', -math.inf, 1.0)):
            g = high[high.n_adc == n]
            if g.empty:
                continue
            loss = float(g.loss_db.mean())
            self.expect(failures, lo <= loss <= hi, 'gamma0 = 15 dB, {} bits: loss {:.2f} dB {}'.format(
                n, loss, 'in [1.3, 2.7] dB' if n == '3' else 'below 1 dB'))
            err = float((g.loss_db - g.predicted_loss_db).abs().max())
            self.expect(failures, err <= 0.7, 'gamma0 = 15 dB, {} bits: within 0.7 dB of the model ({:.2f} dB)'.format(
                n, g.predicted_loss_db.mean()))
        l3, l4 = high[high.n_adc == '3'].loss_db, high[high.n_adc == '4'].loss_db
        if len(l3) and len(l4):
            self.expect(failures, l3.mean() > l4.mean(), '3-bit loss exceeds 4-bit loss at high SIR')
        return failures


class _CellExperiment(BaseExperiment):
    '''drops of the multi-cell network, one run per (label, NetworkConfig)'''
    def scenarios(self):
        raise NotImplementedError

    def run(self):
        nw = self.opt['network']
        bits = _sorted_bits(nw['bits'])
        overrides = {b: a for b, a in Options.alpha_overrides(self.opt).items() if b in bits}
        points, meta = [], []
        for label, n_beams, cfg in self.scenarios():
            for d in range(nw['n_drops']):
                points.append(dict(cfg=cfg, seed=self.seed, bits=bits, drop_index=d, alphas=overrides))
                meta.append((label, n_beams))
        results = Data.create_dataloader(Data.create_dataset('drops', drop_job, points), self.jobs)
        ue_rows, groups = [], OrderedDict()
        for (label, n_beams), res in zip(meta, results):
            for u in res.ues:
                row = asdict(u)
                row.update(scheduler=label, n_beams=n_beams, n_bits=bits_label(u.n_bits))
                ue_rows.append(row)
            if res.group_sizes.size:
                groups.setdefault((label, n_beams), []).append(res)
        cols = ['drop', 'ue', 'serving_bs', 'interior', 'sinr_db', 'rate_bps', 'n_bits', 'scheduler', 'n_beams']
        ues = pd.DataFrame(ue_rows, columns=cols)
        self.save_table('ue_results', ues, plot=dict(x='sinr_db', y=None, group=['scheduler', 'n_bits'],
                                                     xlabel='SINR (dB)', ylabel='CDF', kind='cdf'))
        self.save_table('cdf_summary', self.cdf_summary(ues, nw['percentiles']))
        self.save_table('network_stats', self.stats(ues))
        if groups:
            self.save_table('beam_usage', self.beam_usage(groups))

    def cdf_summary(self, ues, q):
        rows = []
        interior = ues[ues.interior]
        for (sched, n_bits), g in interior.groupby(['scheduler', 'n_bits'], sort=False):
            for metric in ('sinr_db', 'rate_bps'):
                for p, v in zip(q, Metrics.percentiles(g[metric], q)):
                    rows.append({'metric': metric, 'scheduler': sched, 'n_bits': n_bits,
                                 'percentile': p, 'value': v})
        return pd.DataFrame(rows, columns=['metric', 'scheduler', 'n_bits', 'percentile', 'value'])

    def stats(self, ues):
        rows = []
        interior = ues[ues.interior]
        for (sched, n_bits), g in interior.groupby(['scheduler', 'n_bits'], sort=False):
            row = {'scheduler': sched, 'n_bits': n_bits, 'n_ues': len(g),
                   'median_sinr_db': float(Metrics.percentiles(g.sinr_db, [50])[0]),
                   'frac_below_0db': Metrics.fraction_below(g.sinr_db, 0.0),
                   'frac_above_1gbps': Metrics.fraction_above(g.rate_bps, 1e9),
                   'mean_rate_bps': float(g.rate_bps.mean())}
            rows.append(row)
            self.log_scalar('network/{}/{}/median_sinr_db'.format(sched, n_bits), row['median_sinr_db'])
            self.log_scalar('network/{}/{}/frac_above_1gbps'.format(sched, n_bits), row['frac_above_1gbps'])
        return pd.DataFrame(rows)

    def beam_usage(self, groups):
        rows = []
        for (label, n_beams), results in groups.items():
            sizes = np.concatenate([r.group_sizes for r in results])
            cand = np.concatenate([r.group_candidates for r in results])
            hist = beams_in_use(sizes[cand >= 2], n_beams)
            for k, count in enumerate(hist, start=1):
                rows.append({'scheduler': label, 'n_beams_max': n_beams, 'group_size': k,
                             'count': int(count), 'fraction': count / max(hist.sum(), 1)})
        return pd.DataFrame(rows)

    def check_dominance(self, failures):
        ues = self.tables['ue_results']
        bits = [bits_label(b) for b in _sorted_bits(self.opt['network']['bits'])]
        for sched, g in ues.groupby('scheduler', sort=False):
            wide = g.pivot(index=['drop', 'ue'], columns='n_bits', values='sinr_db')
            ok = True
            for lo, hi in zip(bits, bits[1:]):
                a, b = wide[lo].to_numpy(), wide[hi].to_numpy()
                both = ~np.isnan(a) & ~np.isnan(b)
                ok &= bool(np.all(a[both] <= b[both] + 1e-9)) and bool(np.array_equal(np.isnan(a), np.isnan(b)))
            self.expect(failures, ok, '{}: per-UE SINR nondecreasing in resolution'.format(sched))

    def loss_db(self, sched, n_bits, q):
        ues = self.tables['ue_results']
        g = ues[ues.interior & (ues.scheduler == sched)]
        return Metrics.percentile_loss_db(g[g.n_bits == 'inf'].sinr_db, g[g.n_bits == n_bits].sinr_db, q)


class CellOfdma(_CellExperiment):
    def scenarios(self):
        cfg = Options.network_config(self.opt)
        return [(cfg.scheduler, 1, cfg)]

    def check(self):
        failures = []
        self.check_dominance(failures)
        bits = set(self.tables['ue_results'].n_bits)
        sched = self.opt['network']['scheduler']
        if {'inf', '3'} <= bits and sched == 'OFDMA_PF':
            med = self.loss_db(sched, '3', 50)
            p90 = self.loss_db(sched, '3', 90)
            self.expect(failures, 0.5 <= med <= 2.0, '3-bit median SINR loss {:.2f} dB in [0.5, 2]'.format(med))
            self.expect(failures, 2.0 <= p90 <= 6.0, '3-bit 90th-percentile loss {:.2f} dB in [2, 6]'.format(p90))
        return failures


class CellSdma(_CellExperiment):
    def scenarios(self):
        out = [('OFDMA_PF', 1, Options.network_config(self.opt, scheduler='OFDMA_PF'))]
        for nb in self.opt['network']['sdma_beams']:
            out.append(('SDMA_GREEDY_{:d}'.format(nb), nb,
                        Options.network_config(self.opt, scheduler='SDMA_GREEDY', n_beams_max=nb)))
        return out

    def check(self):
        failures = []
        self.check_dominance(failures)
        stats = self.tables['network_stats']
        ref_bits = 'inf' if 'inf' in set(stats.n_bits) else stats.n_bits.iloc[0]

        def frac(sched):
            s = stats[(stats.scheduler == sched) & (stats.n_bits == ref_bits)]
            return float(s.frac_above_1gbps.iloc[0]) if len(s) else math.nan

        if 4 in self.opt['network']['sdma_beams']:
            base, sdma = frac('OFDMA_PF'), frac('SDMA_GREEDY_4')
            ok = sdma >= 5 * base and sdma > 0
            self.expect(failures, ok, 'users above 1 Gbps: SDMA 4 beams {:.3f} vs OFDMA {:.3f} (>= 5x)'.format(
                sdma, base))
        if 'beam_usage' in self.tables and 2 in self.opt['network']['sdma_beams']:
            u = self.tables['beam_usage']
            u = u[(u.n_beams_max == 2) & (u.group_size == 2)]
            f = float(u.fraction.iloc[0]) if len(u) else math.nan
            self.expect(failures, f > 0.9, 'SDMA 2 beams: both beams used in {:.3f} of instances (> 0.9)'.format(f))
        return failures


class TxPsd(BaseExperiment):
    '''transmit PSD after the DAC chain, normalized to 0 dBm total power'''
    def run(self):
        tx = self.opt['tx']
        num = Options.numerology(self.opt, section='tx')
        plan = Options.channel_plan(self.opt)
        points, meta = [], []
        for b in _sorted_bits(tx['psd_bits']):
            for order in tx['psd_lpf_order']:
                points.append(dict(cfg=Options.dac_chain(self.opt, b, order), plan=plan, num=num,
                                   n_symbols=tx['n_symbols'], nperseg=tx['nperseg'], seed=self.seed,
                                   key=(STREAM_TX, len(points))))
                meta.append((b, order))
        reports = Data.create_dataloader(Data.create_dataset('tx-psd', spectrum_job, points), self.jobs)
        frames, aclr = [], []
        for (b, order), rep in zip(meta, reports):
            f = rep.freqs_hz
            total = float(np.sum(10 ** (rep.psd_dbm_per_hz / 10)) * (f[1] - f[0]))
            frames.append(pd.DataFrame({'n_bits': bits_label(b), 'lpf_order': order, 'freq_offset_hz': f,
                                        'psd_db': rep.psd_dbm_per_hz - 10 * math.log10(total)}))
            for i, v in sorted(rep.aclr_db.items()):
                aclr.append({'n_bits': bits_label(b), 'lpf_order': order, 'adj_index': i, 'aclr_db': v})
        self.save_table('tx_psd', pd.concat(frames, ignore_index=True),
                        plot=dict(x='freq_offset_hz', y='psd_db', group=['n_bits', 'lpf_order'],
                                  xlabel='frequency offset (Hz)', ylabel='PSD (dBm/Hz)', style='-'))
        self.save_table('tx_psd_aclr', pd.DataFrame(aclr))


class AclrSweep(BaseExperiment):
    def run(self):
        tx = self.opt['tx']
        num = Options.numerology(self.opt, section='tx')
        plan = Options.channel_plan(self.opt)
        points, meta = [], []
        for b in _sorted_bits(tx['aclr_bits']):
            for order in tx['lpf_orders']:
                points.append(dict(cfg=Options.dac_chain(self.opt, b, order), plan=plan, num=num,
                                   n_symbols=tx['n_symbols'], nperseg=tx['nperseg'], seed=self.seed,
                                   key=(STREAM_TX, len(points))))
                meta.append((b, order))
        reports = Data.create_dataloader(Data.create_dataset('aclr', spectrum_job, points), self.jobs)
        rows = []
        for (b, order), rep in zip(meta, reports):
            for i in range(1, plan.n_adjacent + 1):
                v = min(rep.aclr_db[i], rep.aclr_db[-i])
                rows.append({'n_bits': bits_label(b), 'lpf_order': order, 'adj_index': i, 'aclr_db': v,
                             'limit_bs_db': ACLR_LIMIT_BS_DB, 'limit_ue_db': ACLR_LIMIT_UE_DB})
                self.log_scalar('aclr/{}bits/order{:d}/adj{:d}'.format(bits_label(b), order, i), v)
        self.save_table('aclr_sweep', pd.DataFrame(rows),
                        plot=dict(x='n_bits', y='aclr_db', group=['lpf_order', 'adj_index'],
                                  xlabel='DAC bits', ylabel='ACLR (dB)', label='order, adj'))

    def check(self):
        failures = []
        df = self.tables['aclr_sweep']
        finite = df[df.n_bits != 'inf'].assign(n=lambda d: d.n_bits.astype(int))
        for _, r in finite[(finite.lpf_order == 1) & (finite.adj_index == 1) & (finite.n >= 4)].iterrows():
            self.expect(failures, r.aclr_db >= ACLR_LIMIT_BS_DB, '{:d} bits, order 1: ACLR1 {:.2f} dB >= {:.0f} dB'.format(
                r.n, r.aclr_db, ACLR_LIMIT_BS_DB))
        for _, r in finite[(finite.lpf_order == 0) & (finite.adj_index == 1) & (finite.n >= 3)].iterrows():
            self.expect(failures, r.aclr_db >= ACLR_LIMIT_UE_DB, '{:d} bits, no filter: ACLR1 {:.2f} dB >= {:.0f} dB'.format(
                r.n, r.aclr_db, ACLR_LIMIT_UE_DB))
        img = df[(df.n_bits == 'inf') & (df.lpf_order == 0) & (df.adj_index == 2)]
        if len(img):
            v = float(img.aclr_db.iloc[0])
            self.expect(failures, v < ACLR_LIMIT_BS_DB,
                        'infinite resolution, no filter: image keeps ACLR2 ({:.2f} dB) below 28 dB'.format(v))
        return failures


class EvmSweep(BaseExperiment):
    '''transmit EVM against RF impairment, and the quantization floor per resolution'''
    def run(self):
        tx = self.opt['tx']
        num = Options.numerology(self.opt, section='tx')
        mod = tx['evm_modulation']
        points, meta = [], []
        for b in _sorted_bits(tx['evm_bits']):
            cfg = Options.dac_chain(self.opt, b, 1)
            for inv in [None] + list(tx['inv_sigma_rf_db']):
                sigma = 0.0 if inv is None else 10 ** (-inv / 10)
                points.append(dict(cfg=cfg, sigma_rf_sq=sigma, modulation=mod, num=num,
                                   n_symbols=tx['evm_symbols'], seed=self.seed, key=(STREAM_TX, len(points))))
                meta.append((b, inv, sigma, cfg))
        evms = Data.create_dataloader(Data.create_dataset('evm', evm_job, points), self.jobs)
        rows, floors = [], []
        for (b, inv, sigma, cfg), evm in zip(meta, evms):
            pred = evm_floor_pct(b, cfg, num, sigma)
            if inv is None:
                floors.append({'n_bits': bits_label(b), 'evm_floor_pct': evm, 'predicted_pct': pred,
                               'max_modulation': max_supported_modulation(evm, tx['evm_thresholds_pct']) or 'none'})
            else:
                rows.append({'n_bits': bits_label(b), 'inv_sigma_rf_db': inv, 'evm_pct': evm, 'predicted_pct': pred})
        self.save_table('evm_sweep', pd.DataFrame(rows),
                        plot=dict(x='inv_sigma_rf_db', y='evm_pct', group='n_bits',
                                  xlabel='1/sigma_RF^2 (dB)', ylabel='EVM (%)', label='bits'))
        self.save_table('evm_floor', pd.DataFrame(floors))

    def check(self):
        failures = []
        th = self.opt['tx']['evm_thresholds_pct']
        fl = self.tables['evm_floor'].set_index('n_bits')
        for n, r in fl.iterrows():
            err = Metrics.relative_error(r.evm_floor_pct, r.predicted_pct)
            self.expect(failures, err <= 0.10, '{} bits: EVM floor {:.2f}% vs predicted {:.2f}% (within 10%)'.format(
                n, r.evm_floor_pct, r.predicted_pct))
        for n, mod, passes in (('4', '64QAM', True), ('6', '256QAM', True), ('5', '256QAM', False)):
            if n in fl.index and mod in th:
                ok = (fl.loc[n, 'evm_floor_pct'] <= th[mod]) == passes
                self.expect(failures, ok, '{} bits {} the {} limit ({:.1f}%)'.format(
                    n, 'meets' if passes else 'misses', mod, th[mod]))
        return failures


EXPERIMENTS = OrderedDict([
    ('power-table', PowerTable), ('aqnm-curves', AqnmCurves), ('link-validate', LinkValidate),
    ('sdma-link', SdmaLink), ('cell-ofdma', CellOfdma), ('cell-sdma', CellSdma),
    ('tx-psd', TxPsd), ('aclr-sweep', AclrSweep), ('evm-sweep', EvmSweep),
])
