'''
Multi-cell downlink Monte Carlo under the quantization noise model.

Schedulers run on nominal spectral efficiencies (infinite resolution, mean
inter-cell interference), so a drop produces the same schedule for every ADC
resolution. All resolutions are therefore evaluated in one pass over the
TTIs, and per-UE results for n bits are bounded by those for n + 1 bits.
'''
import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from core.seeding import STREAM_NETWORK, make_rng
from model.quantization import alpha_of, bits_label, parse_bits
from model.sinr_model import LinkQuality, sinr_orthogonal_quantized, sinr_sdma_quantized
from model.network_modules.channel import covariance, draw_clusters, longterm_beams
from model.network_modules.layout import generate_layout
from model.network_modules.scheduler import (SchedulerState, SdmaGroupModel, rate_from_sinr,
                                             schedule_ofdma_pf, schedule_sdma_greedy,
                                             schedule_tdma_pf, spectral_efficiency)

logger = logging.getLogger('base')

__all__ = ['UeResult', 'DropResult', 'NetworkChannels', 'build_channels', 'simulate_drop',
           'run_drop', 'drop_job', 'rate_from_sinr']


@dataclass(frozen=True)
class UeResult:
    sinr_db: float
    rate_bps: float
    serving_bs: int
    n_bits: float
    drop: int = 0
    ue: int = 0
    scheduler: str = 'OFDMA_PF'
    interior: bool = True


@dataclass
class NetworkChannels:
    '''
    Long-term gains of one drop.

    tx_gain[k, m]: gain towards UE k of the beam its BS would point at UE m,
    rx_gain[k, b]: gain of UE k's receive beam on the link from BS b.
    '''
    tx_gain: np.ndarray
    rx_gain: np.ndarray
    beams: list

    @property
    def own_tx_gain(self):
        return np.diag(self.tx_gain).copy()


@dataclass
class DropResult:
    drop: int
    bits: list
    ues: List[UeResult]
    group_sizes: np.ndarray
    group_candidates: np.ndarray
    trace: Optional[list] = field(default=None, repr=False)


def build_channels(drop, cfg, rng):
    U, B = drop.n_ue, drop.n_bs
    finite = np.isfinite(drop.pathloss_db)
    rel = drop.ue_positions[:, None, :] - drop.bs_positions[None, :, :]
    los_az = np.arctan2(rel[..., 1], rel[..., 0])
    clusters = {}
    for k in range(U):
        for b in np.flatnonzero(finite[k]):
            clusters[(k, int(b))] = draw_clusters(los_az[k, b], cfg.bs_array, cfg.ue_array, rng,
                                                  cfg.mean_clusters)
    beams = [None] * U
    for k in range(U):
        s = int(drop.association[k])
        if s < 0:
            continue
        c = clusters[(k, s)]
        beams[k] = longterm_beams(covariance(c.powers, c.a_tx), covariance(c.powers, c.a_rx))
    rx_gain = np.zeros((U, B))
    tx_gain = np.zeros((U, U))
    for (k, b), c in clusters.items():
        if beams[k] is not None:
            rx_gain[k, b] = c.rx_gain(beams[k].u)
    for b in range(B):
        served = drop.served_by(b)
        if served.size == 0:
            continue
        V = np.stack([beams[m].v for m in served], axis=1)
        for k in np.flatnonzero(finite[:, b]):
            tx_gain[k, served] = clusters[(int(k), b)].tx_gain(V)
    return NetworkChannels(tx_gain=tx_gain, rx_gain=rx_gain, beams=beams)


def _coupling(drop, ch):
    '''C[k, m]: power at UE k per unit transmit power on the beam towards UE m'''
    ues = np.flatnonzero(drop.association >= 0)
    U = drop.n_ue
    C = np.zeros((U, U))
    if ues.size == 0:
        return C
    pl_lin = np.where(np.isfinite(drop.pathloss_db), 10 ** (-drop.pathloss_db / 10), 0.0)
    b_m = drop.association[ues]
    C[:, ues] = ch.tx_gain[:, ues] * ch.rx_gain[:, b_m] * pl_lin[:, b_m]
    return C


def simulate_drop(cfg, seed=None, bits=None, drop_index=0, alphas=None, trace=False):
    '''
    One drop, every resolution in ``bits`` at once.

    alphas optionally maps bit counts to alpha overrides.
    '''
    seed = cfg.seed if seed is None else seed
    bits = [parse_bits(b) for b in (bits if bits is not None else [cfg.n_adc_bits])]
    alpha = np.array([(alphas or {}).get(b, alpha_of(b)) for b in bits])
    rng = make_rng(seed, STREAM_NETWORK, drop_index)
    drop = generate_layout(cfg, rng)
    ch = build_channels(drop, cfg, rng)

    U = drop.n_ue
    assoc = drop.association
    active = assoc >= 0
    P, N, W = cfg.tx_power_mw, cfg.noise_mw, cfg.bw_hz
    C = _coupling(drop, ch)
    own = np.diag(C).copy()
    other = assoc[:, None] != assoc[None, :]
    C_other = C * other
    G = np.array([max(b.rx_gain, 1.0) if b is not None else 1.0 for b in ch.beams])
    per_cell = {b: drop.served_by(b) for b in range(drop.n_bs)}
    per_cell = {b: m for b, m in per_cell.items() if m.size}

    # nominal SNR: every other BS spreads its power evenly over its own UEs
    pw_nom = np.zeros(U)
    for b, m in per_cell.items():
        pw_nom[m] = P / m.size
    gamma_nom = np.where(active, P * own / (N + C_other @ pw_nom), 0.0)
    rho_nom = spectral_efficiency(gamma_nom, cfg)

    state = SchedulerState.cold(U)
    sinr_sum = np.zeros((len(bits), U))
    served_bits = np.zeros((len(bits), U))
    n_sched = np.zeros(U, dtype=np.int64)
    sizes, candidates, records = [], [], []
    sched_name = cfg.scheduler

    for t in range(cfg.n_ttis):
        pw = np.zeros(U)
        share = np.zeros(U)
        psi = np.zeros(U)
        est_rate = np.zeros(U)
        scheduled = np.zeros(U, dtype=bool)
        for b, m in per_cell.items():
            if sched_name == 'OFDMA_PF':
                w = schedule_ofdma_pf(state, rho_nom[m], m, W)
                pw[m] = P * w / W
                share[m] = w
                scheduled[m] = True
                est_rate[m] = rate_from_sinr(gamma_nom[m], w, cfg)
            elif sched_name == 'TDMA_PF':
                k = m[schedule_tdma_pf(state, rho_nom[m], m)]
                pw[k] = P
                share[k] = W
                scheduled[k] = True
                est_rate[k] = rate_from_sinr(gamma_nom[k], W, cfg)
            else:
                # groups are chosen at alpha = 0 so every resolution shares one schedule
                model = SdmaGroupModel(gamma_full=gamma_nom[m], tx_gain=ch.tx_gain[np.ix_(m, m)],
                                       rx_gain=G[m], cfg=cfg)
                grp = schedule_sdma_greedy(state, model, cfg.n_beams_max, m)
                k = m[grp]
                pw[k] = P / len(grp)
                share[k] = W
                scheduled[k] = True
                T = ch.tx_gain[np.ix_(k, k)]
                psi[k] = (T.sum(axis=1) - np.diag(T)) / np.diag(T)
                est_rate[k] = rate_from_sinr(model.group_sinr(grp), W, cfg)
                if drop.interior_bs[b]:
                    sizes.append(len(grp))
                    candidates.append(m.size)

        k = np.flatnonzero(scheduled)
        if k.size == 0:
            state.advance()
            continue
        interference = C_other @ pw
        # OFDMA: constant PSD, so the SINR does not depend on the share
        sig = P * own[k] if sched_name == 'OFDMA_PF' else pw[k] * own[k]
        gamma = sig / (N + interference[k])
        for i, a in enumerate(alpha):
            if sched_name == 'SDMA_GREEDY':
                s = sinr_sdma_quantized(LinkQuality(gamma, G[k], psi[k]), a)
            else:
                s = sinr_orthogonal_quantized(gamma, a, G[k])
            s = np.atleast_1d(s)
            sinr_sum[i, k] += s
            served_bits[i, k] += rate_from_sinr(s, share[k], cfg) * cfg.tti_s
            if trace:
                records.append({'tti': t, 'bits': bits[i], 'ue': k.copy(), 'gamma': gamma.copy(),
                                'psi': psi[k].copy(), 'G': G[k].copy(), 'sinr': s.copy(),
                                'share': share[k].copy()})
        n_sched[k] += 1
        state.record(k, est_rate[k] * cfg.tti_s)
        state.advance()

    duration = cfg.n_ttis * cfg.tti_s
    interior = np.zeros(U, dtype=bool)
    interior[drop.interior_ues()] = True
    results = []
    for i, b in enumerate(bits):
        with np.errstate(divide='ignore', invalid='ignore'):
            mean_sinr = np.where(n_sched > 0, sinr_sum[i] / np.maximum(n_sched, 1), np.nan)
            sinr_db = 10 * np.log10(mean_sinr)
        for u in np.flatnonzero(active):
            results.append(UeResult(sinr_db=float(sinr_db[u]), rate_bps=float(served_bits[i, u] / duration),
                                    serving_bs=int(assoc[u]), n_bits=b, drop=drop_index, ue=int(u),
                                    scheduler=sched_name, interior=bool(interior[u])))
    logger.debug('drop {:d}: {:d} UEs, {} bits, scheduler {:s}'.format(
        drop_index, int(active.sum()), ','.join(bits_label(b) for b in bits), sched_name))
    return DropResult(drop=drop_index, bits=bits, ues=results,
                      group_sizes=np.asarray(sizes, dtype=np.int64),
                      group_candidates=np.asarray(candidates, dtype=np.int64),
                      trace=records if trace else None)


def run_drop(cfg, seed=None, drop_index=0):
    '''per-UE results of one drop at the configured ADC resolution'''
    return simulate_drop(cfg, seed, [cfg.n_adc_bits], drop_index).ues


def drop_job(cfg, seed, bits, drop_index, alphas=None):
    return simulate_drop(cfg, seed, bits, drop_index, alphas)
