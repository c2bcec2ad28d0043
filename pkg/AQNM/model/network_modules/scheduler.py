'''
Per-BS downlink schedulers: proportional-fair OFDMA, proportional-fair TDMA
and greedy SDMA user grouping.
'''
from dataclasses import dataclass, field

import numpy as np

from model.sinr_model import LinkQuality, sinr_sdma_quantized

# cold-start value of the served-bits history
PF_EPSILON_BITS = 1.0


def rate_from_sinr(sinr_linear, w_hz, cfg):
    '''(1 - overhead) w min(max SE, log2(1 + sinr / shannon loss))'''
    sinr = np.maximum(np.asarray(sinr_linear, dtype=np.float64), 0.0)
    se = np.minimum(cfg.max_se_bps_hz, np.log2(1 + sinr / 10 ** (cfg.shannon_loss_db / 10)))
    r = (1 - cfg.overhead) * np.asarray(w_hz, dtype=np.float64) * se
    return float(r) if r.ndim == 0 else r


def spectral_efficiency(sinr_linear, cfg):
    return rate_from_sinr(sinr_linear, 1.0, cfg) / (1 - cfg.overhead)


@dataclass
class SchedulerState:
    served_bits: np.ndarray
    tti_index: int = 0

    @classmethod
    def cold(cls, n_ues):
        return cls(served_bits=np.full(n_ues, PF_EPSILON_BITS))

    def pf_weights(self, spectral_effs, ues=None):
        r = self.served_bits if ues is None else self.served_bits[ues]
        return np.asarray(spectral_effs, dtype=np.float64) / r

    def record(self, ues, bits):
        bits = np.asarray(bits, dtype=np.float64)
        if np.any(bits < 0):
            raise ValueError('served bits cannot decrease')
        np.add.at(self.served_bits, ues, bits)

    def advance(self):
        self.tti_index += 1


def schedule_ofdma_pf(state, spectral_effs, ues=None, bw_hz=1.0):
    '''bandwidth shares proportional to rho / served bits, summing to bw_hz'''
    rho = np.asarray(spectral_effs, dtype=np.float64)
    if rho.size == 0:
        return np.empty(0)
    w = state.pf_weights(rho, ues)
    if not np.any(w > 0):
        w = np.ones_like(w)
    shares = w / w.sum() * bw_hz
    # put the rounding residue on the largest share so the sum is exact
    i = int(np.argmax(shares))
    shares[i] = bw_hz - (shares.sum() - shares[i])
    return shares


def schedule_tdma_pf(state, spectral_effs, ues=None):
    '''position of the single UE with the highest PF weight, or None'''
    rho = np.asarray(spectral_effs, dtype=np.float64)
    if rho.size == 0:
        return None
    return int(np.argmax(state.pf_weights(rho, ues)))


@dataclass
class SdmaGroupModel:
    '''
    Sum-rate model of one BS's candidate UEs.

    gamma_full[i] is the SNR of candidate i at full BS power, tx_gain[i, j]
    the gain of the beam of candidate j towards candidate i, rx_gain[i] its
    receive beamforming gain. Power is split equally across the group.
    '''
    gamma_full: np.ndarray
    tx_gain: np.ndarray
    rx_gain: np.ndarray
    cfg: object
    alpha: float = 0.0
    _cache: dict = field(default_factory=dict, repr=False)

    def group_sinr(self, group):
        g = np.asarray(group, dtype=int)
        T = self.tx_gain[np.ix_(g, g)]
        own = np.diag(T)
        psi = (T.sum(axis=1) - own) / own
        q = LinkQuality(gamma_prime=self.gamma_full[g] / g.size,
                        bf_gain=np.maximum(self.rx_gain[g], 1.0), psi=psi)
        return np.atleast_1d(sinr_sdma_quantized(q, self.alpha))

    def sum_rate(self, group):
        key = tuple(group)
        if key not in self._cache:
            self._cache[key] = float(np.sum(spectral_efficiency(self.group_sinr(group), self.cfg)))
        return self._cache[key]


def schedule_sdma_greedy(state, model, n_beams_max, ues=None):
    '''
    Candidate positions of the scheduled group.

    The first member is the max-PF-weight UE; the others are tried in
    decreasing PF weight and admitted only if the modeled sum rate increases.
    '''
    n = model.gamma_full.size
    if n == 0:
        return []
    rho = spectral_efficiency(model.gamma_full, model.cfg)
    order = np.argsort(-state.pf_weights(rho, ues), kind='stable')
    group = [int(order[0])]
    best = model.sum_rate(group)
    for cand in order[1:]:
        if len(group) >= n_beams_max:
            break
        trial = group + [int(cand)]
        rate = model.sum_rate(trial)
        if rate > best:
            group, best = trial, rate
    return group


def beams_in_use(group_sizes, n_beams_max):
    '''histogram of group sizes 1..n_beams_max'''
    sizes = np.asarray(group_sizes, dtype=np.int64)
    return np.bincount(sizes[sizes > 0] - 1, minlength=n_beams_max)[:n_beams_max]

