'''
Closed-form SINR under the additive quantization noise model.

All quantities are linear; dB conversion happens at the I/O boundary only.
Functions broadcast over numpy arrays so network_sim can evaluate whole
cells at once.
'''
from dataclasses import dataclass

import numpy as np

from core.errors import InvalidArgument, UnboundedResult

# finite stand-in for an infinite per-stream SNR
GAMMA_CAP = 1e12


def _cap(gamma):
    return np.minimum(np.asarray(gamma, dtype=np.float64), GAMMA_CAP)


def _scalar(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


def _check_alpha(alpha):
    a = np.asarray(alpha, dtype=np.float64)
    if np.any(a < 0) or np.any(a > 1):
        raise InvalidArgument('alpha must be in [0, 1]')
    return a


def _check_gain(G):
    g = np.asarray(G, dtype=np.float64)
    if np.any(g < 1):
        raise InvalidArgument('beamforming gain G must be >= 1')
    return g


def _check_nonneg(name, x):
    x = np.asarray(x, dtype=np.float64)
    if np.any(x < 0) or np.any(np.isnan(x)):
        raise InvalidArgument('{} must be nonnegative'.format(name))
    return x


@dataclass(frozen=True)
class LinkQuality:
    '''per-stream SNR after beamforming, receive gain and intra-cell interference ratio'''
    gamma_prime: object
    bf_gain: object = 1.0
    psi: object = 0.0

    def __post_init__(self):
        _check_nonneg('gamma_prime', self.gamma_prime)
        _check_gain(self.bf_gain)
        _check_nonneg('psi', self.psi)

    @property
    def sir(self):
        psi = np.asarray(self.psi, dtype=np.float64)
        with np.errstate(divide='ignore'):
            return _scalar(np.where(psi > 0, 1.0 / np.where(psi > 0, psi, 1.0), np.inf))


def sinr_beamformed(gammas, k):
    '''gamma'_k / (1 + sum_{j != k} gamma'_j)'''
    g = _cap(_check_nonneg('gammas', gammas)).ravel()
    if g.size == 0:
        raise InvalidArgument('at least one stream is required')
    if not 0 <= k < g.size:
        raise InvalidArgument('stream index {} out of range'.format(k))
    return float(g[k] / (1.0 + g.sum() - g[k]))


def sinr_orthogonal_quantized(gamma_bf, alpha, G=1.0):
    gamma = _cap(_check_nonneg('gamma_bf', gamma_bf))
    a = _check_alpha(alpha)
    G = _check_gain(G)
    return _scalar((1 - a) * gamma / (1 + a / G * gamma))


def sinr_saturation(alpha, G=1.0):
    '''high-SNR limit G (1 - alpha) / alpha'''
    a = _check_alpha(alpha)
    G = _check_gain(G)
    if np.any(a == 0):
        raise UnboundedResult('the SINR does not saturate at infinite resolution (alpha = 0)')
    return _scalar(G * (1 - a) / a)


def sinr_sdma_quantized(q, alpha):
    '''quantized SINR of a stream sharing the band with psi-weighted co-scheduled streams'''
    a = _check_alpha(alpha)
    gamma = _cap(q.gamma_prime)
    psi = np.asarray(q.psi, dtype=np.float64)
    G = np.asarray(q.bf_gain, dtype=np.float64)
    return _scalar((1 - a) * gamma / (1 + (1 - a) * psi * gamma + (psi + 1) * (a / G) * gamma))


def sdma_beta(q, alpha):
    a = _check_alpha(alpha)
    gamma = _cap(q.gamma_prime)
    psi = np.asarray(q.psi, dtype=np.float64)
    G = np.asarray(q.bf_gain, dtype=np.float64)
    num = 1 + (psi + 1) * gamma / G
    den = 1 + (1 - a) * psi * gamma + a * (psi + 1) * gamma / G
    return _scalar(num / den)


def sinr_quantized_general(gammas, gains, k, alpha):
    '''
    Quantized SINR of stream k when each stream j has its own receive gain G_j.

    Reduces to sinr_sdma_quantized when every G_j equals G_k.
    '''
    g = _cap(_check_nonneg('gammas', gammas)).ravel()
    G = _check_gain(gains).ravel()
    a = float(_check_alpha(alpha))
    if g.size == 0 or g.size != G.size:
        raise InvalidArgument('gammas and gains must be non-empty and of equal length')
    if not 0 <= k < g.size:
        raise InvalidArgument('stream index {} out of range'.format(k))
    others = g.sum() - g[k]
    den = 1 + (1 - a) * others + a * np.sum(g / G)
    return float((1 - a) * g[k] / den)


def quantization_noise_variance(signal_energies, noise_var, icv, alpha):
    '''alpha (1 - alpha) times the total power entering the quantizer'''
    e = _check_nonneg('signal_energies', signal_energies)
    n = float(_check_nonneg('noise_var', noise_var))
    z = float(_check_nonneg('icv', icv))
    a = float(_check_alpha(alpha))
    return a * (1 - a) * (float(np.sum(e)) + n + z)


def dual_quantizer_snr(gamma, alpha_tx, alpha_rx, osr=1.0):
    '''
    Per-subcarrier SNR with a quantizing DAC and a quantizing ADC.

    gamma is the chip-band SNR at the receiver input, referred to the
    transmitted (already quantized) power. Both quantizers spread their noise
    over the whole sampled band, osr is the FFT size over the occupied
    subcarriers.
    '''
    gamma = _cap(_check_nonneg('gamma', gamma))
    at = _check_alpha(alpha_tx)
    ar = _check_alpha(alpha_rx)
    if osr < 1:
        raise InvalidArgument('oversampling ratio must be >= 1')
    return _scalar((1 - ar) * (1 - at) * osr * gamma / (1 + gamma * (ar + at * (1 - ar))))
