'''
Long-term channel statistics: clustered covariances on uniform planar arrays
and the dominant-eigenvector beams computed from them.
'''
import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from core.errors import DegenerateInput, InvalidArgument

# elevation spread of every cluster, radians
ELEVATION_SPREAD = math.radians(10.0)
# azimuth spread of the dominant cluster around the geometric direction
DOMINANT_SPREAD = math.radians(5.0)


def steering_vectors(shape, az, el):
    '''half-wavelength UPA responses, one row per (az, el) pair, squared norm N'''
    nx, ny = shape
    az = np.atleast_1d(np.asarray(az, dtype=np.float64))
    el = np.atleast_1d(np.asarray(el, dtype=np.float64))
    m = np.arange(nx)
    n = np.arange(ny)
    phase = (np.pi * m[None, :, None] * (np.sin(az) * np.cos(el))[:, None, None]
             + np.pi * n[None, None, :] * np.sin(el)[:, None, None])
    return np.exp(1j * phase).reshape(az.size, nx * ny)


@dataclass(frozen=True)
class ClusterSet:
    '''single-ray clusters of one link; powers sum to one'''
    powers: np.ndarray
    a_tx: np.ndarray
    a_rx: np.ndarray

    @property
    def n_clusters(self):
        return self.powers.size

    def tx_gain(self, v):
        '''v^H Q_tx v for one beam (N,) or many beams (N, M)'''
        return self.powers @ np.abs(self.a_tx.conj() @ v) ** 2

    def rx_gain(self, u):
        return self.powers @ np.abs(self.a_rx.conj() @ u) ** 2


def draw_clusters(los_az, bs_array, ue_array, rng, mean_clusters=2.0):
    '''Poisson(mean)+1 clusters with an exponential power profile; the first one follows the LOS direction'''
    n = 1 + rng.poisson(mean_clusters)
    excess = np.concatenate([[0.0], rng.exponential(1.0, size=n - 1)])
    powers = np.exp(-excess)
    powers /= powers.sum()
    az_tx = rng.uniform(-np.pi, np.pi, size=n)
    az_rx = rng.uniform(-np.pi, np.pi, size=n)
    az_tx[0] = los_az + DOMINANT_SPREAD * rng.standard_normal()
    az_rx[0] = los_az + np.pi + DOMINANT_SPREAD * rng.standard_normal()
    el_tx = ELEVATION_SPREAD * rng.standard_normal(n)
    el_rx = ELEVATION_SPREAD * rng.standard_normal(n)
    return ClusterSet(powers=powers,
                      a_tx=steering_vectors(bs_array, az_tx, el_tx),
                      a_rx=steering_vectors(ue_array, az_rx, el_rx))


def covariance(powers, steering):
    '''sum_c p_c a_c a_c^H'''
    return (steering.T * powers) @ steering.conj()


def generate_covariances(geometry, arrays, rng, mean_clusters=2.0):
    '''
    (Q_tx, Q_rx) of one link.

    geometry is the azimuth from the BS to the UE in radians; arrays is the
    (bs_array, ue_array) pair of UPA shapes.
    '''
    bs_array, ue_array = arrays
    clusters = draw_clusters(float(geometry), bs_array, ue_array, rng, mean_clusters)
    return covariance(clusters.powers, clusters.a_tx), covariance(clusters.powers, clusters.a_rx)


def dominant_eigvec(Q, tol=1e-9):
    Q = np.asarray(Q, dtype=np.complex128)
    if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
        raise InvalidArgument('covariance must be square')
    if not np.any(np.abs(Q) > 0):
        raise DegenerateInput('zero covariance has no dominant direction')
    w, V = linalg.eigh(Q)
    top = w[-1]
    # among (near) ties take the lowest index
    idx = int(np.flatnonzero(w >= top - tol * max(abs(top), 1.0))[0])
    v = V[:, idx]
    lead = v[np.flatnonzero(np.abs(v) > 1e-12)[0]]
    v = v * (abs(lead) / lead)
    return v / np.linalg.norm(v), float(np.real(np.vdot(v, Q @ v)))


@dataclass(frozen=True)
class LongTermBeams:
    v: np.ndarray
    u: np.ndarray
    tx_gain: float
    rx_gain: float


def longterm_beams(cov_tx, cov_rx):
    '''unit-norm dominant eigenvectors and the gains they achieve'''
    v, g_tx = dominant_eigvec(cov_tx)
    u, g_rx = dominant_eigvec(cov_rx)
    return LongTermBeams(v=v, u=u, tx_gain=g_tx, rx_gain=g_rx)
