'''hexagonal multi-cell layout, UE drops and the urban mmWave pathloss model'''
import math
import logging
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from core.errors import InvalidArgument
from core.seeding import make_rng
from model.quantization import INF_BITS

logger = logging.getLogger('base')

LOS, NLOS, OUTAGE = 0, 1, 2
SPEED_OF_LIGHT = 299792458.0

SCHEDULERS = ('OFDMA_PF', 'SDMA_GREEDY', 'TDMA_PF')


@dataclass(frozen=True)
class PathlossParams:
    los_a: float = 61.4
    los_b: float = 2.0
    los_sigma_db: float = 5.8
    nlos_a: float = 72.0
    nlos_b: float = 2.92
    nlos_sigma_db: float = 8.7
    los_decay_m: float = 67.1
    outage_decay_m: float = 30.0
    outage_offset: float = 5.2


@dataclass(frozen=True)
class NetworkConfig:
    area_m: float = 1000.0
    cell_radius_m: float = 100.0
    fc_hz: float = 28e9
    bw_hz: float = 1e9
    tx_power_dbm: float = 35.0
    noise_figure_db: float = 8.0
    # penetration, body and implementation losses on every BS-UE link
    extra_loss_db: float = 14.0
    noise_psd_dbm_hz: float = -174.0
    max_se_bps_hz: float = 7.4063
    bs_array: Tuple[int, int] = (8, 8)
    ue_array: Tuple[int, int] = (4, 4)
    tti_s: float = 125e-6
    overhead: float = 0.20
    shannon_loss_db: float = 3.0
    mean_ues_per_cell: float = 10.0
    ue_drop: str = 'poisson'
    min_distance_m: float = 10.0
    n_adc_bits: float = INF_BITS
    n_beams_max: int = 4
    scheduler: str = 'OFDMA_PF'
    n_ttis: int = 200
    mean_clusters: float = 2.0
    seed: int = 0
    pathloss: PathlossParams = field(default_factory=PathlossParams)

    def __post_init__(self):
        errors = []
        for name in ('area_m', 'cell_radius_m', 'fc_hz', 'bw_hz', 'max_se_bps_hz', 'tti_s',
                     'mean_ues_per_cell'):
            if not getattr(self, name) > 0:
                errors.append('{} must be positive'.format(name))
        if not 0 <= self.overhead < 1:
            errors.append('overhead must be in [0, 1)')
        if self.scheduler not in SCHEDULERS:
            errors.append('scheduler must be one of {}'.format(', '.join(SCHEDULERS)))
        if self.ue_drop not in ('poisson', 'fixed'):
            errors.append('ue_drop must be "poisson" or "fixed"')
        if self.n_beams_max < 1 or self.n_ttis < 1:
            errors.append('n_beams_max and n_ttis must be >= 1')
        if min(self.bs_array) < 1 or min(self.ue_array) < 1:
            errors.append('array dimensions must be >= 1')
        if self.mean_clusters < 0:
            errors.append('mean_clusters must be >= 0')
        if self.extra_loss_db < 0:
            errors.append('extra_loss_db must be >= 0')
        if errors:
            raise InvalidArgument('; '.join(errors))

    @property
    def n_bs_ant(self):
        return self.bs_array[0] * self.bs_array[1]

    @property
    def n_ue_ant(self):
        return self.ue_array[0] * self.ue_array[1]

    @property
    def noise_mw(self):
        '''thermal noise over the whole carrier'''
        return 10 ** ((self.noise_psd_dbm_hz + 10 * math.log10(self.bw_hz) + self.noise_figure_db) / 10)

    @property
    def tx_power_mw(self):
        return 10 ** (self.tx_power_dbm / 10)


@dataclass
class NetworkDrop:
    bs_positions: np.ndarray
    ue_positions: np.ndarray
    ue_cell: np.ndarray
    interior_bs: np.ndarray
    link_state: np.ndarray
    pathloss_db: np.ndarray
    association: np.ndarray
    channels: Optional[object] = None

    @property
    def n_bs(self):
        return self.bs_positions.shape[0]

    @property
    def n_ue(self):
        return self.ue_positions.shape[0]

    def distances(self):
        d = self.ue_positions[:, None, :] - self.bs_positions[None, :, :]
        return np.hypot(d[..., 0], d[..., 1])

    def served_by(self, b):
        return np.flatnonzero(self.association == b)

    def interior_ues(self):
        ok = self.association >= 0
        return np.flatnonzero(ok & self.interior_bs[np.where(ok, self.association, 0)])


def hex_grid(area_m, radius_m):
    '''
    Pointy-top hexagon centres covering [0, area]^2 with offset rows.

    Returns the centres and a mask of interior sites (all six neighbours present).
    '''
    dx = math.sqrt(3) * radius_m
    dy = 1.5 * radius_m
    x0 = y0 = radius_m / 2
    centres = []
    r = 0
    while y0 + r * dy <= area_m:
        c = 0
        while x0 + dx * (c + 0.5 * (r % 2)) <= area_m:
            centres.append((x0 + dx * (c + 0.5 * (r % 2)), y0 + r * dy))
            c += 1
        r += 1
    centres = np.asarray(centres)
    d = np.hypot(*(centres[:, None, :] - centres[None, :, :]).transpose(2, 0, 1))
    neighbours = np.sum(np.abs(d - dx) < 1e-6 * dx, axis=1)
    return centres, neighbours == 6


def _in_hexagon(dx, dy, radius_m):
    ax = np.abs(dx)
    return (ax <= math.sqrt(3) / 2 * radius_m) & (np.abs(dy) <= radius_m - ax / math.sqrt(3))


def drop_ues(cfg, bs_positions, rng):
    '''uniform UEs inside each hexagon, Poisson or fixed count per cell'''
    R = cfg.cell_radius_m
    n_cells = bs_positions.shape[0]
    if cfg.ue_drop == 'poisson':
        counts = rng.poisson(cfg.mean_ues_per_cell, size=n_cells)
    else:
        counts = np.full(n_cells, int(round(cfg.mean_ues_per_cell)))
    positions, cells = [], []
    for b in range(n_cells):
        need = counts[b]
        pts = np.empty((0, 2))
        while pts.shape[0] < need:
            cand = rng.uniform(-1, 1, size=(2 * need + 8, 2)) * [math.sqrt(3) / 2 * R, R]
            keep = _in_hexagon(cand[:, 0], cand[:, 1], R) & (np.hypot(cand[:, 0], cand[:, 1]) >= cfg.min_distance_m)
            pts = np.vstack([pts, cand[keep]])
        positions.append(pts[:need] + bs_positions[b])
        cells.append(np.full(need, b))
    if not positions:
        return np.empty((0, 2)), np.empty(0, dtype=int)
    return np.vstack(positions), np.concatenate(cells).astype(int)


def free_space_pathloss_db(d_m, fc_hz):
    return 20 * np.log10(4 * math.pi * np.asarray(d_m, dtype=np.float64) * fc_hz / SPEED_OF_LIGHT)


def state_probabilities(d_m, params):
    '''(p_outage, p_los, p_nlos) at distance d'''
    d = np.asarray(d_m, dtype=np.float64)
    p_out = np.maximum(0.0, 1.0 - np.exp(-d / params.outage_decay_m + params.outage_offset))
    p_los = (1.0 - p_out) * np.exp(-d / params.los_decay_m)
    return p_out, p_los, 1.0 - p_out - p_los


def draw_link_state(d_m, params, rng):
    p_out, p_los, _ = state_probabilities(d_m, params)
    u = rng.uniform(size=np.shape(d_m))
    return np.where(u < p_out, OUTAGE, np.where(u < p_out + p_los, LOS, NLOS)).astype(np.int8)


def pathloss_db(d_m, state, params=None, rng=None, fc_hz=28e9):
    '''
    a + 10 b log10(d) + shadowing for each link state, never below free space.

    rng=None means zero shadowing. Outage links have infinite pathloss.
    '''
    params = params or PathlossParams()
    d = np.asarray(d_m, dtype=np.float64)
    if np.any(d <= 0):
        raise InvalidArgument('distance must be positive')
    state = np.broadcast_to(np.asarray(state), d.shape)
    los = state == LOS
    a = np.where(los, params.los_a, params.nlos_a)
    b = np.where(los, params.los_b, params.nlos_b)
    sigma = np.where(los, params.los_sigma_db, params.nlos_sigma_db)
    shadow = 0.0 if rng is None else sigma * rng.standard_normal(d.shape)
    pl = np.maximum(a + 10 * b * np.log10(d) + shadow, free_space_pathloss_db(d, fc_hz))
    pl = np.where(state == OUTAGE, np.inf, pl)
    return float(pl) if pl.ndim == 0 else pl


def generate_layout(cfg, seed=None, *key):
    '''one network drop: sites, UEs, link states, pathloss and association'''
    rng = make_rng(cfg.seed if seed is None else seed, *key)
    bs, interior = hex_grid(cfg.area_m, cfg.cell_radius_m)
    ue, cell = drop_ues(cfg, bs, rng)
    d = np.hypot(*(ue[:, None, :] - bs[None, :, :]).transpose(2, 0, 1)) if ue.size else np.empty((0, bs.shape[0]))
    d = np.maximum(d, 1.0)
    state = draw_link_state(d, cfg.pathloss, rng)
    pl = pathloss_db(d, state, cfg.pathloss, rng, cfg.fc_hz) + cfg.extra_loss_db if ue.size else np.empty_like(d)
    # equal transmit powers, so the strongest BS is the one with least pathloss
    assoc = np.argmin(pl, axis=1) if ue.size else np.empty(0, dtype=int)
    if ue.size:
        assoc = np.where(np.isfinite(pl[np.arange(ue.shape[0]), assoc]), assoc, -1)
    logger.debug('layout: {:d} sites ({:d} interior), {:d} UEs, {:d} unassociated'.format(
        bs.shape[0], int(interior.sum()), ue.shape[0], int(np.sum(assoc < 0))))
    return NetworkDrop(bs_positions=bs, ue_positions=ue, ue_cell=cell, interior_bs=interior,
                       link_state=state, pathloss_db=np.asarray(pl), association=assoc)
