import math

import numpy as np


def db(x):
    x = np.asarray(x, dtype=np.float64)
    with np.errstate(divide='ignore'):
        out = 10 * np.log10(x)
    return float(out) if out.ndim == 0 else out


def undb(x_db):
    out = 10 ** (np.asarray(x_db, dtype=np.float64) / 10)
    return float(out) if out.ndim == 0 else out


def empirical_cdf(values):
    '''(sorted finite values, P[X <= x])'''
    v = np.sort(np.asarray(values, dtype=np.float64))
    v = v[np.isfinite(v)]
    return v, np.arange(1, v.size + 1) / max(v.size, 1)


def percentiles(values, q):
    '''percentiles of the finite values; NaN when none are finite'''
    v = np.asarray(values, dtype=np.float64)
    v = v[np.isfinite(v)]
    if v.size == 0:
        return np.full(len(q), np.nan)
    return np.percentile(v, q)


def fraction_above(values, threshold):
    v = np.asarray(values, dtype=np.float64)
    v = v[~np.isnan(v)]
    return float(np.mean(v > threshold)) if v.size else math.nan


def fraction_below(values, threshold):
    v = np.asarray(values, dtype=np.float64)
    v = v[~np.isnan(v)]
    return float(np.mean(v < threshold)) if v.size else math.nan


def percentile_loss_db(reference_db, degraded_db, q):
    '''loss at the q-th percentile, in dB (positive when degraded is worse)'''
    return float(percentiles(reference_db, [q])[0] - percentiles(degraded_db, [q])[0])


def relative_error(measured, expected):
    return abs(measured - expected) / abs(expected)
