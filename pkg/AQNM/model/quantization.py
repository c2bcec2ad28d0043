'''
Uniform midrise scalar quantizer and the additive quantization noise model.

The quantizer output is decomposed as Q(y) = (1 - alpha) y + v with v
uncorrelated with y. For a unit-variance Gaussian input and the MSE-optimal
step, E[(y - Q(y)) Q(y)] = 0, so the decomposition gain is exactly 1 - alpha
and E|v|^2 = alpha (1 - alpha).
'''
import math
import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import optimize, special

from core.errors import InvalidArgument, InvalidInput

logger = logging.getLogger('base')

INF_BITS = math.inf
MAX_BITS = 16

# clipping level search interval, in standard deviations
_CLIP_BOUNDS = (0.3, 8.0)


def is_infinite(n_bits):
    return n_bits is None or (isinstance(n_bits, float) and math.isinf(n_bits))


def parse_bits(value):
    '''config/CLI value -> int bits or INF_BITS'''
    if value is None:
        return INF_BITS
    if isinstance(value, str):
        if value.strip().lower() in ('inf', 'infinite', 'infinity'):
            return INF_BITS
        value = int(value)
    if isinstance(value, float) and math.isinf(value):
        return INF_BITS
    if isinstance(value, bool) or int(value) != value:
        raise InvalidArgument('n_bits must be an integer or "inf", got {!r}'.format(value))
    return int(value)


def bits_label(n_bits):
    return 'inf' if is_infinite(n_bits) else str(int(n_bits))


def _check_bits(n_bits):
    if isinstance(n_bits, bool) or not isinstance(n_bits, (int, np.integer)):
        raise InvalidArgument('n_bits must be an integer, got {!r}'.format(n_bits))
    if not 1 <= n_bits <= MAX_BITS:
        raise InvalidArgument(
            'n_bits must be in [1, {:d}], got {:d}'.format(MAX_BITS, n_bits))


def _gaussian_mse(step, n_bits):
    '''exact E[(y - Q(y))^2] for y ~ N(0, 1), midrise quantizer, 2^n levels'''
    half = 2 ** (n_bits - 1)
    # cells [i step, (i+1) step) on the positive side, last one open
    lo = np.arange(half, dtype=np.float64) * step
    hi = np.append(lo[1:], np.inf)
    q = lo + step / 2
    cdf = special.ndtr(hi) - special.ndtr(lo)
    # the overload cell ends at +inf where both phi(t) and t phi(t) vanish
    hi = np.minimum(hi, 40.0)
    pdf_lo = np.exp(-lo ** 2 / 2) / math.sqrt(2 * math.pi)
    pdf_hi = np.exp(-hi ** 2 / 2) / math.sqrt(2 * math.pi)
    second = cdf + lo * pdf_lo - hi * pdf_hi
    first = pdf_lo - pdf_hi
    return float(2 * np.sum(second - 2 * q * first + q ** 2 * cdf))


@lru_cache(maxsize=None)
def _optimum(n_bits):
    half = 2 ** (n_bits - 1)
    res = optimize.minimize_scalar(
        lambda clip: _gaussian_mse(clip / half, n_bits),
        bounds=_CLIP_BOUNDS, method='bounded',
        options={'xatol': 1e-10, 'maxiter': 500})
    step = float(res.x) / half
    return step, _gaussian_mse(step, n_bits)


def optimal_step(n_bits):
    '''MSE-optimal step of the 2^n-level midrise quantizer for a unit Gaussian'''
    _check_bits(n_bits)
    return _optimum(int(n_bits))[0]


def alpha_of(n_bits):
    '''inverse coding gain of the optimal uniform quantizer (0 for infinite resolution)'''
    if is_infinite(n_bits):
        return 0.0
    _check_bits(n_bits)
    return _optimum(int(n_bits))[1]


def quantization_mse(step, n_bits):
    _check_bits(n_bits)
    if step <= 0:
        raise InvalidArgument('step must be positive')
    return _gaussian_mse(step, int(n_bits))


@dataclass(frozen=True)
class QuantizerSpec:
    n_bits: float = INF_BITS
    step: float = 0.0
    alpha: float = 0.0

    def __post_init__(self):
        if is_infinite(self.n_bits):
            if self.alpha != 0:
                raise InvalidArgument('alpha must be 0 for infinite resolution')
        else:
            _check_bits(self.n_bits)
            if not self.step > 0:
                raise InvalidArgument('step must be positive for finite resolution')
            if not 0 < self.alpha <= 1:
                raise InvalidArgument('alpha must be in (0, 1] for finite resolution')

    @classmethod
    def optimal(cls, n_bits):
        n_bits = parse_bits(n_bits)
        if is_infinite(n_bits):
            return cls()
        return cls(n_bits=n_bits, step=optimal_step(n_bits), alpha=alpha_of(n_bits))

    @property
    def infinite(self):
        return is_infinite(self.n_bits)

    @property
    def levels(self):
        return None if self.infinite else 2 ** int(self.n_bits)


@dataclass(frozen=True)
class ComplexSampleBlock:
    samples: np.ndarray
    sample_rate: float

    def __post_init__(self):
        x = np.asarray(self.samples, dtype=np.complex128).ravel()
        if x.size < 1:
            raise InvalidInput('sample block must hold at least one sample')
        if not np.all(np.isfinite(x)):
            raise InvalidInput('sample block holds non-finite values')
        if not self.sample_rate > 0:
            raise InvalidArgument('sample rate must be positive')
        object.__setattr__(self, 'samples', x)

    def __len__(self):
        return self.samples.size

    def power(self):
        return float(np.mean(np.abs(self.samples) ** 2))

    def with_samples(self, samples, sample_rate=None):
        return ComplexSampleBlock(samples, self.sample_rate if sample_rate is None else sample_rate)


def _quantize_real(x, step, n_bits):
    half = 2 ** (n_bits - 1)
    # floor puts exact boundaries in the upper cell (ties toward +inf)
    idx = np.clip(np.floor(x / step), -half, half - 1)
    return (idx + 0.5) * step


def quantize_array(x, spec):
    '''quantize raw complex samples, I and Q independently'''
    x = np.asarray(x, dtype=np.complex128)
    if not np.all(np.isfinite(x)):
        raise InvalidInput('cannot quantize non-finite samples')
    if spec.infinite:
        return x.copy()
    # per-component variance is 1/2 for unit complex power
    step = spec.step / math.sqrt(2)
    n = int(spec.n_bits)
    return _quantize_real(x.real, step, n) + 1j * _quantize_real(x.imag, step, n)


def quantize(block, spec):
    if spec.infinite:
        return block
    return block.with_samples(quantize_array(block.samples, spec))


def measure_alpha(input, output):
    '''empirical 1 - Re<output, input> / <input, input>'''
    x = input.samples if isinstance(input, ComplexSampleBlock) else np.asarray(input)
    y = output.samples if isinstance(output, ComplexSampleBlock) else np.asarray(output)
    if x.shape != y.shape:
        raise InvalidArgument('input and output lengths differ ({} vs {})'.format(x.size, y.size))
    if x.size < 1000:
        raise InvalidArgument('at least 1000 samples are needed, got {:d}'.format(x.size))
    return 1.0 - float(np.real(np.vdot(x, y)) / np.real(np.vdot(x, x)))


def aqnm_noise(input, output, alpha):
    '''v = Q(y) - (1 - alpha) y'''
    return np.asarray(output) - (1 - alpha) * np.asarray(input)


def alpha_table(bits, overrides=None):
    '''alpha per bit count, with optional {bits: alpha} overrides'''
    overrides = {parse_bits(k): float(v) for k, v in (overrides or {}).items()}
    table = {}
    for b in bits:
        b = parse_bits(b)
        if b in overrides:
            logger.info('alpha override for {} bits: {:.6f} (optimal uniform {:.6f})'.format(
                bits_label(b), overrides[b], alpha_of(b)))
            table[b] = overrides[b]
        else:
            table[b] = alpha_of(b)
    return table
