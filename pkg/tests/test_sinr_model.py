import math

import numpy as np
import pytest

from core.errors import InvalidArgument, UnboundedResult
from model.quantization import QuantizerSpec, aqnm_noise, alpha_of, quantize_array
from model.sinr_model import (GAMMA_CAP, LinkQuality, dual_quantizer_snr, quantization_noise_variance,
                              sdma_beta, sinr_beamformed, sinr_orthogonal_quantized,
                              sinr_quantized_general, sinr_saturation, sinr_sdma_quantized)


def db(x):
    return 10 * math.log10(x)


def test_beamformed_sinr():
    assert sinr_beamformed([10.0, 1.0, 2.0], 0) == pytest.approx(10.0 / 4.0)
    assert sinr_beamformed([5.0], 0) == pytest.approx(5.0)
    with pytest.raises(InvalidArgument):
        sinr_beamformed([], 0)
    with pytest.raises(InvalidArgument):
        sinr_beamformed([1.0], 1)


def test_orthogonal_reduces_to_gamma_without_quantization():
    assert sinr_orthogonal_quantized(123.0, 0.0) == pytest.approx(123.0)


def test_orthogonal_is_below_both_limits():
    a = alpha_of(3)
    for gamma in (0.1, 1.0, 10.0, 1e4):
        s = sinr_orthogonal_quantized(gamma, a, 4.0)
        assert s < gamma
        assert s < sinr_saturation(a, 4.0)


def test_orthogonal_broadcasts():
    s = sinr_orthogonal_quantized(np.array([1.0, 10.0, 100.0]), alpha_of(4))
    assert s.shape == (3,)
    assert np.all(np.diff(s) > 0)


def test_saturation_four_bits():
    # the high-SNR ceiling of a 4-bit converter without receive gain
    assert db(sinr_saturation(alpha_of(4))) == pytest.approx(19.3, abs=0.1)
    with pytest.raises(UnboundedResult):
        sinr_saturation(0.0)


def test_gain_lifts_saturation():
    a = alpha_of(3)
    assert sinr_saturation(a, 16.0) == pytest.approx(16 * sinr_saturation(a))


def test_invalid_arguments():
    with pytest.raises(InvalidArgument):
        sinr_orthogonal_quantized(1.0, 1.5)
    with pytest.raises(InvalidArgument):
        sinr_orthogonal_quantized(-1.0, 0.1)
    with pytest.raises(InvalidArgument):
        sinr_orthogonal_quantized(1.0, 0.1, G=0.5)
    with pytest.raises(InvalidArgument):
        LinkQuality(gamma_prime=1.0, psi=-0.1)


def test_infinite_snr_is_capped():
    s = sinr_orthogonal_quantized(math.inf, 0.0)
    assert s == pytest.approx(GAMMA_CAP)
    assert sinr_orthogonal_quantized(math.inf, alpha_of(4)) == pytest.approx(sinr_saturation(alpha_of(4)), rel=1e-6)


def test_sdma_reduces_to_orthogonal_without_interference():
    a = alpha_of(3)
    q = LinkQuality(gamma_prime=30.0, bf_gain=8.0, psi=0.0)
    assert sinr_sdma_quantized(q, a) == pytest.approx(sinr_orthogonal_quantized(30.0, a, 8.0))


def test_sdma_unquantized_is_sinr_with_interference():
    q = LinkQuality(gamma_prime=100.0, psi=0.1)
    assert sinr_sdma_quantized(q, 0.0) == pytest.approx(100.0 / (1 + 10.0))


def test_sdma_interference_hurts():
    a = alpha_of(4)
    lo = sinr_sdma_quantized(LinkQuality(50.0, 4.0, 0.01), a)
    hi = sinr_sdma_quantized(LinkQuality(50.0, 4.0, 0.1), a)
    assert hi < lo


def test_beta_decomposition_on_random_instances():
    rng = np.random.default_rng(11)
    for _ in range(2000):
        gamma = 10 ** rng.uniform(-2, 4)
        psi = rng.uniform(0, 2)
        G = rng.uniform(1, 64)
        a = rng.uniform(0, 1)
        q = LinkQuality(gamma, G, psi)
        beam = gamma / (1 + psi * gamma)
        beta = sdma_beta(q, a)
        assert sinr_sdma_quantized(q, a) == pytest.approx((1 - a * beta) * beam, rel=1e-10)
        assert a * beta < 1


def test_beta_below_one_with_enough_gain():
    q = LinkQuality(gamma_prime=100.0, bf_gain=16.0, psi=0.1)
    a = alpha_of(3)
    assert sdma_beta(q, a) < 1
    assert sinr_sdma_quantized(q, a) > (1 - a) * 100.0 / (1 + 10.0)
    assert sdma_beta(LinkQuality(1e-9), a) == pytest.approx(1.0)


def test_general_form_matches_equal_gains():
    a = alpha_of(3)
    gammas = np.array([20.0, 5.0])
    G = 4.0
    got = sinr_quantized_general(gammas, [G, G], 0, a)
    want = sinr_sdma_quantized(LinkQuality(20.0, G, 5.0 / 20.0), a)
    assert got == pytest.approx(want)


def test_general_form_checks_lengths():
    with pytest.raises(InvalidArgument):
        sinr_quantized_general([1.0, 2.0], [1.0], 0, 0.1)


def test_quantization_noise_variance():
    a = 0.1
    assert quantization_noise_variance([1.0, 2.0], 0.5, 0.5, a) == pytest.approx(a * (1 - a) * 4.0)


def test_dual_quantizer_reduces_to_single():
    a = alpha_of(4)
    gamma = 50.0
    osr = 1.25
    single = sinr_orthogonal_quantized(gamma * osr, a, osr)
    assert dual_quantizer_snr(gamma, 0.0, a, osr) == pytest.approx(single)


def test_dual_quantizer_matching_bits_costs_about_three_db_at_high_snr():
    a = alpha_of(4)
    gamma = 10 ** (35 / 10)
    single = sinr_orthogonal_quantized(gamma, a)
    dual = dual_quantizer_snr(gamma, a, a)
    assert db(single) - db(dual) == pytest.approx(3.0, abs=0.4)


def test_dual_quantizer_rejects_low_osr():
    with pytest.raises(InvalidArgument):
        dual_quantizer_snr(1.0, 0.1, 0.1, osr=0.5)


def test_sdma_sinr_is_monotone_in_every_argument():
    alphas = [0.0, alpha_of(5), alpha_of(3), alpha_of(1)]
    gammas = [0.1, 1.0, 10.0, 100.0, 1e4]
    for psi in (0.0, 0.05, 0.5):
        for G in (1.0, 8.0, 64.0):
            by_alpha = [sinr_sdma_quantized(LinkQuality(50.0, G, psi), a) for a in alphas]
            assert all(x > y for x, y in zip(by_alpha, by_alpha[1:]))
            by_gamma = [sinr_sdma_quantized(LinkQuality(g, G, psi), alpha_of(3)) for g in gammas]
            assert all(x < y for x, y in zip(by_gamma, by_gamma[1:]))
        by_gain = [sinr_sdma_quantized(LinkQuality(50.0, G, psi), alpha_of(3)) for G in (1.0, 4.0, 16.0, 64.0)]
        assert all(x < y for x, y in zip(by_gain, by_gain[1:]))


def test_random_instances_reduce_and_respect_the_ceiling():
    rng = np.random.default_rng(23)
    for _ in range(1000):
        gammas = 10 ** rng.uniform(-1, 4, size=rng.integers(1, 5))
        G = rng.uniform(1, 64)
        a = rng.uniform(0.001, 0.5)
        psi = (gammas.sum() - gammas[0]) / gammas[0]
        s = sinr_sdma_quantized(LinkQuality(gammas[0], G, psi), a)
        assert sinr_quantized_general(gammas, np.full(gammas.size, G), 0, a) == pytest.approx(s, rel=1e-10)
        assert s <= sinr_saturation(a, G) / (1 + psi) * (1 + 1e-12)
        assert s <= gammas[0] / (1 + psi * gammas[0]) * (1 + 1e-12)


def test_unquantized_sdma_at_infinite_snr_is_interference_limited():
    for psi in (0.01, 0.1, 1.0):
        s = sinr_sdma_quantized(LinkQuality(math.inf, 16.0, psi), 0.0)
        assert s == pytest.approx(1.0 / psi, rel=1e-9)
    assert sinr_orthogonal_quantized(1e15, 0.0) == pytest.approx(GAMMA_CAP)


def test_quantization_noise_variance_matches_a_quantized_mixture():
    rng = np.random.default_rng(31)
    n = 200000
    energies, noise_var, icv = [0.5, 0.2], 0.2, 0.1

    def cgauss(var):
        return math.sqrt(var / 2) * (rng.standard_normal(n) + 1j * rng.standard_normal(n))

    y = sum(cgauss(e) for e in energies) + cgauss(noise_var) + cgauss(icv)
    spec = QuantizerSpec.optimal(3)
    v = aqnm_noise(y, quantize_array(y, spec), spec.alpha)
    want = quantization_noise_variance(energies, noise_var, icv, spec.alpha)
    assert np.mean(np.abs(v) ** 2) == pytest.approx(want, rel=0.1)


def test_beamformed_sinr_matches_simulated_streams():
    rng = np.random.default_rng(37)
    n = 100000
    gammas = np.array([20.0, 3.0, 1.5])
    x = (rng.standard_normal((gammas.size + 1, n)) + 1j * rng.standard_normal((gammas.size + 1, n))) / math.sqrt(2)
    streams = np.sqrt(gammas)[:, None] * x[:-1]
    for k in range(gammas.size):
        rest = streams.sum(axis=0) - streams[k] + x[-1]
        measured = np.mean(np.abs(streams[k]) ** 2) / np.mean(np.abs(rest) ** 2)
        assert measured == pytest.approx(sinr_beamformed(gammas, k), rel=0.03)
