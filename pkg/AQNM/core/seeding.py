'''
Random substreams.

Every stochastic job owns a generator derived from the master seed with
``SeedSequence(entropy=seed, spawn_key=(stream, index, ...))``. The stream
number identifies the sweep family, the index the position of the job inside
it. The global numpy RNG is never used.
'''
import numpy as np

# sweep families
STREAM_LINK = 1
STREAM_SDMA_LINK = 2
STREAM_TX = 3
STREAM_NETWORK = 4
STREAM_QUANTIZER = 5


def seed_sequence(seed, *key):
    return np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))


def make_rng(seed, *key):
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.default_rng(seed)
    return np.random.default_rng(seed_sequence(seed, *key))
