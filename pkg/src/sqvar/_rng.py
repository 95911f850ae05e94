"""Seed handling.

Generators are counter-based (Philox) and keyed by (seed, stream), so
independent draws for the same experiment never share a stream and the
results do not depend on evaluation order across workers.
"""

import numpy as np


def philox_rng(seed, stream=0):
    seq = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(stream),))
    return np.random.Generator(np.random.Philox(seq))
