"""Deterministic random-stream derivation.

Every stochastic stage of the toolkit draws from a generator derived from
(base seed, stream id, unit index), so stages and units can be evaluated in
any order, or concurrently, without changing the numbers. Within one stream
the draw sequence is fixed, which makes dataset prefixes stable: sample i of
a synthesized dataset does not depend on how many samples follow it.
"""

import numpy as np

# Stream ids, one per stochastic stage.
STREAM_DATASET = 1
STREAM_VALIDATION = 2
STREAM_TEST = 99


def derive_rng(base_seed, *key):
    """Return a Generator for stream ``key`` of ``base_seed``.

    ``key`` is any tuple of small non-negative ints; the same
    (seed, key) pair always yields the same stream.
    """
    ss = np.random.SeedSequence(entropy=int(base_seed), spawn_key=tuple(int(k) for k in key))
    return np.random.default_rng(ss)
