"""Seeded random streams.

Every stream is a Philox-4x64 counter-based generator keyed directly by the
64-bit seed in the low word and the stream index (e.g. trial number) in the
high word, so stream ``(seed, i)`` is reproducible on any platform that
implements Philox.
"""

import numpy as np

MASK64 = (1 << 64) - 1


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    key = (int(stream) & MASK64) << 64 | (int(seed) & MASK64)
    return np.random.Generator(np.random.Philox(key=key))
