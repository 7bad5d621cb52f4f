"""Named, splittable RNG substreams.

All randomness in the library flows from one global seed through named
substreams, so adding an experiment or changing a worker count never
perturbs the draws of another experiment.
"""

import zlib

import numpy as np


def _label_int(label) -> int:
    if isinstance(label, (int, np.integer)):
        return int(label) & 0xFFFFFFFF
    return zlib.crc32(str(label).encode("utf-8"))


def substream(seed: int, *labels) -> np.random.Generator:
    """Return a fresh Generator for (seed, labels).

    Deterministic: the same (seed, labels) always yields the same stream,
    independent of call order or platform.
    """
    entropy = [int(seed) & 0xFFFFFFFF] + [_label_int(lb) for lb in labels]
    return np.random.default_rng(np.random.SeedSequence(entropy))
