"""Hierarchical seeded random streams.

Every stochastic component derives its generator from a root seed plus a
tuple of string/integer labels, so runs are reproducible regardless of the
order in which components are constructed.
"""

import zlib

import numpy as np


def _label_to_u32(label):
    if isinstance(label, (int, np.integer)):
        return int(label) & 0xFFFFFFFF
    return zlib.crc32(str(label).encode("utf-8")) & 0xFFFFFFFF


def stream(seed, *labels):
    """Return a ``numpy.random.Generator`` keyed by (seed, labels)."""
    key = [_label_to_u32(lab) for lab in labels]
    ss = np.random.SeedSequence(entropy=int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=tuple(key))
    return np.random.Generator(np.random.PCG64(ss))
