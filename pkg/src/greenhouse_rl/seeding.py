"""Named RNG substreams derived from a single root seed.

Every source of randomness in the system (process noise, sex assignment,
shuffling, exploration, weight init, ...) pulls its generator from
:func:`substream` with a stable stream name, so components can be re-seeded
independently while the whole run stays a pure function of the root seed.
"""

from __future__ import annotations

import hashlib

import numpy as np


def substream_key(name: str) -> tuple[int, ...]:
    """Stable 128-bit key for a stream name (first 16 bytes of SHA-256)."""
    digest = hashlib.sha256(name.encode("utf-8")).digest()
    return tuple(int.from_bytes(digest[i : i + 4], "little") for i in range(0, 16, 4))


def substream(root_seed: int, name: str) -> np.random.Generator:
    """Generator for the named stream under the given root seed.

    The same (root_seed, name) pair always yields an identical stream;
    distinct names yield statistically independent streams.
    """
    seq = np.random.SeedSequence(entropy=int(root_seed), spawn_key=substream_key(name))
    return np.random.default_rng(seq)
