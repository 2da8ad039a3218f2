"""Deterministic named RNG substreams.

All randomness in the pipeline flows from a single integer seed; each
consumer derives its own independent stream from a stable name so that
adding a consumer never perturbs the draws of another.
"""

import zlib

import numpy as np

__all__ = ["substream"]


def substream(seed: int, *names) -> np.random.Generator:
    """Return a Generator for the substream identified by ``names``.

    Names are hashed with CRC32 (stable across processes, unlike
    ``hash``) and mixed into a SeedSequence together with the root seed.
    """
    keys = [zlib.crc32(str(n).encode("utf-8")) for n in names]
    return np.random.default_rng(np.random.SeedSequence([int(seed)] + keys))
