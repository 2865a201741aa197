"""Deterministic seed derivation.

Every random component gets its own seed, computed by hashing the master
seed together with a component path, e.g. ``derive_seed(42, "boruta", 3)``.
The result only depends on the inputs, never on execution order, so grid
cells can run in any order (or concurrently) and still reproduce.
"""

import hashlib

import numpy as np

_MASK = (1 << 63) - 1


def derive_seed(master, *components):
    """Return a non-negative 63-bit seed for ``components`` under ``master``."""
    key = ":".join([str(int(master))] + [str(c) for c in components])
    digest = hashlib.blake2b(key.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little") & _MASK


def rng_for(master, *components):
    return np.random.default_rng(derive_seed(master, *components))
