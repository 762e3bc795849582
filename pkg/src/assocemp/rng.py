"""Counter-based random streams.

Every random draw in the toolkit comes from a Philox generator whose key is
derived from one 64-bit run seed and a tuple of non-negative integers naming
the position in the derivation tree::

    seed
     └── (check_index,)            one subtree per experiment check
          └── (check_index, r)     replicate r of that check

Library functions that are called outside an experiment use the path
``(r,)``.  Because a stream depends only on ``(seed, path)``, results do not
depend on how replicates are scheduled across threads.
"""

import numpy as np

__all__ = ["stream", "derive_path"]


def stream(seed, path=()):
    """Return the generator for node ``path`` under ``seed``."""
    ss = np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))


def derive_path(prefix, *indices):
    return tuple(prefix) + tuple(indices)
