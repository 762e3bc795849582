"""Binary persistence of path ensembles.

Layout (little-endian)::

    8 bytes   magic  b"ASSOCEP1"
    uint64    n      path length
    uint64    R      replicates
    uint64    seed
    uint64    model hash
    R*n f8    values, row-major (replicate-major)
"""

import struct

import numpy as np

__all__ = ["MAGIC", "save_ensemble", "load_ensemble"]

MAGIC = b"ASSOCEP1"
_HEADER = struct.Struct("<8sQQQQ")


def save_ensemble(ensemble, path):
    values = np.ascontiguousarray(ensemble.values, dtype="<f8")
    R, n = values.shape
    header = _HEADER.pack(MAGIC, n, R, ensemble.seed & 0xFFFFFFFFFFFFFFFF, ensemble.model.model_hash)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(values.tobytes())


def load_ensemble(path):
    """Return ``(values, header)``; header has keys n, R, seed, model_hash."""
    with open(path, "rb") as fh:
        raw = fh.read()
    magic, n, R, seed, model_hash = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ValueError(f"{path}: not an ensemble file")
    body = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    if body.size != n * R:
        raise ValueError(f"{path}: expected {n * R} values, found {body.size}")
    return body.reshape(R, n).copy(), {"n": n, "R": R, "seed": seed, "model_hash": model_hash}
