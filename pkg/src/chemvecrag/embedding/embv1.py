"""EMBV1 embedding file format.

Layout (all integers little-endian):

    magic   6 bytes  b"EMBV1\\0"
    dim     u32
    count   u64
    record  u16 id length, id bytes (UTF-8), dim x f32

The format is bit-exact: writing and re-reading reproduces vectors
byte for byte.
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import Iterable

import numpy as np

from ..errors import ChemVecRagError

MAGIC = b"EMBV1\x00"


class Embv1Error(ChemVecRagError):
    """Malformed or truncated EMBV1 file."""


def write_embv1(
    path: str | Path, dim: int, records: Iterable[tuple[str, np.ndarray]]
) -> int:
    """Write id/vector pairs; returns the record count."""
    rows = []
    for record_id, values in records:
        arr = np.asarray(values, dtype=np.float32).reshape(-1)
        if arr.shape[0] != dim:
            raise Embv1Error(
                f"record '{record_id}' has dim {arr.shape[0]}, file dim is {dim}"
            )
        encoded = record_id.encode("utf-8")
        if len(encoded) > 0xFFFF:
            raise Embv1Error(f"record id too long: {record_id[:32]}...")
        rows.append((encoded, arr))

    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", dim))
        fh.write(struct.pack("<Q", len(rows)))
        for encoded, arr in rows:
            fh.write(struct.pack("<H", len(encoded)))
            fh.write(encoded)
            fh.write(arr.astype("<f4").tobytes())
    return len(rows)


def read_embv1(path: str | Path) -> tuple[int, dict[str, np.ndarray]]:
    """Read an EMBV1 file into (dim, ordered id -> float32 vector map)."""
    data = Path(path).read_bytes()
    if len(data) < len(MAGIC) + 12:
        raise Embv1Error("file too short for EMBV1 header")
    if data[: len(MAGIC)] != MAGIC:
        raise Embv1Error("bad magic bytes")
    dim = struct.unpack_from("<I", data, 6)[0]
    count = struct.unpack_from("<Q", data, 10)[0]
    if dim == 0:
        raise Embv1Error("dim must be positive")
    offset = 18
    vec_bytes = dim * 4
    out: dict[str, np.ndarray] = {}
    for _ in range(count):
        if offset + 2 > len(data):
            raise Embv1Error("truncated record header")
        (id_len,) = struct.unpack_from("<H", data, offset)
        offset += 2
        if offset + id_len + vec_bytes > len(data):
            raise Embv1Error("truncated record body")
        record_id = data[offset:offset + id_len].decode("utf-8")
        offset += id_len
        values = np.frombuffer(data, dtype="<f4", count=dim, offset=offset).copy()
        offset += vec_bytes
        if record_id in out:
            raise Embv1Error(f"duplicate id '{record_id}'")
        out[record_id] = values
    if offset != len(data):
        raise Embv1Error(f"{len(data) - offset} trailing bytes after last record")
    return dim, out


def validate_embv1(path: str | Path) -> tuple[int, int]:
    """Check structure and return (dim, count); raises Embv1Error otherwise."""
    dim, records = read_embv1(path)
    return dim, len(records)
