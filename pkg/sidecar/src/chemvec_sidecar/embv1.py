"""EMBV1 writer (the wire format shared with the search engine).

Layout: magic ``EMBV1\\0``, u32 LE dim, u64 LE record count, then per
record a u16 LE id length, UTF-8 id bytes, and dim little-endian f32s.
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import Iterable

import numpy as np

MAGIC = b"EMBV1\x00"


def write_embv1(path: str | Path, dim: int,
                records: Iterable[tuple[str, np.ndarray]]) -> int:
    count = 0
    body = bytearray()
    for record_id, values in records:
        arr = np.asarray(values, dtype=np.float32).reshape(-1)
        if arr.shape[0] != dim:
            raise ValueError(f"'{record_id}': dim {arr.shape[0]} != file dim {dim}")
        encoded = record_id.encode("utf-8")
        body += struct.pack("<H", len(encoded))
        body += encoded
        body += arr.astype("<f4").tobytes()
        count += 1
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", dim))
        fh.write(struct.pack("<Q", count))
        fh.write(bytes(body))
    return count
