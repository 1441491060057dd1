"""CVRS1 snapshot format.

Layout (integers little-endian):

    magic    6 bytes  b"CVRS1\\0"
    version  u16
    header   u32 length + JSON (store seed, per-collection schema/params)
    per collection, in header order:
        record block: u64 count, then per record
            u16 id length + id bytes (UTF-8)
            dim x f32 vector
            u32 length + JSON {payload, metadata, links, deleted}
        index block: u8 kind tag + kind-specific payload
    crc      u32 CRC32C of every preceding byte

Snapshots serialize index state (HNSW adjacency, IVF centroids and
lists) rather than rebuilding, so a load reproduces search results bit
for bit. HNSW persists its insert counter; future level draws continue
the same splitmix64 stream.
"""

from __future__ import annotations

import json
import struct
from contextlib import ExitStack
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .collection import Collection, HnswParams, IvfParams, _Row
from .errors import CorruptSnapshot, VersionMismatch
from .schema import CollectionSchema
from .store import VectorStore

MAGIC = b"CVRS1\x00"
VERSION = 1

_KIND_TAGS = {"flat": 0, "hnsw": 1, "ivf_flat": 2}

# CRC32C (Castagnoli), reflected polynomial.
_CRC_TABLE = []
for _i in range(256):
    _c = _i
    for _ in range(8):
        _c = (_c >> 1) ^ 0x82F63B78 if _c & 1 else _c >> 1
    _CRC_TABLE.append(_c)


def crc32c(data: bytes, crc: int = 0) -> int:
    crc ^= 0xFFFFFFFF
    for byte in data:
        crc = (crc >> 8) ^ _CRC_TABLE[(crc ^ byte) & 0xFF]
    return crc ^ 0xFFFFFFFF


class _Writer:
    def __init__(self) -> None:
        self.chunks: list[bytes] = []

    def raw(self, data: bytes) -> None:
        self.chunks.append(data)

    def u8(self, value: int) -> None:
        self.raw(struct.pack("<B", value))

    def u16(self, value: int) -> None:
        self.raw(struct.pack("<H", value))

    def u32(self, value: int) -> None:
        self.raw(struct.pack("<I", value))

    def u64(self, value: int) -> None:
        self.raw(struct.pack("<Q", value))

    def i64(self, value: int) -> None:
        self.raw(struct.pack("<q", value))

    def blob(self, data: bytes) -> None:
        self.u32(len(data))
        self.raw(data)

    def json(self, obj) -> None:
        self.blob(json.dumps(obj, sort_keys=True).encode("utf-8"))


class _Reader:
    def __init__(self, data: bytes) -> None:
        self.data = data
        self.pos = 0

    def take(self, count: int) -> bytes:
        if self.pos + count > len(self.data):
            raise CorruptSnapshot("unexpected end of snapshot")
        out = self.data[self.pos:self.pos + count]
        self.pos += count
        return out

    def u8(self) -> int:
        return struct.unpack("<B", self.take(1))[0]

    def u16(self) -> int:
        return struct.unpack("<H", self.take(2))[0]

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def u64(self) -> int:
        return struct.unpack("<Q", self.take(8))[0]

    def i64(self) -> int:
        return struct.unpack("<q", self.take(8))[0]

    def blob(self) -> bytes:
        return self.take(self.u32())

    def json(self):
        return json.loads(self.blob().decode("utf-8"))


def write_snapshot(store: VectorStore, path: str | Path) -> None:
    collections = store.collections()
    with ExitStack() as stack:
        for collection in collections:  # snapshot needs exclusive access
            stack.enter_context(collection.lock.write())
        _write_snapshot_locked(store, collections, path)


def _write_snapshot_locked(
    store: VectorStore, collections: list[Collection], path: str | Path
) -> None:
    writer = _Writer()
    writer.raw(MAGIC)
    writer.u16(VERSION)
    header = {
        "seed": store.seed,
        "collections": [
            {
                "schema": {
                    "name": c.schema.name,
                    "dim": c.schema.dim,
                    "index_kind": c.schema.index_kind,
                    "payload_kind": c.schema.payload_kind,
                    "metadata_fields": c.schema.metadata_fields,
                },
                "seed": c.seed,
                "hnsw_params": asdict(c.hnsw_params),
                "ivf_params": asdict(c.ivf_params),
            }
            for c in collections
        ],
    }
    writer.json(header)

    for collection in collections:
        _write_records(writer, collection)
        _write_index(writer, collection)

    body = b"".join(writer.chunks)
    checksum = crc32c(body)
    Path(path).write_bytes(body + struct.pack("<I", checksum))


def _write_records(writer: _Writer, collection: Collection) -> None:
    rows = collection._by_ordinal
    writer.u64(len(rows))
    for row in rows:
        encoded = row.id.encode("utf-8")
        writer.u16(len(encoded))
        writer.raw(encoded)
        writer.raw(collection.pool.get_f32(row.ordinal).astype("<f4").tobytes())
        writer.json(
            {
                "payload": row.payload,
                "metadata": row.metadata,
                "links": [list(link) for link in row.links],
                "deleted": row.deleted,
            }
        )


def _write_index(writer: _Writer, collection: Collection) -> None:
    kind = collection.schema.index_kind
    writer.u8(_KIND_TAGS[kind])
    if kind == "hnsw":
        index = collection.hnsw
        writer.u64(index.insert_counter)
        writer.i64(index.entry)
        writer.i64(index.max_level)
        writer.u64(len(index.neighbors))
        for levels in index.neighbors:
            writer.u16(len(levels))
            for level in levels:
                writer.u32(len(level))
                for ordinal in level:
                    writer.u32(ordinal)
    elif kind == "ivf_flat":
        index = collection.ivf
        writer.u8(1 if index.trained else 0)
        if index.trained:
            writer.u32(index.centroids.shape[0])
            writer.raw(index.centroids.astype("<f8").tobytes())
            for members in index.lists:
                writer.u32(len(members))
                for ordinal in members:
                    writer.u32(ordinal)


def read_snapshot(path: str | Path) -> VectorStore:
    data = Path(path).read_bytes()
    if len(data) < len(MAGIC) + 2 + 4:
        raise CorruptSnapshot("file too short")
    if data[: len(MAGIC)] != MAGIC:
        raise CorruptSnapshot("bad magic bytes")
    body, trailer = data[:-4], data[-4:]
    expected = struct.unpack("<I", trailer)[0]
    if crc32c(body) != expected:
        raise CorruptSnapshot("CRC32C mismatch")

    reader = _Reader(body)
    reader.take(len(MAGIC))
    version = reader.u16()
    if version != VERSION:
        raise VersionMismatch(f"snapshot version {version}, expected {VERSION}")

    header = reader.json()
    store = VectorStore(seed=header["seed"])
    for entry in header["collections"]:
        schema = CollectionSchema(
            name=entry["schema"]["name"],
            dim=entry["schema"]["dim"],
            index_kind=entry["schema"]["index_kind"],
            payload_kind=entry["schema"]["payload_kind"],
            metadata_fields=dict(entry["schema"]["metadata_fields"]),
        )
        collection = Collection(
            schema,
            seed=entry["seed"],
            hnsw_params=HnswParams(**entry["hnsw_params"]),
            ivf_params=IvfParams(**entry["ivf_params"]),
        )
        # Bypass insert(): indexes are restored verbatim below.
        if collection.hnsw is not None:
            collection.hnsw.neighbors = []
        _read_records(reader, collection)
        _read_index(reader, collection)
        store._collections[schema.name] = collection
    if reader.pos != len(body):
        raise CorruptSnapshot(f"{len(body) - reader.pos} trailing bytes")
    return store


def _read_records(reader: _Reader, collection: Collection) -> None:
    count = reader.u64()
    dim = collection.schema.dim
    for _ in range(count):
        id_len = reader.u16()
        record_id = reader.take(id_len).decode("utf-8")
        vector = np.frombuffer(reader.take(dim * 4), dtype="<f4").copy()
        extra = reader.json()
        ordinal = collection.pool.add(vector)
        row = _Row(
            ordinal,
            record_id,
            extra["payload"],
            extra["metadata"],
            [tuple(link) for link in extra["links"]],
            extra["deleted"],
        )
        collection._by_ordinal.append(row)
        if row.deleted:
            collection._deleted_count += 1
        else:
            collection._rows[record_id] = row


def _read_index(reader: _Reader, collection: Collection) -> None:
    tag = reader.u8()
    expected = _KIND_TAGS[collection.schema.index_kind]
    if tag != expected:
        raise CorruptSnapshot(
            f"index tag {tag} does not match schema kind "
            f"'{collection.schema.index_kind}'"
        )
    if collection.schema.index_kind == "hnsw":
        index = collection.hnsw
        index.insert_counter = reader.u64()
        index.entry = reader.i64()
        index.max_level = reader.i64()
        node_count = reader.u64()
        if node_count != collection.pool.count:
            raise CorruptSnapshot("HNSW node count does not match record count")
        neighbors = []
        for _ in range(node_count):
            level_count = reader.u16()
            levels = []
            for _ in range(level_count):
                size = reader.u32()
                levels.append([reader.u32() for _ in range(size)])
            neighbors.append(levels)
        index.neighbors = neighbors
        index.rebuild_member_lists()
    elif collection.schema.index_kind == "ivf_flat":
        index = collection.ivf
        trained = reader.u8()
        if trained:
            nlist = reader.u32()
            raw = reader.take(nlist * collection.schema.dim * 8)
            index.centroids = np.frombuffer(raw, dtype="<f8").reshape(
                nlist, collection.schema.dim
            ).copy()
            index.lists = []
            for _ in range(nlist):
                size = reader.u32()
                index.lists.append([reader.u32() for _ in range(size)])
            index.trained = True
