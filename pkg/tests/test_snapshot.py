"""Snapshot persistence: bit-identical reload, corruption detection."""

import struct

import numpy as np
import pytest

from chemvecrag.embedding import EmbeddingVector
from chemvecrag.store import (
    CollectionRecord,
    CollectionSchema,
    CorruptSnapshot,
    VectorStore,
    VersionMismatch,
)
from chemvecrag.store.snapshot import crc32c

from conftest import records_for


def build_store(index_kind="hnsw", n=300, dim=16, seed=13):
    rng = np.random.default_rng(seed)
    vectors = rng.normal(size=(n, dim)).astype(np.float32)
    store = VectorStore(seed=99)
    col = store.create_collection(
        CollectionSchema(
            name="snap", dim=dim, index_kind=index_kind,
            metadata_fields={"mw": "float"},
        )
    )
    col.insert([
        CollectionRecord(
            id=f"v{i:05d}", vector=EmbeddingVector(vectors[i]),
            payload=f"payload-{i}", metadata={"mw": float(i)},
        )
        for i in range(n)
    ])
    if index_kind == "ivf_flat":
        col.train_index()
    return store, vectors


class TestCrc32c:
    def test_known_vectors(self):
        # published CRC32C check values
        assert crc32c(b"") == 0
        assert crc32c(b"123456789") == 0xE3069283
        assert crc32c(b"\x00" * 32) == 0x8A9136AA


@pytest.mark.parametrize("index_kind", ["flat", "hnsw", "ivf_flat"])
class TestRoundTrip:
    def test_search_results_bit_identical(self, index_kind, tmp_path):
        store, vectors = build_store(index_kind)
        path = tmp_path / "store.cvrs"
        store.save(path)
        loaded = VectorStore.load(path)

        col_a = store.collection("snap")
        col_b = loaded.collection("snap")
        rng = np.random.default_rng(31337)
        queries = rng.normal(size=(100, 16)).astype(np.float32)
        for q in queries:
            qe = EmbeddingVector(q)
            before = [(h.id, h.l2_distance) for h in col_a.search(qe, 5)]
            after = [(h.id, h.l2_distance) for h in col_b.search(qe, 5)]
            assert before == after

    def test_vectors_bit_exact(self, index_kind, tmp_path):
        store, vectors = build_store(index_kind)
        path = tmp_path / "store.cvrs"
        store.save(path)
        loaded = VectorStore.load(path)
        col = loaded.collection("snap")
        for i in (0, 7, 299):
            stored = col.get(f"v{i:05d}").vector.values
            assert stored.tobytes() == vectors[i].tobytes()


class TestIndexStateSurvives:
    def test_hnsw_graph_identical(self, tmp_path):
        store, _ = build_store("hnsw")
        path = tmp_path / "s.cvrs"
        store.save(path)
        loaded = VectorStore.load(path)
        assert loaded.collection("snap").hnsw.neighbors == \
            store.collection("snap").hnsw.neighbors
        assert loaded.collection("snap").hnsw.entry == store.collection("snap").hnsw.entry
        assert loaded.collection("snap").hnsw.insert_counter == \
            store.collection("snap").hnsw.insert_counter

    def test_post_load_inserts_continue_deterministically(self, tmp_path):
        store, _ = build_store("hnsw", n=100)
        rng = np.random.default_rng(77)
        extra = rng.normal(size=(20, 16)).astype(np.float32)
        path = tmp_path / "s.cvrs"
        store.save(path)
        loaded = VectorStore.load(path)
        more = [
            CollectionRecord(id=f"x{i}", vector=EmbeddingVector(extra[i]), payload="")
            for i in range(20)
        ]
        store.insert("snap", [CollectionRecord(r.id, r.vector, r.payload) for r in more])
        loaded.insert("snap", more)
        assert store.collection("snap").hnsw.neighbors == \
            loaded.collection("snap").hnsw.neighbors

    def test_ivf_centroids_identical(self, tmp_path):
        store, _ = build_store("ivf_flat")
        path = tmp_path / "s.cvrs"
        store.save(path)
        loaded = VectorStore.load(path)
        assert np.array_equal(
            loaded.collection("snap").ivf.centroids,
            store.collection("snap").ivf.centroids,
        )
        assert loaded.collection("snap").ivf.lists == store.collection("snap").ivf.lists


class TestCorruption:
    def test_truncated(self, tmp_path):
        store, _ = build_store("flat", n=20)
        path = tmp_path / "s.cvrs"
        store.save(path)
        data = path.read_bytes()
        path.write_bytes(data[: len(data) // 2])
        with pytest.raises(CorruptSnapshot):
            VectorStore.load(path)

    def test_flipped_byte(self, tmp_path):
        store, _ = build_store("flat", n=20)
        path = tmp_path / "s.cvrs"
        store.save(path)
        data = bytearray(path.read_bytes())
        data[len(data) // 2] ^= 0xFF
        path.write_bytes(bytes(data))
        with pytest.raises(CorruptSnapshot):
            VectorStore.load(path)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "s.cvrs"
        path.write_bytes(b"NOTSNAP" + b"\x00" * 64)
        with pytest.raises(CorruptSnapshot):
            VectorStore.load(path)

    def test_version_mismatch(self, tmp_path):
        store, _ = build_store("flat", n=5)
        path = tmp_path / "s.cvrs"
        store.save(path)
        data = bytearray(path.read_bytes())
        # bump the version field and re-seal the checksum
        struct.pack_into("<H", data, 6, 9)
        body = bytes(data[:-4])
        path.write_bytes(body + struct.pack("<I", crc32c(body)))
        with pytest.raises(VersionMismatch):
            VectorStore.load(path)

    def test_empty_store_round_trips(self, tmp_path):
        store = VectorStore(seed=1)
        store.create_collection(CollectionSchema(name="empty", dim=4))
        path = tmp_path / "s.cvrs"
        store.save(path)
        loaded = VectorStore.load(path)
        assert loaded.collection("empty").count == 0

    def test_links_and_deletions_survive(self, tmp_path):
        store = VectorStore(seed=1)
        store.create_collection(CollectionSchema(name="a", dim=2))
        store.create_collection(CollectionSchema(name="b", dim=2))
        va = EmbeddingVector(np.array([1.0, 0.0], dtype=np.float32))
        vb = EmbeddingVector(np.array([0.0, 1.0], dtype=np.float32))
        store.insert("a", [CollectionRecord("a1", va, "pa"), CollectionRecord("a2", vb, "pa2")])
        store.insert("b", [CollectionRecord("b1", vb, "pb")])
        store.link(("a", "a1"), ("b", "b1"))
        store.delete("a", ["a2"])
        path = tmp_path / "s.cvrs"
        store.save(path)
        loaded = VectorStore.load(path)
        assert loaded.collection("a").count == 1
        out = loaded.cross_lookup("a", ["a1"])
        assert [(c, r.id) for c, r in out["a1"]] == [("b", "b1")]
