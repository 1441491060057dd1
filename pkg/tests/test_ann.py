"""HNSW and IVF behavior against the brute-force oracle."""

import numpy as np
import pytest

from chemvecrag.embedding import EmbeddingVector
from chemvecrag.store import (
    CollectionRecord,
    CollectionSchema,
    NotTrained,
    VectorStore,
)

from conftest import ordinal_of, records_for


def recall_at_10(collection, queries, truth, search):
    total = 0.0
    for query, expected in zip(queries, truth):
        hits = search(collection, EmbeddingVector(query))
        total += len({ordinal_of(h.id) for h in hits} & expected) / 10
    return total / len(queries)


class TestHnsw:
    def test_self_query_rank_one(self, hnsw_10k, ann_workload):
        vectors, _ = ann_workload
        for i in (0, 123, 9999):
            hits = hnsw_10k.hnsw_search(EmbeddingVector(vectors[i]), 1)
            assert hits[0].id == f"v{i:05d}"
            assert hits[0].l2_distance == 0.0

    def test_recall_at_defaults(self, hnsw_10k, ann_workload, ann_ground_truth):
        _, queries = ann_workload
        recall = recall_at_10(
            hnsw_10k, queries, ann_ground_truth,
            lambda col, q: col.hnsw_search(q, 10),
        )
        assert recall >= 0.95

    def test_exhaustive_beam_is_exact(self, hnsw_10k, ann_workload, ann_ground_truth):
        _, queries = ann_workload
        n = len(hnsw_10k)
        for query, expected in zip(queries[:20], ann_ground_truth[:20]):
            hits = hnsw_10k.hnsw_search(EmbeddingVector(query), 10, ef_search=n)
            assert {ordinal_of(h.id) for h in hits} == expected

    def test_determinism_same_seed_same_graph(self):
        rng = np.random.default_rng(42)
        vectors = rng.normal(size=(300, 16)).astype(np.float32)

        def build():
            store = VectorStore(seed=11)
            col = store.create_collection(
                CollectionSchema(name="d", dim=16, index_kind="hnsw")
            )
            col.insert(records_for(vectors))
            return col

        a, b = build(), build()
        assert a.hnsw.entry == b.hnsw.entry
        assert a.hnsw.neighbors == b.hnsw.neighbors
        q = EmbeddingVector(vectors[5])
        assert [(h.id, h.l2_distance) for h in a.hnsw_search(q, 5)] == \
            [(h.id, h.l2_distance) for h in b.hnsw_search(q, 5)]

    def test_incremental_insert_searchable(self):
        store = VectorStore(seed=2)
        col = store.create_collection(CollectionSchema(name="i", dim=4, index_kind="hnsw"))
        rng = np.random.default_rng(3)
        first = rng.normal(size=(50, 4)).astype(np.float32)
        col.insert(records_for(first))
        extra = rng.normal(size=4).astype(np.float32)
        col.insert([CollectionRecord(id="extra", vector=EmbeddingVector(extra), payload="")])
        hits = col.hnsw_search(EmbeddingVector(extra), 1)
        assert hits[0].id == "extra"
        assert hits[0].l2_distance == 0.0

    def test_filtered_search_sound(self):
        store = VectorStore(seed=2)
        col = store.create_collection(
            CollectionSchema(
                name="f", dim=8, index_kind="hnsw", metadata_fields={"mw": "float"}
            )
        )
        rng = np.random.default_rng(9)
        vectors = rng.normal(size=(400, 8)).astype(np.float32)
        col.insert([
            CollectionRecord(
                id=f"v{i:05d}", vector=EmbeddingVector(vectors[i]), payload="",
                metadata={"mw": float(100 + i)},
            )
            for i in range(400)
        ])
        from chemvecrag.store import MetadataFilter

        filt = MetadataFilter.parse("mw:[200,300]", col.schema)
        hits = col.hnsw_search(EmbeddingVector(vectors[0]), 10, filter=filt)
        assert len(hits) == 10
        assert all(200 <= h.metadata["mw"] <= 300 for h in hits)
        # matches the flat oracle under the same filter
        flat = col.flat_search(EmbeddingVector(vectors[0]), 10, filter=filt)
        assert {h.id for h in hits} == {h.id for h in flat}

    def test_reported_distances_match_recomputation(self, hnsw_10k, ann_workload):
        # flat search is the ground-truth oracle for reported distances
        vectors, queries = ann_workload
        for q in queries[:10]:
            q64 = q.astype(np.float64)
            for hit in hnsw_10k.hnsw_search(EmbeddingVector(q), 10):
                stored = vectors[ordinal_of(hit.id)].astype(np.float64)
                expected = float(np.sqrt(((stored - q64) ** 2).sum()))
                assert hit.l2_distance == pytest.approx(expected, rel=1e-6)

    def test_deleted_records_not_returned(self):
        store = VectorStore(seed=2)
        col = store.create_collection(CollectionSchema(name="t", dim=4, index_kind="hnsw"))
        rng = np.random.default_rng(31)
        vectors = rng.normal(size=(60, 4)).astype(np.float32)
        col.insert(records_for(vectors))
        col.delete(["v00000"])
        hits = col.hnsw_search(EmbeddingVector(vectors[0]), 5)
        assert "v00000" not in {h.id for h in hits}


class TestIvf:
    def test_full_probe_equals_flat(self, ivf_10k, ann_workload):
        _, queries = ann_workload
        nlist = ivf_10k.ivf.nlist
        for query in queries[:25]:
            q = EmbeddingVector(query)
            full = ivf_10k.ivf_search(q, 10, nprobe=nlist)
            flat = ivf_10k.flat_search(q, 10)
            assert [(h.id, h.l2_distance) for h in full] == \
                [(h.id, h.l2_distance) for h in flat]

    def test_recall_default_nprobe(self, ivf_10k, ann_workload, ann_ground_truth):
        _, queries = ann_workload
        nlist = ivf_10k.ivf.nlist
        nprobe = max(1, nlist // 8)
        recall = recall_at_10(
            ivf_10k, queries, ann_ground_truth,
            lambda col, q: col.ivf_search(q, 10, nprobe=nprobe),
        )
        assert recall >= 0.9

    def test_self_query_when_own_list_probed(self, ivf_10k, ann_workload):
        vectors, _ = ann_workload
        for i in (5, 777, 4242):
            q64 = vectors[i].astype(np.float64)
            own_list = ivf_10k.ivf.assigned_list(q64)
            probed_first = ivf_10k.ivf.probe(q64, 1)
            # the query's nearest centroid is its own assignment
            assert ivf_10k.pool.count and own_list == ivf_10k.ivf._nearest_centroid(q64)
            assert i in probed_first
            hits = ivf_10k.ivf_search(EmbeddingVector(vectors[i]), 1, nprobe=1)
            assert hits[0].id == f"v{i:05d}"
            assert hits[0].l2_distance == 0.0

    def test_not_trained(self):
        store = VectorStore(seed=4)
        col = store.create_collection(CollectionSchema(name="u", dim=4, index_kind="ivf_flat"))
        rng = np.random.default_rng(8)
        col.insert(records_for(rng.normal(size=(10, 4)).astype(np.float32)))
        with pytest.raises(NotTrained):
            col.ivf_search(EmbeddingVector(np.zeros(4, dtype=np.float32)), 1)

    def test_nlist_default_sqrt(self, ivf_10k):
        assert ivf_10k.ivf.nlist == 100

    def test_incremental_add_after_train(self):
        store = VectorStore(seed=4)
        col = store.create_collection(CollectionSchema(name="a", dim=4, index_kind="ivf_flat"))
        rng = np.random.default_rng(12)
        col.insert(records_for(rng.normal(size=(100, 4)).astype(np.float32)))
        col.train_index()
        extra = rng.normal(size=4).astype(np.float32)
        col.insert([CollectionRecord(id="extra", vector=EmbeddingVector(extra), payload="")])
        hits = col.ivf_search(EmbeddingVector(extra), 1, nprobe=1)
        assert hits[0].id == "extra"

    def test_deterministic_training(self):
        rng = np.random.default_rng(55)
        vectors = rng.normal(size=(200, 8)).astype(np.float32)

        def build():
            store = VectorStore(seed=21)
            col = store.create_collection(
                CollectionSchema(name="k", dim=8, index_kind="ivf_flat")
            )
            col.insert(records_for(vectors))
            col.train_index()
            return col

        a, b = build(), build()
        assert np.array_equal(a.ivf.centroids, b.ivf.centroids)
        assert a.ivf.lists == b.ivf.lists
