"""Shared fixtures: seeded ANN workloads and their brute-force ground truth."""

import numpy as np
import pytest

from chemvecrag.embedding import EmbeddingVector
from chemvecrag.store import CollectionRecord, CollectionSchema, VectorStore

WORKLOAD_SEED = 20240811
QUERY_SEED = 777
N_VECTORS = 10_000
N_QUERIES = 100
DIM = 128


def clustered_unit_vectors(rng, count, centers, spread=0.35):
    """Unit vectors drawn around shared cluster directions, like real
    embedding corpora."""
    picks = rng.integers(0, centers.shape[0], size=count)
    points = centers[picks] + spread * rng.normal(size=(count, centers.shape[1]))
    points /= np.linalg.norm(points, axis=1, keepdims=True)
    return points.astype(np.float32)


@pytest.fixture(scope="session")
def ann_workload():
    """(vectors, queries): 10k seeded 128-dim unit vectors + 100 queries."""
    rng = np.random.default_rng(WORKLOAD_SEED)
    centers = rng.normal(size=(64, DIM))
    vectors = clustered_unit_vectors(rng, N_VECTORS, centers)
    qrng = np.random.default_rng(QUERY_SEED)
    queries = clustered_unit_vectors(qrng, N_QUERIES, centers)
    return vectors, queries


@pytest.fixture(scope="session")
def ann_ground_truth(ann_workload):
    """Independent brute-force top-10 oracle, straight numpy."""
    vectors, queries = ann_workload
    data = vectors.astype(np.float64)
    truth = []
    for query in queries.astype(np.float64):
        dists = ((data - query) ** 2).sum(axis=1)
        order = np.lexsort((np.arange(len(dists)), dists))
        truth.append({int(i) for i in order[:10]})
    return truth


def records_for(vectors, prefix="v"):
    return [
        CollectionRecord(id=f"{prefix}{i:05d}", vector=EmbeddingVector(vectors[i]), payload="")
        for i in range(len(vectors))
    ]


def ordinal_of(hit_id: str) -> int:
    return int(hit_id[1:])


@pytest.fixture(scope="session")
def hnsw_10k(ann_workload):
    """10k-vector HNSW collection built with spec defaults; shared, read-only."""
    vectors, _ = ann_workload
    store = VectorStore(seed=7)
    collection = store.create_collection(
        CollectionSchema(name="hnsw10k", dim=DIM, index_kind="hnsw")
    )
    collection.insert(records_for(vectors))
    return collection


@pytest.fixture(scope="session")
def ivf_10k(ann_workload):
    vectors, _ = ann_workload
    store = VectorStore(seed=7)
    collection = store.create_collection(
        CollectionSchema(name="ivf10k", dim=DIM, index_kind="ivf_flat")
    )
    collection.insert(records_for(vectors))
    collection.train_index()
    return collection
