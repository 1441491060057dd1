"""One collection: records, vectors and the index the schema asked for.

Concurrency contract: many readers or one writer. Searches take the read
side; insert/delete/train take the write side. Index construction is
deterministic given the collection seed and insert order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ..embedding.vector import EmbeddingVector
from ..errors import DimMismatch
from .errors import DuplicateId, NotTrained, UnknownId
from .hnsw import DEFAULT_EF_SEARCH, HnswIndex
from .ivf import IvfFlatIndex
from .locks import RWLock
from .pool import VectorPool
from .schema import CollectionRecord, CollectionSchema, MetadataFilter, SearchHit

# Filtered ANN search over-fetches by this factor, doubling until k
# survivors are found or the index is exhausted, then post-filters.
OVERFETCH_FACTOR = 4


@dataclass
class HnswParams:
    m: int = 16
    ef_construction: int = 200
    ef_search: int = DEFAULT_EF_SEARCH


@dataclass
class IvfParams:
    iterations: int = 20
    nlist: int = 0      # 0 -> round(sqrt(N)) at train time
    nprobe: int = 0     # 0 -> max(1, nlist // 8)


@dataclass
class _Row:
    ordinal: int
    id: str
    payload: str
    metadata: dict
    links: list[tuple[str, str]] = field(default_factory=list)
    deleted: bool = False


class Collection:
    def __init__(
        self,
        schema: CollectionSchema,
        seed: int = 0,
        hnsw_params: HnswParams | None = None,
        ivf_params: IvfParams | None = None,
    ) -> None:
        self.schema = schema
        self.seed = seed
        self.hnsw_params = hnsw_params or HnswParams()
        self.ivf_params = ivf_params or IvfParams()
        self.pool = VectorPool(schema.dim)
        self.lock = RWLock()
        self._rows: dict[str, _Row] = {}
        self._by_ordinal: list[_Row] = []
        self._deleted_count = 0
        self.hnsw: HnswIndex | None = None
        self.ivf: IvfFlatIndex | None = None
        if schema.index_kind == "hnsw":
            p = self.hnsw_params
            self.hnsw = HnswIndex(
                self.pool, m=p.m, ef_construction=p.ef_construction, seed=seed
            )
        elif schema.index_kind == "ivf_flat":
            p = self.ivf_params
            self.ivf = IvfFlatIndex(
                self.pool,
                iterations=p.iterations,
                seed=seed,
                nlist=p.nlist or None,
            )

    # -- bookkeeping ---------------------------------------------------------

    def __len__(self) -> int:
        return len(self._by_ordinal) - self._deleted_count

    @property
    def count(self) -> int:
        return len(self)

    def ids(self) -> list[str]:
        return [row.id for row in self._by_ordinal if not row.deleted]

    def has(self, record_id: str) -> bool:
        row = self._rows.get(record_id)
        return row is not None and not row.deleted

    def get(self, record_id: str) -> CollectionRecord:
        row = self._rows.get(record_id)
        if row is None or row.deleted:
            raise UnknownId(f"no record '{record_id}' in collection '{self.schema.name}'")
        return CollectionRecord(
            id=row.id,
            vector=EmbeddingVector(self.pool.get_f32(row.ordinal)),
            payload=row.payload,
            metadata=dict(row.metadata),
            links=tuple(row.links),
        )

    # -- writes ---------------------------------------------------------------

    def insert(self, records: Iterable[CollectionRecord]) -> int:
        records = list(records)
        with self.lock.write():
            duplicates = [
                r.id for r in records
                if (r.id in self._rows and not self._rows[r.id].deleted)
            ]
            seen: set[str] = set()
            for record in records:
                if record.id in seen:
                    duplicates.append(record.id)
                seen.add(record.id)
            if duplicates:
                raise DuplicateId(
                    f"duplicate ids in '{self.schema.name}': {sorted(set(duplicates))}"
                )
            for record in records:
                if record.vector.dim != self.schema.dim:
                    raise DimMismatch(
                        f"record '{record.id}' has dim {record.vector.dim}, "
                        f"collection needs {self.schema.dim}"
                    )
            for record in records:
                metadata = self.schema.check_metadata(record.metadata)
                ordinal = self.pool.add(record.vector.values)
                row = _Row(ordinal, record.id, record.payload, metadata,
                           list(record.links))
                # Re-insert over a tombstone replaces the id mapping; the
                # tombstoned row keeps its ordinal slot.
                self._rows[record.id] = row
                self._by_ordinal.append(row)
                if self.hnsw is not None:
                    self.hnsw.insert(ordinal)
                if self.ivf is not None:
                    self.ivf.add(ordinal)
            return len(records)

    def delete(self, ids: Sequence[str]) -> int:
        with self.lock.write():
            removed = 0
            for record_id in ids:
                row = self._rows.get(record_id)
                if row is None or row.deleted:
                    continue
                row.deleted = True
                self._deleted_count += 1
                removed += 1
                if self.ivf is not None:
                    self.ivf.remove(row.ordinal)
                # HNSW rows stay as routing-only nodes; searches skip them.
            return removed

    def train_index(self) -> None:
        """Compute IVF centroids over the current live records."""
        if self.ivf is None:
            return
        with self.lock.write():
            live = [row.ordinal for row in self._by_ordinal if not row.deleted]
            self.ivf.train(live)

    # -- searches -------------------------------------------------------------

    def _hit(self, row: _Row, dist_sq: float) -> SearchHit:
        return SearchHit(
            id=row.id,
            l2_distance=math.sqrt(max(dist_sq, 0.0)),
            payload=row.payload,
            metadata=dict(row.metadata),
        )

    def _rank(
        self, scored: list[tuple[float, _Row]], k: int
    ) -> list[SearchHit]:
        scored.sort(key=lambda pair: (pair[0], pair[1].id))
        return [self._hit(row, dist_sq) for dist_sq, row in scored[:k]]

    def _query64(self, query: EmbeddingVector) -> np.ndarray:
        if query.dim != self.schema.dim:
            raise DimMismatch(
                f"query dim {query.dim} != collection dim {self.schema.dim}"
            )
        return query.values.astype(np.float64)

    def flat_search(
        self,
        query: EmbeddingVector,
        k: int,
        filter: MetadataFilter | None = None,
    ) -> list[SearchHit]:
        """Exact k nearest by L2 among records passing the filter."""
        if k < 1:
            raise ValueError("k must be >= 1")
        query64 = self._query64(query)
        with self.lock.read():
            if filter is not None:
                filter.validate(self.schema)
            rows = [
                row for row in self._by_ordinal
                if not row.deleted and (filter is None or filter.matches(row.metadata))
            ]
            if not rows:
                return []
            dists = self.pool.dists_sq(query64, [row.ordinal for row in rows])
            return self._rank(list(zip((float(d) for d in dists), rows)), k)

    def hnsw_search(
        self,
        query: EmbeddingVector,
        k: int,
        ef_search: int | None = None,
        filter: MetadataFilter | None = None,
    ) -> list[SearchHit]:
        if self.hnsw is None:
            raise ValueError(f"collection '{self.schema.name}' has no HNSW index")
        if k < 1:
            raise ValueError("k must be >= 1")
        query64 = self._query64(query)
        ef = ef_search or self.hnsw_params.ef_search
        with self.lock.read():
            if filter is not None:
                filter.validate(self.schema)
            total = len(self.hnsw)
            plain = filter is None and self._deleted_count == 0
            fetch = k if plain else min(max(OVERFETCH_FACTOR * k, k), max(total, 1))
            while True:
                raw = self.hnsw.search(query64, limit=fetch, ef=ef)
                survivors = []
                for _, ordinal in raw:
                    row = self._by_ordinal[ordinal]
                    if row.deleted:
                        continue
                    if filter is not None and not filter.matches(row.metadata):
                        continue
                    survivors.append(row)
                if len(survivors) >= k or fetch >= total:
                    if not survivors:
                        return []
                    # index distances carry norm-trick noise; re-score
                    # exactly from stored vectors before ranking
                    exact = self.pool.dists_sq(query64, [r.ordinal for r in survivors])
                    return self._rank(
                        [(float(d), row) for d, row in zip(exact, survivors)], k
                    )
                fetch = min(fetch * 2, total)

    def ivf_search(
        self,
        query: EmbeddingVector,
        k: int,
        nprobe: int | None = None,
        filter: MetadataFilter | None = None,
    ) -> list[SearchHit]:
        if self.ivf is None:
            raise ValueError(f"collection '{self.schema.name}' has no IVF index")
        if k < 1:
            raise ValueError("k must be >= 1")
        if not self.ivf.trained:
            raise NotTrained(
                f"collection '{self.schema.name}' must be trained before ivf_search"
            )
        query64 = self._query64(query)
        with self.lock.read():
            if filter is not None:
                filter.validate(self.schema)
            probes = nprobe or self.ivf_params.nprobe or self.ivf.default_nprobe()
            candidates = self.ivf.probe(query64, probes)
            scored = []
            if candidates:
                dists = self.pool.dists_sq(query64, candidates)
                for dist_sq, ordinal in zip(dists, candidates):
                    row = self._by_ordinal[ordinal]
                    if row.deleted:
                        continue
                    if filter is not None and not filter.matches(row.metadata):
                        continue
                    scored.append((float(dist_sq), row))
            return self._rank(scored, k)

    def search(
        self,
        query: EmbeddingVector,
        k: int,
        filter: MetadataFilter | None = None,
        ef_search: int | None = None,
        nprobe: int | None = None,
    ) -> list[SearchHit]:
        """Dispatch to the index named by the schema."""
        if self.schema.index_kind == "hnsw":
            return self.hnsw_search(query, k, ef_search=ef_search, filter=filter)
        if self.schema.index_kind == "ivf_flat":
            return self.ivf_search(query, k, nprobe=nprobe, filter=filter)
        return self.flat_search(query, k, filter=filter)
