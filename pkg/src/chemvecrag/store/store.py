"""Vector store: named collections, cross-collection links, persistence."""

from __future__ import annotations

import hashlib
from pathlib import Path
from typing import Iterable, Sequence

from .collection import Collection, HnswParams, IvfParams
from .errors import UnknownCollection, UnknownId
from .schema import CollectionRecord, CollectionSchema


def _collection_seed(store_seed: int, name: str) -> int:
    digest = hashlib.blake2b(f"{store_seed}:{name}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


class VectorStore:
    def __init__(self, seed: int = 0) -> None:
        self.seed = seed
        self._collections: dict[str, Collection] = {}

    # -- collections -----------------------------------------------------------

    def create_collection(
        self,
        schema: CollectionSchema,
        hnsw_params: HnswParams | None = None,
        ivf_params: IvfParams | None = None,
    ) -> Collection:
        if schema.name in self._collections:
            raise ValueError(f"collection '{schema.name}' already exists")
        collection = Collection(
            schema,
            seed=_collection_seed(self.seed, schema.name),
            hnsw_params=hnsw_params,
            ivf_params=ivf_params,
        )
        self._collections[schema.name] = collection
        return collection

    def collection(self, name: str) -> Collection:
        try:
            return self._collections[name]
        except KeyError:
            raise UnknownCollection(f"no collection named '{name}'") from None

    def collections(self) -> list[Collection]:
        return list(self._collections.values())

    def has_collection(self, name: str) -> bool:
        return name in self._collections

    # -- records ----------------------------------------------------------------

    def insert(self, name: str, records: Iterable[CollectionRecord]) -> int:
        """Insert records, validating link targets against the whole store."""
        records = list(records)
        for record in records:
            for target_collection, target_id in record.links:
                self._check_target(target_collection, target_id)
        return self.collection(name).insert(records)

    def delete(self, name: str, ids: Sequence[str]) -> int:
        return self.collection(name).delete(ids)

    def _check_target(self, collection_name: str, record_id: str) -> None:
        target = self.collection(collection_name)
        if not target.has(record_id):
            raise UnknownId(
                f"link target '{record_id}' not found in '{collection_name}'"
            )

    def link(self, a: tuple[str, str], b: tuple[str, str]) -> None:
        """Create a bidirectional link between two existing records."""
        self._check_target(*a)
        self._check_target(*b)
        row_a = self.collection(a[0])._rows[a[1]]
        row_b = self.collection(b[0])._rows[b[1]]
        if b not in row_a.links:
            row_a.links.append(b)
        if a not in row_b.links:
            row_b.links.append(a)

    def cross_lookup(
        self, from_collection: str, hit_ids: Sequence[str]
    ) -> dict[str, list[tuple[str, CollectionRecord]]]:
        """All linked records for each hit id, grouped by hit.

        A hit with no links maps to an empty list; an unknown hit id is an
        error.
        """
        source = self.collection(from_collection)
        out: dict[str, list[tuple[str, CollectionRecord]]] = {}
        for hit_id in hit_ids:
            record = source.get(hit_id)  # raises UnknownId
            linked: list[tuple[str, CollectionRecord]] = []
            for target_collection, target_id in record.links:
                target = self.collection(target_collection)
                if target.has(target_id):
                    linked.append((target_collection, target.get(target_id)))
            out[hit_id] = linked
        return out

    # -- persistence -------------------------------------------------------------

    def save(self, path: str | Path) -> None:
        from .snapshot import write_snapshot

        write_snapshot(self, path)

    @classmethod
    def load(cls, path: str | Path) -> "VectorStore":
        from .snapshot import read_snapshot

        return read_snapshot(path)
