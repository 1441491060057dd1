"""Vector collections with flat, HNSW and IVF_FLAT indexes under L2."""

from .collection import Collection, HnswParams, IvfParams
from .errors import (
    CorruptSnapshot,
    DuplicateId,
    NotTrained,
    StoreError,
    UnknownCollection,
    UnknownId,
    VersionMismatch,
)
from .schema import (
    CollectionRecord,
    CollectionSchema,
    FieldEquals,
    FieldRange,
    MetadataFilter,
    SearchHit,
)
from .store import VectorStore

__all__ = [
    "Collection",
    "CollectionRecord",
    "CollectionSchema",
    "CorruptSnapshot",
    "DuplicateId",
    "FieldEquals",
    "FieldRange",
    "HnswParams",
    "IvfParams",
    "MetadataFilter",
    "NotTrained",
    "SearchHit",
    "StoreError",
    "UnknownCollection",
    "UnknownId",
    "VectorStore",
    "VersionMismatch",
]
