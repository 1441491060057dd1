"""Vector-store errors."""

from __future__ import annotations

from ..errors import ChemVecRagError


class StoreError(ChemVecRagError):
    pass


class DuplicateId(StoreError):
    pass


class UnknownCollection(StoreError):
    pass


class UnknownId(StoreError):
    pass


class NotTrained(StoreError):
    """IVF search requested before k-means centroids were computed."""


class CorruptSnapshot(StoreError):
    """Snapshot magic, structure or checksum validation failed."""


class VersionMismatch(StoreError):
    """Snapshot was written by an incompatible format version."""
