"""Batch embedding sidecar emitting EMBV1 files and spectrum manifests."""

from .backends import (
    BackendUnavailable,
    HashedBackend,
    MolformerBackend,
    OpenClipBackend,
    make_backend,
)
from .batch import (
    BatchError,
    SidecarManifest,
    embed_images,
    embed_texts,
    make_spectrum_manifest,
)
from .embv1 import write_embv1

__version__ = "0.1.0"

__all__ = [
    "BackendUnavailable",
    "BatchError",
    "HashedBackend",
    "MolformerBackend",
    "OpenClipBackend",
    "SidecarManifest",
    "embed_images",
    "embed_texts",
    "make_backend",
    "make_spectrum_manifest",
    "write_embv1",
]
