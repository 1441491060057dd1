"""Embedding providers: deterministic mock, EMBV1 file lookup, HTTP.

Test suites run entirely on :class:`MockProvider` and
:class:`FileProvider`; the HTTP provider exists for wiring real models
without running them in-process.
"""

from __future__ import annotations

import base64
import hashlib
import threading
from collections import OrderedDict
from pathlib import Path
from typing import Protocol, runtime_checkable

import numpy as np

from ..errors import ChemVecRagError
from .embv1 import read_embv1
from .vector import EmbeddingVector

MODALITY_TEXT = "text"
MODALITY_IMAGE = "image"


class ProviderFailure(ChemVecRagError):
    """A provider could not produce an embedding."""


class ModalityMismatch(ChemVecRagError):
    """Input kind does not match the provider's modality."""


@runtime_checkable
class EmbeddingProvider(Protocol):
    """Deterministic embedding source: same input, same vector."""

    name: str
    modality: str
    dim: int

    def embed(self, payload: str | bytes) -> EmbeddingVector: ...


def embed_text(provider: EmbeddingProvider, text: str) -> EmbeddingVector:
    if provider.modality != MODALITY_TEXT:
        raise ModalityMismatch(f"provider '{provider.name}' embeds {provider.modality}")
    return provider.embed(text)


def embed_image(provider: EmbeddingProvider, data: bytes) -> EmbeddingVector:
    if provider.modality != MODALITY_IMAGE:
        raise ModalityMismatch(f"provider '{provider.name}' embeds {provider.modality}")
    return provider.embed(data)


class MockProvider:
    """Character n-gram feature hashing followed by a seeded signed
    random projection.

    Deterministic for a fixed seed, keeps similar strings nearby (shared
    n-grams share hash buckets), and needs nothing external.
    """

    _FEATURES = 4096
    DEFAULT_SEED = 0x5EED_CAFE

    def __init__(self, dim: int = 64, modality: str = MODALITY_TEXT,
                 seed: int = DEFAULT_SEED, name: str | None = None) -> None:
        self.dim = dim
        self.modality = modality
        self.name = name or f"mock-{modality}-{dim}"
        rng = np.random.Generator(np.random.PCG64(seed))
        signs = rng.integers(0, 2, size=(dim, self._FEATURES), dtype=np.int8)
        self._projection = (signs.astype(np.float64) * 2.0 - 1.0) / np.sqrt(self._FEATURES)

    def _features(self, payload: str | bytes) -> np.ndarray:
        data = payload.encode("utf-8") if isinstance(payload, str) else bytes(payload)
        counts = np.zeros(self._FEATURES, dtype=np.float64)
        for size in (2, 3):
            for i in range(max(len(data) - size + 1, 0)):
                gram = data[i:i + size]
                digest = hashlib.blake2b(gram, digest_size=8).digest()
                bucket = int.from_bytes(digest[:4], "little") % self._FEATURES
                sign = 1.0 if digest[4] & 1 else -1.0
                counts[bucket] += sign
        if len(data) < 2:  # degenerate inputs still get a feature
            digest = hashlib.blake2b(data, digest_size=8).digest()
            counts[int.from_bytes(digest[:4], "little") % self._FEATURES] += 1.0
        return counts

    def embed(self, payload: str | bytes) -> EmbeddingVector:
        values = self._projection @ self._features(payload)
        norm = np.linalg.norm(values)
        if norm == 0.0:
            values = self._projection[:, 0].copy()
        return EmbeddingVector(values.astype(np.float32))


class FileProvider:
    """Lookup provider over a loaded EMBV1 file; misses are errors."""

    def __init__(self, path: str | Path, modality: str = MODALITY_TEXT,
                 name: str | None = None) -> None:
        self.path = Path(path)
        self.modality = modality
        self.name = name or f"file:{self.path.name}"
        dim, records = read_embv1(self.path)
        self.dim = dim
        self._records = records

    def __len__(self) -> int:
        return len(self._records)

    def ids(self) -> list[str]:
        return list(self._records)

    def embed(self, payload: str | bytes) -> EmbeddingVector:
        key = payload if isinstance(payload, str) else payload.decode("utf-8", "replace")
        values = self._records.get(key)
        if values is None:
            raise ProviderFailure(f"no stored embedding for '{key}' in {self.path}")
        return EmbeddingVector(values)


class HttpProvider:
    """POSTs ``{"input": ..., "modality": ...}`` to an embedding endpoint.

    Expects ``{"dim": n, "values": [...]}`` back. Image payloads are sent
    base64-encoded.
    """

    def __init__(self, endpoint: str, modality: str = MODALITY_TEXT,
                 dim: int | None = None, timeout: float = 30.0,
                 name: str | None = None, transport=None) -> None:
        self.endpoint = endpoint
        self.modality = modality
        self.dim = dim or 0
        self.timeout = timeout
        self.name = name or f"http:{endpoint}"
        self._transport = transport  # injectable for tests

    def embed(self, payload: str | bytes) -> EmbeddingVector:
        import httpx

        if isinstance(payload, bytes):
            body = {"input": base64.b64encode(payload).decode("ascii"),
                    "modality": self.modality}
        else:
            body = {"input": payload, "modality": self.modality}
        try:
            with httpx.Client(transport=self._transport,
                              timeout=self.timeout) as client:
                response = client.post(self.endpoint, json=body)
            response.raise_for_status()
            data = response.json()
        except Exception as exc:
            raise ProviderFailure(f"embedding endpoint failed: {exc}") from exc
        values = np.asarray(data.get("values", []), dtype=np.float32)
        dim = int(data.get("dim", values.shape[0]))
        if values.shape[0] != dim or dim == 0:
            raise ProviderFailure(f"endpoint returned {values.shape[0]} values, dim {dim}")
        if self.dim and dim != self.dim:
            raise ProviderFailure(f"endpoint dim {dim} != configured {self.dim}")
        if not self.dim:
            self.dim = dim
        return EmbeddingVector(values)


class MemoizedProvider:
    """Bounded in-memory memo over another provider, keyed by input hash."""

    def __init__(self, inner: EmbeddingProvider, max_entries: int = 4096) -> None:
        self.inner = inner
        self.name = f"memo({inner.name})"
        self.max_entries = max_entries
        self._cache: OrderedDict[bytes, EmbeddingVector] = OrderedDict()
        self._lock = threading.Lock()

    @property
    def modality(self) -> str:
        return self.inner.modality

    @property
    def dim(self) -> int:
        return self.inner.dim

    def embed(self, payload: str | bytes) -> EmbeddingVector:
        raw = payload.encode("utf-8") if isinstance(payload, str) else bytes(payload)
        key = hashlib.sha256(raw).digest()
        with self._lock:
            hit = self._cache.get(key)
            if hit is not None:
                self._cache.move_to_end(key)
                return hit
        vector = self.inner.embed(payload)
        with self._lock:
            self._cache[key] = vector
            while len(self._cache) > self.max_entries:
                self._cache.popitem(last=False)
        return vector
