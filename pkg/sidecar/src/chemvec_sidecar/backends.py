"""Embedding backends.

``hashed`` is a dependency-free deterministic encoder used for wiring
and tests. ``molformer`` and ``openclip`` load transformer checkpoints
(text and image respectively) and require local model assets; both
record their checkpoint id and pooling strategy so output files are
reproducible and auditable.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

MOLFORMER_CHECKPOINT = "ibm/MoLFormer-XL-both-10pct"
OPENCLIP_CHECKPOINT = "laion/CLIP-ViT-g-14-laion2B-s34B-b88K"


class BackendUnavailable(RuntimeError):
    """Model assets or heavyweight dependencies are not available."""


@dataclass(frozen=True)
class BackendInfo:
    name: str
    checkpoint: str
    pooling: str
    dim: int
    modality: str


class HashedBackend:
    """Byte n-gram feature hashing + seeded sign projection; deterministic,
    no external assets. Works for both text and image bytes."""

    _FEATURES = 4096
    _SEED = 0x0C1DE5

    def __init__(self, dim: int = 64, modality: str = "text") -> None:
        self.dim = dim
        self.modality = modality
        rng = np.random.Generator(np.random.PCG64(self._SEED))
        signs = rng.integers(0, 2, size=(dim, self._FEATURES), dtype=np.int8)
        self._projection = (signs.astype(np.float64) * 2.0 - 1.0) / np.sqrt(self._FEATURES)

    @property
    def info(self) -> BackendInfo:
        return BackendInfo("hashed", "builtin-hashed-v1", "feature-hash",
                           self.dim, self.modality)

    def embed(self, payload: str | bytes) -> np.ndarray:
        data = payload.encode("utf-8") if isinstance(payload, str) else bytes(payload)
        counts = np.zeros(self._FEATURES, dtype=np.float64)
        for size in (2, 3):
            for i in range(max(len(data) - size + 1, 0)):
                digest = hashlib.blake2b(data[i:i + size], digest_size=8).digest()
                bucket = int.from_bytes(digest[:4], "little") % self._FEATURES
                counts[bucket] += 1.0 if digest[4] & 1 else -1.0
        if len(data) < 2:
            digest = hashlib.blake2b(data, digest_size=8).digest()
            counts[int.from_bytes(digest[:4], "little") % self._FEATURES] += 1.0
        return (self._projection @ counts).astype(np.float32)


class MolformerBackend:
    """Text embeddings from the MoLFormer checkpoint.

    Pooling defaults to the mean over final-layer token states; the
    choice is recorded in the manifest so downstream results are
    reproducible.
    """

    def __init__(self, checkpoint: str = MOLFORMER_CHECKPOINT,
                 pooling: str = "mean") -> None:
        try:
            import torch
            from transformers import AutoModel, AutoTokenizer
        except ImportError as exc:
            raise BackendUnavailable(f"transformers/torch not installed: {exc}") from exc
        if pooling not in ("mean", "cls"):
            raise ValueError("pooling must be 'mean' or 'cls'")
        self.pooling = pooling
        self.checkpoint = checkpoint
        self._torch = torch
        try:
            self._tokenizer = AutoTokenizer.from_pretrained(
                checkpoint, trust_remote_code=True
            )
            self._model = AutoModel.from_pretrained(
                checkpoint, trust_remote_code=True, deterministic_eval=True
            )
        except Exception as exc:
            raise BackendUnavailable(
                f"cannot load '{checkpoint}' (assets must be available locally): {exc}"
            ) from exc
        self._model.eval()
        self.dim = int(self._model.config.hidden_size)
        self.modality = "text"

    @property
    def info(self) -> BackendInfo:
        return BackendInfo("molformer", self.checkpoint, self.pooling,
                           self.dim, "text")

    def embed(self, payload: str | bytes) -> np.ndarray:
        text = payload if isinstance(payload, str) else payload.decode("utf-8")
        torch = self._torch
        with torch.no_grad():
            tokens = self._tokenizer(text, return_tensors="pt")
            output = self._model(**tokens)
            hidden = output.last_hidden_state[0]
            if self.pooling == "cls":
                pooled = hidden[0]
            else:
                mask = tokens["attention_mask"][0].unsqueeze(-1)
                pooled = (hidden * mask).sum(0) / mask.sum()
        return pooled.cpu().numpy().astype(np.float32)


class OpenClipBackend:
    """Image embeddings from the ViT-g-14 laion2b_s34b_b88k checkpoint."""

    def __init__(self, checkpoint: str = OPENCLIP_CHECKPOINT) -> None:
        try:
            import torch
            from PIL import Image
            from transformers import CLIPImageProcessor, CLIPModel
        except ImportError as exc:
            raise BackendUnavailable(f"transformers/torch/Pillow not installed: {exc}") from exc
        self.checkpoint = checkpoint
        self._torch = torch
        self._image_cls = Image
        try:
            self._model = CLIPModel.from_pretrained(checkpoint)
            self._processor = CLIPImageProcessor.from_pretrained(checkpoint)
        except Exception as exc:
            raise BackendUnavailable(
                f"cannot load '{checkpoint}' (assets must be available locally): {exc}"
            ) from exc
        self._model.eval()
        self.dim = int(self._model.config.projection_dim)
        self.modality = "image"

    @property
    def info(self) -> BackendInfo:
        return BackendInfo("openclip", self.checkpoint, "image-projection",
                           self.dim, "image")

    def embed(self, payload: bytes) -> np.ndarray:
        import io

        torch = self._torch
        image = self._image_cls.open(io.BytesIO(payload)).convert("RGB")
        with torch.no_grad():
            inputs = self._processor(images=image, return_tensors="pt")
            features = self._model.get_image_features(**inputs)[0]
        return features.cpu().numpy().astype(np.float32)


def make_backend(name: str, modality: str, dim: int = 64, pooling: str = "mean"):
    if name == "hashed":
        return HashedBackend(dim=dim, modality=modality)
    if name == "molformer":
        return MolformerBackend(pooling=pooling)
    if name == "openclip":
        return OpenClipBackend()
    raise ValueError(f"unknown backend '{name}'")
