"""Dense embedding vectors and L2 normalization."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DimMismatch, ZeroVector


@dataclass(frozen=True)
class EmbeddingVector:
    """Immutable float32 vector with an explicit normalization flag.

    Construction rejects NaN/Inf components; a set ``normalized`` flag
    promises a unit L2 norm within 1e-6.
    """

    values: np.ndarray
    normalized: bool = field(default=False)

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=np.float32).reshape(-1)
        if arr.size == 0:
            raise ValueError("embedding vector must have at least one component")
        if not np.isfinite(arr).all():
            raise ValueError("embedding vector contains NaN or Inf")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        if self.normalized:
            norm = float(np.linalg.norm(arr.astype(np.float64)))
            if abs(norm - 1.0) >= 1e-6:
                raise ValueError(f"normalized flag set but |v| = {norm}")

    @property
    def dim(self) -> int:
        return int(self.values.shape[0])

    def norm(self) -> float:
        return float(np.linalg.norm(self.values.astype(np.float64)))

    def tolist(self) -> list[float]:
        return [float(x) for x in self.values]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EmbeddingVector):
            return NotImplemented
        return (
            self.normalized == other.normalized
            and self.values.shape == other.values.shape
            and bool(np.array_equal(self.values, other.values))
        )

    def __hash__(self) -> int:
        return hash((self.values.tobytes(), self.normalized))


def check_same_dim(a: EmbeddingVector, b: EmbeddingVector) -> None:
    if a.dim != b.dim:
        raise DimMismatch(f"dimension {a.dim} != {b.dim}")


def l2_normalize(vector: EmbeddingVector) -> EmbeddingVector:
    """Scale to unit L2 norm, preserving direction.

    Raises :class:`ZeroVector` for the zero vector.
    """
    values = vector.values.astype(np.float64)
    norm = float(np.linalg.norm(values))
    if norm == 0.0:
        raise ZeroVector("cannot normalize the zero vector")
    return EmbeddingVector((values / norm).astype(np.float32), normalized=True)
