"""Contiguous vector storage shared by a collection and its index."""

from __future__ import annotations

import numpy as np


class VectorPool:
    """Growable float32 matrix with a float64 shadow for distance math.

    The float32 matrix is authoritative (snapshots round-trip it bit for
    bit); distances are computed in float64 directly from differences so
    a self-query yields exactly 0.0.
    """

    def __init__(self, dim: int, capacity: int = 64) -> None:
        self.dim = dim
        self._f32 = np.zeros((capacity, dim), dtype=np.float32)
        self._f64 = np.zeros((capacity, dim), dtype=np.float64)
        self._sqn64 = np.zeros(capacity, dtype=np.float64)  # row squared norms
        self._sqn32 = np.zeros(capacity, dtype=np.float32)
        self.count = 0

    def __len__(self) -> int:
        return self.count

    def add(self, values: np.ndarray) -> int:
        if self.count == self._f32.shape[0]:
            grown = max(int(self._f32.shape[0] * 1.5), self.count + 1)
            f32 = np.zeros((grown, self.dim), dtype=np.float32)
            f64 = np.zeros((grown, self.dim), dtype=np.float64)
            sqn = np.zeros(grown, dtype=np.float64)
            sqn32 = np.zeros(grown, dtype=np.float32)
            f32[: self.count] = self._f32[: self.count]
            f64[: self.count] = self._f64[: self.count]
            sqn[: self.count] = self._sqn64[: self.count]
            sqn32[: self.count] = self._sqn32[: self.count]
            self._f32, self._f64 = f32, f64
            self._sqn64, self._sqn32 = sqn, sqn32
        row = np.asarray(values, dtype=np.float32).reshape(-1)
        self._f32[self.count] = row
        row64 = row.astype(np.float64)
        self._f64[self.count] = row64
        self._sqn64[self.count] = float(row64 @ row64)
        self._sqn32[self.count] = np.float32(row.astype(np.float64) @ row.astype(np.float64))
        ordinal = self.count
        self.count += 1
        return ordinal

    def get_f32(self, ordinal: int) -> np.ndarray:
        return self._f32[ordinal]

    def get_f64(self, ordinal: int) -> np.ndarray:
        return self._f64[ordinal]

    def matrix_f32(self) -> np.ndarray:
        return self._f32[: self.count]

    def dists_sq(self, query64: np.ndarray, ordinals) -> np.ndarray:
        """Squared L2 distances from query to the given rows, in float64."""
        rows = self._f64[ordinals] if not isinstance(ordinals, slice) else self._f64[ordinals]
        diff = rows - query64
        return np.einsum("ij,ij->i", diff, diff)

    def dists_sq_all(self, query64: np.ndarray) -> np.ndarray:
        diff = self._f64[: self.count] - query64
        return np.einsum("ij,ij->i", diff, diff)
