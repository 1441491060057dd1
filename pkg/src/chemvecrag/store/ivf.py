"""IVF_FLAT: k-means coarse quantizer plus exact scans of probed lists."""

from __future__ import annotations

import math

import numpy as np

from .errors import NotTrained
from .pool import VectorPool

DEFAULT_KMEANS_ITERATIONS = 20


def _kmeans(
    data: np.ndarray, k: int, iterations: int, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Seeded k-means++ init followed by Lloyd iterations, in float64.

    Returns (centroids, assignment). Empty clusters steal the point
    farthest from its current centroid, lowest index on ties.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    n = data.shape[0]
    k = min(k, n)

    centroids = np.empty((k, data.shape[1]), dtype=np.float64)
    first = int(rng.integers(n))
    centroids[0] = data[first]
    closest = np.einsum("ij,ij->i", data - centroids[0], data - centroids[0])
    for c in range(1, k):
        total = float(closest.sum())
        if total <= 0.0:
            pick = int(rng.integers(n))
        else:
            target = float(rng.random()) * total
            pick = int(np.searchsorted(np.cumsum(closest), target))
            pick = min(pick, n - 1)
        centroids[c] = data[pick]
        dist = np.einsum("ij,ij->i", data - centroids[c], data - centroids[c])
        np.minimum(closest, dist, out=closest)

    assignment = np.zeros(n, dtype=np.int64)
    for _ in range(iterations):
        dists = (
            np.einsum("ij,ij->i", data, data)[:, None]
            + np.einsum("ij,ij->i", centroids, centroids)[None, :]
            - 2.0 * data @ centroids.T
        )
        assignment = np.argmin(dists, axis=1)
        for c in range(k):
            members = data[assignment == c]
            if len(members):
                centroids[c] = members.mean(axis=0)
            else:
                spread = dists[np.arange(n), assignment]
                donor = int(np.argmax(spread))
                centroids[c] = data[donor]
                assignment[donor] = c
    return centroids, assignment


class IvfFlatIndex:
    def __init__(
        self,
        pool: VectorPool,
        iterations: int = DEFAULT_KMEANS_ITERATIONS,
        seed: int = 0,
        nlist: int | None = None,
    ) -> None:
        self.pool = pool
        self.iterations = iterations
        self.seed = seed
        self.nlist_override = nlist
        self.trained = False
        self.centroids: np.ndarray | None = None
        self.lists: list[list[int]] = []

    @property
    def nlist(self) -> int:
        return len(self.lists)

    def default_nprobe(self) -> int:
        return max(1, self.nlist // 8)

    def train(self, ordinals: list[int]) -> None:
        """Compute centroids (nlist = round(sqrt(N)) unless overridden) and
        assign every given ordinal to its nearest list."""
        if not ordinals:
            raise ValueError("cannot train IVF on an empty collection")
        data = np.stack([self.pool.get_f64(o) for o in ordinals])
        k = self.nlist_override or max(1, round(math.sqrt(len(ordinals))))
        centroids, assignment = _kmeans(data, k, self.iterations, self.seed)
        self.centroids = centroids
        self.lists = [[] for _ in range(centroids.shape[0])]
        for ordinal, cluster in zip(ordinals, assignment):
            self.lists[int(cluster)].append(ordinal)
        self.trained = True

    def _nearest_centroid(self, vector64: np.ndarray) -> int:
        diff = self.centroids - vector64
        dists = np.einsum("ij,ij->i", diff, diff)
        return int(np.argmin(dists))  # argmin keeps the lowest index on ties

    def add(self, ordinal: int) -> None:
        if not self.trained:
            return  # picked up by the next train()
        self.lists[self._nearest_centroid(self.pool.get_f64(ordinal))].append(ordinal)

    def remove(self, ordinal: int) -> None:
        if not self.trained:
            return
        for members in self.lists:
            if ordinal in members:
                members.remove(ordinal)
                return

    def probe(self, query64: np.ndarray, nprobe: int) -> list[int]:
        """Ordinals from the nprobe nearest centroid lists."""
        if not self.trained:
            raise NotTrained("IVF index has no trained centroids")
        diff = self.centroids - query64
        dists = np.einsum("ij,ij->i", diff, diff)
        order = np.lexsort((np.arange(len(dists)), dists))
        out: list[int] = []
        for cluster in order[: max(1, nprobe)]:
            out.extend(self.lists[int(cluster)])
        return out

    def assigned_list(self, query64: np.ndarray) -> int:
        if not self.trained:
            raise NotTrained("IVF index has no trained centroids")
        return self._nearest_centroid(query64)
