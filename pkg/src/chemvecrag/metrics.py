"""Six-metric similarity panel: embedding metrics next to fingerprint metrics.

For a query structure and its search hits the panel reports cosine and
Euclidean similarity from the embedding vectors, and Tanimoto, path,
MACCS and Dice similarities from fingerprints. Euclidean similarity is
1 / (1 + d) where d is the L2 distance. The "rdkit_path" column is
Tanimoto over our path fingerprints; bit compatibility with the original
toolkit's fingerprints is not claimed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .chem import canonicalize, parse_smiles
from .embedding import EmbeddingProvider, EmbeddingVector, l2_normalize
from .errors import ChemVecRagError, DimMismatch, ZeroVector
from .fingerprints import (
    dice,
    maccs_fingerprint,
    morgan_fingerprint,
    path_fingerprint,
    tanimoto,
)
from .store import Collection, SearchHit


class NegativeDistance(ChemVecRagError):
    pass


def euclidean_similarity(e_d: float) -> float:
    """1 / (1 + e_d) for a nonnegative Euclidean distance."""
    if not np.isfinite(e_d):
        raise NegativeDistance(f"distance must be finite, got {e_d}")
    if e_d < 0:
        raise NegativeDistance(f"distance must be nonnegative, got {e_d}")
    return 1.0 / (1.0 + e_d)


def cosine_similarity(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """dot(a, b) / (|a| |b|), in [-1, 1]."""
    if a.dim != b.dim:
        raise DimMismatch(f"dimension {a.dim} != {b.dim}")
    va = a.values.astype(np.float64)
    vb = b.values.astype(np.float64)
    na = float(np.linalg.norm(va))
    nb = float(np.linalg.norm(vb))
    if na == 0.0 or nb == 0.0:
        raise ZeroVector("cosine similarity of a zero vector")
    return float(va @ vb) / (na * nb)


@dataclass(frozen=True)
class PanelRow:
    rank: int
    hit_id: str
    cosine: float = 0.0
    euclidean_sim: float = 0.0
    tanimoto: float = 0.0
    path_sim: float = 0.0
    maccs_sim: float = 0.0
    dice: float = 0.0
    failed: bool = False
    error: str = ""

    def values(self) -> tuple[float, float, float, float, float, float]:
        return (self.cosine, self.euclidean_sim, self.tanimoto,
                self.path_sim, self.maccs_sim, self.dice)


@dataclass(frozen=True)
class SimilarityPanel:
    query_id: str
    rows: tuple[PanelRow, ...] = field(default=())

    METRIC_NAMES = ("cosine", "euclidean", "tanimoto", "rdkit_path", "maccs", "dice")


def build_panel(
    collection: Collection,
    query_text: str,
    hits: Sequence[SearchHit],
    provider: EmbeddingProvider,
    normalize_query: bool = True,
) -> SimilarityPanel:
    """Compute all six metrics for each hit of a small-molecule query.

    Cosine is reported clipped to [0, 1], matching how unit-normalized
    chemistry embeddings are presented. A hit whose payload fails to
    parse marks its row failed instead of aborting the panel.
    """
    query_graph = parse_smiles(query_text)
    query_canonical = canonicalize(query_graph)
    query_embedding = provider.embed(query_canonical)
    if normalize_query:
        query_embedding = l2_normalize(query_embedding)
    query_morgan = morgan_fingerprint(query_graph)
    query_path = path_fingerprint(query_graph)
    query_maccs = maccs_fingerprint(query_graph)

    rows: list[PanelRow] = []
    for rank, hit in enumerate(hits, start=1):
        try:
            hit_vector = collection.get(hit.id).vector
            hit_graph = parse_smiles(hit.payload)
            cos = max(0.0, cosine_similarity(query_embedding, hit_vector))
            e_d = float(
                np.linalg.norm(
                    query_embedding.values.astype(np.float64)
                    - hit_vector.values.astype(np.float64)
                )
            )
            rows.append(
                PanelRow(
                    rank=rank,
                    hit_id=hit.id,
                    cosine=cos,
                    euclidean_sim=euclidean_similarity(e_d),
                    tanimoto=tanimoto(query_morgan, morgan_fingerprint(hit_graph)),
                    path_sim=tanimoto(query_path, path_fingerprint(hit_graph)),
                    maccs_sim=tanimoto(query_maccs, maccs_fingerprint(hit_graph)),
                    dice=dice(query_morgan, morgan_fingerprint(hit_graph)),
                )
            )
        except ChemVecRagError as exc:
            rows.append(PanelRow(rank=rank, hit_id=hit.id, failed=True, error=str(exc)))
        except ValueError as exc:
            rows.append(PanelRow(rank=rank, hit_id=hit.id, failed=True, error=str(exc)))
    return SimilarityPanel(query_id=query_canonical, rows=tuple(rows))


def export_heatmap(panel: SimilarityPanel, path: str | Path) -> None:
    """Write the panel as CSV: 6 decimal places, LF line endings."""
    lines = ["rank,hit_id,cosine,euclidean,tanimoto,rdkit_path,maccs,dice"]
    for row in panel.rows:
        if row.failed:
            continue
        lines.append(
            f"{row.rank},{row.hit_id},"
            + ",".join(f"{value:.6f}" for value in row.values())
        )
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def parse_heatmap(path: str | Path) -> SimilarityPanel:
    """Re-read an exported heatmap CSV (round-trip checks, tooling)."""
    lines = Path(path).read_text().splitlines()
    rows = []
    for line in lines[1:]:
        parts = line.split(",")
        rank, hit_id = int(parts[0]), parts[1]
        cos, euc, tan, pth, mac, dic = (float(p) for p in parts[2:8])
        rows.append(
            PanelRow(rank=rank, hit_id=hit_id, cosine=cos, euclidean_sim=euc,
                     tanimoto=tan, path_sim=pth, maccs_sim=mac, dice=dic)
        )
    return SimilarityPanel(query_id="", rows=tuple(rows))
