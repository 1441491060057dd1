"""Averaged compound embeddings for multi-compound spectra."""

from __future__ import annotations

import numpy as np

from ..chem import canonicalize, parse_smiles
from .providers import EmbeddingProvider
from .vector import EmbeddingVector


def embed_spectrum_compounds(
    provider: EmbeddingProvider, smiles_list: list[str]
) -> EmbeddingVector:
    """Arithmetic mean of per-compound text embeddings.

    Each SMILES is validated and canonicalized before embedding. The mean
    is taken over raw provider outputs, before any normalization, matching
    how multi-compound spectra are stored.
    """
    if not smiles_list:
        raise ValueError("smiles_list must be non-empty")
    vectors = []
    for smiles in smiles_list:
        canonical = canonicalize(parse_smiles(smiles))
        vectors.append(provider.embed(canonical).values.astype(np.float64))
    mean = np.mean(np.stack(vectors), axis=0)
    return EmbeddingVector(mean.astype(np.float32))
