"""Embedding vectors, providers and the query algebra."""

from .algebra import (
    Add,
    Average,
    Embed,
    Expression,
    Normalize,
    Scale,
    Sub,
    evaluate,
    expression_from_json,
)
from .embv1 import Embv1Error, read_embv1, validate_embv1, write_embv1
from .providers import (
    MODALITY_IMAGE,
    MODALITY_TEXT,
    EmbeddingProvider,
    FileProvider,
    HttpProvider,
    MemoizedProvider,
    MockProvider,
    ModalityMismatch,
    ProviderFailure,
    embed_image,
    embed_text,
)
from .spectrum import embed_spectrum_compounds
from .vector import EmbeddingVector, l2_normalize

__all__ = [
    "Add",
    "Average",
    "Embed",
    "EmbeddingProvider",
    "EmbeddingVector",
    "Embv1Error",
    "Expression",
    "FileProvider",
    "HttpProvider",
    "MODALITY_IMAGE",
    "MODALITY_TEXT",
    "MemoizedProvider",
    "MockProvider",
    "ModalityMismatch",
    "Normalize",
    "ProviderFailure",
    "Scale",
    "Sub",
    "embed_image",
    "embed_spectrum_compounds",
    "embed_text",
    "evaluate",
    "expression_from_json",
    "l2_normalize",
    "read_embv1",
    "validate_embv1",
    "write_embv1",
]
