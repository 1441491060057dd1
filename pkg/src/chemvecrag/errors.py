"""Errors shared across subsystems."""

from __future__ import annotations


class ChemVecRagError(Exception):
    """Base class for errors raised by this package."""


class DimMismatch(ChemVecRagError):
    """Two vectors (or a vector and a collection) disagree on dimension."""


class ZeroVector(ChemVecRagError):
    """An operation that needs a nonzero vector received the zero vector."""
