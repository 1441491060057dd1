"""Molecular fingerprints and set-overlap similarity coefficients."""

from .core import (
    KIND_MACCS,
    KIND_MORGAN,
    KIND_PATH,
    Fingerprint,
    KindMismatch,
    WidthMismatch,
    dice,
    fnv1a64,
    tanimoto,
)
from .maccs import IMPLEMENTED_KEYS, MACCS_WIDTH, key_manifest, maccs_fingerprint
from .morgan import morgan_fingerprint
from .pathfp import path_fingerprint

__all__ = [
    "Fingerprint",
    "IMPLEMENTED_KEYS",
    "KIND_MACCS",
    "KIND_MORGAN",
    "KIND_PATH",
    "KindMismatch",
    "MACCS_WIDTH",
    "WidthMismatch",
    "dice",
    "fnv1a64",
    "key_manifest",
    "maccs_fingerprint",
    "morgan_fingerprint",
    "path_fingerprint",
    "tanimoto",
]
