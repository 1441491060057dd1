"""Hashed circular-environment (ECFP-style) fingerprints."""

from __future__ import annotations

import struct

from ..chem.model import MolecularGraph
from .core import KIND_MORGAN, Fingerprint, fnv1a64


def _initial_codes(graph: MolecularGraph) -> list[int]:
    # Radius-0 invariants deliberately exclude degree and H count so that
    # a vertex-induced subgraph shares its radius-0 environments with the
    # parent structure.
    return [
        fnv1a64(
            f"{atom.element}|{int(atom.aromatic)}|{atom.charge}|{atom.isotope or 0}".encode()
        )
        for atom in graph.atoms
    ]


def morgan_fingerprint(
    graph: MolecularGraph, radius: int = 2, width: int = 2048
) -> Fingerprint:
    """One hashed bit per distinct circular atom environment of radius 0..radius."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    if width <= 0 or width & (width - 1):
        raise ValueError("width must be a power of two")

    codes = _initial_codes(graph)
    environments = set(codes)
    for level in range(1, radius + 1):
        updated = []
        for i in range(graph.atom_count):
            shells = sorted(
                (graph.bonds[bidx].code, codes[j]) for j, bidx in graph.neighbors(i)
            )
            blob = struct.pack(">BQ", level, codes[i]) + b"".join(
                struct.pack(">BQ", code, env) for code, env in shells
            )
            updated.append(fnv1a64(blob))
        codes = updated
        environments.update(codes)

    mask = width - 1
    bits = 0
    for env in environments:
        bits |= 1 << (env & mask)
    return Fingerprint(KIND_MORGAN, bits, width, (radius, width))
