"""Linear bond-path fingerprints (RDKit-style; bit compatibility not claimed)."""

from __future__ import annotations

from ..chem.model import MolecularGraph
from .core import KIND_PATH, Fingerprint, fnv1a64


def _atom_label(graph: MolecularGraph, idx: int) -> str:
    atom = graph.atoms[idx]
    return atom.element.lower() if atom.aromatic else atom.element


def _walk(graph: MolecularGraph, path: tuple[int, ...], bonds: tuple[int, ...],
          visited: frozenset[int], max_len: int, labels: set[tuple]) -> None:
    if len(bonds) >= 1:
        forward = []
        for pos, atom_idx in enumerate(path):
            forward.append(_atom_label(graph, atom_idx))
            if pos < len(bonds):
                forward.append(str(graph.bonds[bonds[pos]].code))
        label = tuple(forward)
        labels.add(min(label, label[::-1]))
    if len(bonds) == max_len:
        return
    for nbr, bidx in graph.neighbors(path[-1]):
        if nbr not in visited:
            _walk(graph, path + (nbr,), bonds + (bidx,), visited | {nbr}, max_len, labels)


def path_fingerprint(
    graph: MolecularGraph, max_path_len: int = 7, width: int = 2048
) -> Fingerprint:
    """Hashed bits over all simple bond paths of length 1..max_path_len.

    Paths are labeled by their (element, bond order) sequence, read in
    whichever direction sorts lower, so the labels are direction and
    atom-order invariant.
    """
    if max_path_len < 1:
        raise ValueError("max_path_len must be >= 1")
    if width <= 0 or width & (width - 1):
        raise ValueError("width must be a power of two")

    labels: set[tuple] = set()
    for start in range(graph.atom_count):
        _walk(graph, (start,), (), frozenset((start,)), max_path_len, labels)

    mask = width - 1
    bits = 0
    for label in labels:
        bits |= 1 << (fnv1a64("|".join(label).encode()) & mask)
    return Fingerprint(KIND_PATH, bits, width, (max_path_len, width))
