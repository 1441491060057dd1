"""Molecular weight from standard atomic weights."""

from __future__ import annotations

from .model import MolecularGraph
from .periodic import ATOMIC_WEIGHTS, atomic_weight

_H_WEIGHT = ATOMIC_WEIGHTS["H"]


def molecular_weight(graph: MolecularGraph) -> float:
    """Sum of standard atomic weights plus attached hydrogens, in g/mol.

    Wildcard attachment atoms contribute zero mass.
    """
    total = 0.0
    for atom in graph.atoms:
        total += atomic_weight(atom.element)
        total += atom.hydrogens * _H_WEIGHT
    return total
