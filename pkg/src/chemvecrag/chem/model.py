"""Molecular graph model shared by the parser, canonicalizer and fingerprints."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional

BOND_SINGLE = "single"
BOND_DOUBLE = "double"
BOND_TRIPLE = "triple"
BOND_AROMATIC = "aromatic"

# Integer codes used wherever bond orders participate in sorting/hashing.
BOND_CODES = {BOND_SINGLE: 1, BOND_DOUBLE: 2, BOND_TRIPLE: 3, BOND_AROMATIC: 4}


@dataclass(frozen=True)
class Atom:
    """One heavy (or wildcard) atom of a molecular graph.

    ``hydrogens`` is the resolved attached-H count: the bracket-specified
    count for bracket atoms, otherwise the count inferred from default
    valences. ``explicit_h`` preserves what was written (None for
    organic-subset atoms). ``stereo`` keeps ``@``/``@@`` annotations;
    canonicalization and fingerprints ignore them.
    """

    element: str
    aromatic: bool = False
    charge: int = 0
    explicit_h: Optional[int] = None
    map_number: Optional[int] = None
    isotope: Optional[int] = None
    hydrogens: int = 0
    stereo: Optional[str] = None

    @property
    def is_wildcard(self) -> bool:
        return self.element == "*"


@dataclass(frozen=True)
class Bond:
    """Undirected bond between two atom indices.

    ``stereo`` preserves ``/`` and ``\\`` annotations from the source text.
    """

    a: int
    b: int
    order: str = BOND_SINGLE
    stereo: Optional[str] = None

    @property
    def endpoints(self) -> tuple[int, int]:
        return (self.a, self.b)

    def other(self, idx: int) -> int:
        return self.b if idx == self.a else self.a

    @property
    def code(self) -> int:
        return BOND_CODES[self.order]


@dataclass(frozen=True)
class MolecularGraph:
    """Immutable parsed molecule: ordered atoms plus a simple bond list."""

    atoms: tuple[Atom, ...]
    bonds: tuple[Bond, ...]
    source_text: str = ""

    @cached_property
    def adjacency(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Per-atom tuple of (neighbor index, bond index) pairs."""
        adj: list[list[tuple[int, int]]] = [[] for _ in self.atoms]
        for bidx, bond in enumerate(self.bonds):
            adj[bond.a].append((bond.b, bidx))
            adj[bond.b].append((bond.a, bidx))
        return tuple(tuple(pairs) for pairs in adj)

    def neighbors(self, idx: int) -> tuple[tuple[int, int], ...]:
        return self.adjacency[idx]

    def degree(self, idx: int) -> int:
        return len(self.adjacency[idx])

    @property
    def atom_count(self) -> int:
        return len(self.atoms)

    @property
    def has_wildcard(self) -> bool:
        return any(a.is_wildcard for a in self.atoms)

    def components(self) -> list[list[int]]:
        """Connected components as lists of atom indices, in first-seen order."""
        seen = [False] * len(self.atoms)
        out: list[list[int]] = []
        for start in range(len(self.atoms)):
            if seen[start]:
                continue
            comp = [start]
            seen[start] = True
            queue = [start]
            while queue:
                cur = queue.pop()
                for nbr, _ in self.adjacency[cur]:
                    if not seen[nbr]:
                        seen[nbr] = True
                        comp.append(nbr)
                        queue.append(nbr)
            out.append(sorted(comp))
        return out


@dataclass(frozen=True)
class ReactionRecord:
    """Parsed reaction SMILES: reactants > agents > products."""

    reactants: tuple[MolecularGraph, ...]
    agents: tuple[MolecularGraph, ...]
    products: tuple[MolecularGraph, ...]
    source_text: str = ""

    @property
    def sides(self) -> tuple[tuple[MolecularGraph, ...], ...]:
        return (self.reactants, self.agents, self.products)
