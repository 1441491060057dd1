"""MACCS-style structural keys re-expressed as graph predicates.

166 slots. The implemented keys below are our own documented manifest of
element, ring, bond-pattern and functional-group predicates; slots not
listed in :data:`KEY_MANIFEST` are permanently 0. Bit compatibility with
any external key catalogue is explicitly not claimed: the keys exist to
contrast substructure-style similarity against embedding metrics.

Key ``n`` occupies bit ``n - 1`` of the 166-bit fingerprint.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from functools import cached_property

from ..chem.model import BOND_DOUBLE, BOND_SINGLE, BOND_TRIPLE, MolecularGraph
from .core import KIND_MACCS, Fingerprint

MACCS_WIDTH = 166

_HALOGENS = frozenset({"F", "Cl", "Br", "I", "At"})
_METALS = frozenset(
    "Li Na K Rb Cs Be Mg Ca Sr Ba Al Ga In Tl Sn Pb Bi Zn Cd Hg Fe Co Ni Cu "
    "Mn Cr Ti V Zr Mo W Ru Rh Pd Ag Os Ir Pt Au".split()
)


@dataclass
class _Rings:
    atom_in_ring: set[int]
    ring_bond_sizes: dict[int, int]  # bond index -> smallest ring size through it
    ring_count: int
    aromatic_ring_count: int

    @property
    def sizes(self) -> set[int]:
        return set(self.ring_bond_sizes.values())


def _smallest_ring_through(graph: MolecularGraph, bond_idx: int) -> int | None:
    """Length of the smallest cycle containing a bond, by BFS avoiding it."""
    bond = graph.bonds[bond_idx]
    seen = {bond.a}
    queue = deque([(bond.a, 0)])
    while queue:
        node, depth = queue.popleft()
        for nbr, bidx in graph.neighbors(node):
            if bidx == bond_idx:
                continue
            if nbr == bond.b:
                return depth + 2
            if nbr not in seen:
                seen.add(nbr)
                queue.append((nbr, depth + 1))
    return None


def _cyclomatic(n_edges: int, n_nodes: int, n_components: int) -> int:
    return n_edges - n_nodes + n_components


def _ring_info(graph: MolecularGraph) -> _Rings:
    ring_bond_sizes: dict[int, int] = {}
    atom_in_ring: set[int] = set()
    for bidx in range(len(graph.bonds)):
        size = _smallest_ring_through(graph, bidx)
        if size is not None:
            ring_bond_sizes[bidx] = size
            atom_in_ring.update(graph.bonds[bidx].endpoints)

    ring_count = _cyclomatic(len(graph.bonds), graph.atom_count, len(graph.components()))

    # Aromatic ring count: cyclomatic number of the aromatic-bond subgraph.
    arom_bonds = [b for b in graph.bonds if b.order == "aromatic"]
    arom_atoms = {e for b in arom_bonds for e in b.endpoints}
    if arom_bonds:
        adj: dict[int, list[int]] = {a: [] for a in arom_atoms}
        for b in arom_bonds:
            adj[b.a].append(b.b)
            adj[b.b].append(b.a)
        seen: set[int] = set()
        comps = 0
        for a in arom_atoms:
            if a in seen:
                continue
            comps += 1
            stack = [a]
            seen.add(a)
            while stack:
                cur = stack.pop()
                for nbr in adj[cur]:
                    if nbr not in seen:
                        seen.add(nbr)
                        stack.append(nbr)
        aromatic_rings = _cyclomatic(len(arom_bonds), len(arom_atoms), comps)
    else:
        aromatic_rings = 0
    return _Rings(atom_in_ring, ring_bond_sizes, ring_count, aromatic_rings)


class _Mol:
    """Cached per-molecule facts the key predicates query."""

    def __init__(self, graph: MolecularGraph) -> None:
        self.graph = graph
        self.elements = Counter(a.element for a in graph.atoms)

    @cached_property
    def rings(self) -> _Rings:
        return _ring_info(self.graph)

    def has_element(self, *symbols: str) -> bool:
        return any(self.elements.get(s, 0) > 0 for s in symbols)

    def count(self, symbol: str) -> int:
        return self.elements.get(symbol, 0)

    def bonds_of(self, order: str):
        return (b for b in self.graph.bonds if b.order == order)

    def bonded_pair(self, order: str, elem_a: str, elem_b: str) -> bool:
        g = self.graph
        for b in self.bonds_of(order):
            pair = {g.atoms[b.a].element, g.atoms[b.b].element}
            if pair == {elem_a, elem_b} or (elem_a == elem_b and pair == {elem_a}):
                return True
        return False

    def atoms_where(self, pred):
        return (i for i, a in enumerate(self.graph.atoms) if pred(a))

    def double_bonded(self, idx: int, element: str) -> int:
        g = self.graph
        return sum(
            1
            for _, bidx in g.neighbors(idx)
            if g.bonds[bidx].order == BOND_DOUBLE
            and g.atoms[g.bonds[bidx].other(idx)].element == element
        )

    def single_neighbors(self, idx: int, element: str) -> list[int]:
        g = self.graph
        return [
            g.bonds[bidx].other(idx)
            for _, bidx in g.neighbors(idx)
            if g.bonds[bidx].order == BOND_SINGLE
            and g.atoms[g.bonds[bidx].other(idx)].element == element
        ]


def _carbonyl_carbons(m: _Mol):
    return [
        i
        for i, a in enumerate(m.graph.atoms)
        if a.element == "C" and m.double_bonded(i, "O") >= 1
    ]


def _has_carboxylic(m: _Mol) -> bool:
    return any(
        any(m.graph.atoms[o].hydrogens >= 1 for o in m.single_neighbors(c, "O"))
        for c in _carbonyl_carbons(m)
    )


def _has_ester(m: _Mol) -> bool:
    for c in _carbonyl_carbons(m):
        for o in m.single_neighbors(c, "O"):
            others = [n for n in m.single_neighbors(o, "C") if n != c]
            if others:
                return True
    return False


def _has_amide(m: _Mol) -> bool:
    return any(m.single_neighbors(c, "N") for c in _carbonyl_carbons(m))


def _sulfone_sulfurs(m: _Mol):
    return [
        i
        for i, a in enumerate(m.graph.atoms)
        if a.element == "S" and m.double_bonded(i, "O") >= 2
    ]


def _has_ether(m: _Mol) -> bool:
    g = m.graph
    for i, a in enumerate(g.atoms):
        if a.element == "O" and a.hydrogens == 0 and g.degree(i) == 2:
            if all(g.atoms[j].element == "C" for j, _ in g.neighbors(i)):
                return True
    return False


# (key number, description, predicate). Keys 61..166 are unimplemented and
# permanently 0.
KEY_MANIFEST: tuple[tuple[int, str, object], ...] = (
    (1, "any attached hydrogen", lambda m: any(a.hydrogens > 0 for a in m.graph.atoms)),
    (2, "carbon present", lambda m: m.has_element("C")),
    (3, "nitrogen present", lambda m: m.has_element("N")),
    (4, "oxygen present", lambda m: m.has_element("O")),
    (5, "sulfur present", lambda m: m.has_element("S")),
    (6, "phosphorus present", lambda m: m.has_element("P")),
    (7, "fluorine present", lambda m: m.has_element("F")),
    (8, "chlorine present", lambda m: m.has_element("Cl")),
    (9, "bromine present", lambda m: m.has_element("Br")),
    (10, "iodine present", lambda m: m.has_element("I")),
    (11, "any halogen", lambda m: m.has_element(*_HALOGENS)),
    (12, "boron present", lambda m: m.has_element("B")),
    (13, "silicon present", lambda m: m.has_element("Si")),
    (14, "metal present", lambda m: m.has_element(*_METALS)),
    (15, "wildcard attachment atom", lambda m: m.has_element("*")),
    (16, "isotope label", lambda m: any(a.isotope for a in m.graph.atoms)),
    (17, "positive formal charge", lambda m: any(a.charge > 0 for a in m.graph.atoms)),
    (18, "negative formal charge", lambda m: any(a.charge < 0 for a in m.graph.atoms)),
    (19, "any formal charge", lambda m: any(a.charge for a in m.graph.atoms)),
    (20, ">= 2 nitrogens", lambda m: m.count("N") >= 2),
    (21, ">= 2 oxygens", lambda m: m.count("O") >= 2),
    (22, ">= 3 oxygens", lambda m: m.count("O") >= 3),
    (23, ">= 8 heavy atoms", lambda m: m.graph.atom_count >= 8),
    (24, "ring present", lambda m: m.rings.ring_count >= 1),
    (25, ">= 2 rings", lambda m: m.rings.ring_count >= 2),
    (26, ">= 3 rings", lambda m: m.rings.ring_count >= 3),
    (27, "aromatic ring present", lambda m: m.rings.aromatic_ring_count >= 1),
    (28, ">= 2 aromatic rings", lambda m: m.rings.aromatic_ring_count >= 2),
    (29, "3-membered ring", lambda m: 3 in m.rings.sizes),
    (30, "4-membered ring", lambda m: 4 in m.rings.sizes),
    (31, "5-membered ring", lambda m: 5 in m.rings.sizes),
    (32, "6-membered ring", lambda m: 6 in m.rings.sizes),
    (33, "7-membered ring", lambda m: 7 in m.rings.sizes),
    (34, "ring of size >= 8", lambda m: any(s >= 8 for s in m.rings.sizes)),
    (35, "nitrogen in ring", lambda m: any(
        m.graph.atoms[i].element == "N" for i in m.rings.atom_in_ring)),
    (36, "oxygen in ring", lambda m: any(
        m.graph.atoms[i].element == "O" for i in m.rings.atom_in_ring)),
    (37, "sulfur in ring", lambda m: any(
        m.graph.atoms[i].element == "S" for i in m.rings.atom_in_ring)),
    (38, "aromatic nitrogen", lambda m: any(
        a.element == "N" and a.aromatic for a in m.graph.atoms)),
    (39, "aromatic oxygen", lambda m: any(
        a.element == "O" and a.aromatic for a in m.graph.atoms)),
    (40, "aromatic sulfur", lambda m: any(
        a.element == "S" and a.aromatic for a in m.graph.atoms)),
    (41, "double bond", lambda m: any(True for _ in m.bonds_of(BOND_DOUBLE))),
    (42, "triple bond", lambda m: any(True for _ in m.bonds_of(BOND_TRIPLE))),
    (43, "carbonyl C=O", lambda m: bool(_carbonyl_carbons(m))),
    (44, "S=O", lambda m: m.bonded_pair(BOND_DOUBLE, "S", "O")),
    (45, "N=O", lambda m: m.bonded_pair(BOND_DOUBLE, "N", "O")),
    (46, "nitrile C#N", lambda m: m.bonded_pair(BOND_TRIPLE, "C", "N")),
    (47, "C=C", lambda m: m.bonded_pair(BOND_DOUBLE, "C", "C")),
    (48, "N-N bond", lambda m: m.bonded_pair(BOND_SINGLE, "N", "N")),
    (49, "N-O single bond", lambda m: m.bonded_pair(BOND_SINGLE, "N", "O")),
    (50, "S-S bond", lambda m: m.bonded_pair(BOND_SINGLE, "S", "S")),
    (51, "O-O single bond", lambda m: m.bonded_pair(BOND_SINGLE, "O", "O")),
    (52, "C-S bond", lambda m: m.bonded_pair(BOND_SINGLE, "C", "S")),
    (53, "hydroxyl O-H", lambda m: any(
        a.element == "O" and a.hydrogens >= 1 for a in m.graph.atoms)),
    (54, "amine N-H", lambda m: any(
        a.element == "N" and a.hydrogens >= 1 for a in m.graph.atoms)),
    (55, "thiol S-H", lambda m: any(
        a.element == "S" and a.hydrogens >= 1 for a in m.graph.atoms)),
    (56, "methyl group", lambda m: any(
        a.element == "C" and a.hydrogens == 3 for a in m.graph.atoms)),
    (57, "atom with 4 heavy neighbors", lambda m: any(
        m.graph.degree(i) >= 4 for i in range(m.graph.atom_count))),
    (58, "carboxylic acid", _has_carboxylic),
    (59, "ester", _has_ester),
    (60, "amide", _has_amide),
    (61, "sulfone S(=O)(=O)", lambda m: bool(_sulfone_sulfurs(m))),
    (62, "sulfonamide S(=O)(=O)N", lambda m: any(
        m.single_neighbors(s, "N") for s in _sulfone_sulfurs(m))),
    (63, "ether C-O-C", _has_ether),
    (64, "atom map number", lambda m: any(a.map_number for a in m.graph.atoms)),
    (65, ">= 2 components", lambda m: len(m.graph.components()) >= 2),
    (66, "N bonded to aromatic atom", lambda m: any(
        m.graph.atoms[b.other(i)].aromatic
        for i, a in enumerate(m.graph.atoms) if a.element == "N" and not a.aromatic
        for _, bidx in m.graph.neighbors(i)
        for b in (m.graph.bonds[bidx],))),
    (67, "O bonded to aromatic atom", lambda m: any(
        m.graph.atoms[b.other(i)].aromatic
        for i, a in enumerate(m.graph.atoms) if a.element == "O" and not a.aromatic
        for _, bidx in m.graph.neighbors(i)
        for b in (m.graph.bonds[bidx],))),
)

IMPLEMENTED_KEYS = frozenset(number for number, _, _ in KEY_MANIFEST)


def key_manifest() -> dict[int, str]:
    """Key number -> description for every implemented key."""
    return {number: description for number, description, _ in KEY_MANIFEST}


def maccs_fingerprint(graph: MolecularGraph) -> Fingerprint:
    """Evaluate the implemented key predicates; key n sets bit n-1."""
    mol = _Mol(graph)
    bits = 0
    for number, _, predicate in KEY_MANIFEST:
        if predicate(mol):
            bits |= 1 << (number - 1)
    return Fingerprint(KIND_MACCS, bits, MACCS_WIDTH, ())
