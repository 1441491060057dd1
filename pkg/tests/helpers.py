"""Shared test utilities: corpus loading, graph permutation, isomorphism oracle."""

from __future__ import annotations

import json
import random
from pathlib import Path

import networkx as nx

from chemvecrag.chem import Atom, Bond, MolecularGraph

DATA_DIR = Path(__file__).parent / "data"


def load_corpus() -> list[tuple[str, str, dict]]:
    """(smiles, id, metadata) triples from the molecule corpus file."""
    rows = []
    for line in (DATA_DIR / "molecules.tsv").read_text().splitlines():
        if not line.strip():
            continue
        smiles, mol_id, meta = line.split("\t")
        rows.append((smiles, mol_id, json.loads(meta)))
    return rows


def permute_graph(graph: MolecularGraph, rng: random.Random) -> MolecularGraph:
    """Relabel atoms with a random permutation and shuffle the bond list."""
    n = len(graph.atoms)
    perm = list(range(n))
    rng.shuffle(perm)  # perm[old] = new
    atoms: list[Atom | None] = [None] * n
    for old, new in enumerate(perm):
        atoms[new] = graph.atoms[old]
    bonds = [Bond(perm[b.a], perm[b.b], b.order, b.stereo) for b in graph.bonds]
    rng.shuffle(bonds)
    return MolecularGraph(tuple(atoms), tuple(bonds), graph.source_text)


def to_networkx(graph: MolecularGraph) -> nx.Graph:
    g = nx.Graph()
    for i, atom in enumerate(graph.atoms):
        g.add_node(
            i,
            element=atom.element,
            aromatic=atom.aromatic,
            charge=atom.charge,
            hydrogens=atom.hydrogens,
            isotope=atom.isotope,
            map_number=atom.map_number,
        )
    for bond in graph.bonds:
        g.add_edge(bond.a, bond.b, order=bond.order)
    return g


_NODE_KEYS = ("element", "aromatic", "charge", "hydrogens", "isotope", "map_number")


def graphs_isomorphic(a: MolecularGraph, b: MolecularGraph) -> bool:
    """Attribute-aware VF2 isomorphism, independent of canonicalization."""
    return nx.is_isomorphic(
        to_networkx(a),
        to_networkx(b),
        node_match=lambda x, y: all(x[k] == y[k] for k in _NODE_KEYS),
        edge_match=lambda x, y: x["order"] == y["order"],
    )
