"""Canonical SMILES generation.

Atom ranks come from iterative refinement of local invariants (degree,
element, charge, aromaticity, attached-H count, map number, isotope),
ties broken by individualizing each tied candidate and keeping the
lexicographically smallest emitted string. The output is deterministic
and invariant under atom-order permutation; byte equality with external
toolkits is not a goal. Stereo annotations are ignored.

Dot-separated components are canonicalized independently and joined in
sorted order.
"""

from __future__ import annotations

import heapq
from collections import Counter

from .model import (
    BOND_AROMATIC,
    BOND_DOUBLE,
    BOND_SINGLE,
    BOND_TRIPLE,
    Atom,
    MolecularGraph,
)
from .periodic import ORGANIC_SUBSET, implied_hydrogens

# Cap on tie-break branches explored per component. Within budget the
# result is permutation invariant by construction; molecules symmetric
# enough to blow the cap degrade to a deterministic greedy choice.
_BRANCH_BUDGET = 512

_ORDER_VALUE = {BOND_SINGLE: 1, BOND_DOUBLE: 2, BOND_TRIPLE: 3, BOND_AROMATIC: 1}


def canonicalize(graph: MolecularGraph) -> str:
    """Canonical SMILES for a parsed molecular graph."""
    parts = [_canonical_component(graph, comp) for comp in graph.components()]
    return ".".join(sorted(parts))


def _dense_ranks(keys: list) -> list[int]:
    lookup = {key: rank for rank, key in enumerate(sorted(set(keys)))}
    return [lookup[key] for key in keys]


def _refine(ranks: list[int], adj: list[list[tuple[int, int]]]) -> list[int]:
    """Refine ranks with sorted (bond code, neighbor rank) multisets until stable."""
    n_classes = len(set(ranks))
    while True:
        keys = [
            (ranks[i], tuple(sorted((code, ranks[j]) for j, code in adj[i])))
            for i in range(len(ranks))
        ]
        ranks = _dense_ranks(keys)
        new_classes = len(set(ranks))
        if new_classes == n_classes:
            return ranks
        n_classes = new_classes


class _Component:
    """One connected component re-indexed to local atom numbers."""

    def __init__(self, graph: MolecularGraph, atom_indices: list[int]) -> None:
        local = {g: i for i, g in enumerate(atom_indices)}
        self.atoms: list[Atom] = [graph.atoms[g] for g in atom_indices]
        self.adj: list[list[tuple[int, int]]] = [[] for _ in atom_indices]
        self.bond_order: dict[frozenset[int], str] = {}
        for bond in graph.bonds:
            if bond.a in local and bond.b in local:
                a, b = local[bond.a], local[bond.b]
                code = _ORDER_VALUE[bond.order] if bond.order != BOND_AROMATIC else 4
                self.adj[a].append((b, code))
                self.adj[b].append((a, code))
                self.bond_order[frozenset((a, b))] = bond.order

    def initial_ranks(self) -> list[int]:
        keys = [
            (
                len(self.adj[i]),
                atom.element,
                atom.charge,
                atom.aromatic,
                atom.hydrogens,
                atom.map_number or 0,
                atom.isotope or 0,
            )
            for i, atom in enumerate(self.atoms)
        ]
        return _dense_ranks(keys)


def _canonical_component(graph: MolecularGraph, atom_indices: list[int]) -> str:
    comp = _Component(graph, atom_indices)
    budget = [_BRANCH_BUDGET]
    return _search(comp, comp.initial_ranks(), budget)


def _search(comp: _Component, ranks: list[int], budget: list[int]) -> str:
    ranks = _refine(ranks, comp.adj)
    n = len(ranks)
    if len(set(ranks)) == n:
        return _emit(comp, ranks)

    counts = Counter(ranks)
    tied = min(rank for rank, count in counts.items() if count > 1)
    candidates = [i for i, rank in enumerate(ranks) if rank == tied]
    best: str | None = None
    for cand in candidates:
        bumped = _dense_ranks(
            [(rank, 0 if i == cand else 1) for i, rank in enumerate(ranks)]
        )
        result = _search(comp, bumped, budget)
        if best is None or result < best:
            best = result
        budget[0] -= 1
        if budget[0] <= 0:
            break
    assert best is not None
    return best


# -- emission ---------------------------------------------------------------


def _atom_token(atom: Atom, order_sum: int, has_multiple_bond: bool) -> str:
    bare_symbol = atom.element.lower() if atom.aromatic else atom.element
    if (
        atom.element in ORGANIC_SUBSET
        and atom.charge == 0
        and atom.isotope is None
        and atom.map_number is None
        and implied_hydrogens(atom.element, atom.aromatic, order_sum, has_multiple_bond)
        == atom.hydrogens
    ):
        return bare_symbol
    out = ["["]
    if atom.isotope is not None:
        out.append(str(atom.isotope))
    out.append(bare_symbol)
    if atom.hydrogens == 1:
        out.append("H")
    elif atom.hydrogens > 1:
        out.append(f"H{atom.hydrogens}")
    if atom.charge:
        sign = "+" if atom.charge > 0 else "-"
        out.append(sign if abs(atom.charge) == 1 else f"{sign}{abs(atom.charge)}")
    if atom.map_number is not None:
        out.append(f":{atom.map_number}")
    out.append("]")
    return "".join(out)


def _bond_token(order: str, a: Atom, b: Atom) -> str:
    if order == BOND_SINGLE:
        return "-" if (a.aromatic and b.aromatic) else ""
    if order == BOND_AROMATIC:
        return "" if (a.aromatic and b.aromatic) else ":"
    return "=" if order == BOND_DOUBLE else "#"


class _DigitPool:
    """Ring-closure digit allocator; freed digits are reused smallest-first."""

    def __init__(self) -> None:
        self._free: list[int] = []
        self._next = 1

    def take(self) -> int:
        if self._free:
            return heapq.heappop(self._free)
        digit = self._next
        self._next += 1
        if digit > 99:
            raise ValueError("more than 99 simultaneously open ring closures")
        return digit

    def give(self, digit: int) -> None:
        heapq.heappush(self._free, digit)

    @staticmethod
    def text(digit: int) -> str:
        return str(digit) if digit < 10 else f"%{digit:02d}"


def _emit(comp: _Component, ranks: list[int]) -> str:
    n = len(ranks)
    start = ranks.index(0)
    order_sums = [
        sum(_ORDER_VALUE[comp.bond_order[frozenset((i, j))]] for j, _ in comp.adj[i])
        for i in range(n)
    ]
    has_multiple = [
        any(
            comp.bond_order[frozenset((i, j))] in (BOND_DOUBLE, BOND_TRIPLE)
            for j, _ in comp.adj[i]
        )
        for i in range(n)
    ]

    # DFS respecting rank order; back edges open at the earlier-visited atom.
    visited = [False] * n
    parent = [-1] * n
    children: list[list[int]] = [[] for _ in range(n)]
    opens: list[list[int]] = [[] for _ in range(n)]   # partners, sorted later
    closes: list[list[int]] = [[] for _ in range(n)]
    classified: set[frozenset[int]] = set()

    visited[start] = True
    stack = [(start, iter(sorted((j for j, _ in comp.adj[start]), key=lambda j: ranks[j])))]
    while stack:
        node, nbrs = stack[-1]
        advanced = False
        for nbr in nbrs:
            pair = frozenset((node, nbr))
            if pair in classified:
                continue
            classified.add(pair)
            if visited[nbr]:
                opens[nbr].append(node)
                closes[node].append(nbr)
            else:
                visited[nbr] = True
                parent[nbr] = node
                children[node].append(nbr)
                stack.append(
                    (nbr, iter(sorted((j for j, _ in comp.adj[nbr]), key=lambda j: ranks[j])))
                )
                advanced = True
            if advanced:
                break
        if not advanced:
            stack.pop()

    digits = _DigitPool()
    digit_of: dict[frozenset[int], int] = {}
    out: list[str] = []
    work: list[tuple[str, object]] = [("atom", start)]
    while work:
        kind, value = work.pop()
        if kind == "text":
            out.append(value)  # type: ignore[arg-type]
            continue
        node = value  # type: ignore[assignment]
        out.append(_atom_token(comp.atoms[node], order_sums[node], has_multiple[node]))
        for partner in sorted(closes[node], key=lambda j: ranks[j]):
            pair = frozenset((node, partner))
            digit = digit_of.pop(pair)
            out.append(digits.text(digit))
            digits.give(digit)
        for partner in sorted(opens[node], key=lambda j: ranks[j]):
            pair = frozenset((node, partner))
            digit = digits.take()
            digit_of[pair] = digit
            order = comp.bond_order[pair]
            out.append(_bond_token(order, comp.atoms[node], comp.atoms[partner]))
            out.append(digits.text(digit))
        kids = children[node]
        pushes: list[tuple[str, object]] = []
        for pos, child in enumerate(kids):
            bond = _bond_token(
                comp.bond_order[frozenset((node, child))],
                comp.atoms[node],
                comp.atoms[child],
            )
            if pos < len(kids) - 1:
                pushes.append(("text", "("))
                if bond:
                    pushes.append(("text", bond))
                pushes.append(("atom", child))
                pushes.append(("text", ")"))
            else:
                if bond:
                    pushes.append(("text", bond))
                pushes.append(("atom", child))
        work.extend(reversed(pushes))
    return "".join(out)
