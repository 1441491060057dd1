"""SMILES and reaction-SMILES parsing.

Supports the organic subset, bracket atoms (isotope, charge, explicit H,
atom maps), aromatic lowercase forms, ring closures ``1``-``9`` and
``%nn``, branches, wildcard atoms, and dot-separated components. Stereo
markers (``/``, ``\\``, ``@``, ``@@``) are parsed and preserved as
annotations. Ring closures may not cross a ``.`` separator: dots denote
disconnected components.
"""

from __future__ import annotations

import re

from .errors import (
    BadBracketAtom,
    SmilesParseError,
    TokenLimitExceeded,
    UnbalancedParenthesis,
    UnclosedRing,
    UnknownElement,
    ValenceError,
    WrongSeparatorCount,
)
from .model import (
    BOND_AROMATIC,
    BOND_DOUBLE,
    BOND_SINGLE,
    BOND_TRIPLE,
    Atom,
    Bond,
    MolecularGraph,
    ReactionRecord,
)
from .periodic import (
    AROMATIC_ELEMENTS,
    AROMATIC_ORGANIC,
    ELEMENTS,
    ORGANIC_SUBSET,
    implied_hydrogens,
)

DEFAULT_MAX_TOKENS = 2000

_BOND_CHARS = {"-": BOND_SINGLE, "=": BOND_DOUBLE, "#": BOND_TRIPLE, ":": BOND_AROMATIC}

# Lexical token pattern used for token counting (embedding gate).
_TOKEN_RE = re.compile(
    r"\[[^\]]*\]|Cl|Br|%\d\d|[BCNOPSFI]|[bcnops]|\*|[=#:\-/\\().>]|\d"
)


def count_tokens(text: str) -> int:
    """Number of lexical SMILES tokens in ``text`` (gate for embedding)."""
    return len(_TOKEN_RE.findall(text))


class _AtomDraft:
    __slots__ = (
        "element", "aromatic", "charge", "explicit_h", "map_number",
        "isotope", "stereo", "bracketed", "offset",
    )

    def __init__(self, element: str, aromatic: bool, offset: int) -> None:
        self.element = element
        self.aromatic = aromatic
        self.charge = 0
        self.explicit_h: int | None = None
        self.map_number: int | None = None
        self.isotope: int | None = None
        self.stereo: str | None = None
        self.bracketed = False
        self.offset = offset


class _Parser:
    def __init__(self, text: str, max_tokens: int) -> None:
        self.text = text
        self.pos = 0
        self.max_tokens = max_tokens
        self.tokens = 0
        self.atoms: list[_AtomDraft] = []
        self.bonds: list[Bond] = []
        self.bond_pairs: set[frozenset[int]] = set()
        self.prev_atom: int | None = None
        self.pending: tuple[str, str | None, int] | None = None  # (order, stereo, offset)
        self.branch_stack: list[tuple[int, int]] = []  # (prev_atom, '(' offset)
        # ring digit -> (atom idx, order|None, stereo, offset, component)
        self.open_rings: dict[int, tuple[int, str | None, str | None, int, int]] = {}
        self.component = 0
        self.component_of: list[int] = []

    # -- low-level ---------------------------------------------------------

    def _fail(self, cls: type[SmilesParseError], message: str, offset: int) -> SmilesParseError:
        return cls(message, self.text, offset)

    def _tick(self, offset: int) -> None:
        self.tokens += 1
        if self.tokens > self.max_tokens:
            raise self._fail(
                TokenLimitExceeded,
                f"input exceeds the {self.max_tokens}-token cap",
                offset,
            )

    def _peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    # -- graph assembly ----------------------------------------------------

    def _add_atom(self, draft: _AtomDraft) -> None:
        idx = len(self.atoms)
        self.atoms.append(draft)
        self.component_of.append(self.component)
        if self.prev_atom is not None:
            self._add_bond(self.prev_atom, idx, draft.offset)
        elif self.pending is not None:
            raise self._fail(SmilesParseError, "bond with no preceding atom", self.pending[2])
        self.prev_atom = idx

    def _add_bond(self, a: int, b: int, offset: int, order: str | None = None,
                  stereo: str | None = None) -> None:
        if order is None:
            if self.pending is not None:
                order, stereo, _ = self.pending
                self.pending = None
            else:
                both_aromatic = self.atoms[a].aromatic and self.atoms[b].aromatic
                order = BOND_AROMATIC if both_aromatic else BOND_SINGLE
        if a == b:
            raise self._fail(SmilesParseError, "ring closure bonds an atom to itself", offset)
        pair = frozenset((a, b))
        if pair in self.bond_pairs:
            raise self._fail(SmilesParseError, "duplicate bond between the same atoms", offset)
        self.bond_pairs.add(pair)
        self.bonds.append(Bond(a, b, order, stereo))

    def _close_component(self, offset: int) -> None:
        if self.open_rings:
            digit, (_, _, _, open_offset, _) = min(
                self.open_rings.items(), key=lambda kv: kv[1][3]
            )
            raise self._fail(
                UnclosedRing,
                f"ring bond {digit} left open (ring closures may not cross '.')",
                open_offset,
            )

    # -- token handlers ----------------------------------------------------

    def _ring_closure(self, digit: int, offset: int) -> None:
        if self.prev_atom is None:
            raise self._fail(SmilesParseError, "ring closure digit with no preceding atom", offset)
        order = stereo = None
        if self.pending is not None:
            order, stereo, _ = self.pending
            self.pending = None
        if digit in self.open_rings:
            other, other_order, other_stereo, _, comp = self.open_rings.pop(digit)
            if comp != self.component:
                raise self._fail(
                    UnclosedRing,
                    f"ring bond {digit} crosses a '.' component separator",
                    offset,
                )
            if order is not None and other_order is not None and order != other_order:
                raise self._fail(
                    SmilesParseError,
                    f"conflicting bond orders on ring closure {digit}",
                    offset,
                )
            final = order or other_order
            if final is None:
                both_aromatic = (
                    self.atoms[other].aromatic and self.atoms[self.prev_atom].aromatic
                )
                final = BOND_AROMATIC if both_aromatic else BOND_SINGLE
            self._add_bond(other, self.prev_atom, offset, final, stereo or other_stereo)
        else:
            self.open_rings[digit] = (self.prev_atom, order, stereo, offset, self.component)

    def _parse_bracket(self, start: int) -> _AtomDraft:
        text = self.text
        end = text.find("]", start)
        if end < 0:
            raise self._fail(BadBracketAtom, "unterminated bracket atom", start)
        body = text[start + 1:end]
        pos = 0

        def take_digits() -> str:
            nonlocal pos
            begin = pos
            while pos < len(body) and body[pos].isdigit():
                pos += 1
            return body[begin:pos]

        isotope = take_digits()

        if pos < len(body) and body[pos] == "*":
            element, aromatic = "*", False
            pos += 1
        else:
            m = re.match(r"([A-Z][a-z]?|as|se|te|[bcnops])", body[pos:])
            if not m:
                raise self._fail(BadBracketAtom, "missing element symbol in bracket atom", start + 1 + pos)
            symbol = m.group(1)
            # Prefer the two-letter element; fall back to one letter when the
            # pair is not a known element (e.g. [Cn] is copernicium, [CH4] is not).
            if len(symbol) == 2 and symbol[0].isupper() and symbol.capitalize() not in ELEMENTS:
                symbol = symbol[0]
            aromatic = symbol[0].islower()
            element = symbol.capitalize() if aromatic else symbol
            if element not in ELEMENTS:
                raise self._fail(UnknownElement, f"unknown element '{symbol}'", start + 1 + pos)
            if aromatic and element not in AROMATIC_ELEMENTS:
                raise self._fail(BadBracketAtom, f"'{symbol}' cannot be aromatic", start + 1 + pos)
            pos += len(symbol)

        draft = _AtomDraft(element, aromatic, start)
        draft.bracketed = True
        if isotope:
            draft.isotope = int(isotope)
            if draft.isotope < 1:
                raise self._fail(BadBracketAtom, "isotope must be >= 1", start + 1)
        draft.explicit_h = 0

        while pos < len(body):
            ch = body[pos]
            if ch == "@":
                if pos + 1 < len(body) and body[pos + 1] == "@":
                    draft.stereo = "@@"
                    pos += 2
                else:
                    draft.stereo = "@"
                    pos += 1
            elif ch == "H":
                pos += 1
                digits = take_digits()
                draft.explicit_h = int(digits) if digits else 1
            elif ch in "+-":
                sign = 1 if ch == "+" else -1
                pos += 1
                digits = take_digits()
                if digits:
                    charge = sign * int(digits)
                else:
                    charge = sign
                    while pos < len(body) and body[pos] == ch:
                        charge += sign
                        pos += 1
                if not -8 <= charge <= 8:
                    raise self._fail(BadBracketAtom, f"charge {charge} outside [-8, 8]", start + 1)
                draft.charge = charge
            elif ch == ":":
                pos += 1
                digits = take_digits()
                if not digits:
                    raise self._fail(BadBracketAtom, "atom map ':' without a number", start + 1 + pos)
                draft.map_number = int(digits)
                if draft.map_number < 1:
                    raise self._fail(BadBracketAtom, "atom map number must be >= 1", start + 1 + pos)
            else:
                raise self._fail(
                    BadBracketAtom, f"unexpected '{ch}' in bracket atom", start + 1 + pos
                )
        self.pos = end + 1
        return draft

    # -- main loop ----------------------------------------------------------

    def run(self) -> MolecularGraph:
        text = self.text
        n = len(text)
        while self.pos < n:
            start = self.pos
            ch = text[start]
            if ch == "[":
                self._tick(start)
                self._add_atom(self._parse_bracket(start))
            elif ch.isupper():
                self._tick(start)
                two = text[start:start + 2]
                if two in ("Cl", "Br"):
                    symbol = two
                    self.pos += 2
                else:
                    symbol = ch
                    self.pos += 1
                if symbol not in ORGANIC_SUBSET:
                    detail = "needs brackets" if symbol in ELEMENTS else "is not an element"
                    raise self._fail(UnknownElement, f"'{symbol}' {detail}", start)
                self._add_atom(_AtomDraft(symbol, False, start))
            elif ch in AROMATIC_ORGANIC:
                self._tick(start)
                self.pos += 1
                self._add_atom(_AtomDraft(ch.upper(), True, start))
            elif ch == "*":
                self._tick(start)
                self.pos += 1
                self._add_atom(_AtomDraft("*", False, start))
            elif ch.isdigit():
                self._tick(start)
                self.pos += 1
                self._ring_closure(int(ch), start)
            elif ch == "%":
                if start + 2 >= n or not text[start + 1:start + 3].isdigit():
                    raise self._fail(SmilesParseError, "'%' ring closure needs two digits", start)
                self._tick(start)
                self.pos += 3
                self._ring_closure(int(text[start + 1:start + 3]), start)
            elif ch in _BOND_CHARS or ch in "/\\":
                self._tick(start)
                self.pos += 1
                if self.pending is not None:
                    raise self._fail(SmilesParseError, "two bond symbols in a row", start)
                if ch in "/\\":
                    self.pending = (BOND_SINGLE, ch, start)
                else:
                    self.pending = (_BOND_CHARS[ch], None, start)
            elif ch == "(":
                self._tick(start)
                self.pos += 1
                if self.prev_atom is None:
                    raise self._fail(UnbalancedParenthesis, "branch before any atom", start)
                self.branch_stack.append((self.prev_atom, start))
            elif ch == ")":
                self._tick(start)
                self.pos += 1
                if not self.branch_stack:
                    raise self._fail(UnbalancedParenthesis, "')' without matching '('", start)
                if self.pending is not None:
                    raise self._fail(SmilesParseError, "dangling bond before ')'", self.pending[2])
                self.prev_atom, _ = self.branch_stack.pop()
            elif ch == ".":
                self._tick(start)
                self.pos += 1
                if self.branch_stack:
                    raise self._fail(SmilesParseError, "'.' inside a branch", start)
                if self.pending is not None:
                    raise self._fail(SmilesParseError, "dangling bond before '.'", self.pending[2])
                if self.prev_atom is None:
                    raise self._fail(SmilesParseError, "empty component before '.'", start)
                self._close_component(start)
                self.component += 1
                self.prev_atom = None
            elif ch.isspace():
                raise self._fail(SmilesParseError, "whitespace inside SMILES", start)
            else:
                raise self._fail(SmilesParseError, f"unexpected character '{ch}'", start)

        if self.branch_stack:
            _, offset = self.branch_stack[-1]
            raise self._fail(UnbalancedParenthesis, "unclosed '('", offset)
        if self.pending is not None:
            raise self._fail(SmilesParseError, "dangling bond at end of input", self.pending[2])
        if not self.atoms:
            raise self._fail(SmilesParseError, "no atoms in input", 0)
        if self.prev_atom is None:
            raise self._fail(SmilesParseError, "trailing '.' with no component", n - 1)
        self._close_component(n)
        return self._finish()

    # -- hydrogen inference --------------------------------------------------

    def _finish(self) -> MolecularGraph:
        order_sum = [0] * len(self.atoms)
        multiple = [False] * len(self.atoms)
        values = {BOND_SINGLE: 1, BOND_DOUBLE: 2, BOND_TRIPLE: 3, BOND_AROMATIC: 1}
        for bond in self.bonds:
            order_sum[bond.a] += values[bond.order]
            order_sum[bond.b] += values[bond.order]
            if bond.order in (BOND_DOUBLE, BOND_TRIPLE):
                multiple[bond.a] = multiple[bond.b] = True

        atoms: list[Atom] = []
        for idx, draft in enumerate(self.atoms):
            if draft.bracketed:
                hydrogens = draft.explicit_h or 0
            else:
                hydrogens = implied_hydrogens(
                    draft.element, draft.aromatic, order_sum[idx], multiple[idx]
                )
                if hydrogens is None:
                    raise self._fail(
                        ValenceError,
                        f"{draft.element} exceeds its maximum valence",
                        draft.offset,
                    )
            atoms.append(
                Atom(
                    element=draft.element,
                    aromatic=draft.aromatic,
                    charge=draft.charge,
                    explicit_h=draft.explicit_h if draft.bracketed else None,
                    map_number=draft.map_number,
                    isotope=draft.isotope,
                    hydrogens=hydrogens,
                    stereo=draft.stereo,
                )
            )
        return MolecularGraph(tuple(atoms), tuple(self.bonds), self.text)


def parse_smiles(text: str, max_tokens: int = DEFAULT_MAX_TOKENS) -> MolecularGraph:
    """Parse a SMILES string into a :class:`MolecularGraph`.

    Raises the specific :mod:`chemvecrag.chem.errors` subclasses, each
    carrying the byte offset of the offending token.
    """
    if not text:
        raise SmilesParseError("empty SMILES", text, 0)
    return _Parser(text, max_tokens).run()


def split_components(text: str, max_tokens: int = DEFAULT_MAX_TOKENS) -> list[str]:
    """Split a SMILES string on top-level dots, validating the whole string.

    Component order is preserved exactly: it is semantically significant
    for reaction and polymer block ordering downstream.
    """
    parse_smiles(text, max_tokens)
    return text.split(".")


def parse_reaction(text: str, max_tokens: int = DEFAULT_MAX_TOKENS) -> ReactionRecord:
    """Parse ``reactants>agents>products`` reaction SMILES.

    Empty sides are allowed (``>>`` means no agents). Component parse
    errors are re-raised with the side labeled.
    """
    parts = text.split(">")
    if len(parts) != 3:
        raise WrongSeparatorCount(
            f"reaction SMILES needs exactly two '>' separators, found {len(parts) - 1}"
        )
    labels = ("reactants", "agents", "products")
    sides: list[tuple[MolecularGraph, ...]] = []
    base = 0
    for label, part in zip(labels, parts):
        graphs: list[MolecularGraph] = []
        if part:
            offset = base
            for component in part.split("."):
                try:
                    graphs.append(parse_smiles(component, max_tokens))
                except SmilesParseError as exc:
                    raise type(exc)(
                        f"in {label}: {exc.reason}", text, offset + exc.offset
                    ) from exc
                offset += len(component) + 1
        sides.append(tuple(graphs))
        base += len(part) + 1
    return ReactionRecord(sides[0], sides[1], sides[2], text)
