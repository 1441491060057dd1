"""SMILES parsing, canonicalization and molecular measurement."""

from .canon import canonicalize
from .errors import (
    BadBracketAtom,
    ChemError,
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
from .parser import (
    DEFAULT_MAX_TOKENS,
    count_tokens,
    parse_reaction,
    parse_smiles,
    split_components,
)
from .weight import molecular_weight

__all__ = [
    "Atom",
    "BOND_AROMATIC",
    "BOND_DOUBLE",
    "BOND_SINGLE",
    "BOND_TRIPLE",
    "BadBracketAtom",
    "Bond",
    "ChemError",
    "DEFAULT_MAX_TOKENS",
    "MolecularGraph",
    "ReactionRecord",
    "SmilesParseError",
    "TokenLimitExceeded",
    "UnbalancedParenthesis",
    "UnclosedRing",
    "UnknownElement",
    "ValenceError",
    "WrongSeparatorCount",
    "canonicalize",
    "count_tokens",
    "molecular_weight",
    "parse_reaction",
    "parse_smiles",
    "split_components",
]
