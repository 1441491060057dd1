"""Errors raised while parsing or validating chemical line notations."""

from __future__ import annotations


class ChemError(ValueError):
    """Base class for all chemistry-layer errors."""


class SmilesParseError(ChemError):
    """A SMILES string could not be parsed.

    ``offset`` is the byte offset into the original text where the
    problem was detected.
    """

    def __init__(self, message: str, text: str, offset: int) -> None:
        super().__init__(f"{message} (offset {offset})")
        self.text = text
        self.offset = offset
        self.reason = message


class UnclosedRing(SmilesParseError):
    pass


class UnbalancedParenthesis(SmilesParseError):
    pass


class UnknownElement(SmilesParseError):
    pass


class BadBracketAtom(SmilesParseError):
    pass


class ValenceError(SmilesParseError):
    pass


class TokenLimitExceeded(SmilesParseError):
    pass


class WrongSeparatorCount(ChemError):
    """Reaction SMILES must contain exactly two ``>`` separators."""
