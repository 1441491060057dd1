"""Chemical payload extraction from free-text questions.

Questions mix prose with SMILES, reaction SMILES and image paths.
Candidate words are the longest whitespace-delimited runs after
stripping dollar-sign/markdown wrappers; each candidate must survive the
real parser to count. Prose words that technically parse ("I", "NO",
"soon") are rejected unless they carry structure characters (brackets,
bonds, ring digits) or were explicitly wrapped.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..chem import SmilesParseError, WrongSeparatorCount, parse_reaction, parse_smiles

_IMAGE_RE = re.compile(r"\S+\.(?:png|jpe?g|gif|bmp|tiff?)\b", re.IGNORECASE)
_SMILES_CHARS_RE = re.compile(r"[A-Za-z0-9@+\-\[\]\(\)=#%*.:/\\>]+")
_STRUCTURE_CHARS = set("[]()=#@+%0123456789*/\\")
_TRAILING_PUNCT = ".,;:!?"

# English words spelled entirely in element symbols that the parser would
# happily accept as molecules.
_STOPWORDS = frozenset(
    "CON CONS ICON ICONS SOON NOON SON SONS COO COOS COP COPS POP POPS OOPS "
    "SOP SOPS SCOOP SCOOPS COCOON PONS SNOB IONS".split()
)


@dataclass
class ExtractedPayloads:
    smiles: list[str] = field(default_factory=list)
    reactions: list[str] = field(default_factory=list)
    images: list[str] = field(default_factory=list)
    failures: list[tuple[str, str]] = field(default_factory=list)  # (word, error)

    @property
    def wildcard_smiles(self) -> list[str]:
        return [s for s in self.smiles if "*" in s]


def _strip_wrappers(word: str) -> tuple[str, bool]:
    wrapped = False
    changed = True
    while changed:
        changed = False
        while word and word[-1] in _TRAILING_PUNCT:
            word = word[:-1]
            changed = True
        for mark in ("$", "`", "**", "'", '"'):
            while (
                len(word) > 2 * len(mark)
                and word.startswith(mark)
                and word.endswith(mark)
            ):
                word = word[len(mark):-len(mark)]
                wrapped = True
                changed = True
    return word, wrapped


def _plausible_bare_smiles(word: str) -> bool:
    """Filter for all-letter candidates with no structure characters."""
    if len(word) < 3:
        return False
    core = word.replace("Cl", "").replace("Br", "")
    if core and not core.isupper():
        return False  # lowercase runs are overwhelmingly prose
    return word.upper() not in _STOPWORDS


def extract_payloads(text: str) -> ExtractedPayloads:
    out = ExtractedPayloads()
    out.images = [match.group(0) for match in _IMAGE_RE.finditer(text)]
    image_words = set(out.images)

    for raw in text.split():
        word, wrapped = _strip_wrappers(raw)
        if not word or word in image_words or _IMAGE_RE.fullmatch(word):
            continue
        if not _SMILES_CHARS_RE.fullmatch(word):
            continue
        if word.count(">") == 2:
            try:
                parse_reaction(word)
                out.reactions.append(word)
            except (SmilesParseError, WrongSeparatorCount) as exc:
                out.failures.append((word, str(exc)))
            continue
        if ">" in word:
            continue
        structured = bool(set(word) & _STRUCTURE_CHARS)
        if not (wrapped or structured or _plausible_bare_smiles(word)):
            continue
        try:
            parse_smiles(word)
        except SmilesParseError as exc:
            if wrapped or structured:
                out.failures.append((word, str(exc)))
            continue
        out.smiles.append(word)
    return out
