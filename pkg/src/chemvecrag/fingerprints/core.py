"""Fingerprint container, set-overlap similarities, hex serialization."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ChemVecRagError

KIND_MORGAN = "morgan"
KIND_PATH = "path"
KIND_MACCS = "maccs"


class KindMismatch(ChemVecRagError):
    """Similarity requested between fingerprints of different kinds."""


class WidthMismatch(ChemVecRagError):
    """Similarity requested between fingerprints of different widths."""


_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a hash; deterministic and seedless by design."""
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


@dataclass(frozen=True)
class Fingerprint:
    """Fixed-width bitset tagged with its generating algorithm.

    ``bits`` is a Python int bitset where bit ``i`` is ``1 << i``.
    """

    kind: str
    bits: int
    width: int
    params: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.bits < 0 or self.bits >> self.width:
            raise ValueError("bits outside fingerprint width")

    @property
    def popcount(self) -> int:
        return self.bits.bit_count()

    def test(self, index: int) -> bool:
        return bool(self.bits >> index & 1)

    def bit_positions(self) -> list[int]:
        positions = []
        bits = self.bits
        while bits:
            low = bits & -bits
            positions.append(low.bit_length() - 1)
            bits ^= low
        return positions

    def to_hex(self) -> str:
        """Hex with bit 0 first as the MSB of the first nibble.

        One character per 4 bits; widths not divisible by 4 (MACCS) pad
        the final nibble with zeros.
        """
        nchars = (self.width + 3) // 4
        nibbles = [0] * nchars
        for i in self.bit_positions():
            nibbles[i // 4] |= 1 << (3 - i % 4)
        return "".join(f"{n:x}" for n in nibbles)

    @classmethod
    def from_hex(cls, kind: str, text: str, width: int,
                 params: tuple[int, ...] = ()) -> "Fingerprint":
        if len(text) != (width + 3) // 4:
            raise ValueError(f"expected {(width + 3) // 4} hex chars, got {len(text)}")
        bits = 0
        for j, char in enumerate(text):
            nibble = int(char, 16)
            for k in range(4):
                if nibble >> (3 - k) & 1:
                    index = 4 * j + k
                    if index >= width:
                        raise ValueError("set bit beyond fingerprint width")
                    bits |= 1 << index
        return cls(kind, bits, width, params)


def _check_compatible(a: Fingerprint, b: Fingerprint) -> None:
    if a.kind != b.kind:
        raise KindMismatch(f"cannot compare {a.kind} with {b.kind}")
    if a.width != b.width:
        raise WidthMismatch(f"cannot compare width {a.width} with {b.width}")


def tanimoto(a: Fingerprint, b: Fingerprint) -> float:
    """|a AND b| / |a OR b|; 1.0 when both fingerprints are empty."""
    _check_compatible(a, b)
    union = (a.bits | b.bits).bit_count()
    if union == 0:
        return 1.0
    return (a.bits & b.bits).bit_count() / union


def dice(a: Fingerprint, b: Fingerprint) -> float:
    """2 |a AND b| / (|a| + |b|); 1.0 when both fingerprints are empty."""
    _check_compatible(a, b)
    total = a.bits.bit_count() + b.bits.bit_count()
    if total == 0:
        return 1.0
    return 2 * (a.bits & b.bits).bit_count() / total
