"""Collection schemas, records, hits and metadata filters."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from ..embedding.vector import EmbeddingVector

INDEX_KINDS = ("flat", "hnsw", "ivf_flat")
PAYLOAD_KINDS = ("smiles", "reaction", "caption", "image_ref")
METADATA_TYPES = ("float", "int", "string")

MetadataValue = Union[str, int, float]


@dataclass(frozen=True)
class CollectionSchema:
    """Shape of one collection; the metric is fixed to L2."""

    name: str
    dim: int
    index_kind: str = "flat"
    payload_kind: str = "smiles"
    metadata_fields: dict[str, str] = field(default_factory=dict)
    metric: str = "l2"

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("collection name must be non-empty")
        if self.dim <= 0:
            raise ValueError("dim must be positive")
        if self.index_kind not in INDEX_KINDS:
            raise ValueError(f"index_kind must be one of {INDEX_KINDS}")
        if self.payload_kind not in PAYLOAD_KINDS:
            raise ValueError(f"payload_kind must be one of {PAYLOAD_KINDS}")
        if self.metric != "l2":
            raise ValueError("only the l2 metric is supported")
        for name, kind in self.metadata_fields.items():
            if kind not in METADATA_TYPES:
                raise ValueError(f"metadata field '{name}' has unknown type '{kind}'")

    def check_metadata(self, metadata: dict[str, MetadataValue]) -> dict[str, MetadataValue]:
        out: dict[str, MetadataValue] = {}
        for name, value in metadata.items():
            declared = self.metadata_fields.get(name)
            if declared is None:
                raise ValueError(f"metadata field '{name}' not declared in schema")
            if declared == "float":
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    raise ValueError(f"field '{name}' expects a number")
                out[name] = float(value)
            elif declared == "int":
                if isinstance(value, bool) or not isinstance(value, int):
                    raise ValueError(f"field '{name}' expects an int")
                out[name] = int(value)
            else:
                if not isinstance(value, str):
                    raise ValueError(f"field '{name}' expects a string")
                out[name] = value
        return out


@dataclass(frozen=True)
class CollectionRecord:
    id: str
    vector: EmbeddingVector
    payload: str
    metadata: dict[str, MetadataValue] = field(default_factory=dict)
    links: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class SearchHit:
    """One search result. Hits are sorted by ascending l2_distance with
    ties broken by id lexicographic order."""

    id: str
    l2_distance: float
    payload: str
    metadata: dict[str, MetadataValue] = field(default_factory=dict)


@dataclass(frozen=True)
class FieldEquals:
    field: str
    value: MetadataValue

    def matches(self, metadata: dict[str, MetadataValue]) -> bool:
        return self.field in metadata and metadata[self.field] == self.value


@dataclass(frozen=True)
class FieldRange:
    """Inclusive numeric range predicate."""

    field: str
    lo: float
    hi: float

    def matches(self, metadata: dict[str, MetadataValue]) -> bool:
        value = metadata.get(self.field)
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            return False
        return self.lo <= value <= self.hi


Predicate = Union[FieldEquals, FieldRange]


@dataclass(frozen=True)
class MetadataFilter:
    """Conjunction of field predicates."""

    predicates: tuple[Predicate, ...]

    def matches(self, metadata: dict[str, MetadataValue]) -> bool:
        return all(p.matches(metadata) for p in self.predicates)

    def validate(self, schema: CollectionSchema) -> None:
        for pred in self.predicates:
            if pred.field not in schema.metadata_fields:
                raise ValueError(
                    f"filter references '{pred.field}', not a field of '{schema.name}'"
                )
            if isinstance(pred, FieldRange) and schema.metadata_fields[pred.field] == "string":
                raise ValueError(f"range filter on string field '{pred.field}'")

    @classmethod
    def parse(cls, text: str, schema: CollectionSchema | None = None) -> "MetadataFilter":
        """Parse ``field:[lo,hi]`` and ``field=value`` segments joined by commas."""
        predicates: list[Predicate] = []
        for segment in _split_segments(text):
            segment = segment.strip()
            if not segment:
                continue
            if ":" in segment and "[" in segment:
                name, _, rest = segment.partition(":")
                rest = rest.strip()
                if not (rest.startswith("[") and rest.endswith("]")):
                    raise ValueError(f"malformed range filter '{segment}'")
                bounds = rest[1:-1].split(",")
                if len(bounds) != 2:
                    raise ValueError(f"range needs two bounds: '{segment}'")
                predicates.append(
                    FieldRange(name.strip(), float(bounds[0]), float(bounds[1]))
                )
            elif "=" in segment:
                name, _, raw = segment.partition("=")
                name = name.strip()
                value: MetadataValue = raw.strip()
                if schema is not None:
                    declared = schema.metadata_fields.get(name)
                    if declared == "float":
                        value = float(value)
                    elif declared == "int":
                        value = int(value)
                predicates.append(FieldEquals(name, value))
            else:
                raise ValueError(f"cannot parse filter segment '{segment}'")
        out = cls(tuple(predicates))
        if schema is not None:
            out.validate(schema)
        return out


def _split_segments(text: str) -> list[str]:
    segments, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        elif ch == "," and depth == 0:
            segments.append(text[start:i])
            start = i + 1
    segments.append(text[start:])
    return segments
