"""Query-vector algebra: add, subtract, average, scale, normalize.

Expressions form a tree over embed-leaf inputs and are evaluated
bottom-up in 64-bit floats, emitting 32-bit vectors, so averages over
many terms stay stable.
"""

from __future__ import annotations

import base64
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Union

import numpy as np

from ..errors import DimMismatch, ZeroVector
from .providers import EmbeddingProvider, ProviderFailure
from .vector import EmbeddingVector

Expression = Union["Embed", "Add", "Sub", "Average", "Scale", "Normalize"]


@dataclass(frozen=True)
class Embed:
    """Leaf: embed a text (str) or image payload (bytes)."""

    payload: str | bytes
    modality: str = "text"


@dataclass(frozen=True)
class Add:
    left: Expression
    right: Expression


@dataclass(frozen=True)
class Sub:
    left: Expression
    right: Expression


@dataclass(frozen=True)
class Average:
    items: tuple[Expression, ...]

    def __post_init__(self) -> None:
        if not self.items:
            raise ValueError("Average needs at least one operand")


@dataclass(frozen=True)
class Scale:
    inner: Expression
    factor: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.factor):
            raise ValueError("Scale factor must be finite")


@dataclass(frozen=True)
class Normalize:
    inner: Expression


def _eval(expr: Expression, providers: Mapping[str, EmbeddingProvider]) -> np.ndarray:
    if isinstance(expr, Embed):
        provider = providers.get(expr.modality)
        if provider is None:
            raise ProviderFailure(f"no provider bound for modality '{expr.modality}'")
        try:
            vec = provider.embed(expr.payload)
        except ProviderFailure:
            raise
        except Exception as exc:  # provider contract: wrap unexpected failures
            raise ProviderFailure(f"provider '{provider.name}' failed: {exc}") from exc
        return vec.values.astype(np.float64)
    if isinstance(expr, Add):
        left, right = _eval(expr.left, providers), _eval(expr.right, providers)
        _check(left, right)
        return left + right
    if isinstance(expr, Sub):
        left, right = _eval(expr.left, providers), _eval(expr.right, providers)
        _check(left, right)
        return left - right
    if isinstance(expr, Average):
        parts = [_eval(item, providers) for item in expr.items]
        for part in parts[1:]:
            _check(parts[0], part)
        return np.mean(np.stack(parts), axis=0)
    if isinstance(expr, Scale):
        return _eval(expr.inner, providers) * float(expr.factor)
    if isinstance(expr, Normalize):
        inner = _eval(expr.inner, providers)
        norm = float(np.linalg.norm(inner))
        if norm == 0.0:
            raise ZeroVector("Normalize applied to the zero vector")
        return inner / norm
    raise TypeError(f"not a query expression: {expr!r}")


def _check(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimMismatch(f"dimension {a.shape[0]} != {b.shape[0]}")


def evaluate(
    expr: Expression, providers: Mapping[str, EmbeddingProvider]
) -> EmbeddingVector:
    """Evaluate an expression tree to a float32 vector.

    ``providers`` maps modality (``"text"``/``"image"``) to the provider
    used for that kind of leaf.
    """
    values = _eval(expr, providers)
    return EmbeddingVector(values.astype(np.float32),
                           normalized=isinstance(expr, Normalize))


def expression_from_json(obj, image_loader=None) -> Expression:
    """Build an expression from its JSON form.

    A bare string embeds text. Objects use one of the single-key forms
    ``{"embed": text}``, ``{"image": path}``, ``{"add": [a, b]}``,
    ``{"sub": [a, b]}``, ``{"avg": [...]}``, ``{"scale": [a, factor]}``,
    ``{"normalize": a}``. Image paths are read from disk unless an
    ``image_loader`` callable is supplied.
    """
    if isinstance(obj, str):
        return Embed(obj, "text")
    if not isinstance(obj, dict) or len(obj) != 1:
        raise ValueError(f"malformed expression node: {obj!r}")
    op, arg = next(iter(obj.items()))
    if op == "embed":
        return Embed(str(arg), "text")
    if op == "image":
        if image_loader is not None:
            data = image_loader(str(arg))
        elif isinstance(arg, str) and arg.startswith("base64:"):
            data = base64.b64decode(arg[len("base64:"):])
        else:
            data = Path(str(arg)).read_bytes()
        return Embed(data, "image")
    if op == "add" or op == "sub":
        if not isinstance(arg, list) or len(arg) != 2:
            raise ValueError(f"'{op}' takes exactly two operands")
        cls = Add if op == "add" else Sub
        return cls(expression_from_json(arg[0], image_loader),
                   expression_from_json(arg[1], image_loader))
    if op == "avg":
        if not isinstance(arg, list) or not arg:
            raise ValueError("'avg' takes a non-empty list")
        return Average(tuple(expression_from_json(item, image_loader) for item in arg))
    if op == "scale":
        if not isinstance(arg, list) or len(arg) != 2:
            raise ValueError("'scale' takes [expression, factor]")
        return Scale(expression_from_json(arg[0], image_loader), float(arg[1]))
    if op == "normalize":
        return Normalize(expression_from_json(arg, image_loader))
    raise ValueError(f"unknown expression operator '{op}'")
