"""Model-client contract and the deterministic scripted mock.

Real deployments bind chat models to these role endpoints; tests and the
default CLI path run on :class:`ScriptedClient`, which replays canned
answers and never leaves the process.
"""

from __future__ import annotations

from typing import Protocol, Sequence, runtime_checkable

from ..errors import ChemVecRagError


class ClientTimeout(ChemVecRagError):
    """A model endpoint did not answer within its deadline."""


@runtime_checkable
class ModelClient(Protocol):
    """Role endpoints the worker graph calls. Every method either returns
    within the configured timeout or raises :class:`ClientTimeout`."""

    name: str

    def route(self, question: str) -> str | None: ...

    def grade(self, question: str, document: str) -> str: ...

    def generate(self, question: str, documents: Sequence[str]) -> str: ...

    def judge_hallucination(self, documents: Sequence[str], text: str) -> str: ...

    def judge_answer(self, question: str, text: str) -> str: ...

    def rewrite(self, question: str) -> str: ...

    def summarize(self, state) -> str | None: ...


TIMEOUT = "TIMEOUT"  # script sentinel: raise ClientTimeout for this call


class ScriptedClient:
    """Deterministic mock client driven by a per-endpoint transcript.

    ``script`` maps endpoint name to a list of canned replies consumed in
    call order; when a list runs out its last entry repeats. The sentinel
    :data:`TIMEOUT` makes that call raise :class:`ClientTimeout`. Missing
    endpoints fall back to deterministic defaults (pass every check,
    template generation).
    """

    name = "scripted-mock"

    def __init__(self, script: dict[str, list[str]] | None = None) -> None:
        self.script = dict(script or {})
        self._cursor: dict[str, int] = {}
        self.calls: list[tuple[str, str]] = []

    def _next(self, endpoint: str, default: str | None) -> str | None:
        queue = self.script.get(endpoint)
        if not queue:
            self.calls.append((endpoint, "default"))
            return default
        index = min(self._cursor.get(endpoint, 0), len(queue) - 1)
        self._cursor[endpoint] = index + 1
        value = queue[index]
        self.calls.append((endpoint, value))
        if value == TIMEOUT:
            raise ClientTimeout(f"scripted timeout on '{endpoint}'")
        return value

    def route(self, question: str) -> str | None:
        return self._next("route", None)

    def grade(self, question: str, document: str) -> str:
        return self._next("grade", "relevant")

    def generate(self, question: str, documents: Sequence[str]) -> str:
        canned = self._next("generate", None)
        if canned is not None:
            return canned
        listed = ", ".join(f"${doc}$" for doc in documents)
        return (
            "The retrieved context contains the following relevant entries: "
            f"{listed}."
        )

    def judge_hallucination(self, documents: Sequence[str], text: str) -> str:
        return self._next("judge_hallucination", "pass")

    def judge_answer(self, question: str, text: str) -> str:
        return self._next("judge_answer", "pass")

    def rewrite(self, question: str) -> str:
        canned = self._next("rewrite", None)
        return canned if canned is not None else f"{question} (restated)"

    def summarize(self, state) -> str | None:
        return self._next("summarize", None)
