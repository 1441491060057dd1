"""Agent state for the self-reflective retrieval loop."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..store.schema import SearchHit

WORKERS = ("small_molecule", "polymer", "reaction", "nmr")

RELEVANCE_PENDING = "pending"
RELEVANCE_RELEVANT = "relevant"
RELEVANCE_IRRELEVANT = "irrelevant"


@dataclass(frozen=True)
class Bounds:
    """Loop bounds; the underlying workflow is specified as running until
    all checks pass, so production termination needs explicit caps."""

    retrievals: int = 3
    regenerations: int = 2
    rewrites: int = 2

    def __post_init__(self) -> None:
        if min(self.retrievals, self.regenerations, self.rewrites) < 1:
            raise ValueError("all bounds must be positive")


def max_trace_length(bounds: Bounds) -> int:
    """Upper bound on trace length for any client behavior.

    Each rewrite restarts the loop, so there are at most rewrites+1
    generation cycles; retrieval/grade pairs are capped by the retrieval
    budget; each regeneration adds one generate + one check.
    """
    cycles = bounds.rewrites + 1
    retrieve_grade = 2 * bounds.retrievals
    generate_check = 2 * (cycles + bounds.regenerations)
    answer_checks = cycles
    return retrieve_grade + generate_check + answer_checks + bounds.rewrites + 1


@dataclass(frozen=True)
class TraceEvent:
    node: str
    outcome: str


@dataclass
class AgentState:
    """Mutable run state: question, graded documents, verdicts, counters,
    and the append-only node trace."""

    original_question: str
    active_question: str = ""
    worker: str | None = None
    retrieved: list[tuple[SearchHit, str]] = field(default_factory=list)
    generation: str | None = None
    hallucination_verdict: str | None = None
    answer_verdict: str | None = None
    counters: dict[str, int] = field(
        default_factory=lambda: {"retrievals": 0, "regenerations": 0, "rewrites": 0}
    )
    trace: list[TraceEvent] = field(default_factory=list)
    # linked records for multimodal hits: hit id -> (collection, record) pairs
    linked: dict[str, list] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.original_question.strip():
            raise ValueError("question must be non-empty")
        if not self.active_question:
            self.active_question = self.original_question

    def record(self, node: str, outcome: str) -> None:
        self.trace.append(TraceEvent(node, outcome))

    def relevant_hits(self) -> list[SearchHit]:
        return [hit for hit, verdict in self.retrieved if verdict == RELEVANCE_RELEVANT]
