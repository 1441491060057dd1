"""Supervisor routing and the self-reflective worker loop.

A question is routed to one of four specialist workers. Each worker runs
retrieve -> grade -> generate -> hallucination check -> answer check,
re-retrieving when every document grades irrelevant, regenerating on
hallucination failures, and rewriting the question when the answer check
fails, until every check passes or a bound runs out. Every transition is
appended to the state trace and must be an edge of :data:`GRAPH_EDGES`.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from ..chem import canonicalize, parse_smiles
from ..embedding import Average, Embed, EmbeddingProvider, Expression, evaluate, l2_normalize
from ..errors import ChemVecRagError
from ..store import SearchHit, VectorStore
from .client import ClientTimeout, ModelClient
from .extract import extract_payloads
from .report import Report, generate_report
from .state import (
    RELEVANCE_IRRELEVANT,
    RELEVANCE_PENDING,
    RELEVANCE_RELEVANT,
    WORKERS,
    AgentState,
    Bounds,
    TraceEvent,
)


class NoQueryPayload(ChemVecRagError):
    """No parseable chemical payload could be extracted from the question."""


class StoreUnavailable(ChemVecRagError):
    pass


# Node vocabulary and legal transitions. The first five edges mirror the
# published workflow; the *-> report edges out of checks cover bound
# exhaustion, which an unbounded loop does not need.
NODES = (
    "retrieve", "grade", "generate", "hallucination_check",
    "answer_check", "rewrite", "report",
)

GRAPH_EDGES = frozenset(
    {
        ("retrieve", "grade"),
        ("grade", "generate"),
        ("grade", "retrieve"),
        ("generate", "hallucination_check"),
        ("hallucination_check", "generate"),
        ("hallucination_check", "answer_check"),
        ("answer_check", "report"),
        ("answer_check", "rewrite"),
        ("rewrite", "retrieve"),
        # bound-exhaustion exits
        ("grade", "report"),
        ("hallucination_check", "report"),
        ("rewrite", "report"),
    }
)


def validate_trace(events: list[TraceEvent]) -> None:
    """Check a trace starts at retrieve, ends at report, and only walks
    edges of the worker graph."""
    if not events:
        raise ValueError("empty trace")
    if events[0].node != "retrieve":
        raise ValueError(f"trace must start at retrieve, got {events[0].node}")
    if events[-1].node != "report":
        raise ValueError(f"trace must end at report, got {events[-1].node}")
    for prev, cur in zip(events, events[1:]):
        if (prev.node, cur.node) not in GRAPH_EDGES:
            raise ValueError(f"illegal edge {prev.node} -> {cur.node}")


def write_trace_jsonl(events: list[TraceEvent], path: str | Path) -> None:
    with open(path, "w", newline="\n") as fh:
        for event in events:
            fh.write(json.dumps({"node": event.node, "outcome": event.outcome}))
            fh.write("\n")


def read_trace_jsonl(path: str | Path) -> list[TraceEvent]:
    events = []
    for line in Path(path).read_text().splitlines():
        if line.strip():
            obj = json.loads(line)
            events.append(TraceEvent(obj["node"], obj["outcome"]))
    return events


_NMR_TOKEN_RE = re.compile(r"\bNMR\b")
_IMAGE_HINT_RE = re.compile(r"\S+\.(?:png|jpe?g|gif|bmp|tiff?)\b", re.IGNORECASE)


def route(question: str, client: ModelClient | None = None) -> str:
    """Pick the worker for a question.

    A client verdict wins when present and valid; otherwise (including on
    timeout) rule-based fallback applies: reaction arrows, wildcard
    atoms, then image/NMR hints, defaulting to small molecules.
    """
    if not question.strip():
        raise ValueError("question must be non-empty")
    if ">>" in question:
        fallback = "reaction"
    elif "[*:" in question or "[*]" in question:
        fallback = "polymer"
    elif _IMAGE_HINT_RE.search(question) or _NMR_TOKEN_RE.search(question):
        fallback = "nmr"
    else:
        fallback = "small_molecule"
    if client is not None:
        try:
            verdict = client.route(question)
        except ClientTimeout:
            return fallback
        if verdict in WORKERS:
            return verdict
    return fallback


@dataclass
class WorkerConfig:
    """Where a worker searches and how it shapes its query vector."""

    collection: str
    k: int = 4
    normalize_query: bool = True
    caption_collection: str | None = None   # nmr: caption fallback searches
    text_provider: str = "text"
    image_provider: str = "image"


@dataclass
class AgentConfig:
    workers: dict[str, WorkerConfig]
    bounds: Bounds = field(default_factory=Bounds)
    filter_self_hits: bool = False


def _first_failure(failures: list[tuple[str, str]]) -> str:
    if failures:
        word, error = failures[0]
        return f"'{word}': {error}"
    return "no chemical payload found in question"


def retrieve_for_worker(
    state: AgentState,
    store: VectorStore,
    providers: dict[str, EmbeddingProvider],
    config: AgentConfig,
    k: int | None = None,
) -> list[SearchHit]:
    """Extract the question's chemical payload, embed it the way the
    worker's collection stores vectors, and search.

    Small molecules are canonicalized before embedding; polymer and
    reaction strings embed verbatim (component order is meaningful).
    The nmr worker searches by image and pulls cross-linked records;
    without an image it falls back to caption text search.
    """
    worker = state.worker
    if worker not in WORKERS:
        raise ValueError(f"state is not routed (worker={worker!r})")
    wcfg = config.workers.get(worker)
    if wcfg is None:
        raise ValueError(f"no collection is configured for the '{worker}' worker")
    top_k = k or wcfg.k
    payloads = extract_payloads(state.active_question)
    collection = store.collection(wcfg.collection)

    expr: Expression
    query_payload: str | None = None
    if worker == "small_molecule":
        if not payloads.smiles:
            raise NoQueryPayload(_first_failure(payloads.failures))
        canon = [canonicalize(parse_smiles(s)) for s in payloads.smiles]
        leaves = [Embed(c, "text") for c in canon]
        expr = leaves[0] if len(leaves) == 1 else Average(tuple(leaves))
        query_payload = canon[0]
    elif worker == "polymer":
        candidates = payloads.wildcard_smiles or payloads.smiles
        if not candidates:
            raise NoQueryPayload(_first_failure(payloads.failures))
        leaves = [Embed(s, "text") for s in candidates]
        expr = leaves[0] if len(leaves) == 1 else Average(tuple(leaves))
        query_payload = candidates[0]
    elif worker == "reaction":
        if not payloads.reactions:
            raise NoQueryPayload(_first_failure(payloads.failures))
        leaves = [Embed(r, "text") for r in payloads.reactions]
        expr = leaves[0] if len(leaves) == 1 else Average(tuple(leaves))
        query_payload = payloads.reactions[0]
    else:  # nmr
        if payloads.images:
            data = Path(payloads.images[0]).read_bytes()
            expr = Embed(data, "image")
            provider_key = wcfg.image_provider
        elif wcfg.caption_collection is not None:
            collection = store.collection(wcfg.caption_collection)
            expr = Embed(state.active_question, "text")
            provider_key = wcfg.text_provider
        else:
            raise NoQueryPayload("nmr question names no image and no caption "
                                 "collection is configured")
        vector = evaluate(expr, {_modality(expr): providers[provider_key]})
        if wcfg.normalize_query:
            vector = l2_normalize(vector)
        hits = collection.search(vector, top_k)
        hits = _drop_self(hits, query_payload, config)
        state.linked = store.cross_lookup(collection.schema.name, [h.id for h in hits])
        return hits

    vector = evaluate(expr, {"text": providers[wcfg.text_provider]})
    if wcfg.normalize_query:
        vector = l2_normalize(vector)
    hits = collection.search(vector, top_k)
    return _drop_self(hits, query_payload, config)


def _modality(expr: Expression) -> str:
    return expr.modality if isinstance(expr, Embed) else "text"


def _drop_self(hits, query_payload, config: AgentConfig):
    if not config.filter_self_hits or query_payload is None:
        return hits
    return [h for h in hits if h.payload != query_payload]


def run_worker(
    state: AgentState,
    store: VectorStore,
    providers: dict[str, EmbeddingProvider],
    config: AgentConfig,
    client: ModelClient,
    bounds: Bounds | None = None,
) -> Report:
    """Execute the worker loop until every check passes or a bound runs out.

    A client timeout counts as a failed check at grading and judging
    nodes; generation and rewriting degrade to deterministic templates.
    On bound exhaustion a report is still produced whose CONCLUSION names
    the unsatisfied check.
    """
    bounds = bounds or config.bounds
    wcfg = config.workers.get(state.worker)
    if wcfg is None:
        raise ValueError(f"no collection is configured for the '{state.worker}' worker")
    k = wcfg.k

    def finish(failed_check: str | None) -> Report:
        report = generate_report(state, client, failed_check=failed_check)
        state.record("report", "emitted" if failed_check is None else "failure_noted")
        return report

    while True:  # question cycle: restarts after each rewrite
        # -- retrieve + grade, re-retrieving while everything is irrelevant
        while True:
            if state.counters["retrievals"] >= bounds.retrievals:
                return finish("document relevance")
            try:
                hits = retrieve_for_worker(state, store, providers, config, k=k)
            except NoQueryPayload:
                raise
            except ChemVecRagError as exc:
                raise StoreUnavailable(str(exc)) from exc
            state.counters["retrievals"] += 1
            state.retrieved = [(hit, RELEVANCE_PENDING) for hit in hits]
            state.record("retrieve", f"k={k},hits={len(hits)}")

            graded: list[tuple[SearchHit, str]] = []
            for hit, _ in state.retrieved:
                try:
                    verdict = client.grade(state.active_question, hit.payload)
                except ClientTimeout:
                    verdict = RELEVANCE_IRRELEVANT  # timeout = failed check
                if verdict != RELEVANCE_RELEVANT:
                    verdict = RELEVANCE_IRRELEVANT
                graded.append((hit, verdict))
            state.retrieved = graded
            relevant = state.relevant_hits()
            if relevant:
                state.record("grade", f"relevant={len(relevant)}/{len(graded)}")
                break
            state.record("grade", "all_irrelevant")
            if state.counters["retrievals"] >= bounds.retrievals:
                return finish("document relevance")
            # retry with modified parameters: double k; from the second
            # retry on, also switch to a rewritten question
            k *= 2
            if state.counters["retrievals"] >= 2:
                try:
                    state.active_question = client.rewrite(state.active_question)
                except ClientTimeout:
                    pass

        # -- generate until the hallucination check passes
        documents = [hit.payload for hit in state.relevant_hits()]
        while True:
            try:
                state.generation = client.generate(state.active_question, documents)
            except ClientTimeout:
                state.generation = (
                    "Retrieved context: " + "; ".join(documents)
                )
            state.record("generate", "ok")
            try:
                verdict = client.judge_hallucination(documents, state.generation)
            except ClientTimeout:
                verdict = "fail"
            state.hallucination_verdict = verdict
            if verdict == "pass":
                state.record("hallucination_check", "pass")
                break
            state.record("hallucination_check", "fail")
            if state.counters["regenerations"] >= bounds.regenerations:
                return finish("hallucination")
            state.counters["regenerations"] += 1

        # -- answer check
        try:
            verdict = client.judge_answer(state.original_question, state.generation)
        except ClientTimeout:
            verdict = "fail"
        state.answer_verdict = verdict
        if verdict == "pass":
            state.record("answer_check", "pass")
            return finish(None)
        state.record("answer_check", "fail")
        if state.counters["rewrites"] >= bounds.rewrites:
            return finish("answer completeness")
        state.counters["rewrites"] += 1
        try:
            state.active_question = client.rewrite(state.active_question)
        except ClientTimeout:
            state.active_question = f"{state.active_question} (restated)"
        state.record("rewrite", "ok")
        k = wcfg.k  # each rewrite restarts with the configured k


def ask(
    question: str,
    store: VectorStore,
    providers: dict[str, EmbeddingProvider],
    config: AgentConfig,
    client: ModelClient,
    bounds: Bounds | None = None,
) -> tuple[Report, AgentState]:
    """Route a question and run the chosen worker to a report."""
    worker = route(question, client)
    state = AgentState(original_question=question, worker=worker)
    report = run_worker(state, store, providers, config, client, bounds=bounds)
    return report, state
