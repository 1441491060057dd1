"""Hierarchical supervisor + self-reflective retrieval workers."""

from .client import TIMEOUT, ClientTimeout, ModelClient, ScriptedClient
from .extract import ExtractedPayloads, extract_payloads
from .graph import (
    GRAPH_EDGES,
    NODES,
    AgentConfig,
    NoQueryPayload,
    StoreUnavailable,
    WorkerConfig,
    ask,
    read_trace_jsonl,
    retrieve_for_worker,
    route,
    run_worker,
    validate_trace,
    write_trace_jsonl,
)
from .report import (
    CAPTION_TEMPLATE,
    QUERY_ECHO_PREFIX,
    SECTION_ORDER,
    TOOL_NAMES,
    MissingField,
    Report,
    generate_caption,
    generate_report,
)
from .state import WORKERS, AgentState, Bounds, TraceEvent, max_trace_length

__all__ = [
    "AgentConfig",
    "AgentState",
    "Bounds",
    "CAPTION_TEMPLATE",
    "ClientTimeout",
    "ExtractedPayloads",
    "GRAPH_EDGES",
    "MissingField",
    "ModelClient",
    "NODES",
    "NoQueryPayload",
    "QUERY_ECHO_PREFIX",
    "Report",
    "SECTION_ORDER",
    "ScriptedClient",
    "StoreUnavailable",
    "TIMEOUT",
    "TOOL_NAMES",
    "TraceEvent",
    "WORKERS",
    "WorkerConfig",
    "ask",
    "extract_payloads",
    "generate_caption",
    "generate_report",
    "max_trace_length",
    "read_trace_jsonl",
    "retrieve_for_worker",
    "route",
    "run_worker",
    "validate_trace",
    "write_trace_jsonl",
]
