"""HTTP service mirroring the CLI semantics over the shared engine."""

from __future__ import annotations

import base64
import tempfile
from pathlib import Path
from typing import Any, Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel, Field

from ..chem import ChemError
from ..embedding import ProviderFailure
from ..errors import ChemVecRagError, DimMismatch
from ..rag import NoQueryPayload, StoreUnavailable
from ..store import (
    CorruptSnapshot,
    DuplicateId,
    NotTrained,
    UnknownCollection,
    UnknownId,
)
from .engine import Engine, IngestError


class SearchRequest(BaseModel):
    smiles: Optional[str] = None
    image_b64: Optional[str] = None
    expr: Optional[Any] = None
    vector: Optional[list[float]] = None
    k: int = Field(default=5, ge=1)
    filter: Optional[str] = None
    ef_search: Optional[int] = None
    nprobe: Optional[int] = None
    target_weight: Optional[float] = None


class RecordIn(BaseModel):
    id: str
    payload: str
    metadata: dict = Field(default_factory=dict)
    links: list[tuple[str, str]] = Field(default_factory=list)


class RecordsRequest(BaseModel):
    records: list[RecordIn]


class AskRequest(BaseModel):
    question: str


_STATUS = {
    UnknownCollection: (404, "unknown_collection"),
    UnknownId: (404, "unknown_id"),
    DuplicateId: (400, "duplicate_id"),
    DimMismatch: (400, "dim_mismatch"),
    NotTrained: (409, "index_not_trained"),
    IngestError: (400, "bad_input"),
    NoQueryPayload: (400, "no_query_payload"),
    ChemError: (400, "chem_parse_error"),
    ValueError: (400, "bad_request"),
    ProviderFailure: (502, "provider_failure"),
    StoreUnavailable: (503, "store_unavailable"),
    CorruptSnapshot: (500, "corrupt_snapshot"),
}


def _error_response(exc: Exception) -> JSONResponse:
    for cls, (status, code) in _STATUS.items():
        if isinstance(exc, cls):
            return JSONResponse(
                status_code=status, content={"error": code, "detail": str(exc)}
            )
    return JSONResponse(
        status_code=500, content={"error": "internal", "detail": str(exc)}
    )


def create_app(engine: Engine) -> FastAPI:
    app = FastAPI(title="chemvecrag", version="0.1.0")

    @app.exception_handler(ChemVecRagError)
    async def handle_domain_error(request: Request, exc: ChemVecRagError):
        return _error_response(exc)

    @app.exception_handler(ValueError)
    async def handle_value_error(request: Request, exc: ValueError):
        return _error_response(exc)

    @app.get("/healthz", response_class=PlainTextResponse)
    async def healthz() -> str:
        return "ok"

    @app.post("/collections/{name}/search")
    async def search(name: str, request: SearchRequest):
        image_path = None
        if request.image_b64 is not None:
            raw = base64.b64decode(request.image_b64)
            with tempfile.NamedTemporaryFile(delete=False, suffix=".img") as fh:
                fh.write(raw)
                image_path = fh.name
        try:
            hits, _ = engine.query(
                name,
                k=request.k,
                filter_text=request.filter,
                ef_search=request.ef_search,
                nprobe=request.nprobe,
                smiles=request.smiles,
                image=image_path,
                expr=request.expr,
                vector=request.vector,
                target_weight=request.target_weight,
            )
        finally:
            if image_path is not None:
                Path(image_path).unlink(missing_ok=True)
        return {
            "hits": [
                {
                    "id": hit.id,
                    "l2_distance": hit.l2_distance,
                    "payload": hit.payload,
                    "metadata": hit.metadata,
                }
                for hit in hits
            ]
        }

    @app.post("/collections/{name}/records")
    async def add_records(name: str, request: RecordsRequest):
        inserted = engine.insert_records(
            name, [record.model_dump() for record in request.records]
        )
        return {"inserted": inserted}

    @app.post("/ask")
    async def ask(request: AskRequest):
        if not request.question.strip():
            return _error_response(ValueError("question must be non-empty"))
        report, state, trace_id = engine.ask(request.question)
        return {
            "report": report.render(),
            "worker": state.worker,
            "trace_id": trace_id,
            "trace": [
                {"node": event.node, "outcome": event.outcome}
                for event in state.trace
            ],
        }

    return app
