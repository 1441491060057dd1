"""Shared gateway core: the CLI and the HTTP service both drive this.

Owns the vector store (snapshot-backed under data_dir), the provider
bindings, ingestion per payload kind, query shaping (canonicalization,
normalization, weight scaling), and agent runs.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Sequence

import numpy as np

from ..chem import (
    ChemError,
    canonicalize,
    count_tokens,
    molecular_weight,
    parse_reaction,
    parse_smiles,
)
from ..embedding import (
    EmbeddingVector,
    FileProvider,
    HttpProvider,
    MemoizedProvider,
    MockProvider,
    embed_spectrum_compounds,
    evaluate,
    expression_from_json,
    l2_normalize,
)
from ..errors import ChemVecRagError
from ..metrics import SimilarityPanel, build_panel, export_heatmap
from ..rag import (
    AgentConfig,
    AgentState,
    ModelClient,
    Report,
    ScriptedClient,
    WorkerConfig,
    generate_caption,
    route,
    run_worker,
    write_trace_jsonl,
)
from ..store import CollectionRecord, MetadataFilter, SearchHit, VectorStore
from .config import CollectionConfig, Config

SNAPSHOT_NAME = "store.cvrs"


class IngestError(ChemVecRagError):
    """A corpus line failed to ingest; message carries the line number."""


class Engine:
    def __init__(self, config: Config, load_snapshot: bool = True) -> None:
        self.config = config
        self.config.data_dir.mkdir(parents=True, exist_ok=True)
        self.snapshot_path = self.config.data_dir / SNAPSHOT_NAME
        if load_snapshot and self.snapshot_path.exists():
            self.store = VectorStore.load(self.snapshot_path)
            self._ensure_collections()
        else:
            self.store = VectorStore(seed=config.seed)
            for entry in config.collections:
                self.store.create_collection(
                    entry.schema, hnsw_params=entry.hnsw, ivf_params=entry.ivf
                )
        self.providers = {
            entry.schema.name: self._build_provider(entry)
            for entry in config.collections
        }

    def _ensure_collections(self) -> None:
        for entry in self.config.collections:
            if not self.store.has_collection(entry.schema.name):
                self.store.create_collection(
                    entry.schema, hnsw_params=entry.hnsw, ivf_params=entry.ivf
                )

    @staticmethod
    def _build_provider(entry: CollectionConfig):
        binding = entry.provider
        if binding.type == "file":
            return FileProvider(binding.path, modality=binding.modality)
        if binding.type == "http":
            remote = HttpProvider(binding.endpoint, modality=binding.modality,
                                  dim=binding.dim or None)
            return MemoizedProvider(remote)
        seed = binding.seed if binding.seed is not None else MockProvider.DEFAULT_SEED
        return MockProvider(dim=binding.dim, modality=binding.modality, seed=seed)

    def save(self) -> None:
        self.store.save(self.snapshot_path)

    # -- ingestion ---------------------------------------------------------

    def _gate_tokens(self, text: str, line_no: int) -> None:
        if count_tokens(text) > self.config.max_tokens:
            raise IngestError(
                f"line {line_no}: input exceeds the {self.config.max_tokens}-token cap"
            )

    def _embed_structure(self, entry: CollectionConfig, text: str) -> tuple[EmbeddingVector, str, float]:
        """Returns (vector, stored payload, molecular weight).

        Small molecules embed their canonical form; wildcard (polymer)
        strings embed verbatim because component order carries meaning.
        """
        graph = parse_smiles(text, max_tokens=self.config.max_tokens)
        payload = text if graph.has_wildcard else canonicalize(graph)
        vector = self.providers[entry.schema.name].embed(payload)
        weight = molecular_weight(graph)
        if entry.normalize:
            vector = l2_normalize(vector)
        if entry.scale_by_weight:
            values = vector.values.astype("float64") * weight
            vector = EmbeddingVector(values.astype("float32"))
        return vector, payload, weight

    _KIND_FOR_PAYLOAD = {
        "smiles": "smiles",
        "reaction": "reaction",
        "image_ref": "spectrum",
    }

    def ingest(self, collection: str, input_path: str | Path,
               kind: str | None = None) -> int:
        entry = self.config.collection_config(collection)
        if kind is None:
            kind = self._KIND_FOR_PAYLOAD.get(entry.schema.payload_kind)
            if kind is None:
                raise IngestError(
                    f"cannot infer ingest kind for payload '{entry.schema.payload_kind}'"
                )
        lines = Path(input_path).read_text().splitlines()
        if kind == "spectrum":
            count = self._ingest_spectra(entry, lines, Path(input_path))
        elif kind in ("smiles", "reaction"):
            count = self._ingest_lines(entry, lines, kind)
        else:
            raise IngestError(f"unknown ingest kind '{kind}'")
        self.save()
        return count

    def _ingest_lines(self, entry: CollectionConfig, lines: list[str], kind: str) -> int:
        records = []
        for line_no, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) < 2:
                raise IngestError(f"line {line_no}: expected TEXT<TAB>ID[<TAB>JSON]")
            text, record_id = parts[0], parts[1]
            try:
                metadata = json.loads(parts[2]) if len(parts) > 2 and parts[2] else {}
            except json.JSONDecodeError as exc:
                raise IngestError(f"line {line_no}: bad metadata JSON: {exc}") from exc
            self._gate_tokens(text, line_no)
            try:
                if kind == "reaction":
                    parse_reaction(text, max_tokens=self.config.max_tokens)
                    vector = self.providers[entry.schema.name].embed(text)
                    if entry.normalize:
                        vector = l2_normalize(vector)
                    payload = text
                else:
                    vector, payload, weight = self._embed_structure(entry, text)
                    if "mw" in entry.schema.metadata_fields:
                        metadata.setdefault("mw", weight)
            except ChemError as exc:
                raise IngestError(f"line {line_no}: {exc}") from exc
            records.append(
                CollectionRecord(id=record_id, vector=vector, payload=payload,
                                 metadata=metadata)
            )
        inserted = self.store.insert(entry.schema.name, records)
        if entry.schema.index_kind == "ivf_flat":
            self.store.collection(entry.schema.name).train_index()
        return inserted

    def _ingest_spectra(self, entry: CollectionConfig, lines: list[str],
                        manifest_path: Path) -> int:
        if not entry.compounds_collection or not entry.captions_collection:
            raise IngestError(
                f"collection '{entry.schema.name}' needs compounds_collection and "
                "captions_collection configured for spectrum ingest"
            )
        compounds_entry = self.config.collection_config(entry.compounds_collection)
        captions_entry = self.config.collection_config(entry.captions_collection)
        image_provider = self.providers[entry.schema.name]
        compound_provider = self.providers[entry.compounds_collection]
        caption_provider = self.providers[entry.captions_collection]

        inserted = 0
        for line_no, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            try:
                manifest = json.loads(line)
                spec_id = manifest["id"]
                image_path = manifest["image_path"]
                smiles_list = manifest["smiles_list"]
                meta = manifest.get("meta", {})
            except (json.JSONDecodeError, KeyError) as exc:
                raise IngestError(f"line {line_no}: bad spectrum manifest: {exc}") from exc

            image_file = Path(image_path)
            if not image_file.is_absolute():
                image_file = manifest_path.parent / image_file
            if not image_file.exists():
                raise IngestError(f"line {line_no}: image not found: {image_file}")

            try:
                image_vector = image_provider.embed(image_file.read_bytes())
                if entry.normalize:
                    image_vector = l2_normalize(image_vector)
                # averaged compound embedding, raw per the multimodal convention
                compound_vector = embed_spectrum_compounds(compound_provider, smiles_list)
                if compounds_entry.normalize:
                    compound_vector = l2_normalize(compound_vector)
                caption = generate_caption(meta)
                caption_vector = caption_provider.embed(caption)
                if captions_entry.normalize:
                    caption_vector = l2_normalize(caption_vector)
            except ChemVecRagError as exc:
                raise IngestError(f"line {line_no}: {exc}") from exc

            metadata = {
                name: meta[name]
                for name in entry.schema.metadata_fields
                if name in meta
            }
            self.store.insert(entry.schema.name, [
                CollectionRecord(id=spec_id, vector=image_vector,
                                 payload=image_path, metadata=metadata)
            ])
            compound_id = f"{spec_id}-compounds"
            self.store.insert(entry.compounds_collection, [
                CollectionRecord(id=compound_id, vector=compound_vector,
                                 payload=";".join(smiles_list))
            ])
            caption_id = f"{spec_id}-caption"
            self.store.insert(entry.captions_collection, [
                CollectionRecord(id=caption_id, vector=caption_vector, payload=caption)
            ])
            self.store.link((entry.schema.name, spec_id),
                            (entry.compounds_collection, compound_id))
            self.store.link((entry.schema.name, spec_id),
                            (entry.captions_collection, caption_id))
            inserted += 1
        for name in (entry.schema.name, entry.compounds_collection,
                     entry.captions_collection):
            if self.store.collection(name).schema.index_kind == "ivf_flat":
                self.store.collection(name).train_index()
        return inserted

    # -- records API (HTTP) --------------------------------------------------

    def insert_records(self, collection: str, rows: Sequence[dict]) -> int:
        entry = self.config.collection_config(collection)
        records = []
        for row in rows:
            payload = row["payload"]
            metadata = dict(row.get("metadata", {}))
            if entry.schema.payload_kind == "smiles":
                vector, payload, weight = self._embed_structure(entry, payload)
                if "mw" in entry.schema.metadata_fields:
                    metadata.setdefault("mw", weight)
            elif entry.schema.payload_kind == "reaction":
                parse_reaction(payload, max_tokens=self.config.max_tokens)
                vector = self.providers[collection].embed(payload)
                if entry.normalize:
                    vector = l2_normalize(vector)
            else:
                vector = self.providers[collection].embed(payload)
                if entry.normalize:
                    vector = l2_normalize(vector)
            records.append(
                CollectionRecord(id=row["id"], vector=vector, payload=payload,
                                 metadata=metadata,
                                 links=tuple(tuple(l) for l in row.get("links", ()))),
            )
        inserted = self.store.insert(collection, records)
        self.save()
        return inserted

    # -- queries ---------------------------------------------------------------

    def query_vector(
        self,
        collection: str,
        smiles: str | None = None,
        image: str | Path | None = None,
        expr: dict | str | None = None,
        vector: Sequence[float] | None = None,
        target_weight: float | None = None,
    ) -> EmbeddingVector:
        """Shape the query vector the same way the collection stores vectors."""
        entry = self.config.collection_config(collection)
        provider = self.providers[collection]
        given = [x is not None for x in (smiles, image, expr, vector)]
        if sum(given) != 1:
            raise ValueError("exactly one of smiles/image/expr/vector is required")
        if smiles is not None:
            graph = parse_smiles(smiles, max_tokens=self.config.max_tokens)
            payload = smiles if graph.has_wildcard else canonicalize(graph)
            out = provider.embed(payload)
            if entry.normalize:
                out = l2_normalize(out)
            if target_weight is not None:
                scaled = out.values.astype("float64") * float(target_weight)
                out = EmbeddingVector(scaled.astype("float32"))
            return out
        if image is not None:
            out = provider.embed(Path(image).read_bytes())
            return l2_normalize(out) if entry.normalize else out
        if expr is not None:
            tree = expression_from_json(
                json.loads(expr) if isinstance(expr, str) else expr
            )
            modalities = {"text": provider, "image": provider}
            for other in self.providers.values():
                if other.modality == "image":
                    modalities["image"] = other
                    break
            return evaluate(tree, modalities)
        return EmbeddingVector(np.asarray(vector, dtype=np.float32))

    def query(
        self,
        collection: str,
        k: int = 5,
        filter_text: str | None = None,
        ef_search: int | None = None,
        nprobe: int | None = None,
        **query_kwargs,
    ) -> tuple[list[SearchHit], EmbeddingVector]:
        col = self.store.collection(collection)
        query = self.query_vector(collection, **query_kwargs)
        filt = MetadataFilter.parse(filter_text, col.schema) if filter_text else None
        hits = col.search(query, k, filter=filt, ef_search=ef_search, nprobe=nprobe)
        return hits, query

    def panel(
        self, collection: str, query_smiles: str, hits: Sequence[SearchHit],
        csv_path: str | Path | None = None,
    ) -> SimilarityPanel:
        entry = self.config.collection_config(collection)
        panel = build_panel(
            self.store.collection(collection), query_smiles, hits,
            self.providers[collection], normalize_query=entry.normalize,
        )
        if csv_path is not None:
            export_heatmap(panel, csv_path)
        return panel

    # -- agent -------------------------------------------------------------------

    def agent_config(self) -> AgentConfig:
        workers: dict[str, WorkerConfig] = {}
        for worker, name in self.config.agent.workers.items():
            entry = self.config.collection_config(name)
            workers[worker] = WorkerConfig(
                collection=name,
                k=self.config.agent.k,
                normalize_query=entry.normalize,
                caption_collection=entry.captions_collection,
                text_provider=name if worker != "nmr" else (entry.captions_collection or name),
                image_provider=name,
            )
        return AgentConfig(
            workers=workers,
            bounds=self.config.agent.bounds,
            filter_self_hits=self.config.agent.filter_self_hits,
        )

    def ask(
        self,
        question: str,
        client: ModelClient | None = None,
        trace_path: str | Path | None = None,
    ) -> tuple[Report, AgentState, str]:
        """Route and run a worker; returns (report, state, trace id)."""
        client = client or ScriptedClient()
        config = self.agent_config()
        worker = route(question, client)
        state = AgentState(original_question=question, worker=worker)
        providers = dict(self.providers)
        providers.setdefault("text", next(iter(self.providers.values())))
        report = run_worker(state, self.store, providers, config, client)
        trace_bytes = "".join(
            json.dumps({"node": e.node, "outcome": e.outcome}) + "\n"
            for e in state.trace
        ).encode()
        trace_id = hashlib.sha256(trace_bytes).hexdigest()[:12]
        if trace_path is not None:
            write_trace_jsonl(state.trace, trace_path)
        return report, state, trace_id
