"""TOML configuration for the gateway.

The config names the data directory, the collections (schema, index
parameters, provider binding, storage conventions) and the agent wiring.
``CHEMVECRAG_CONFIG`` overrides the config path when set.
"""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..rag.state import Bounds
from ..store import CollectionSchema, HnswParams, IvfParams

ENV_CONFIG = "CHEMVECRAG_CONFIG"


class ConfigError(ValueError):
    pass


@dataclass
class ProviderBinding:
    type: str = "mock"           # mock | file | http
    modality: str = "text"
    dim: int = 64
    path: str | None = None      # file provider
    endpoint: str | None = None  # http provider
    seed: int | None = None      # mock override


@dataclass
class CollectionConfig:
    schema: CollectionSchema
    provider: ProviderBinding
    hnsw: HnswParams = field(default_factory=HnswParams)
    ivf: IvfParams = field(default_factory=IvfParams)
    normalize: bool = True              # L2-normalize vectors at ingest/query
    scale_by_weight: bool = False       # store normalized * own molecular weight
    compounds_collection: str | None = None  # spectrum ingest targets
    captions_collection: str | None = None


@dataclass
class AgentSettings:
    workers: dict[str, str] = field(
        default_factory=lambda: {
            "small_molecule": "molecules",
            "polymer": "polymers",
            "reaction": "reactions",
            "nmr": "spectra",
        }
    )
    k: int = 4
    bounds: Bounds = field(default_factory=Bounds)
    filter_self_hits: bool = False


@dataclass
class Config:
    data_dir: Path
    collections: list[CollectionConfig]
    agent: AgentSettings = field(default_factory=AgentSettings)
    port: int = 8080
    host: str = "127.0.0.1"
    seed: int = 42
    max_tokens: int = 2000

    def collection_config(self, name: str) -> CollectionConfig:
        for entry in self.collections:
            if entry.schema.name == name:
                return entry
        raise ConfigError(f"config defines no collection '{name}'")

    def validate(self) -> None:
        if not 1 <= self.port <= 65535:
            raise ConfigError(f"port {self.port} outside [1, 65535]")
        names = [c.schema.name for c in self.collections]
        if len(names) != len(set(names)):
            raise ConfigError("duplicate collection names in config")
        for entry in self.collections:
            binding = entry.provider
            if binding.type not in ("mock", "file", "http"):
                raise ConfigError(f"unknown provider type '{binding.type}'")
            if binding.type == "file":
                if not binding.path:
                    raise ConfigError(
                        f"collection '{entry.schema.name}' file provider needs a path"
                    )
                if not Path(binding.path).exists():
                    raise ConfigError(f"embedding file not found: {binding.path}")
            if binding.type == "http" and not binding.endpoint:
                raise ConfigError(
                    f"collection '{entry.schema.name}' http provider needs an endpoint"
                )
            for target in (entry.compounds_collection, entry.captions_collection):
                if target is not None and target not in names:
                    raise ConfigError(
                        f"'{entry.schema.name}' references unknown collection '{target}'"
                    )
        for worker, name in self.agent.workers.items():
            if name not in names:
                raise ConfigError(f"agent worker '{worker}' references unknown "
                                  f"collection '{name}'")


def _collection_from_table(table: dict) -> CollectionConfig:
    schema = CollectionSchema(
        name=table["name"],
        dim=int(table["dim"]),
        index_kind=table.get("index_kind", "flat"),
        payload_kind=table.get("payload_kind", "smiles"),
        metadata_fields=dict(table.get("metadata_fields", {})),
    )
    provider_table = table.get("provider", {})
    provider = ProviderBinding(
        type=provider_table.get("type", "mock"),
        modality=provider_table.get("modality", "text"),
        dim=int(provider_table.get("dim", table["dim"])),
        path=provider_table.get("path"),
        endpoint=provider_table.get("endpoint"),
        seed=provider_table.get("seed"),
    )
    hnsw_table = table.get("hnsw", {})
    ivf_table = table.get("ivf", {})
    return CollectionConfig(
        schema=schema,
        provider=provider,
        hnsw=HnswParams(
            m=int(hnsw_table.get("m", 16)),
            ef_construction=int(hnsw_table.get("ef_construction", 200)),
            ef_search=int(hnsw_table.get("ef_search", 64)),
        ),
        ivf=IvfParams(
            iterations=int(ivf_table.get("iterations", 20)),
            nlist=int(ivf_table.get("nlist", 0)),
            nprobe=int(ivf_table.get("nprobe", 0)),
        ),
        normalize=bool(table.get("normalize", True)),
        scale_by_weight=bool(table.get("scale_by_weight", False)),
        compounds_collection=table.get("compounds_collection"),
        captions_collection=table.get("captions_collection"),
    )


def load_config(path: str | Path | None = None) -> Config:
    """Load config from ``path``, honoring the CHEMVECRAG_CONFIG override."""
    override = os.environ.get(ENV_CONFIG)
    resolved = Path(override) if override else Path(path) if path else None
    if resolved is None:
        raise ConfigError(
            f"no config path given and {ENV_CONFIG} is not set"
        )
    if not resolved.exists():
        raise ConfigError(f"config file not found: {resolved}")
    with open(resolved, "rb") as fh:
        raw = tomllib.load(fh)

    agent_table = raw.get("agent", {})
    bounds_table = agent_table.get("bounds", {})
    collections = [_collection_from_table(t) for t in raw.get("collections", [])]
    if "workers" in agent_table:
        workers = dict(agent_table["workers"])
    else:
        # default worker map, pruned to collections this config defines
        defined = {c.schema.name for c in collections}
        workers = {
            worker: name
            for worker, name in AgentSettings().workers.items()
            if name in defined
        }
    agent = AgentSettings(
        workers=workers,
        k=int(agent_table.get("k", 4)),
        bounds=Bounds(
            retrievals=int(bounds_table.get("retrievals", 3)),
            regenerations=int(bounds_table.get("regenerations", 2)),
            rewrites=int(bounds_table.get("rewrites", 2)),
        ),
        filter_self_hits=bool(agent_table.get("filter_self_hits", False)),
    )
    service_table = raw.get("service", {})
    config = Config(
        data_dir=Path(raw.get("data_dir", "data")),
        collections=collections,
        agent=agent,
        port=int(service_table.get("port", 8080)),
        host=str(service_table.get("host", "127.0.0.1")),
        seed=int(raw.get("seed", 42)),
        max_tokens=int(raw.get("max_tokens", 2000)),
    )
    config.validate()
    return config
