"""Command-line interface.

Exit codes: 0 success, 2 usage error, 3 data error (parse failures,
duplicates, bad corpus lines), 4 backend error (I/O, snapshots,
providers).
"""

from __future__ import annotations

from pathlib import Path

import click

from ..chem import ChemError, parse_smiles
from ..embedding import Embv1Error, ProviderFailure
from ..errors import ChemVecRagError, DimMismatch
from ..rag import NoQueryPayload, StoreUnavailable, validate_trace
from ..store import (
    CorruptSnapshot,
    DuplicateId,
    NotTrained,
    UnknownCollection,
    UnknownId,
    VersionMismatch,
)
from .config import ConfigError, load_config
from .engine import Engine, IngestError

_DATA_ERRORS = (
    ChemError, IngestError, DuplicateId, DimMismatch, UnknownCollection,
    UnknownId, NotTrained, NoQueryPayload, ValueError,
)
_BACKEND_ERRORS = (
    CorruptSnapshot, VersionMismatch, Embv1Error, ProviderFailure,
    StoreUnavailable, OSError,
)


class DataError(click.ClickException):
    exit_code = 3


class BackendError(click.ClickException):
    exit_code = 4


def _engine(ctx: click.Context) -> Engine:
    path = ctx.obj.get("config_path")
    try:
        config = load_config(path)
        return Engine(config)
    except ConfigError as exc:
        raise click.UsageError(str(exc)) from exc
    except _BACKEND_ERRORS as exc:
        raise BackendError(str(exc)) from exc


def _run(fn):
    try:
        return fn()
    except _BACKEND_ERRORS as exc:
        raise BackendError(str(exc)) from exc
    except _DATA_ERRORS as exc:
        raise DataError(str(exc)) from exc
    except ChemVecRagError as exc:
        raise BackendError(str(exc)) from exc


@click.group()
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="Config TOML (or set CHEMVECRAG_CONFIG).")
@click.pass_context
def main(ctx: click.Context, config_path: str | None) -> None:
    """Chemistry-aware semantic vector search and research-report agent."""
    ctx.ensure_object(dict)
    ctx.obj["config_path"] = config_path


@main.command()
@click.option("--collection", required=True)
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--kind", type=click.Choice(["smiles", "reaction", "spectrum"]),
              default=None,
              help="Defaults to the collection's payload kind.")
@click.pass_context
def ingest(ctx: click.Context, collection: str, input_path: str,
           kind: str | None) -> None:
    """Parse, embed and insert a corpus file; prints the inserted count."""
    engine = _engine(ctx)
    count = _run(lambda: engine.ingest(collection, input_path, kind=kind))
    click.echo(f"inserted {count}")


@main.command()
@click.option("--collection", required=True)
@click.option("--smiles", default=None)
@click.option("--image", default=None, type=click.Path(exists=True))
@click.option("--expr", default=None, help="Query-algebra JSON expression.")
@click.option("--k", default=5, show_default=True)
@click.option("--filter", "filter_text", default=None,
              help='e.g. "mw:[200,300],kind=acid"')
@click.option("--ef-search", default=None, type=int)
@click.option("--nprobe", default=None, type=int)
@click.option("--target-weight", default=None, type=float,
              help="Scale the normalized query to this molecular weight.")
@click.option("--panel", "panel_path", default=None, type=click.Path(),
              help="Write the six-metric similarity panel CSV here.")
@click.option("--heatmap", "heatmap_path", default=None, type=click.Path(),
              help="Render the panel as a heatmap PNG alongside the CSV.")
@click.pass_context
def query(ctx, collection, smiles, image, expr, k, filter_text, ef_search,
          nprobe, target_weight, panel_path, heatmap_path):
    """Search a collection; prints rank, id, L2 distance and payload as TSV."""
    given = [x for x in (smiles, image, expr) if x is not None]
    if len(given) != 1:
        raise click.UsageError("exactly one of --smiles/--image/--expr is required")
    engine = _engine(ctx)

    def go():
        hits, _ = engine.query(
            collection, k=k, filter_text=filter_text, ef_search=ef_search,
            nprobe=nprobe, smiles=smiles, image=image, expr=expr,
            target_weight=target_weight,
        )
        for rank, hit in enumerate(hits, start=1):
            click.echo(f"{rank}\t{hit.id}\t{hit.l2_distance:.6f}\t{hit.payload}")
        if panel_path or heatmap_path:
            if smiles is None:
                raise ValueError("--panel/--heatmap need a --smiles query")
            panel = engine.panel(collection, smiles, hits, csv_path=panel_path)
            if heatmap_path:
                from ..viz import render_heatmap

                render_heatmap(panel, heatmap_path)
        return hits

    _run(go)


@main.command()
@click.option("--smiles", required=True)
@click.option("--kind", type=click.Choice(["morgan", "path", "maccs"]),
              default="morgan", show_default=True)
@click.option("--radius", default=2, show_default=True)
@click.option("--width", default=2048, show_default=True)
def fingerprint(smiles, kind, radius, width):
    """Print a fingerprint as hex (bit 0 first, one char per 4 bits)."""
    from ..fingerprints import maccs_fingerprint, morgan_fingerprint, path_fingerprint

    def go():
        graph = parse_smiles(smiles)
        if kind == "morgan":
            fp = morgan_fingerprint(graph, radius=radius, width=width)
        elif kind == "path":
            fp = path_fingerprint(graph, width=width)
        else:
            fp = maccs_fingerprint(graph)
        click.echo(fp.to_hex())

    _run(go)


@main.command()
@click.option("--question", required=True)
@click.option("--trace", "trace_path", default=None, type=click.Path(),
              help="Write the node trace as JSON lines.")
@click.option("--report", "report_path", default=None, type=click.Path(),
              help="Also write the report Markdown here.")
@click.pass_context
def ask(ctx, question, trace_path, report_path):
    """Run the supervisor and worker agents; writes the report to stdout."""
    if not question.strip():
        raise click.UsageError("--question must be non-empty")
    engine = _engine(ctx)

    def go():
        report, state, trace_id = engine.ask(question, trace_path=trace_path)
        rendered = report.render()
        click.echo(rendered, nl=False)
        if report_path:
            Path(report_path).write_text(rendered)
        if trace_path:
            validate_trace(state.trace)
        click.echo(f"trace-id: {trace_id}", err=True)

    _run(go)


@main.command()
@click.option("--host", default=None)
@click.option("--port", default=None, type=int)
@click.pass_context
def serve(ctx, host, port):
    """Serve the HTTP API."""
    import uvicorn

    engine = _engine(ctx)
    from .service import create_app

    app = create_app(engine)
    uvicorn.run(
        app,
        host=host or engine.config.host,
        port=port or engine.config.port,
    )


if __name__ == "__main__":
    main()
