"""Batch CLI: embed texts/images into EMBV1, assemble spectrum manifests."""

from __future__ import annotations

import sys

import click

from .backends import BackendUnavailable, make_backend
from .batch import BatchError, embed_images, embed_texts, make_spectrum_manifest


@click.group()
def main() -> None:
    """Offline embedding jobs feeding the chemvecrag engine."""


def _backend_or_exit(name: str, modality: str, dim: int, pooling: str):
    try:
        return make_backend(name, modality, dim=dim, pooling=pooling)
    except BackendUnavailable as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(4)


@main.command("embed-texts")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True),
              help="One text per line, optionally TEXT<TAB>ID.")
@click.option("--output", "output_path", required=True, type=click.Path())
@click.option("--backend", default="hashed", show_default=True,
              type=click.Choice(["hashed", "molformer"]))
@click.option("--dim", default=64, show_default=True, help="hashed backend only")
@click.option("--pooling", default="mean", show_default=True,
              type=click.Choice(["mean", "cls"]), help="molformer only")
def embed_texts_cmd(input_path, output_path, backend, dim, pooling):
    worker = _backend_or_exit(backend, "text", dim, pooling)
    try:
        manifest = embed_texts(worker, input_path, output_path)
    except BatchError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(3)
    click.echo(f"wrote {manifest.count} embeddings (dim {manifest.dim}) to {output_path}")


@main.command("embed-images")
@click.option("--input-dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--output", "output_path", required=True, type=click.Path())
@click.option("--backend", default="hashed", show_default=True,
              type=click.Choice(["hashed", "openclip"]))
@click.option("--dim", default=64, show_default=True, help="hashed backend only")
def embed_images_cmd(input_dir, output_path, backend, dim):
    worker = _backend_or_exit(backend, "image", dim, "mean")
    try:
        manifest = embed_images(worker, input_dir, output_path)
    except BatchError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(3)
    click.echo(f"wrote {manifest.count} embeddings (dim {manifest.dim}) to {output_path}")


@main.command("make-manifest")
@click.option("--metadata-dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--output", "output_path", required=True, type=click.Path())
def make_manifest_cmd(metadata_dir, output_path):
    try:
        count = make_spectrum_manifest(metadata_dir, output_path)
    except BatchError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(3)
    click.echo(f"wrote {count} spectrum manifest lines to {output_path}")


if __name__ == "__main__":
    main()
