"""Batch operations: embed texts/images to EMBV1, assemble spectrum manifests."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

from .backends import BackendInfo
from .embv1 import write_embv1

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg", ".gif", ".bmp", ".tif", ".tiff")

CAPTION_FIELDS = (
    "frequency_mhz", "nucleus", "solvent", "timestamp", "scans",
    "scan_delay_s", "ppm_min", "ppm_max", "peaks",
)


class BatchError(ValueError):
    """A malformed input line or file; message carries its location."""


@dataclass(frozen=True)
class SidecarManifest:
    """Audit record written next to every EMBV1 output."""

    model: str
    checkpoint: str
    pooling: str
    dim: int
    modality: str
    input_file: str
    output_file: str
    count: int

    def write(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + "\n")


def _manifest_for(info: BackendInfo, input_file: Path, output_file: Path,
                  count: int) -> SidecarManifest:
    return SidecarManifest(
        model=info.name,
        checkpoint=info.checkpoint,
        pooling=info.pooling,
        dim=info.dim,
        modality=info.modality,
        input_file=str(input_file),
        output_file=str(output_file),
        count=count,
    )


def read_text_rows(path: Path) -> list[tuple[str, str]]:
    """(id, text) rows. Lines are ``TEXT`` (id = text) or ``TEXT<TAB>ID``."""
    rows: list[tuple[str, str]] = []
    seen: set[str] = set()
    for line_no, line in enumerate(path.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) == 1:
            text, record_id = parts[0], parts[0]
        elif len(parts) >= 2:
            text, record_id = parts[0], parts[1]
        else:
            raise BatchError(f"line {line_no}: empty record")
        if not text:
            raise BatchError(f"line {line_no}: empty text")
        if record_id in seen:
            raise BatchError(f"line {line_no}: duplicate id '{record_id}'")
        seen.add(record_id)
        rows.append((record_id, text))
    return rows


def embed_texts(backend, input_path: str | Path, output_path: str | Path) -> SidecarManifest:
    """Embed one text per line into an EMBV1 file plus its manifest."""
    input_path, output_path = Path(input_path), Path(output_path)
    rows = read_text_rows(input_path)
    records = [(record_id, backend.embed(text)) for record_id, text in rows]
    count = write_embv1(output_path, backend.dim, records)
    manifest = _manifest_for(backend.info, input_path, output_path, count)
    manifest.write(output_path.with_suffix(output_path.suffix + ".manifest.json"))
    return manifest


def embed_images(backend, image_dir: str | Path, output_path: str | Path) -> SidecarManifest:
    """Embed every image under a directory; ids are paths relative to it."""
    image_dir, output_path = Path(image_dir), Path(output_path)
    files = sorted(
        p for p in image_dir.rglob("*")
        if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES
    )
    if not files:
        raise BatchError(f"no images found under {image_dir}")
    records = [
        (p.relative_to(image_dir).as_posix(), backend.embed(p.read_bytes()))
        for p in files
    ]
    count = write_embv1(output_path, backend.dim, records)
    manifest = _manifest_for(backend.info, image_dir, output_path, count)
    manifest.write(output_path.with_suffix(output_path.suffix + ".manifest.json"))
    return manifest


def make_spectrum_manifest(metadata_dir: str | Path, output_path: str | Path) -> int:
    """Assemble per-spectrum JSON metadata files into one JSON-lines manifest.

    Each ``*.json`` file must carry id, image_path, smiles_list and a meta
    map with every caption field. Entries are emitted sorted by id.
    """
    metadata_dir, output_path = Path(metadata_dir), Path(output_path)
    entries = []
    for path in sorted(metadata_dir.glob("*.json")):
        try:
            raw = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise BatchError(f"{path.name}: bad JSON: {exc}") from exc
        for key in ("id", "image_path", "smiles_list", "meta"):
            if key not in raw:
                raise BatchError(f"{path.name}: missing '{key}'")
        for field_name in CAPTION_FIELDS:
            if field_name not in raw["meta"]:
                raise BatchError(f"{path.name}: meta missing '{field_name}'")
        if not raw["smiles_list"]:
            raise BatchError(f"{path.name}: smiles_list is empty")
        entries.append(raw)
    entries.sort(key=lambda e: e["id"])
    with open(output_path, "w", newline="\n") as fh:
        for entry in entries:
            fh.write(json.dumps(entry, sort_keys=True))
            fh.write("\n")
    return len(entries)
