"""Sidecar round trips: EMBV1 validity in the engine's FileProvider,
re-run determinism, manifest assembly."""

import json
import os

import numpy as np
import pytest
from click.testing import CliRunner

from chemvec_sidecar import (
    BatchError,
    HashedBackend,
    embed_images,
    embed_texts,
    make_spectrum_manifest,
)
from chemvec_sidecar.cli import main

# the primary component, consumed through its external interfaces only
from chemvecrag.embedding import FileProvider, validate_embv1

TEN_SMILES = [
    "CCO", "CC(=O)O", "c1ccccc1", "Cc1ccccc1", "CCN",
    "C1CCOC1", "c1ccncc1", "CS(=O)C", "OCC(O)CO", "N#Cc1ccccc1",
]


def write_batch(tmp_path, rows=None):
    path = tmp_path / "texts.txt"
    rows = rows if rows is not None else TEN_SMILES
    path.write_text("".join(f"{s}\n" for s in rows))
    return path


class TestEmbedTexts:
    def test_single_item(self, tmp_path):
        out = tmp_path / "one.embv1"
        manifest = embed_texts(HashedBackend(dim=32), write_batch(tmp_path, ["CCO"]), out)
        assert manifest.count == 1
        assert validate_embv1(out) == (32, 1)

    def test_file_loads_in_file_provider(self, tmp_path):
        backend = HashedBackend(dim=32)
        out = tmp_path / "batch.embv1"
        embed_texts(backend, write_batch(tmp_path), out)
        provider = FileProvider(out)
        assert provider.dim == 32
        assert len(provider) == len(TEN_SMILES)
        for smiles in TEN_SMILES:
            stored = provider.embed(smiles)
            assert stored.values.tobytes() == backend.embed(smiles).tobytes()

    def test_rerun_identical_bytes(self, tmp_path):
        backend = HashedBackend(dim=48)
        batch = write_batch(tmp_path)
        first = tmp_path / "a.embv1"
        second = tmp_path / "b.embv1"
        embed_texts(backend, batch, first)
        embed_texts(HashedBackend(dim=48), batch, second)
        assert first.read_bytes() == second.read_bytes()

    def test_manifest_records_pooling_and_dim(self, tmp_path):
        out = tmp_path / "batch.embv1"
        embed_texts(HashedBackend(dim=16), write_batch(tmp_path), out)
        manifest = json.loads(
            (tmp_path / "batch.embv1.manifest.json").read_text()
        )
        assert manifest["dim"] == 16
        assert manifest["pooling"] == "feature-hash"
        assert manifest["checkpoint"] == "builtin-hashed-v1"
        assert manifest["count"] == len(TEN_SMILES)
        dim, _ = validate_embv1(out)
        assert dim == manifest["dim"]

    def test_explicit_ids(self, tmp_path):
        path = tmp_path / "texts.tsv"
        path.write_text("CCO\tmol-1\nCCN\tmol-2\n")
        out = tmp_path / "ids.embv1"
        embed_texts(HashedBackend(dim=16), path, out)
        provider = FileProvider(out)
        assert provider.ids() == ["mol-1", "mol-2"]

    def test_malformed_line_reports_number(self, tmp_path):
        path = tmp_path / "texts.txt"
        path.write_text("CCO\nCCO\n")  # duplicate implicit id
        with pytest.raises(BatchError) as exc:
            embed_texts(HashedBackend(dim=16), path, tmp_path / "x.embv1")
        assert "line 2" in str(exc.value)


class TestEmbedImages:
    def test_directory_batch(self, tmp_path):
        image_dir = tmp_path / "imgs"
        image_dir.mkdir()
        rng = np.random.default_rng(5)
        for i in range(4):
            (image_dir / f"s{i}.png").write_bytes(
                rng.integers(0, 256, size=128, dtype=np.uint8).tobytes()
            )
        out = tmp_path / "imgs.embv1"
        manifest = embed_images(HashedBackend(dim=24, modality="image"), image_dir, out)
        assert manifest.count == 4
        provider = FileProvider(out, modality="image")
        assert sorted(provider.ids()) == [f"s{i}.png" for i in range(4)]

    def test_empty_dir_rejected(self, tmp_path):
        empty = tmp_path / "none"
        empty.mkdir()
        with pytest.raises(BatchError):
            embed_images(HashedBackend(dim=8, modality="image"), empty, tmp_path / "x.embv1")


class TestSpectrumManifest:
    META = {
        "frequency_mhz": 100.62,
        "nucleus": "¹³C",
        "solvent": "CDCl₃",
        "timestamp": "2021-02-02T14:25:28",
        "scans": 256,
        "scan_delay_s": 4,
        "ppm_min": 0,
        "ppm_max": 12,
        "peaks": [138.6, 21.3],
    }

    def test_assembles_sorted_jsonl(self, tmp_path):
        meta_dir = tmp_path / "meta"
        meta_dir.mkdir()
        for spec_id in ("b-spec", "a-spec"):
            (meta_dir / f"{spec_id}.json").write_text(json.dumps({
                "id": spec_id,
                "image_path": f"images/{spec_id}.png",
                "smiles_list": ["CCO"],
                "meta": self.META,
            }))
        out = tmp_path / "spectra.jsonl"
        assert make_spectrum_manifest(meta_dir, out) == 2
        lines = [json.loads(l) for l in out.read_text().splitlines()]
        assert [l["id"] for l in lines] == ["a-spec", "b-spec"]

    def test_missing_caption_field_rejected(self, tmp_path):
        meta_dir = tmp_path / "meta"
        meta_dir.mkdir()
        broken = dict(self.META)
        del broken["solvent"]
        (meta_dir / "x.json").write_text(json.dumps({
            "id": "x", "image_path": "i.png", "smiles_list": ["C"], "meta": broken,
        }))
        with pytest.raises(BatchError) as exc:
            make_spectrum_manifest(meta_dir, tmp_path / "out.jsonl")
        assert "solvent" in str(exc.value)


class TestCli:
    def test_embed_texts_command(self, tmp_path):
        batch = write_batch(tmp_path)
        out = tmp_path / "cli.embv1"
        result = CliRunner().invoke(main, [
            "embed-texts", "--input", str(batch), "--output", str(out),
            "--backend", "hashed", "--dim", "32",
        ])
        assert result.exit_code == 0, result.output
        assert "wrote 10 embeddings" in result.output
        assert validate_embv1(out) == (32, 10)


class TestEngineIntegration:
    """End-to-end: sidecar EMBV1 feeding a file-provider collection."""

    CONFIG = """\
data_dir = "{data_dir}"

[[collections]]
name = "molecules"
dim = 32
index_kind = "flat"
payload_kind = "smiles"

[collections.provider]
type = "file"
modality = "text"
path = "{embv1}"
"""

    def test_ingest_and_query_through_file_provider(self, tmp_path):
        from chemvecrag.chem import canonicalize, parse_smiles
        from chemvecrag.gateway.config import load_config
        from chemvecrag.gateway.engine import Engine

        canonical = [canonicalize(parse_smiles(s)) for s in TEN_SMILES]
        batch = tmp_path / "canon.txt"
        batch.write_text("".join(f"{c}\n" for c in canonical))
        embv1 = tmp_path / "canon.embv1"
        embed_texts(HashedBackend(dim=32), batch, embv1)

        config_path = tmp_path / "config.toml"
        config_path.write_text(self.CONFIG.format(
            data_dir=(tmp_path / "data").as_posix(), embv1=embv1.as_posix(),
        ))
        corpus = tmp_path / "corpus.tsv"
        corpus.write_text("".join(
            f"{s}\tmol-{i}\t{{}}\n" for i, s in enumerate(TEN_SMILES)
        ))
        engine = Engine(load_config(config_path))
        assert engine.ingest("molecules", corpus) == len(TEN_SMILES)
        hits, _ = engine.query("molecules", k=1, smiles="CCO")
        assert hits[0].id == "mol-0"
        assert hits[0].l2_distance == 0.0


@pytest.mark.skipif(
    not os.environ.get("CHEMVEC_SIDECAR_MODEL_TESTS"),
    reason="model checkpoints not available in this environment",
)
class TestModelBackends:
    def test_molformer_round_trip(self, tmp_path):
        from chemvec_sidecar import MolformerBackend

        backend = MolformerBackend()
        out = tmp_path / "molformer.embv1"
        embed_texts(backend, write_batch(tmp_path, ["CCO"]), out)
        provider = FileProvider(out)
        assert provider.dim == backend.dim
