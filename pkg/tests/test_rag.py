"""Worker state machine: routing, scripted transcripts, traces, reports."""

from pathlib import Path

import pytest

from chemvecrag.embedding import MockProvider, l2_normalize
from chemvecrag.rag import (
    GRAPH_EDGES,
    AgentConfig,
    AgentState,
    Bounds,
    ClientTimeout,
    MissingField,
    NoQueryPayload,
    QUERY_ECHO_PREFIX,
    SECTION_ORDER,
    ScriptedClient,
    TIMEOUT,
    WorkerConfig,
    extract_payloads,
    generate_caption,
    max_trace_length,
    retrieve_for_worker,
    route,
    run_worker,
    validate_trace,
    write_trace_jsonl,
)
from chemvecrag.store import CollectionRecord, CollectionSchema, VectorStore

GOLDEN_DIR = Path(__file__).parent / "data" / "golden"

POLYMERS = [
    "[*:1]c1ccc2c(c1)S(=O)(=O)c1cc([*:2])ccc1-2",
    "[*:1]c1cc(S(=O)(=O)C(F)(F)F)cc([*:2])c1C",
    "[*:1]CC[*:2]",
    "[*:1]COC[*:2]",
    "[*:1]c1ccc(O[*:2])cc1",
    "[*:1]CC(C)[*:2]",
]

POLYMER_QUESTION = (
    "I am interested in aromatic polyethers similar in structure and function "
    "to $O=S(C1=CC=C(O[*:1])C=C1)(C2=CC=C([*:2])C=C2)=O$. Please find "
    "analogues and comment on potential means of synthesis and thermal "
    "properties."
)


def make_polymer_fixture():
    provider = MockProvider(dim=32)
    store = VectorStore(seed=17)
    store.create_collection(
        CollectionSchema(name="polymers", dim=32, index_kind="flat", payload_kind="smiles")
    )
    records = [
        CollectionRecord(
            id=f"p{i:03d}", vector=l2_normalize(provider.embed(s)), payload=s
        )
        for i, s in enumerate(POLYMERS)
    ]
    store.insert("polymers", records)
    config = AgentConfig(
        workers={
            "small_molecule": WorkerConfig(collection="polymers", k=4),
            "polymer": WorkerConfig(collection="polymers", k=4),
            "reaction": WorkerConfig(collection="polymers", k=4),
            "nmr": WorkerConfig(collection="polymers", k=4, normalize_query=False),
        }
    )
    return store, {"text": provider, "image": MockProvider(dim=32, modality="image")}, config


class TestRoute:
    def test_polymer_by_wildcard(self):
        assert route(POLYMER_QUESTION) == "polymer"

    def test_nmr_by_image_path(self):
        q = ("Please identify NMR spectroscopy images for compounds similar to "
             "those in data/images/NMR/83a-13C/83a-1.png")
        assert route(q) == "nmr"

    def test_nmr_by_token(self):
        assert route("Compare the NMR peaks of these compounds") == "nmr"

    def test_reaction_by_arrows(self):
        assert route("What transformations resemble CC=O>>CCO ?") == "reaction"

    def test_small_molecule_default(self):
        assert route("find analogues of CC(=O)O") == "small_molecule"

    def test_client_verdict_overrides(self):
        client = ScriptedClient({"route": ["reaction"]})
        assert route("find analogues of CC(=O)O", client) == "reaction"

    def test_client_timeout_falls_back(self):
        client = ScriptedClient({"route": [TIMEOUT]})
        assert route(POLYMER_QUESTION, client) == "polymer"

    def test_bogus_client_verdict_ignored(self):
        client = ScriptedClient({"route": ["astrology"]})
        assert route("find analogues of CC(=O)O", client) == "small_molecule"

    def test_empty_question(self):
        with pytest.raises(ValueError):
            route("   ")


class TestExtraction:
    def test_wrapped_smiles(self):
        out = extract_payloads(POLYMER_QUESTION)
        assert out.smiles == ["O=S(C1=CC=C(O[*:1])C=C1)(C2=CC=C([*:2])C=C2)=O"]

    def test_reaction_and_image(self):
        out = extract_payloads("compare CC=O>>CCO against data/nmr/a.png please")
        assert out.reactions == ["CC=O>>CCO"]
        assert out.images == ["data/nmr/a.png"]

    def test_prose_not_extracted(self):
        out = extract_payloads("I want an ICON of a POP SONG soon")
        assert out.smiles == []

    def test_malformed_wrapped_smiles_records_failure(self):
        out = extract_payloads("similar to $C1CC$ maybe")
        assert out.smiles == []
        assert out.failures and out.failures[0][0] == "C1CC"

    def test_bare_structured_smiles(self):
        out = extract_payloads("find analogues of CC(=O)O")
        assert out.smiles == ["CC(=O)O"]


def run_scenario(script, bounds=None, question=POLYMER_QUESTION):
    store, providers, config = make_polymer_fixture()
    client = ScriptedClient(script)
    worker = route(question, client=None)
    state = AgentState(original_question=question, worker=worker)
    report = run_worker(state, store, providers, config, client, bounds=bounds)
    return report, state


SCENARIOS = {
    "happy": {},
    "reretrieval": {"grade": ["irrelevant"] * 4 + ["relevant"]},
    "regeneration": {"judge_hallucination": ["fail", "pass"]},
    "rewrite": {"judge_answer": ["fail", "pass"]},
    "combined": {
        "grade": ["irrelevant"] * 4 + ["relevant"],
        "judge_hallucination": ["fail", "pass"],
        "judge_answer": ["fail", "pass"],
    },
    "exhaustion": {"judge_answer": ["fail"]},
}


class TestGoldenTraces:
    @pytest.mark.parametrize("name", sorted(SCENARIOS))
    def test_trace_matches_golden_bytes(self, name, tmp_path):
        report, state = run_scenario(SCENARIOS[name])
        out = tmp_path / f"{name}.jsonl"
        write_trace_jsonl(state.trace, out)
        golden = (GOLDEN_DIR / f"scenario_{name}.jsonl").read_bytes()
        assert out.read_bytes() == golden

    @pytest.mark.parametrize("name", sorted(SCENARIOS))
    def test_trace_walks_graph_edges(self, name):
        _, state = run_scenario(SCENARIOS[name])
        validate_trace(state.trace)

    def test_scenarios_cover_every_workflow_edge(self):
        covered = set()
        for script in SCENARIOS.values():
            _, state = run_scenario(script)
            covered.update(
                (a.node, b.node) for a, b in zip(state.trace, state.trace[1:])
            )
        workflow_edges = {
            ("retrieve", "grade"),
            ("grade", "generate"),
            ("grade", "retrieve"),
            ("generate", "hallucination_check"),
            ("hallucination_check", "generate"),
            ("hallucination_check", "answer_check"),
            ("answer_check", "report"),
            ("answer_check", "rewrite"),
            ("rewrite", "retrieve"),
        }
        assert workflow_edges <= covered
        assert covered <= GRAPH_EDGES


class TestBounds:
    def test_exhaustion_counters(self):
        report, state = run_scenario({"judge_answer": ["fail"]})
        assert state.counters["rewrites"] == 2
        assert "answer completeness" in report.section("CONCLUSION")

    def test_retrieval_exhaustion(self):
        report, state = run_scenario({"grade": ["irrelevant"]})
        assert state.counters["retrievals"] == 3
        assert state.trace[-2].node == "grade"
        assert "document relevance" in report.section("CONCLUSION")
        assert "(no vector store context was used)" in \
            report.section("Summary of Vector Store Context")
        validate_trace(state.trace)

    def test_regeneration_exhaustion(self):
        report, state = run_scenario({"judge_hallucination": ["fail"]})
        assert state.counters["regenerations"] == 2
        assert "hallucination" in report.section("CONCLUSION")
        validate_trace(state.trace)

    def test_trace_length_bounded_for_adversarial_scripts(self):
        bounds = Bounds()
        limit = max_trace_length(bounds)
        adversarial = [
            {"grade": ["irrelevant"]},
            {"judge_answer": ["fail"]},
            {"judge_hallucination": ["fail"]},
            {"grade": ["irrelevant"] * 8 + ["relevant"],
             "judge_hallucination": ["fail", "pass"],
             "judge_answer": ["fail"]},
            {"grade": [TIMEOUT]},
            {"judge_hallucination": [TIMEOUT]},
            {"judge_answer": [TIMEOUT]},
        ]
        for script in adversarial:
            _, state = run_scenario(script)
            assert len(state.trace) <= limit
            assert state.counters["retrievals"] <= bounds.retrievals
            assert state.counters["regenerations"] <= bounds.regenerations
            assert state.counters["rewrites"] <= bounds.rewrites
            validate_trace(state.trace)

    def test_timeouts_count_as_failed_checks(self):
        _, state = run_scenario({"judge_hallucination": [TIMEOUT, "pass"]})
        nodes = [e.node for e in state.trace]
        assert nodes.count("generate") == 2


class TestReports:
    def test_six_sections_in_order(self):
        report, _ = run_scenario({})
        titles = [title for title, _ in report.sections]
        assert titles == list(SECTION_ORDER)
        rendered = report.render()
        positions = [rendered.index(f"## {t}") for t in SECTION_ORDER]
        assert positions == sorted(positions)

    def test_query_echoed_verbatim(self):
        report, _ = run_scenario({})
        intro = report.section("INTRODUCTION")
        assert f"{QUERY_ECHO_PREFIX} '{POLYMER_QUESTION}'" in intro

    def test_findings_payloads_appear_in_context_summary(self):
        report, state = run_scenario({})
        summary = report.section("Summary of Vector Store Context")
        for hit in state.relevant_hits():
            assert f"${hit.payload}$" in report.section("MAIN FINDINGS")
            assert f"${hit.payload}$" in summary

    def test_byte_identical_reports(self):
        a, _ = run_scenario({})
        b, _ = run_scenario({})
        assert a.render().encode() == b.render().encode()

    def test_paper_style_polymer_report_lists_analogues(self):
        report, state = run_scenario({})
        findings = report.section("MAIN FINDINGS")
        assert any(p in findings for p in POLYMERS)


class TestRetrieveForWorker:
    def test_polymer_question_hits_polymer_collection(self):
        store, providers, config = make_polymer_fixture()
        state = AgentState(original_question=POLYMER_QUESTION, worker="polymer")
        hits = retrieve_for_worker(state, store, providers, config)
        assert len(hits) == 4
        assert all("*" in h.payload for h in hits)

    def test_malformed_smiles_raises_no_payload(self):
        store, providers, config = make_polymer_fixture()
        state = AgentState(
            original_question="find analogues of $C1CC$", worker="small_molecule"
        )
        with pytest.raises(NoQueryPayload) as exc:
            retrieve_for_worker(state, store, providers, config)
        assert "C1CC" in str(exc.value)

    def test_question_without_payload(self):
        store, providers, config = make_polymer_fixture()
        state = AgentState(
            original_question="please find something nice", worker="small_molecule"
        )
        with pytest.raises(NoQueryPayload):
            retrieve_for_worker(state, store, providers, config)

    def test_self_hit_filter_flag(self):
        store, providers, config = make_polymer_fixture()
        question = f"analogues of ${POLYMERS[0]}$ please"
        state = AgentState(original_question=question, worker="polymer")
        hits = retrieve_for_worker(state, store, providers, config)
        assert hits[0].payload == POLYMERS[0]  # default: self hit stays
        config.filter_self_hits = True
        state2 = AgentState(original_question=question, worker="polymer")
        filtered = retrieve_for_worker(state2, store, providers, config)
        assert all(h.payload != POLYMERS[0] for h in filtered)


class TestCaption:
    FIG8_META = {
        "frequency_mhz": 100.62,
        "nucleus": "¹³C",
        "solvent": "CDCl₃",
        "timestamp": "2021-02-02T14:25:28",
        "scans": 256,
        "scan_delay_s": 4,
        "ppm_min": 0,
        "ppm_max": 12,
        "peaks": [138.6, 138.0, 129.0, 126.8, 77.4, 77.0, 76.7, 59.6, 59.1, 55.8, 21.3],
    }

    FIG8_CAPTION = (
        "A 100.62 MHz ¹³C NMR in CDCl₃ collected on 2021-02-02T14:25:28 "
        "with 256 scans and a scan delay of 4 seconds. "
        "The displayed spectrum is between 0 and 12 PPM. "
        "Peaks (ppm): 138.6, 138.0, 129.0, 126.8, 77.4, 77.0, 76.7, 59.6, "
        "59.1, 55.8, 21.3"
    )

    def test_reference_caption_byte_for_byte(self):
        assert generate_caption(self.FIG8_META) == self.FIG8_CAPTION

    def test_empty_peaks(self):
        meta = dict(self.FIG8_META, peaks=[])
        assert generate_caption(meta).endswith("Peaks (ppm): ")

    def test_missing_field(self):
        meta = dict(self.FIG8_META)
        del meta["solvent"]
        with pytest.raises(MissingField) as exc:
            generate_caption(meta)
        assert exc.value.field == "solvent"
