"""Research-report rendering and the spectrum caption template.

Reports carry six fixed sections in a fixed order and echo the user's
question verbatim. Rendering is fully deterministic: identical state
yields byte-identical Markdown.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ChemVecRagError
from .client import ClientTimeout, ModelClient
from .state import AgentState

SECTION_ORDER = (
    "INTRODUCTION",
    "RESEARCH STEPS",
    "MAIN FINDINGS",
    "CONCLUSION",
    "SOURCES",
    "Summary of Vector Store Context",
)

QUERY_ECHO_PREFIX = "The user's exact query was:"

TOOL_NAMES = {
    "small_molecule": "molecule_rag_search",
    "polymer": "polymer_rag_search",
    "reaction": "reaction_rag_search",
    "nmr": "nmr_image_rag_search",
}

CAPTION_TEMPLATE = (
    "A {freq} MHz {nucleus} NMR in {solvent} collected on {timestamp} "
    "with {scans} scans and a scan delay of {delay} seconds. "
    "The displayed spectrum is between {lo} and {hi} PPM. "
    "Peaks (ppm): {peaks}"
)

CAPTION_FIELDS = (
    "frequency_mhz",
    "nucleus",
    "solvent",
    "timestamp",
    "scans",
    "scan_delay_s",
    "ppm_min",
    "ppm_max",
    "peaks",
)


class MissingField(ChemVecRagError):
    def __init__(self, name: str) -> None:
        super().__init__(f"spectrum metadata is missing '{name}'")
        self.field = name


def _num(value) -> str:
    if isinstance(value, bool):
        raise ValueError("numeric field cannot be a bool")
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:g}"
    return str(value)


def generate_caption(meta: dict) -> str:
    """Render spectrum metadata through the fixed caption template.

    Peaks print with one decimal place; scalar numbers print in their
    shortest form.
    """
    for name in CAPTION_FIELDS:
        if name not in meta:
            raise MissingField(name)
    peaks = ", ".join(f"{float(p):.1f}" for p in meta["peaks"])
    return CAPTION_TEMPLATE.format(
        freq=_num(meta["frequency_mhz"]),
        nucleus=meta["nucleus"],
        solvent=meta["solvent"],
        timestamp=meta["timestamp"],
        scans=_num(meta["scans"]),
        delay=_num(meta["scan_delay_s"]),
        lo=_num(meta["ppm_min"]),
        hi=_num(meta["ppm_max"]),
        peaks=peaks,
    )


@dataclass(frozen=True)
class Report:
    """Fixed-order report sections plus optional figure references."""

    sections: tuple[tuple[str, str], ...]
    figure_refs: tuple[str, ...] = field(default=())

    def section(self, title: str) -> str:
        for name, body in self.sections:
            if name == title:
                return body
        raise KeyError(title)

    def render(self) -> str:
        parts = []
        for title, body in self.sections:
            parts.append(f"## {title}")
            parts.append("")
            parts.append(body)
            parts.append("")
        return "\n".join(parts).rstrip() + "\n"


def _wrap_payload(payload: str, worker: str) -> str:
    if worker in ("small_molecule", "polymer", "reaction"):
        return f"${payload}$"
    return payload


def generate_report(
    state: AgentState,
    client: ModelClient | None = None,
    failed_check: str | None = None,
) -> Report:
    """Assemble the final report from run state.

    ``failed_check`` names the check that exhausted its bound, if any;
    the CONCLUSION states it explicitly. Without a usable client the
    sections degrade to deterministic template text.
    """
    worker = state.worker or "small_molecule"
    tool = TOOL_NAMES[worker]
    relevant = state.relevant_hits()

    summary_line = None
    if client is not None:
        try:
            summary_line = client.summarize(state)
        except ClientTimeout:
            summary_line = None

    intro_lines = [
        summary_line
        or f"This report was produced by the {worker} retrieval worker.",
        f"{QUERY_ECHO_PREFIX} '{state.original_question}'",
    ]

    steps = (
        f"I utilized the {tool} tool to retrieve candidate documents from the "
        f"vector store. {state.counters['retrievals']} retrieval round(s) ran; "
        f"{len(relevant)} document(s) were graded relevant."
    )

    findings_lines: list[str] = []
    if state.generation:
        findings_lines.append(state.generation)
    if relevant:
        findings_lines.append("")
        findings_lines.append("The identified entries are:")
        findings_lines.extend(
            f"- {_wrap_payload(hit.payload, worker)}" for hit in relevant
        )
    if not findings_lines:
        findings_lines.append("No relevant vector store entries were identified.")

    if failed_check is None:
        conclusion = (
            "All checks passed. The retrieved vector store context supports "
            "the findings above."
        )
    else:
        conclusion = (
            f"The {failed_check} check could not be satisfied within the "
            "configured bounds; the findings above are the best available."
        )

    sources = f"- {tool} tool for retrieval from the vector store."

    context_lines: list[str] = []
    figure_refs: list[str] = []
    if relevant:
        context_lines.append("Compound(s):")
        if worker == "nmr":
            for hit in relevant:
                for collection, record in state.linked.get(hit.id, []):
                    if collection.endswith("compounds") or collection == "compounds":
                        context_lines.append(f"- {record.payload}")
        else:
            context_lines.extend(
                f"- {_wrap_payload(hit.payload, worker)}" for hit in relevant
            )
        if worker == "nmr":
            top = relevant[0]
            caption = None
            for collection, record in state.linked.get(top.id, []):
                if collection.endswith("captions") or collection == "captions":
                    caption = record.payload
                    break
            context_lines.append("")
            context_lines.append(
                "The NMR Spectra of the most relevant compound is shown below "
                f"({top.payload}):"
            )
            figure_refs.append(top.payload)
            if caption is not None:
                context_lines.append("")
                context_lines.append(f"Figure Caption: {caption}")
    else:
        context_lines.append("(no vector store context was used)")

    sections = (
        ("INTRODUCTION", "\n".join(intro_lines)),
        ("RESEARCH STEPS", steps),
        ("MAIN FINDINGS", "\n".join(findings_lines)),
        ("CONCLUSION", conclusion),
        ("SOURCES", sources),
        ("Summary of Vector Store Context", "\n".join(context_lines)),
    )
    return Report(sections=sections, figure_refs=tuple(figure_refs))
