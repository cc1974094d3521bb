"""Per-incident Sankey graphs and round-level summary reports.

The Sankey layers are harm type -> specific harm -> status. Weights count
annotators (each annotator contributes at most 1 to any link); because one
annotation may give a harm only a single status, inflow equals outflow at
every middle-layer node.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Sequence

from .annotations import Annotation, Round
from .agreement import per_category_agreement, per_incident_alpha
from .errors import EmptyInputError, NoPairableUnitsError, UnsupportedFormatError
from .jsonio import to_json_bytes
from .taxonomy import STATUSES, Taxonomy

STATUS_LABELS = {"actual": "Actual", "potential": "Potential"}

TOP_DISPUTED_LIMIT = 5


@dataclass(frozen=True)
class SankeyNode:
    id: str
    layer: str
    label: str


@dataclass(frozen=True)
class SankeyLink:
    source: str
    target: str
    weight: int


@dataclass
class SankeyGraph:
    nodes: list[SankeyNode]
    links: list[SankeyLink]
    incident_id: str
    round_id: str
    annotators: int

    def as_dict(self) -> dict:
        return {
            "nodes": [{"id": n.id, "layer": n.layer, "label": n.label} for n in self.nodes],
            "links": [
                {"source": l.source, "target": l.target, "weight": l.weight}
                for l in self.links
            ],
            "meta": {
                "incident": self.incident_id,
                "round": self.round_id,
                "annotators": self.annotators,
            },
        }


def build_sankey(
    annotations: Sequence[Annotation],
    taxonomy: Taxonomy,
    incident_id: str,
    round_id: str,
) -> SankeyGraph:
    """Aggregate all annotators' selections for one incident into a flow graph.

    Annotators with empty selection sets contribute no nodes or links but are
    still counted in the metadata.
    """
    relevant = [a for a in annotations if a.incident_id == incident_id]
    if not relevant:
        raise EmptyInputError(
            f"no annotations for incident '{incident_id}' in round '{round_id}'"
        )

    harm_annotators: dict[tuple[str, str], set[str]] = {}
    status_annotators: dict[tuple[str, str, str], set[str]] = {}
    for a in relevant:
        for sel in a.selections:
            harm_key = (sel.harm_type_id, sel.specific_harm_id)
            harm_annotators.setdefault(harm_key, set()).add(a.annotator_id)
            status_key = (sel.harm_type_id, sel.specific_harm_id, sel.status)
            status_annotators.setdefault(status_key, set()).add(a.annotator_id)

    nodes: list[SankeyNode] = []
    links: list[SankeyLink] = []
    selected_types = {ht for ht, _ in harm_annotators}
    for ht in taxonomy.harm_types:
        if ht.id not in selected_types:
            continue
        nodes.append(SankeyNode(id=f"ht:{ht.id}", layer="harm_type", label=ht.name))
    for ht in taxonomy.harm_types:
        for sh in ht.specific_harms:
            key = (ht.id, sh.id)
            if key not in harm_annotators:
                continue
            nodes.append(
                SankeyNode(id=f"sh:{ht.id}/{sh.id}", layer="specific_harm", label=sh.name)
            )
            links.append(
                SankeyLink(
                    source=f"ht:{ht.id}",
                    target=f"sh:{ht.id}/{sh.id}",
                    weight=len(harm_annotators[key]),
                )
            )
    used_statuses = {status for _, _, status in status_annotators}
    for status in STATUSES:
        if status in used_statuses:
            nodes.append(
                SankeyNode(id=f"st:{status}", layer="status", label=STATUS_LABELS[status])
            )
    for ht in taxonomy.harm_types:
        for sh in ht.specific_harms:
            for status in STATUSES:
                key = (ht.id, sh.id, status)
                if key not in status_annotators:
                    continue
                links.append(
                    SankeyLink(
                        source=f"sh:{ht.id}/{sh.id}",
                        target=f"st:{status}",
                        weight=len(status_annotators[key]),
                    )
                )

    order = {node.id: i for i, node in enumerate(nodes)}
    links.sort(key=lambda link: (order[link.source], order[link.target]))
    return SankeyGraph(
        nodes=nodes,
        links=links,
        incident_id=incident_id,
        round_id=round_id,
        annotators=len(relevant),
    )


@dataclass
class IncidentSummaryRow:
    incident_id: str
    alpha: float | None
    degenerate: bool
    annotators: int

    def as_dict(self) -> dict:
        return {
            "incident_id": self.incident_id,
            "alpha": self.alpha,
            "degenerate": self.degenerate,
            "annotators": self.annotators,
        }


@dataclass
class RoundSummary:
    round_id: str
    label: str
    taxonomy_version: str
    incidents: list[IncidentSummaryRow] = field(default_factory=list)
    top_disputed: list[str] = field(default_factory=list)
    total_annotations: int = 0
    total_selections: int = 0

    def as_dict(self) -> dict:
        return {
            "round_id": self.round_id,
            "label": self.label,
            "taxonomy_version": self.taxonomy_version,
            "incidents": [row.as_dict() for row in self.incidents],
            "top_disputed": self.top_disputed,
            "totals": {
                "annotations": self.total_annotations,
                "selections": self.total_selections,
            },
        }


def round_summary(rnd: Round, annotations: Sequence[Annotation]) -> RoundSummary:
    """Per-incident consensus scores plus the most contested specific harms.

    "Top disputed" lists the specific harms with the lowest per-category
    alpha (< 1), ties broken lexicographically by path, at most
    TOP_DISPUTED_LIMIT entries.
    """
    by_incident: dict[str, list[Annotation]] = {iid: [] for iid in rnd.incident_ids}
    for a in annotations:
        by_incident.setdefault(a.incident_id, []).append(a)

    summary = RoundSummary(
        round_id=rnd.round_id,
        label=rnd.label,
        taxonomy_version=rnd.taxonomy_version,
        total_annotations=len(annotations),
        total_selections=sum(len(a.selections) for a in annotations),
    )
    for incident_id in rnd.incident_ids:
        report = per_incident_alpha(by_incident[incident_id])
        summary.incidents.append(
            IncidentSummaryRow(
                incident_id=incident_id,
                alpha=None if report is None else report.alpha,
                degenerate=bool(report and report.degenerate),
                annotators=len(by_incident[incident_id]),
            )
        )

    try:
        per_category = per_category_agreement(annotations)
    except (EmptyInputError, NoPairableUnitsError):
        per_category = {}
    disputed = sorted(
        ((report.alpha, path) for path, report in per_category.items() if report.alpha < 1.0),
    )
    summary.top_disputed = [path for _, path in disputed[:TOP_DISPUTED_LIMIT]]
    return summary


def export(obj, fmt: str = "json") -> bytes:
    """Deterministic bytes for a report or graph; CSV only for round summaries."""
    if fmt == "json":
        return to_json_bytes(obj.as_dict())
    if fmt == "csv":
        if not isinstance(obj, RoundSummary):
            raise UnsupportedFormatError(
                f"csv export is only defined for round summaries, not {type(obj).__name__}"
            )
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["incident_id", "alpha", "degenerate", "annotators"])
        for row in obj.incidents:
            writer.writerow(
                [
                    row.incident_id,
                    "" if row.alpha is None else repr(row.alpha),
                    str(row.degenerate).lower(),
                    row.annotators,
                ]
            )
        return buf.getvalue().encode("utf-8")
    raise UnsupportedFormatError(f"unknown export format '{fmt}'")
