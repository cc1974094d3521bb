"""Harms-taxonomy annotation platform.

Machine-readable two-level harms taxonomy (versioned, validated, diffable),
incident ingestion, multi-annotator annotation rounds, Krippendorff's alpha
agreement scoring with MASI or nominal distances, and per-incident Sankey
disagreement reports, exposed over HTTP and an operator CLI.
"""

from .agreement import (
    AgreementReport,
    ReliabilityData,
    bootstrap_ci,
    build_reliability,
    krippendorff_alpha,
    masi_distance,
    nominal_distance,
    per_category_agreement,
    round_trend,
)
from .annotations import Annotation, AnnotationEngine, HarmSelection, Round
from .incidents import Incident, IncidentQuery, IncidentStore
from .reports import SankeyGraph, build_sankey, export, round_summary
from .taxonomy import (
    Taxonomy,
    TaxonomyDiff,
    coverage_matrix,
    diff_taxonomies,
    load_taxonomy,
    lookup,
    seed_taxonomy,
    serialize_taxonomy,
    validate_taxonomy,
)

__version__ = "0.1.0"

__all__ = [
    "AgreementReport",
    "Annotation",
    "AnnotationEngine",
    "HarmSelection",
    "Incident",
    "IncidentQuery",
    "IncidentStore",
    "ReliabilityData",
    "Round",
    "SankeyGraph",
    "Taxonomy",
    "TaxonomyDiff",
    "bootstrap_ci",
    "build_reliability",
    "build_sankey",
    "coverage_matrix",
    "diff_taxonomies",
    "export",
    "krippendorff_alpha",
    "load_taxonomy",
    "lookup",
    "masi_distance",
    "nominal_distance",
    "per_category_agreement",
    "round_summary",
    "round_trend",
    "seed_taxonomy",
    "serialize_taxonomy",
    "validate_taxonomy",
]
