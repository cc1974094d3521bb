"""Inter-annotator agreement statistics.

Krippendorff's alpha (``alpha = 1 - D_o / D_e``) over a pluggable distance,
computed via a coincidence matrix:

* every unit with ``m >= 2`` values contributes weight ``1/(m - 1)`` to
  ``o[c][k]`` for each ordered pair of values from distinct annotators;
* ``D_o = (1/n) * sum o[c][k] * delta(c, k)``;
* ``D_e = (1/(n(n-1))) * sum n_c * n_k * delta(c, k)`` over the pooled
  marginals.

Two reliability modes are supported for multi-label annotations: ``set``
(one unit per incident, values are label sets, MASI distance by default) and
``binary`` (one unit per incident x label over the full taxonomy, 0/1 values,
nominal distance). Units with a single value are unpairable: excluded from
the statistic but counted in the report.

Pair weights are accumulated as integer counts keyed by unit size before any
float division, so results are bitwise identical under annotator, unit, and
label permutations.

All functions here are pure; storage lookups happen at the service layer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .annotations import Annotation, Round
from .errors import (
    ConflictError,
    DegenerateDataError,
    EmptyInputError,
    NoPairableUnitsError,
    RoundOpenError,
)
from .taxonomy import Taxonomy

Distance = Callable[[object, object], float]

MODES = ("set", "binary")
STATUS_HANDLING = ("ignore", "distinguish")


# ---------------------------------------------------------------------------
# distances


def nominal_distance(a, b) -> float:
    return 0.0 if a == b else 1.0


def masi_distance(a: Iterable, b: Iterable) -> float:
    """1 - J(a,b) * M(a,b): Jaccard scaled by the set-relation monotonicity factor.

    M is 1 for equal sets, 2/3 for a strict subset relation, 1/3 for proper
    overlap, 0 for disjoint sets. J is 1 when both sets are empty.
    """
    sa, sb = frozenset(a), frozenset(b)
    union = sa | sb
    jaccard = len(sa & sb) / len(union) if union else 1.0
    if sa == sb:
        monotonicity = 1.0
    elif sa < sb or sb < sa:
        monotonicity = 2.0 / 3.0
    elif sa & sb:
        monotonicity = 1.0 / 3.0
    else:
        monotonicity = 0.0
    return 1.0 - jaccard * monotonicity


DISTANCES: dict[str, Distance] = {
    "nominal": nominal_distance,
    "masi": masi_distance,
}


def distance_name(distance: Distance) -> str:
    for name, fn in DISTANCES.items():
        if fn is distance:
            return name
    return getattr(distance, "__name__", "custom")


# ---------------------------------------------------------------------------
# reliability data


@dataclass
class ReliabilityData:
    """Units-by-annotator value table feeding the agreement statistic."""

    mode: str
    units: list
    values: dict  # unit id -> {annotator_id: value}

    def pairable_units(self) -> list:
        return [u for u in self.units if len(self.values[u]) >= 2]

    def unpairable_count(self) -> int:
        return sum(1 for u in self.units if len(self.values[u]) < 2)

    def value_lists(self) -> list[list]:
        """Per-pairable-unit value lists, annotator order normalized."""
        out = []
        for unit in self.pairable_units():
            by_annotator = self.values[unit]
            out.append([by_annotator[a] for a in sorted(by_annotator)])
        return out


def selection_label(selection, status_handling: str = "ignore") -> tuple:
    if status_handling == "distinguish":
        return (selection.harm_type_id, selection.specific_harm_id, selection.status)
    return (selection.harm_type_id, selection.specific_harm_id)


def build_reliability(
    annotations: Sequence[Annotation],
    mode: str = "set",
    status_handling: str = "ignore",
    taxonomy: Taxonomy | None = None,
) -> ReliabilityData:
    """Shape one round's annotations into units-by-annotator values.

    ``set`` mode: one unit per incident, value = frozenset of selection
    labels. ``binary`` mode: one unit per (incident, label) over the full
    label space of ``taxonomy`` (required), value 0/1.
    """
    if not annotations:
        raise EmptyInputError("no annotations to compare")
    if mode not in MODES:
        raise ConflictError(f"unknown reliability mode '{mode}'")
    if status_handling not in STATUS_HANDLING:
        raise ConflictError(f"unknown status handling '{status_handling}'")
    if len({a.round_id for a in annotations}) > 1:
        raise ConflictError("annotations span multiple rounds")

    labels_by = {
        (a.incident_id, a.annotator_id): frozenset(
            selection_label(s, status_handling) for s in a.selections
        )
        for a in annotations
    }
    incidents = sorted({a.incident_id for a in annotations})
    annotators_of: dict[str, list[str]] = {i: [] for i in incidents}
    for a in annotations:
        annotators_of[a.incident_id].append(a.annotator_id)

    if mode == "set":
        values = {
            incident: {
                annotator: labels_by[(incident, annotator)]
                for annotator in annotators_of[incident]
            }
            for incident in incidents
        }
        return ReliabilityData(mode="set", units=list(incidents), values=values)

    if taxonomy is None:
        raise ConflictError("binary mode needs the round's taxonomy for its label space")
    space: list[tuple] = []
    for ht_id, sh_id in taxonomy.paths():
        if status_handling == "distinguish":
            space.append((ht_id, sh_id, "actual"))
            space.append((ht_id, sh_id, "potential"))
        else:
            space.append((ht_id, sh_id))
    units = [(incident, label) for incident in incidents for label in space]
    values = {
        (incident, label): {
            annotator: int(label in labels_by[(incident, annotator)])
            for annotator in annotators_of[incident]
        }
        for incident in incidents
        for label in space
    }
    return ReliabilityData(mode="binary", units=units, values=values)


# ---------------------------------------------------------------------------
# coincidence machinery


def _value_key(v):
    if isinstance(v, frozenset):
        return (1, len(v), tuple(sorted(v)))
    return (0, str(type(v)), v)


@dataclass
class CoincidenceAccumulator:
    """Pairwise value-coincidence weights and pooled marginals."""

    values: list
    o: list[list[float]]
    marginals: list[int]
    n: int


def build_coincidence(value_lists: Sequence[Sequence]) -> CoincidenceAccumulator:
    """Accumulate ordered within-unit pairs, weight 1/(m-1) per pair."""
    distinct = sorted({v for vs in value_lists for v in vs}, key=_value_key)
    index = {v: i for i, v in enumerate(distinct)}
    size = len(distinct)

    pair_counts: dict[tuple[int, int, int], int] = {}
    marginals = [0] * size
    n = 0
    for vs in value_lists:
        m = len(vs)
        idx = [index[v] for v in vs]
        n += m
        for i in idx:
            marginals[i] += 1
        for a in range(m):
            for b in range(m):
                if a != b:
                    key = (idx[a], idx[b], m)
                    pair_counts[key] = pair_counts.get(key, 0) + 1

    o = [[0.0] * size for _ in range(size)]
    for i, j, m in sorted(pair_counts):
        o[i][j] += pair_counts[(i, j, m)] / (m - 1)
    return CoincidenceAccumulator(values=distinct, o=o, marginals=marginals, n=n)


@dataclass
class AgreementReport:
    alpha: float
    d_o: float
    d_e: float
    n: int
    excluded_units: int
    mode: str
    distance: str
    degenerate: bool = False
    ci: tuple[float, float, float, int] | None = None

    def as_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "d_o": self.d_o,
            "d_e": self.d_e,
            "n": self.n,
            "mode": self.mode,
            "distance": self.distance,
            "excluded_units": self.excluded_units,
            "degenerate": self.degenerate,
            "ci": None
            if self.ci is None
            else {
                "low": self.ci[0],
                "high": self.ci[1],
                "confidence": self.ci[2],
                "resamples": self.ci[3],
            },
        }


def _alpha_from_value_lists(
    value_lists: Sequence[Sequence], distance: Distance
) -> tuple[float, float, float, int, bool]:
    acc = build_coincidence(value_lists)
    size = len(acc.values)
    delta = [[0.0] * size for _ in range(size)]
    for i in range(size):
        for j in range(i + 1, size):
            d = float(distance(acc.values[i], acc.values[j]))
            delta[i][j] = delta[j][i] = d

    # fsum is exactly rounded, so the result does not depend on the label
    # ordering the iteration happens to visit
    d_o_sum = math.fsum(
        acc.o[i][j] * delta[i][j] for i in range(size) for j in range(size)
    )
    d_e_sum = math.fsum(
        acc.marginals[i] * acc.marginals[j] * delta[i][j]
        for i in range(size)
        for j in range(size)
    )
    d_o = d_o_sum / acc.n
    d_e = d_e_sum / (acc.n * (acc.n - 1))
    if d_e == 0.0:
        return 1.0, d_o, d_e, acc.n, True
    return 1.0 - d_o / d_e, d_o, d_e, acc.n, False


def krippendorff_alpha(
    data: ReliabilityData, distance: Distance | None = None
) -> AgreementReport:
    """Alpha over pairable units; D_e = 0 reports alpha 1.0 with a degenerate flag."""
    if distance is None:
        distance = masi_distance if data.mode == "set" else nominal_distance
    value_lists = data.value_lists()
    if not value_lists:
        raise NoPairableUnitsError(
            "no unit has two or more annotators; nothing to compare"
        )
    alpha, d_o, d_e, n, degenerate = _alpha_from_value_lists(value_lists, distance)
    return AgreementReport(
        alpha=alpha,
        d_o=d_o,
        d_e=d_e,
        n=n,
        excluded_units=data.unpairable_count(),
        mode=data.mode,
        distance=distance_name(distance),
        degenerate=degenerate,
    )


# ---------------------------------------------------------------------------
# derived reports


def per_category_agreement(
    annotations: Sequence[Annotation],
) -> dict[str, AgreementReport]:
    """Binary-mode nominal alpha per specific harm selected anywhere in the round.

    Scores localize contentious definitions: a harm consistently applied by
    everyone scores 1, a harm applied by only some annotators scores low or
    negative. Harms nobody selected are omitted.
    """
    if not annotations:
        raise EmptyInputError("no annotations to compare")
    if len({a.annotator_id for a in annotations}) < 2:
        raise NoPairableUnitsError("per-category agreement needs at least 2 annotators")

    selected: set[tuple[str, str]] = set()
    for a in annotations:
        selected.update((s.harm_type_id, s.specific_harm_id) for s in a.selections)

    incidents = sorted({a.incident_id for a in annotations})
    labels_by = {
        (a.incident_id, a.annotator_id): {
            (s.harm_type_id, s.specific_harm_id) for s in a.selections
        }
        for a in annotations
    }
    annotators_of: dict[str, list[str]] = {i: [] for i in incidents}
    for a in annotations:
        annotators_of[a.incident_id].append(a.annotator_id)

    reports: dict[str, AgreementReport] = {}
    for label in sorted(selected):
        values = {
            incident: {
                annotator: int(label in labels_by[(incident, annotator)])
                for annotator in annotators_of[incident]
            }
            for incident in incidents
        }
        data = ReliabilityData(mode="binary", units=list(incidents), values=values)
        try:
            reports[f"{label[0]}/{label[1]}"] = krippendorff_alpha(data, nominal_distance)
        except NoPairableUnitsError:
            continue
    return reports


def per_incident_alpha(
    annotations: Sequence[Annotation], status_handling: str = "ignore"
) -> AgreementReport | None:
    """Set-mode alpha over one incident's annotations; None if unpairable.

    With a single unit the observed and expected disagreement coincide, so
    the score acts as a consensus indicator: 1.0 (degenerate) on unanimous
    annotations and 0.0 otherwise.
    """
    if not annotations:
        return None
    data = build_reliability(annotations, mode="set", status_handling=status_handling)
    try:
        return krippendorff_alpha(data, masi_distance)
    except NoPairableUnitsError:
        return None


@dataclass
class TrendPoint:
    round_label: str
    mean_alpha: float | None
    incident_count: int

    def as_dict(self) -> dict:
        return {
            "round": self.round_label,
            "mean_alpha": self.mean_alpha,
            "incident_count": self.incident_count,
        }


@dataclass
class TrendSeries:
    points: list[TrendPoint] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"points": [p.as_dict() for p in self.points]}


def round_trend(
    rounds: Sequence[tuple[Round, Sequence[Annotation]]],
    status_handling: str = "ignore",
) -> TrendSeries:
    """Mean per-incident set-mode alpha per closed round, in round order.

    Incidents with fewer than two annotations are excluded from the mean but
    reflected in the per-round incident count (which counts included
    incidents only).
    """
    ordered = sorted(rounds, key=lambda pair: (pair[0].opened_at, pair[0].round_id))
    series = TrendSeries()
    for rnd, annotations in ordered:
        if rnd.closed_at is None:
            raise RoundOpenError(
                f"round '{rnd.round_id}' is still open; close it before trending",
                path=rnd.round_id,
            )
        by_incident: dict[str, list[Annotation]] = {}
        for a in annotations:
            by_incident.setdefault(a.incident_id, []).append(a)
        alphas = []
        for incident in sorted(by_incident):
            report = per_incident_alpha(by_incident[incident], status_handling)
            if report is not None:
                alphas.append(report.alpha)
        series.points.append(
            TrendPoint(
                round_label=rnd.label,
                mean_alpha=(math.fsum(alphas) / len(alphas)) if alphas else None,
                incident_count=len(alphas),
            )
        )
    return series


# ---------------------------------------------------------------------------
# bootstrap


def bootstrap_ci(
    data: ReliabilityData,
    distance: Distance | None = None,
    resamples: int = 1000,
    confidence: float = 0.95,
    seed: int = 0,
) -> tuple[float, float]:
    """Percentile interval of alpha under unit resampling; deterministic per seed."""
    if resamples < 100:
        raise ConflictError("bootstrap needs at least 100 resamples")
    if not 0.0 < confidence < 1.0:
        raise ConflictError("confidence must be in (0, 1)")
    if distance is None:
        distance = masi_distance if data.mode == "set" else nominal_distance
    value_lists = data.value_lists()
    if not value_lists:
        raise NoPairableUnitsError("no pairable units to resample")
    _, _, d_e, _, degenerate = _alpha_from_value_lists(value_lists, distance)
    if degenerate:
        raise DegenerateDataError(
            "expected disagreement is zero; bootstrap interval undefined"
        )

    rng = np.random.default_rng(seed)
    count = len(value_lists)
    alphas = np.empty(resamples)
    for r in range(resamples):
        picks = rng.integers(0, count, size=count)
        resample = [value_lists[i] for i in picks]
        alphas[r] = _alpha_from_value_lists(resample, distance)[0]
    tail = (1.0 - confidence) / 2.0
    low, high = np.quantile(alphas, [tail, 1.0 - tail])
    return float(low), float(high)


def agreement_report(
    annotations: Sequence[Annotation],
    mode: str = "set",
    status_handling: str = "ignore",
    taxonomy: Taxonomy | None = None,
    ci: bool = False,
    resamples: int = 1000,
    confidence: float = 0.95,
    seed: int = 0,
) -> AgreementReport:
    """One-call report: build reliability data, compute alpha, optional CI."""
    data = build_reliability(annotations, mode, status_handling, taxonomy)
    distance = masi_distance if mode == "set" else nominal_distance
    report = krippendorff_alpha(data, distance)
    if ci and not report.degenerate:
        low, high = bootstrap_ci(data, distance, resamples, confidence, seed)
        report.ci = (low, high, confidence, resamples)
    return report
