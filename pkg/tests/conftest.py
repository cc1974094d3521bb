from __future__ import annotations

import random
from pathlib import Path

import pytest

from harmtax.annotations import Annotation, AnnotationEngine, HarmSelection
from harmtax.incidents import IncidentStore
from harmtax.service import seed_document
from harmtax.store import Database
from harmtax.taxonomy import seed_taxonomy

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def seed():
    return seed_taxonomy()


@pytest.fixture(scope="session")
def fixture_csv() -> bytes:
    return (FIXTURES / "incidents_39.csv").read_bytes()


@pytest.fixture
def db():
    database = Database(":memory:")
    yield database
    database.close()


@pytest.fixture
def store(db):
    return IncidentStore(db)


@pytest.fixture
def engine(db):
    eng = AnnotationEngine(db)
    eng.register_taxonomy(seed_document())
    return eng


@pytest.fixture
def populated(engine, store, fixture_csv):
    """Engine with 39 incidents, 5 annotators, and one open round."""
    store.ingest(fixture_csv, "csv")
    for i in range(1, 6):
        engine.register_annotator(f"a{i}", f"Annotator {i}", "test-secret")
    rnd = engine.open_round("round-1", "1.0.0", store.all_ids())
    return engine, store, rnd


def make_annotation(incident, annotator, selections, round_id="round-1", version="1.0.0"):
    """Pure Annotation value for statistics tests (no storage involved)."""
    sels = tuple(
        sorted(
            HarmSelection(ht, sh, status)
            for ht, sh, status in selections
        )
    )
    return Annotation(
        incident_id=incident,
        annotator_id=annotator,
        round_id=round_id,
        selections=sels,
        comment=None,
        submitted_at="2026-01-01T00:00:00+00:00",
        taxonomy_version=version,
    )


def random_round_annotations(rng: random.Random, taxonomy, incident_ids, annotator_ids,
                             round_id="round-1", max_selections=5):
    """Random legal annotations: one status per selected harm per annotator."""
    paths = list(taxonomy.paths())
    annotations = []
    for incident in incident_ids:
        for annotator in annotator_ids:
            count = rng.randint(0, max_selections)
            chosen = rng.sample(paths, count) if count else []
            selections = [
                (ht, sh, rng.choice(("actual", "potential"))) for ht, sh in chosen
            ]
            annotations.append(
                make_annotation(incident, annotator, selections, round_id=round_id)
            )
    return annotations
