"""Annotation rounds and validated multi-label annotations.

A round pins a taxonomy version and a fixed incident list. Each annotator
submits at most one annotation per (incident, round); resubmission replaces
the stored content atomically. Selections always name a specific harm (the
harm type is implied by parentage) plus an actual/potential status; an empty
selection set is legal and means "no harm identified".
"""

from __future__ import annotations

import hashlib
import hmac
import json
import secrets
from dataclasses import dataclass
from datetime import datetime, timezone

from .errors import (
    AuthError,
    ConflictError,
    ConflictingStatusError,
    EmptyRoundError,
    InvalidStatusError,
    NotFoundError,
    RoundClosedError,
    UnknownSelectionError,
)
from .incidents import utc_now
from .store import Database
from .taxonomy import STATUSES, Taxonomy, load_taxonomy, slugify


@dataclass(frozen=True, order=True)
class HarmSelection:
    harm_type_id: str
    specific_harm_id: str
    status: str

    def as_dict(self) -> dict:
        return {
            "harm_type_id": self.harm_type_id,
            "specific_harm_id": self.specific_harm_id,
            "status": self.status,
        }


@dataclass(frozen=True)
class Annotation:
    incident_id: str
    annotator_id: str
    round_id: str
    selections: tuple[HarmSelection, ...]
    comment: str | None
    submitted_at: str
    taxonomy_version: str

    def as_dict(self) -> dict:
        return {
            "incident_id": self.incident_id,
            "annotator_id": self.annotator_id,
            "round_id": self.round_id,
            "selections": [s.as_dict() for s in self.selections],
            "comment": self.comment,
            "submitted_at": self.submitted_at,
            "taxonomy_version": self.taxonomy_version,
        }


@dataclass(frozen=True)
class Round:
    round_id: str
    label: str
    taxonomy_version: str
    incident_ids: tuple[str, ...]
    opened_at: str
    closed_at: str | None

    @property
    def is_open(self) -> bool:
        return self.closed_at is None

    def as_dict(self) -> dict:
        return {
            "round_id": self.round_id,
            "label": self.label,
            "taxonomy_version": self.taxonomy_version,
            "incident_ids": list(self.incident_ids),
            "opened_at": self.opened_at,
            "closed_at": self.closed_at,
        }


@dataclass(frozen=True)
class Annotator:
    annotator_id: str
    name: str


def hash_token(token: str, secret: str) -> str:
    return hmac.new(secret.encode("utf-8"), token.encode("utf-8"), hashlib.sha256).hexdigest()


def normalize_selections(raw: list[dict | HarmSelection]) -> tuple[HarmSelection, ...]:
    """Deduplicate and sort; conflicting statuses for one harm are an error."""
    selections: set[HarmSelection] = set()
    for item in raw:
        if isinstance(item, HarmSelection):
            sel = item
        else:
            sel = HarmSelection(
                harm_type_id=str(item.get("harm_type_id", "")),
                specific_harm_id=str(item.get("specific_harm_id", "")),
                status=str(item.get("status", "")),
            )
        if sel.status not in STATUSES:
            raise InvalidStatusError(
                f"status must be one of {STATUSES}, got '{sel.status}'"
            )
        selections.add(sel)
    by_harm: dict[tuple[str, str], str] = {}
    for sel in selections:
        key = (sel.harm_type_id, sel.specific_harm_id)
        if key in by_harm and by_harm[key] != sel.status:
            raise ConflictingStatusError(
                f"harm '{sel.harm_type_id}/{sel.specific_harm_id}' submitted as both"
                " actual and potential; pick one status per identified harm",
                path=f"{sel.harm_type_id}/{sel.specific_harm_id}",
            )
        by_harm[key] = sel.status
    return tuple(sorted(selections))


class AnnotationEngine:
    def __init__(self, db: Database):
        self.db = db

    # -- taxonomy version registry ------------------------------------

    def register_taxonomy(self, document: bytes) -> Taxonomy:
        """Store a taxonomy document under its own version; idempotent."""
        t = load_taxonomy(document)
        existing = self.db.one(
            "SELECT document FROM taxonomies WHERE version = ?", (t.version,)
        )
        text = document.decode("utf-8") if isinstance(document, bytes) else document
        if existing is not None:
            if load_taxonomy(existing["document"].encode("utf-8")) != t:
                raise ConflictError(
                    f"taxonomy version '{t.version}' already registered with different content"
                )
            return t
        with self.db.write() as conn:
            conn.execute(
                "INSERT INTO taxonomies (version, document, registered_at) VALUES (?, ?, ?)",
                (t.version, text, utc_now()),
            )
        return t

    def taxonomy(self, version: str) -> Taxonomy:
        row = self.db.one("SELECT document FROM taxonomies WHERE version = ?", (version,))
        if row is None:
            raise NotFoundError(f"unknown taxonomy version '{version}'", path=version)
        return load_taxonomy(row["document"].encode("utf-8"))

    def taxonomy_versions(self) -> list[str]:
        rows = self.db.query("SELECT version FROM taxonomies")
        return sorted((r["version"] for r in rows), key=lambda v: tuple(int(p) for p in v.split(".")))

    def latest_taxonomy(self) -> Taxonomy:
        versions = self.taxonomy_versions()
        if not versions:
            raise NotFoundError("no taxonomy registered")
        return self.taxonomy(versions[-1])

    # -- annotators -----------------------------------------------------

    def register_annotator(
        self, annotator_id: str, name: str, secret: str, expires: str | None = None
    ) -> str:
        """Create (or re-key) an annotator; returns the bearer token once."""
        token = secrets.token_urlsafe(24)
        with self.db.write() as conn:
            conn.execute(
                "INSERT INTO annotators (id, name, token_hash, token_expires) VALUES (?, ?, ?, ?)"
                " ON CONFLICT(id) DO UPDATE SET name=excluded.name,"
                " token_hash=excluded.token_hash, token_expires=excluded.token_expires",
                (annotator_id, name, hash_token(token, secret), expires),
            )
        return token

    def annotator_exists(self, annotator_id: str) -> bool:
        return self.db.one("SELECT 1 FROM annotators WHERE id = ?", (annotator_id,)) is not None

    def annotators(self) -> list[Annotator]:
        rows = self.db.query("SELECT id, name FROM annotators ORDER BY id")
        return [Annotator(r["id"], r["name"]) for r in rows]

    def authenticate(self, token: str, secret: str) -> str:
        """Resolve a bearer token to an annotator id; expired tokens rejected."""
        row = self.db.one(
            "SELECT id, token_expires FROM annotators WHERE token_hash = ?",
            (hash_token(token, secret),),
        )
        if row is None:
            raise AuthError("invalid token")
        if row["token_expires"] is not None:
            expiry = datetime.fromisoformat(row["token_expires"])
            if expiry.tzinfo is None:
                expiry = expiry.replace(tzinfo=timezone.utc)
            if expiry <= datetime.now(timezone.utc):
                raise AuthError("expired token")
        return row["id"]

    # -- rounds -----------------------------------------------------------

    def open_round(
        self, label: str, taxonomy_version: str, incident_ids: list[str]
    ) -> Round:
        if not incident_ids:
            raise EmptyRoundError("cannot open a round with no incidents")
        self.taxonomy(taxonomy_version)  # raises on unknown version
        round_id = slugify(label)
        if not round_id:
            raise EmptyRoundError("round label must contain slug characters")
        if self.db.one("SELECT 1 FROM rounds WHERE id = ?", (round_id,)) is not None:
            raise ConflictError(f"round '{round_id}' already exists", path=round_id)
        seen: set[str] = set()
        ordered: list[str] = []
        for incident_id in incident_ids:
            if incident_id in seen:
                continue
            if self.db.one("SELECT 1 FROM incidents WHERE id = ?", (incident_id,)) is None:
                raise NotFoundError(f"unknown incident '{incident_id}'", path=incident_id)
            seen.add(incident_id)
            ordered.append(incident_id)
        opened_at = utc_now()
        with self.db.write() as conn:
            conn.execute(
                "INSERT INTO rounds (id, label, taxonomy_version, opened_at, closed_at)"
                " VALUES (?, ?, ?, ?, NULL)",
                (round_id, label, taxonomy_version, opened_at),
            )
            conn.executemany(
                "INSERT INTO round_incidents (round_id, incident_id, position) VALUES (?, ?, ?)",
                [(round_id, iid, pos) for pos, iid in enumerate(ordered)],
            )
        return self.get_round(round_id)

    def get_round(self, round_id: str) -> Round:
        row = self.db.one("SELECT * FROM rounds WHERE id = ?", (round_id,))
        if row is None:
            raise NotFoundError(f"unknown round '{round_id}'", path=round_id)
        incidents = self.db.query(
            "SELECT incident_id FROM round_incidents WHERE round_id = ? ORDER BY position",
            (round_id,),
        )
        return Round(
            round_id=row["id"],
            label=row["label"],
            taxonomy_version=row["taxonomy_version"],
            incident_ids=tuple(r["incident_id"] for r in incidents),
            opened_at=row["opened_at"],
            closed_at=row["closed_at"],
        )

    def list_rounds(self) -> list[Round]:
        rows = self.db.query("SELECT id FROM rounds ORDER BY opened_at, id")
        return [self.get_round(r["id"]) for r in rows]

    def close_round(self, round_id: str) -> Round:
        rnd = self.get_round(round_id)
        if not rnd.is_open:
            raise RoundClosedError(f"round '{round_id}' is already closed", path=round_id)
        with self.db.write() as conn:
            conn.execute("UPDATE rounds SET closed_at = ? WHERE id = ?", (utc_now(), round_id))
        return self.get_round(round_id)

    # -- annotations ------------------------------------------------------

    def submit(
        self,
        incident_id: str,
        annotator_id: str,
        round_id: str,
        selections: list[dict | HarmSelection],
        comment: str | None = None,
    ) -> Annotation:
        rnd = self.get_round(round_id)
        if not rnd.is_open:
            raise RoundClosedError(f"round '{round_id}' is closed", path=round_id)
        if not self.annotator_exists(annotator_id):
            raise NotFoundError(f"unknown annotator '{annotator_id}'", path=annotator_id)
        if incident_id not in rnd.incident_ids:
            raise NotFoundError(
                f"incident '{incident_id}' is not part of round '{round_id}'",
                path=incident_id,
            )
        taxonomy = self.taxonomy(rnd.taxonomy_version)
        normalized = normalize_selections(selections)
        for sel in normalized:
            if not taxonomy.resolves(sel.harm_type_id, sel.specific_harm_id):
                raise UnknownSelectionError(
                    f"'{sel.harm_type_id}/{sel.specific_harm_id}' does not resolve in"
                    f" taxonomy {rnd.taxonomy_version}",
                    path=f"{sel.harm_type_id}/{sel.specific_harm_id}",
                )
        annotation = Annotation(
            incident_id=incident_id,
            annotator_id=annotator_id,
            round_id=round_id,
            selections=normalized,
            comment=comment,
            submitted_at=utc_now(),
            taxonomy_version=rnd.taxonomy_version,
        )
        with self.db.write() as conn:
            conn.execute(
                "INSERT OR REPLACE INTO annotations"
                " (round_id, incident_id, annotator_id, selections, comment,"
                "  submitted_at, taxonomy_version)"
                " VALUES (?, ?, ?, ?, ?, ?, ?)",
                (
                    round_id,
                    incident_id,
                    annotator_id,
                    json.dumps([s.as_dict() for s in annotation.selections]),
                    comment,
                    annotation.submitted_at,
                    annotation.taxonomy_version,
                ),
            )
        return annotation

    def _from_row(self, row) -> Annotation:
        selections = tuple(
            HarmSelection(s["harm_type_id"], s["specific_harm_id"], s["status"])
            for s in json.loads(row["selections"])
        )
        return Annotation(
            incident_id=row["incident_id"],
            annotator_id=row["annotator_id"],
            round_id=row["round_id"],
            selections=selections,
            comment=row["comment"],
            submitted_at=row["submitted_at"],
            taxonomy_version=row["taxonomy_version"],
        )

    def annotations_for(self, incident_id: str, round_id: str) -> list[Annotation]:
        self.get_round(round_id)  # raises on unknown round
        rows = self.db.query(
            "SELECT * FROM annotations WHERE round_id = ? AND incident_id = ?"
            " ORDER BY annotator_id",
            (round_id, incident_id),
        )
        return [self._from_row(r) for r in rows]

    def annotations_for_round(self, round_id: str) -> list[Annotation]:
        self.get_round(round_id)
        rows = self.db.query(
            "SELECT * FROM annotations WHERE round_id = ?"
            " ORDER BY incident_id, annotator_id",
            (round_id,),
        )
        return [self._from_row(r) for r in rows]

    def export_annotations(self) -> bytes:
        """JSON lines, one annotation per line, ordered (round, incident, annotator)."""
        rows = self.db.query(
            "SELECT * FROM annotations ORDER BY round_id, incident_id, annotator_id"
        )
        lines = [
            json.dumps(self._from_row(r).as_dict(), ensure_ascii=False, separators=(",", ":"))
            for r in rows
        ]
        return ("\n".join(lines) + ("\n" if lines else "")).encode("utf-8")
