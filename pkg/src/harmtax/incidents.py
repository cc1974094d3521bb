"""Incident ingestion and querying.

Accepts CSV (header row required) or a JSON array of objects. Required
columns: ``id``, ``title``, ``description``; optional: ``occurred`` (ISO
date), ``sector``, ``country``, ``links`` (semicolon-separated URLs in CSV, a
list in JSON). Rows are upserted by ``id``; re-ingesting an identical file is
a no-op (unchanged rows count as neither added nor updated).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from urllib.parse import urlparse

from .errors import IngestError, NotFoundError, ParseError
from .store import Database

REQUIRED_COLUMNS = ("id", "title", "description")
OPTIONAL_COLUMNS = ("occurred", "sector", "country", "links")


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass(frozen=True)
class Incident:
    id: str
    title: str
    description: str
    occurred: str | None
    sector: str | None
    country: str | None
    source_links: tuple[str, ...]
    imported_at: str

    def as_dict(self) -> dict:
        return {
            "id": self.id,
            "title": self.title,
            "description": self.description,
            "occurred": self.occurred,
            "sector": self.sector,
            "country": self.country,
            "source_links": list(self.source_links),
            "imported_at": self.imported_at,
        }


@dataclass(frozen=True)
class IncidentQuery:
    text: str | None = None
    sector: str | None = None
    date_from: str | None = None
    date_to: str | None = None
    offset: int = 0
    limit: int = 50


@dataclass
class IncidentPage:
    items: list[Incident]
    total: int
    offset: int
    limit: int


@dataclass
class RejectedRow:
    row: int
    reason: str
    id: str | None = None

    def as_dict(self) -> dict:
        return {"row": self.row, "reason": self.reason, "id": self.id}


@dataclass
class IngestReport:
    added: int = 0
    updated: int = 0
    unchanged: int = 0
    rejected: list[RejectedRow] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "added": self.added,
            "updated": self.updated,
            "unchanged": self.unchanged,
            "rejected": [r.as_dict() for r in self.rejected],
        }


def _valid_url(url: str) -> bool:
    parsed = urlparse(url)
    return parsed.scheme in ("http", "https") and bool(parsed.netloc)


def _normalize_record(raw: dict, row: int) -> tuple[dict | None, RejectedRow | None]:
    """Validate one raw record into stored shape, or explain the rejection."""
    rid = (raw.get("id") or "").strip()
    if not rid:
        return None, RejectedRow(row, "MISSING_ID")
    title = (raw.get("title") or "").strip()
    if not title:
        return None, RejectedRow(row, "EMPTY_TITLE", rid)
    occurred = (raw.get("occurred") or "").strip() or None
    if occurred:
        try:
            date.fromisoformat(occurred)
        except ValueError:
            return None, RejectedRow(row, "INVALID_DATE", rid)

    links_raw = raw.get("links") or raw.get("source_links") or []
    if isinstance(links_raw, str):
        links = [part.strip() for part in links_raw.split(";") if part.strip()]
    else:
        links = [str(part).strip() for part in links_raw if str(part).strip()]
    for url in links:
        if not _valid_url(url):
            return None, RejectedRow(row, "INVALID_URL", rid)

    record = {
        "id": rid,
        "title": title,
        "description": (raw.get("description") or "").strip(),
        "occurred": occurred,
        "sector": (raw.get("sector") or "").strip() or None,
        "country": (raw.get("country") or "").strip() or None,
        "links": json.dumps(links, ensure_ascii=False),
    }
    return record, None


def _parse_csv(data: bytes) -> list[dict]:
    try:
        text = data.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise ParseError(f"CSV is not valid UTF-8: {exc}") from exc
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise IngestError("CSV has no header row")
    missing = [c for c in REQUIRED_COLUMNS if c not in reader.fieldnames]
    if missing:
        raise IngestError("missing required columns: " + ", ".join(missing))
    return [dict(row) for row in reader]


def _parse_json(data: bytes) -> list[dict]:
    try:
        parsed = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ParseError(f"malformed JSON incident document: {exc}") from exc
    if not isinstance(parsed, list):
        raise IngestError("JSON incident document must be an array of objects")
    for entry in parsed:
        if not isinstance(entry, dict):
            raise IngestError("JSON incident document must be an array of objects")
    return parsed


class IncidentStore:
    def __init__(self, db: Database):
        self.db = db

    def ingest(self, data: bytes, fmt: str = "csv") -> IngestReport:
        if fmt == "csv":
            raw_rows = _parse_csv(data)
        elif fmt == "json":
            raw_rows = _parse_json(data)
        else:
            raise IngestError(f"unknown ingest format '{fmt}'")

        report = IngestReport()
        with self.db.write() as conn:
            for row_no, raw in enumerate(raw_rows, start=1):
                record, rejection = _normalize_record(raw, row_no)
                if rejection is not None:
                    report.rejected.append(rejection)
                    continue
                existing = conn.execute(
                    "SELECT title, description, occurred, sector, country, links"
                    " FROM incidents WHERE id = ?",
                    (record["id"],),
                ).fetchone()
                if existing is None:
                    conn.execute(
                        "INSERT INTO incidents"
                        " (id, title, description, occurred, sector, country, links, imported_at)"
                        " VALUES (?, ?, ?, ?, ?, ?, ?, ?)",
                        (
                            record["id"],
                            record["title"],
                            record["description"],
                            record["occurred"],
                            record["sector"],
                            record["country"],
                            record["links"],
                            utc_now(),
                        ),
                    )
                    report.added += 1
                elif tuple(existing) == (
                    record["title"],
                    record["description"],
                    record["occurred"],
                    record["sector"],
                    record["country"],
                    record["links"],
                ):
                    report.unchanged += 1
                else:
                    conn.execute(
                        "UPDATE incidents SET title=?, description=?, occurred=?,"
                        " sector=?, country=?, links=? WHERE id=?",
                        (
                            record["title"],
                            record["description"],
                            record["occurred"],
                            record["sector"],
                            record["country"],
                            record["links"],
                            record["id"],
                        ),
                    )
                    report.updated += 1
        return report

    def _from_row(self, row) -> Incident:
        return Incident(
            id=row["id"],
            title=row["title"],
            description=row["description"],
            occurred=row["occurred"],
            sector=row["sector"],
            country=row["country"],
            source_links=tuple(json.loads(row["links"])),
            imported_at=row["imported_at"],
        )

    def get(self, incident_id: str) -> Incident:
        row = self.db.one("SELECT * FROM incidents WHERE id = ?", (incident_id,))
        if row is None:
            raise NotFoundError(f"unknown incident '{incident_id}'", path=incident_id)
        return self._from_row(row)

    def exists(self, incident_id: str) -> bool:
        return self.db.one("SELECT 1 FROM incidents WHERE id = ?", (incident_id,)) is not None

    def all_ids(self) -> list[str]:
        return [r["id"] for r in self.db.query("SELECT id FROM incidents ORDER BY imported_at, id")]

    def query(self, q: IncidentQuery) -> IncidentPage:
        if q.limit <= 0:
            raise IngestError("query limit must be positive")
        clauses, params = [], []
        if q.text:
            clauses.append("(lower(title) LIKE ? OR lower(description) LIKE ?)")
            needle = f"%{q.text.lower()}%"
            params += [needle, needle]
        if q.sector:
            clauses.append("lower(sector) = ?")
            params.append(q.sector.lower())
        if q.date_from:
            clauses.append("occurred >= ?")
            params.append(q.date_from)
        if q.date_to:
            clauses.append("occurred <= ?")
            params.append(q.date_to)
        where = (" WHERE " + " AND ".join(clauses)) if clauses else ""
        total = self.db.one(f"SELECT COUNT(*) AS n FROM incidents{where}", params)["n"]
        rows = self.db.query(
            f"SELECT * FROM incidents{where} ORDER BY imported_at, id LIMIT ? OFFSET ?",
            params + [q.limit, q.offset],
        )
        return IncidentPage(
            items=[self._from_row(r) for r in rows],
            total=total,
            offset=q.offset,
            limit=q.limit,
        )
