"""Single-file embedded persistence (SQLite, WAL journal).

Schema
------
taxonomies(version PK, document, registered_at)
incidents(id PK, title, description, occurred, sector, country, links, imported_at)
annotators(id PK, name, token_hash, token_expires)
rounds(id PK, label, taxonomy_version FK, opened_at, closed_at)
round_incidents(round_id FK, incident_id FK, position, PK(round_id, incident_id))
annotations(round_id, incident_id, annotator_id, selections, comment,
            submitted_at, taxonomy_version, PK(round_id, incident_id, annotator_id))

``links`` and ``selections`` hold canonical JSON arrays. Reads may run
concurrently; writes are serialized by a process-level lock (single-writer
contract) and committed before any caller observes success.
"""

from __future__ import annotations

import sqlite3
import threading
from contextlib import contextmanager
from pathlib import Path

_SCHEMA = """
CREATE TABLE IF NOT EXISTS taxonomies (
    version TEXT PRIMARY KEY,
    document TEXT NOT NULL,
    registered_at TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS incidents (
    id TEXT PRIMARY KEY,
    title TEXT NOT NULL,
    description TEXT NOT NULL DEFAULT '',
    occurred TEXT,
    sector TEXT,
    country TEXT,
    links TEXT NOT NULL DEFAULT '[]',
    imported_at TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS annotators (
    id TEXT PRIMARY KEY,
    name TEXT NOT NULL,
    token_hash TEXT NOT NULL,
    token_expires TEXT
);
CREATE TABLE IF NOT EXISTS rounds (
    id TEXT PRIMARY KEY,
    label TEXT NOT NULL,
    taxonomy_version TEXT NOT NULL REFERENCES taxonomies(version),
    opened_at TEXT NOT NULL,
    closed_at TEXT
);
CREATE TABLE IF NOT EXISTS round_incidents (
    round_id TEXT NOT NULL REFERENCES rounds(id),
    incident_id TEXT NOT NULL REFERENCES incidents(id),
    position INTEGER NOT NULL,
    PRIMARY KEY (round_id, incident_id)
);
CREATE TABLE IF NOT EXISTS annotations (
    round_id TEXT NOT NULL REFERENCES rounds(id),
    incident_id TEXT NOT NULL REFERENCES incidents(id),
    annotator_id TEXT NOT NULL REFERENCES annotators(id),
    selections TEXT NOT NULL,
    comment TEXT,
    submitted_at TEXT NOT NULL,
    taxonomy_version TEXT NOT NULL,
    PRIMARY KEY (round_id, incident_id, annotator_id)
);
"""


class Database:
    """Thread-safe wrapper around one SQLite file (or ':memory:')."""

    def __init__(self, path: str | Path = ":memory:"):
        self.path = str(path)
        if self.path != ":memory:":
            Path(self.path).parent.mkdir(parents=True, exist_ok=True)
        self._conn = sqlite3.connect(self.path, check_same_thread=False)
        self._conn.row_factory = sqlite3.Row
        self._lock = threading.Lock()
        with self._lock:
            if self.path != ":memory:":
                self._conn.execute("PRAGMA journal_mode=WAL")
            self._conn.execute("PRAGMA synchronous=FULL")
            self._conn.execute("PRAGMA foreign_keys=ON")
            self._conn.executescript(_SCHEMA)
            self._conn.commit()

    @contextmanager
    def write(self):
        """Serialized write transaction; committed (durable) on exit."""
        with self._lock:
            try:
                yield self._conn
                self._conn.commit()
            except BaseException:
                self._conn.rollback()
                raise

    def query(self, sql: str, params=()) -> list[sqlite3.Row]:
        with self._lock:
            return self._conn.execute(sql, params).fetchall()

    def one(self, sql: str, params=()) -> sqlite3.Row | None:
        rows = self.query(sql, params)
        return rows[0] if rows else None

    def close(self) -> None:
        with self._lock:
            self._conn.close()
