from __future__ import annotations

import csv
import io
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from harmtax.errors import IngestError, NotFoundError, ParseError
from harmtax.incidents import IncidentQuery, IncidentStore
from harmtax.store import Database


def csv_bytes(rows, header=("id", "title", "description", "occurred", "sector", "country", "links")):
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue().encode("utf-8")


class TestIngest:
    def test_fixture_adds_39(self, store, fixture_csv):
        report = store.ingest(fixture_csv, "csv")
        assert report.added == 39
        assert report.updated == 0
        assert report.rejected == []

    def test_reingest_is_idempotent(self, store, fixture_csv):
        store.ingest(fixture_csv, "csv")
        second = store.ingest(fixture_csv, "csv")
        assert second.added == 0
        assert second.updated == 0
        assert second.unchanged == 39

    def test_changed_row_counts_as_update(self, store, fixture_csv):
        store.ingest(fixture_csv, "csv")
        changed = csv_bytes([["inc-001", "New title", "New description", "", "", "", ""]])
        report = store.ingest(changed, "csv")
        assert report.updated == 1
        assert store.get("inc-001").title == "New title"

    def test_missing_title_rejected(self, store):
        data = csv_bytes([["x1", "", "some description", "", "", "", ""]])
        report = store.ingest(data, "csv")
        assert report.added == 0
        assert report.rejected[0].reason == "EMPTY_TITLE"
        assert report.rejected[0].row == 1

    def test_missing_id_rejected(self, store):
        data = csv_bytes([["", "t", "d", "", "", "", ""]])
        assert store.ingest(data, "csv").rejected[0].reason == "MISSING_ID"

    def test_bad_date_rejected(self, store):
        data = csv_bytes([["x1", "t", "d", "not-a-date", "", "", ""]])
        assert store.ingest(data, "csv").rejected[0].reason == "INVALID_DATE"

    def test_bad_url_rejected(self, store):
        data = csv_bytes([["x1", "t", "d", "", "", "", "ftp://example.org/x"]])
        assert store.ingest(data, "csv").rejected[0].reason == "INVALID_URL"

    def test_missing_required_columns(self, store):
        data = csv_bytes([["x1", "t"]], header=("id", "title"))
        with pytest.raises(IngestError, match="description"):
            store.ingest(data, "csv")

    def test_json_array(self, store):
        payload = json.dumps(
            [
                {
                    "id": "j1",
                    "title": "JSON incident",
                    "description": "d",
                    "links": ["https://example.org/a"],
                },
                {"id": "j2", "title": "Another", "description": ""},
            ]
        ).encode()
        report = store.ingest(payload, "json")
        assert report.added == 2
        assert store.get("j1").source_links == ("https://example.org/a",)

    def test_json_must_be_array(self, store):
        with pytest.raises(IngestError):
            store.ingest(b'{"id": "x"}', "json")

    def test_unreadable_document(self, store):
        with pytest.raises(ParseError):
            store.ingest(b"\xff\xfe\x00bad", "json")

    def test_unknown_format(self, store):
        with pytest.raises(IngestError):
            store.ingest(b"", "xml")

    def test_upsert_by_id_holds_across_sequences(self, store, fixture_csv):
        store.ingest(fixture_csv, "csv")
        store.ingest(fixture_csv, "csv")
        extra = csv_bytes([["inc-001", "Changed", "desc", "", "", "", ""]])
        store.ingest(extra, "csv")
        page = store.query(IncidentQuery(limit=1000))
        ids = [i.id for i in page.items]
        assert len(ids) == len(set(ids)) == 39


class TestQuery:
    def test_get_known(self, store, fixture_csv):
        store.ingest(fixture_csv, "csv")
        incident = store.get("inc-003")
        assert "robocall" in incident.title

    def test_get_unknown(self, store):
        with pytest.raises(NotFoundError):
            store.get("nope")

    def test_pagination_counts(self, store, fixture_csv):
        store.ingest(fixture_csv, "csv")
        page = store.query(IncidentQuery(limit=10))
        assert len(page.items) == 10
        assert page.total == 39

    def test_text_filter_case_insensitive(self, store, fixture_csv):
        store.ingest(fixture_csv, "csv")
        page = store.query(IncidentQuery(text="DEEPFAKE", limit=100))
        assert page.total > 0
        for incident in page.items:
            haystack = (incident.title + " " + incident.description).lower()
            assert "deepfake" in haystack

    def test_sector_and_date_filters(self, store, fixture_csv):
        store.ingest(fixture_csv, "csv")
        page = store.query(IncidentQuery(sector="education", limit=100))
        assert page.total >= 1
        assert all(i.sector == "education" for i in page.items)
        ranged = store.query(
            IncidentQuery(date_from="2024-01-01", date_to="2024-12-31", limit=100)
        )
        assert all(
            i.occurred is not None and i.occurred.startswith("2024") for i in ranged.items
        )

    def test_limit_must_be_positive(self, store):
        with pytest.raises(IngestError):
            store.query(IncidentQuery(limit=0))

    @settings(max_examples=20, deadline=None)
    @given(limit=st.integers(min_value=1, max_value=45))
    def test_pages_partition_result_set(self, fixture_csv, limit):
        db = Database(":memory:")
        try:
            store = IncidentStore(db)
            store.ingest(fixture_csv, "csv")
            seen: list[str] = []
            offset = 0
            while True:
                page = store.query(IncidentQuery(offset=offset, limit=limit))
                seen.extend(i.id for i in page.items)
                if len(page.items) < limit:
                    break
                offset += limit
            assert len(seen) == len(set(seen)) == 39
        finally:
            db.close()
