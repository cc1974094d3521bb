"""Configuration plus the façade shared by the HTTP API and the CLI.

Both surfaces call the same ``Service`` methods, which return canonical JSON
bytes, so a CLI report and the matching endpoint body are byte-identical for
identical state.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

from .agreement import agreement_report, round_trend
from .annotations import AnnotationEngine, Round
from .errors import ParseError
from .incidents import IncidentQuery, IncidentStore
from .jsonio import to_json_bytes
from .reports import build_sankey, export, round_summary
from .store import Database
from .taxonomy import Taxonomy, serialize_taxonomy

ENV_PREFIX = "HARMTAX_"


@dataclass(frozen=True)
class Config:
    data_path: str = "harmtax.db"
    taxonomy_path: str | None = None  # None -> bundled seed
    token_secret: str = "harmtax-dev-secret"
    host: str = "127.0.0.1"
    port: int = 8080
    static_dir: str | None = None


_ENV_KEYS = {
    "data_path": "DATA",
    "taxonomy_path": "TAXONOMY",
    "token_secret": "TOKEN_SECRET",
    "host": "HOST",
    "port": "PORT",
    "static_dir": "STATIC",
}


def load_config(config_file: str | None = None, **flags) -> Config:
    """Precedence: explicit flags > environment > config file > defaults."""
    config = Config()
    if config_file:
        try:
            raw = json.loads(Path(config_file).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read config file '{config_file}': {exc}") from exc
        known = {k: raw[k] for k in _ENV_KEYS if k in raw}
        config = replace(config, **known)
    env_values = {}
    for attr, suffix in _ENV_KEYS.items():
        value = os.environ.get(ENV_PREFIX + suffix)
        if value is not None:
            env_values[attr] = int(value) if attr == "port" else value
    config = replace(config, **env_values)
    set_flags = {k: v for k, v in flags.items() if v is not None}
    return replace(config, **set_flags)


def seed_document() -> bytes:
    return resources.files("harmtax.data").joinpath("seed_taxonomy.json").read_bytes()


def taxonomy_dict(t: Taxonomy) -> dict:
    return json.loads(serialize_taxonomy(t).decode("utf-8"))


class Service:
    """One database, configured taxonomy registered, report helpers."""

    def __init__(self, config: Config):
        self.config = config
        self.db = Database(config.data_path)
        self.incidents = IncidentStore(self.db)
        self.engine = AnnotationEngine(self.db)
        if config.taxonomy_path:
            document = Path(config.taxonomy_path).read_bytes()
        else:
            document = seed_document()
        self.engine.register_taxonomy(document)

    def close(self) -> None:
        self.db.close()

    # -- report surfaces (canonical bytes, shared by API and CLI) ---------

    def taxonomy_export(self, version: str | None = None) -> bytes:
        t = self.engine.taxonomy(version) if version else self.engine.latest_taxonomy()
        return to_json_bytes(taxonomy_dict(t))

    def taxonomy_diff_export(self, old: str, new: str) -> bytes:
        from .taxonomy import diff_taxonomies

        diff = diff_taxonomies(self.engine.taxonomy(old), self.engine.taxonomy(new))
        return to_json_bytes(diff.as_dict())

    def agreement_export(
        self,
        round_id: str,
        mode: str = "set",
        status_handling: str = "ignore",
        ci: bool = False,
        resamples: int = 1000,
        confidence: float = 0.95,
        seed: int = 0,
    ) -> bytes:
        rnd = self.engine.get_round(round_id)
        annotations = self.engine.annotations_for_round(round_id)
        report = agreement_report(
            annotations,
            mode=mode,
            status_handling=status_handling,
            taxonomy=self.engine.taxonomy(rnd.taxonomy_version),
            ci=ci,
            resamples=resamples,
            confidence=confidence,
            seed=seed,
        )
        return export(report, "json")

    def summary(self, round_id: str):
        rnd = self.engine.get_round(round_id)
        return round_summary(rnd, self.engine.annotations_for_round(round_id))

    def summary_export(self, round_id: str, fmt: str = "json") -> bytes:
        return export(self.summary(round_id), fmt)

    def sankey_export(self, round_id: str, incident_id: str) -> bytes:
        rnd = self.engine.get_round(round_id)
        annotations = self.engine.annotations_for(incident_id, round_id)
        graph = build_sankey(
            annotations,
            self.engine.taxonomy(rnd.taxonomy_version),
            incident_id,
            round_id,
        )
        return export(graph, "json")

    def trend_export(self, round_ids: list[str] | None = None) -> bytes:
        if round_ids:
            rounds = [self.engine.get_round(rid) for rid in round_ids]
        else:
            rounds = [r for r in self.engine.list_rounds() if not r.is_open]
        data = [(rnd, self.engine.annotations_for_round(rnd.round_id)) for rnd in rounds]
        return to_json_bytes(round_trend(data).as_dict())

    # -- non-report helpers -------------------------------------------------

    def incident_page_dict(self, q: IncidentQuery) -> dict:
        page = self.incidents.query(q)
        return {
            "items": [i.as_dict() for i in page.items],
            "total": page.total,
            "offset": page.offset,
            "limit": page.limit,
        }

    def round_dict(self, rnd: Round) -> dict:
        return rnd.as_dict()
