"""Two-level harms taxonomy: loading, validation, versioning, lookup, diff.

A taxonomy is an immutable value: nine (in the bundled seed) harm types, each
owning an ordered list of specific harms with prose definitions. Identifiers
are lowercase kebab-case slugs frozen at authoring time; specific-harm
identity is the pair ``(harm_type_id, specific_harm_id)``, so the same display
name may legally appear under different harm types.
"""

from __future__ import annotations

import difflib
import json
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Iterator, Mapping

from .errors import ParseError, TaxonomyInvalid, UnknownIdError

SEMVER_RE = re.compile(r"^\d+\.\d+\.\d+$")

STATUSES = ("actual", "potential")


@dataclass(frozen=True)
class SpecificHarm:
    id: str
    name: str
    definition: str
    parent: str

    @property
    def path(self) -> str:
        return f"{self.parent}/{self.id}"


@dataclass(frozen=True)
class HarmType:
    id: str
    name: str
    definition: str
    specific_harms: tuple[SpecificHarm, ...] = ()

    def specific_harm(self, sh_id: str) -> SpecificHarm | None:
        for sh in self.specific_harms:
            if sh.id == sh_id:
                return sh
        return None


@dataclass(frozen=True)
class Taxonomy:
    version: str
    title: str
    harm_types: tuple[HarmType, ...]
    created_at: str

    def harm_type(self, ht_id: str) -> HarmType | None:
        for ht in self.harm_types:
            if ht.id == ht_id:
                return ht
        return None

    def harm_type_ids(self) -> list[str]:
        return [ht.id for ht in self.harm_types]

    def specific_harm_count(self) -> int:
        return sum(len(ht.specific_harms) for ht in self.harm_types)

    def paths(self) -> Iterator[tuple[str, str]]:
        """All (harm_type_id, specific_harm_id) pairs in taxonomy order."""
        for ht in self.harm_types:
            for sh in ht.specific_harms:
                yield ht.id, sh.id

    def resolves(self, ht_id: str, sh_id: str) -> bool:
        ht = self.harm_type(ht_id)
        return ht is not None and ht.specific_harm(sh_id) is not None


@dataclass(frozen=True)
class Violation:
    code: str
    path: str
    message: str

    def as_dict(self) -> dict:
        return {"code": self.code, "path": self.path, "message": self.message}


@dataclass(frozen=True)
class DefinitionRecord:
    path: str
    name: str
    definition: str

    def as_dict(self) -> dict:
        return {"path": self.path, "name": self.name, "definition": self.definition}


@dataclass
class TaxonomyDiff:
    added: list[tuple[str, str]] = field(default_factory=list)
    removed: list[tuple[str, str]] = field(default_factory=list)
    redefined: list[tuple[str, str, str]] = field(default_factory=list)
    renamed: list[tuple[str, str, str]] = field(default_factory=list)

    def is_empty(self) -> bool:
        return not (self.added or self.removed or self.redefined or self.renamed)

    def as_dict(self) -> dict:
        return {
            "added": [{"level": lv, "path": p} for lv, p in self.added],
            "removed": [{"level": lv, "path": p} for lv, p in self.removed],
            "redefined": [
                {"path": p, "old_definition": o, "new_definition": n}
                for p, o, n in self.redefined
            ],
            "renamed": [
                {"path": p, "old_name": o, "new_name": n} for p, o, n in self.renamed
            ],
        }


@dataclass
class CoverageMatrix:
    row_labels: list[str]
    column_labels: list[str]
    cells: list[list[bool]]

    def covered(self, harm_type_name: str, external: str) -> bool:
        return self.cells[self.row_labels.index(harm_type_name)][
            self.column_labels.index(external)
        ]

    def as_dict(self) -> dict:
        return {
            "rows": self.row_labels,
            "columns": self.column_labels,
            "cells": self.cells,
        }


def _as_text(document: bytes | str) -> str:
    if isinstance(document, bytes):
        try:
            return document.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"taxonomy document is not valid UTF-8: {exc}") from exc
    return document


def parse_taxonomy(document: bytes | str) -> Taxonomy:
    """Parse a taxonomy JSON document without validating invariants."""
    try:
        raw = json.loads(_as_text(document))
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed taxonomy document: {exc}") from exc
    if not isinstance(raw, dict):
        raise ParseError("taxonomy document must be a JSON object")

    def text_field(obj: Mapping, key: str, where: str) -> str:
        value = obj.get(key, "")
        if not isinstance(value, str):
            raise ParseError(f"field '{key}' of {where} must be a string")
        return value

    harm_types = []
    raw_types = raw.get("harm_types", [])
    if not isinstance(raw_types, list):
        raise ParseError("'harm_types' must be a list")
    for rt in raw_types:
        if not isinstance(rt, dict):
            raise ParseError("harm type entries must be JSON objects")
        ht_id = text_field(rt, "id", "harm type")
        raw_harms = rt.get("specific_harms", [])
        if not isinstance(raw_harms, list):
            raise ParseError(f"'specific_harms' of {ht_id} must be a list")
        harms = []
        for rs in raw_harms:
            if not isinstance(rs, dict):
                raise ParseError("specific harm entries must be JSON objects")
            harms.append(
                SpecificHarm(
                    id=text_field(rs, "id", "specific harm"),
                    name=text_field(rs, "name", "specific harm"),
                    definition=text_field(rs, "definition", "specific harm"),
                    parent=ht_id,
                )
            )
        harm_types.append(
            HarmType(
                id=ht_id,
                name=text_field(rt, "name", "harm type"),
                definition=text_field(rt, "definition", "harm type"),
                specific_harms=tuple(harms),
            )
        )
    return Taxonomy(
        version=text_field(raw, "version", "taxonomy"),
        title=text_field(raw, "title", "taxonomy"),
        harm_types=tuple(harm_types),
        created_at=text_field(raw, "created_at", "taxonomy"),
    )


def validate_taxonomy(t: Taxonomy) -> list[Violation]:
    """Return every invariant violation; empty list iff the taxonomy is valid."""
    violations: list[Violation] = []

    if not SEMVER_RE.match(t.version):
        violations.append(
            Violation("BAD_VERSION", "", f"version '{t.version}' is not MAJOR.MINOR.PATCH")
        )
    if not t.harm_types:
        violations.append(Violation("EMPTY_TAXONOMY", "", "empty taxonomy: no harm types"))

    seen_types: set[str] = set()
    for ht in t.harm_types:
        if not ht.id:
            violations.append(Violation("EMPTY_ID", ht.name, "harm type with empty id"))
        elif ht.id in seen_types:
            violations.append(
                Violation("DUPLICATE_ID", ht.id, f"duplicate harm type id '{ht.id}'")
            )
        seen_types.add(ht.id)
        if not ht.name:
            violations.append(Violation("EMPTY_NAME", ht.id, "harm type with empty name"))
        if not ht.definition:
            violations.append(
                Violation("EMPTY_DEFINITION", ht.id, f"harm type '{ht.id}' has no definition")
            )
        seen_harms: set[str] = set()
        for sh in ht.specific_harms:
            path = f"{ht.id}/{sh.id}"
            if not sh.id:
                violations.append(
                    Violation("EMPTY_ID", ht.id, "specific harm with empty id")
                )
            elif sh.id in seen_harms:
                violations.append(
                    Violation("DUPLICATE_ID", path, f"duplicate specific harm '{path}'")
                )
            seen_harms.add(sh.id)
            if not sh.name:
                violations.append(
                    Violation("EMPTY_NAME", path, f"specific harm '{path}' has no name")
                )
            if not sh.definition:
                violations.append(
                    Violation(
                        "EMPTY_DEFINITION", path, f"specific harm '{path}' has no definition"
                    )
                )
            if sh.parent != ht.id:
                violations.append(
                    Violation(
                        "ORPHAN_SPECIFIC_HARM",
                        path,
                        f"specific harm '{sh.id}' claims parent '{sh.parent}'",
                    )
                )
    return violations


def load_taxonomy(document: bytes | str) -> Taxonomy:
    """Parse and validate; raises TaxonomyInvalid listing every violation."""
    t = parse_taxonomy(document)
    violations = validate_taxonomy(t)
    if violations:
        raise TaxonomyInvalid(violations)
    return t


def serialize_taxonomy(t: Taxonomy) -> bytes:
    """Stable UTF-8 JSON encoding; key and entry order are deterministic."""
    doc = {
        "version": t.version,
        "title": t.title,
        "created_at": t.created_at,
        "harm_types": [
            {
                "id": ht.id,
                "name": ht.name,
                "definition": ht.definition,
                "specific_harms": [
                    {"id": sh.id, "name": sh.name, "definition": sh.definition}
                    for sh in ht.specific_harms
                ],
            }
            for ht in t.harm_types
        ],
    }
    return (json.dumps(doc, ensure_ascii=False, indent=2) + "\n").encode("utf-8")


def seed_taxonomy() -> Taxonomy:
    """The bundled seed taxonomy (version 1.0.0)."""
    data = resources.files("harmtax.data").joinpath("seed_taxonomy.json").read_bytes()
    return load_taxonomy(data)


def seed_coverage_mapping() -> dict[str, list[str]]:
    """Bundled external-coverage mapping for the comparison matrix."""
    data = resources.files("harmtax.data").joinpath("coverage_reference.json").read_bytes()
    return json.loads(data.decode("utf-8"))


def lookup(
    t: Taxonomy, harm_type_id: str, specific_harm_id: str | None = None
) -> DefinitionRecord:
    """Resolve ids to a definition record; unknown ids raise with suggestions."""
    ht = t.harm_type(harm_type_id)
    if ht is None:
        suggestions = difflib.get_close_matches(harm_type_id, t.harm_type_ids(), n=3)
        raise UnknownIdError(
            f"unknown harm type '{harm_type_id}'",
            path=harm_type_id,
            suggestions=suggestions,
        )
    if specific_harm_id is None:
        return DefinitionRecord(path=ht.id, name=ht.name, definition=ht.definition)
    sh = ht.specific_harm(specific_harm_id)
    if sh is None:
        candidates = [s.id for s in ht.specific_harms]
        suggestions = difflib.get_close_matches(specific_harm_id, candidates, n=3)
        if not suggestions:
            # the id may exist under a different harm type
            suggestions = [
                f"{h}/{s}" for h, s in t.paths() if s == specific_harm_id
            ][:3]
        raise UnknownIdError(
            f"unknown specific harm '{specific_harm_id}' under '{harm_type_id}'",
            path=f"{harm_type_id}/{specific_harm_id}",
            suggestions=suggestions,
        )
    return DefinitionRecord(path=sh.path, name=sh.name, definition=sh.definition)


def diff_taxonomies(old: Taxonomy, new: Taxonomy) -> TaxonomyDiff:
    """Structural delta keyed by frozen slugs.

    Added or removed harm types list their specific harms individually, so
    ``diff(a, b).added == diff(b, a).removed`` holds entry for entry.
    """
    diff = TaxonomyDiff()
    old_types = {ht.id: ht for ht in old.harm_types}
    new_types = {ht.id: ht for ht in new.harm_types}

    for ht in new.harm_types:
        if ht.id not in old_types:
            diff.added.append(("harm_type", ht.id))
            diff.added.extend(("specific_harm", sh.path) for sh in ht.specific_harms)
    for ht in old.harm_types:
        if ht.id not in new_types:
            diff.removed.append(("harm_type", ht.id))
            diff.removed.extend(("specific_harm", sh.path) for sh in ht.specific_harms)

    for ht_id, old_ht in old_types.items():
        new_ht = new_types.get(ht_id)
        if new_ht is None:
            continue
        if old_ht.name != new_ht.name:
            diff.renamed.append((ht_id, old_ht.name, new_ht.name))
        if old_ht.definition != new_ht.definition:
            diff.redefined.append((ht_id, old_ht.definition, new_ht.definition))
        old_harms = {sh.id: sh for sh in old_ht.specific_harms}
        new_harms = {sh.id: sh for sh in new_ht.specific_harms}
        for sh in new_ht.specific_harms:
            if sh.id not in old_harms:
                diff.added.append(("specific_harm", sh.path))
        for sh in old_ht.specific_harms:
            if sh.id not in new_harms:
                diff.removed.append(("specific_harm", sh.path))
        for sh_id, old_sh in old_harms.items():
            new_sh = new_harms.get(sh_id)
            if new_sh is None:
                continue
            if old_sh.name != new_sh.name:
                diff.renamed.append((old_sh.path, old_sh.name, new_sh.name))
            if old_sh.definition != new_sh.definition:
                diff.redefined.append((old_sh.path, old_sh.definition, new_sh.definition))
    return diff


def coverage_matrix(
    t: Taxonomy, mapping: Mapping[str, Iterable[str]] | bytes | str
) -> CoverageMatrix:
    """Boolean harm-type coverage of external taxonomies.

    ``mapping`` is external-taxonomy-name -> list of harm_type ids, either as
    a dict or as JSON bytes. Ids not present in ``t`` are an error.
    """
    if isinstance(mapping, (bytes, str)):
        try:
            mapping = json.loads(_as_text(mapping))
        except json.JSONDecodeError as exc:
            raise ParseError(f"malformed coverage mapping: {exc}") from exc
    if not isinstance(mapping, Mapping):
        raise ParseError("coverage mapping must be a JSON object")

    known = set(t.harm_type_ids())
    columns = list(mapping.keys())
    covered: dict[str, set[str]] = {}
    for external, ids in mapping.items():
        idset = set(ids)
        unknown = idset - known
        if unknown:
            raise UnknownIdError(
                f"coverage mapping for '{external}' references unknown harm types: "
                + ", ".join(sorted(unknown)),
                suggestions=sorted(known),
            )
        covered[external] = idset

    cells = [
        [ht.id in covered[external] for external in columns] for ht in t.harm_types
    ]
    return CoverageMatrix(
        row_labels=[ht.name for ht in t.harm_types],
        column_labels=columns,
        cells=cells,
    )


def slugify(name: str) -> str:
    """Kebab-case slug used when authoring new taxonomy entries."""
    s = name.lower()
    s = re.sub(r"[/\s]+", "-", s)
    s = re.sub(r"[^a-z0-9-]", "", s)
    return re.sub(r"-{2,}", "-", s).strip("-")
