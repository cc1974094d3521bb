"""Canonical JSON encoding shared by exports, the HTTP API, and the CLI.

One serializer everywhere keeps report bytes identical no matter which
surface produced them (the API/CLI parity contract).
"""

from __future__ import annotations

import json


def to_json_bytes(obj) -> bytes:
    """Compact UTF-8 JSON with a single trailing newline."""
    return (
        json.dumps(obj, ensure_ascii=False, separators=(",", ":"), allow_nan=False)
        + "\n"
    ).encode("utf-8")
