"""AnalysisDocument: the canonical wire/file form of one file's analysis.

The document is a pure function of (path, text, config): the generation stamp
is content-addressed, so any two producers emit byte-identical documents for
identical inputs.
"""

from __future__ import annotations

import hashlib
import json

from .candidates import AnalysisResult, Config

SCHEMA_VERSION = "1"


def generation_stamp(text: str, cfg: Config) -> str:
    cfg_json = json.dumps(cfg.to_dict(), sort_keys=True)
    digest = hashlib.sha256((text + "\x00" + cfg_json).encode("utf-8")).hexdigest()
    return f"content:{digest[:16]}"


def build_document(file: str, text: str, result: AnalysisResult, cfg: Config) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "file": file,
        "generated_at": generation_stamp(text, cfg),
        "candidates": [c.to_dict() for c in result.candidates],
        "line_overlay": {str(line): entry.to_dict() for line, entry in sorted(result.line_overlay.items())},
        "metrics": [r.to_dict() for r in result.method_reports],
        "eligible_methods": list(result.eligible_methods),
        "diagnostics": {
            "errors": [[line, message] for line, message in result.diagnostics.errors],
            "recovered": result.diagnostics.recovered,
        },
    }


def document_bytes(doc: dict) -> bytes:
    """Canonical serialization; both the CLI and the service emit exactly this."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")
