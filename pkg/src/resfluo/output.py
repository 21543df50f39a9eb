"""Deterministic CSV and JSON serialization.

Floats are rendered with ``repr`` (shortest round-trip form), keys are
sorted, newlines are always ``\\n``; identical payloads therefore serialize
to identical bytes on every platform and run.
"""

from __future__ import annotations

import json
from pathlib import Path


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def csv_text(header: list[str], rows, provenance: dict | None = None) -> str:
    """Comment-block provenance, a header line, then data rows."""
    lines = []
    if provenance:
        for key in sorted(provenance):
            lines.append(f"# {key} = {format_cell(provenance[key])}")
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(format_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        return obj.item()
    return obj


def json_text(payload: dict) -> str:
    return json.dumps(_clean(payload), sort_keys=True, indent=2) + "\n"


def emit(text: str, out: Path | str | None) -> None:
    if out is None:
        print(text, end="")
    else:
        Path(out).write_text(text, encoding="utf-8")
