"""Deterministic CSV/JSON emission shared by every CLI command.

Floats are rendered with 12 significant digits, CSV uses comma separators
with a mandatory header and '.' decimals, and JSON documents keep insertion
order so identical configs produce byte-identical reports.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Sequence


def fmt_float(x: float) -> str:
    """12-significant-digit, locale-independent rendering."""
    return f"{float(x):.12g}"


def round12(x: float) -> float:
    return float(fmt_float(x))


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return fmt_float(value)
    return str(value)


def write_csv(path: Path, header: Sequence[str],
              rows: Iterable[Sequence]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, float):
        return round12(value)
    if hasattr(value, "item"):  # numpy scalars
        return _jsonable(value.item())
    return value

def write_json(path: Path, document: dict) -> None:
    path.write_text(json.dumps(_jsonable(document), indent=2) + "\n",
                    encoding="utf-8")
