"""Deterministic output formatting shared by the CSV/JSON emitters.

Numbers are written with 12 significant digits, '.' decimal separator, and
'\\n' line endings, so repeated runs with the same configuration produce
byte-identical files.
"""

from __future__ import annotations

import json


def format_value(v) -> str:
    return f"{float(v):.12g}"


def csv_text(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    return "\n".join(lines) + "\n"


def write_csv(file, header, rows) -> None:
    with open(file, "w", newline="") as fh:
        fh.write(csv_text(header, rows))


def json_text(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"
