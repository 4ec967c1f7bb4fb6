"""CSV and JSON writers for result tables."""

from __future__ import annotations

import csv
import io
import json
from datetime import datetime, timezone

from .figures import Table

TIMESTAMP_KEY = "generated"


def _cell(x):
    if isinstance(x, float):
        return format(x, ".17g")
    if x is None:
        return ""
    return str(x)


def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def to_csv(table: Table, timestamp: str | None = None) -> str:
    """Comma-separated rows preceded by ``# key: value`` metadata lines."""
    buf = io.StringIO()
    buf.write(f"# {TIMESTAMP_KEY}: {timestamp or _timestamp()}\n")
    for key, value in table.meta.items():
        buf.write(f"# {key}: {json.dumps(value)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_cell(x) for x in row])
    return buf.getvalue()


def to_json(table: Table, timestamp: str | None = None) -> str:
    meta = {TIMESTAMP_KEY: timestamp or _timestamp(), **table.meta}
    rows = [dict(zip(table.columns, row)) for row in table.rows]
    return json.dumps({"meta": meta, "rows": rows}, indent=2) + "\n"


def read_csv(text: str) -> Table:
    """Inverse of ``to_csv``; numeric cells come back as floats."""
    meta = {}
    lines = text.splitlines()
    body = []
    for line in lines:
        if line.startswith("# "):
            key, _, value = line[2:].partition(": ")
            meta[key] = value if key == TIMESTAMP_KEY else json.loads(value)
        else:
            body.append(line)
    reader = csv.reader(body)
    columns = next(reader)
    rows = []
    for rec in reader:
        row = []
        for cell in rec:
            try:
                row.append(float(cell))
            except ValueError:
                row.append(cell if cell else None)
        rows.append(tuple(row))
    return Table(columns, rows, meta)
