"""CSV/JSON serialisation of result tables.

CSV always has a header row, ``.`` decimals and ``\\n`` line endings; floats
are written with 15 significant digits so they re-parse without loss at
that precision.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from typing import IO, Iterable, Optional, Sequence

__all__ = ["format_value", "parse_value", "write_csv", "read_csv", "write_json", "to_csv_string"]


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return f"{v:.15g}"
    if hasattr(v, "value"):  # enums
        return str(v.value)
    return str(v)


def parse_value(s: str):
    if s == "":
        return None
    if s in ("true", "false"):
        return s == "true"
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def write_csv(rows: Iterable[dict], columns: Sequence[str], out: IO[str]) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([format_value(row.get(c)) for c in columns])


def to_csv_string(rows: Iterable[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    write_csv(rows, columns, buf)
    return buf.getvalue()


def read_csv(source) -> list[dict]:
    """Parse CSV text, a path or an open file back into typed dicts."""
    if hasattr(source, "read"):
        text = source.read()
    elif isinstance(source, str) and "\n" in source:
        text = source
    else:
        with open(source, newline="") as fh:
            text = fh.read()
    reader = csv.DictReader(io.StringIO(text))
    return [{k: parse_value(v) for k, v in row.items()} for row in reader]


def _jsonable(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {str(k.value if hasattr(k, "value") else k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "value") and not isinstance(obj, (int, float, str)):
        return obj.value
    if hasattr(obj, "item"):  # numpy scalars
        return obj.item()
    return obj


def write_json(obj, out: Optional[IO[str]] = None) -> None:
    out = out or sys.stdout
    json.dump(_jsonable(obj), out, indent=2)
    out.write("\n")
