"""Reading samples from delimited text and writing results.

JSON is the canonical output.  Every document carries ``schema_version``,
the fully resolved configuration and the seed, and is written with sorted
keys so that identical runs produce identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .empirical import Sample
from .errors import InputError

SCHEMA_VERSION = "1.0"
MISSING = {"", "na", "nan", "null", "none", "."}


@dataclass(frozen=True)
class IngestReport:
    path: str
    column: str
    n: int
    skipped: int
    min: float
    max: float
    mean: float

    def to_dict(self):
        return {"path": self.path, "column": self.column, "n": self.n, "skipped": self.skipped,
                "min": self.min, "max": self.max, "mean": self.mean}


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def _read_rows(path: Path) -> list[list[str]]:
    try:
        text = path.read_text(encoding="utf-8-sig")
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    first = next((line for line in text.splitlines() if line.strip()), "")
    delimiter = "\t" if (path.suffix.lower() == ".tsv" or "\t" in first) else ","
    return list(csv.reader(io.StringIO(text), delimiter=delimiter))


def _resolve_column(header: list[str] | None, column, width: int) -> tuple[int, str]:
    if column is None:
        return 0, header[0] if header else "0"
    key = str(column)
    if header is not None and key in header:
        return header.index(key), key
    if key.lstrip("-").isdigit():
        i = int(key)
        if not -width <= i < width:
            raise InputError(f"column index {i} out of range (file has {width} columns)")
        i %= width
        return i, header[i] if header else str(i)
    raise InputError(f"column {key!r} not found" + (f"; header is {header}" if header else ""))


def read_columns(path, columns) -> list[tuple[np.ndarray, IngestReport]]:
    """Read one numeric column per entry of ``columns`` (name or 0-based index).

    The first non-blank row is a header when any of its fields is not a
    number.  Blank rows and rows whose selected field is missing are
    skipped and counted; any other non-numeric field is an error.
    """
    path = Path(path)
    rows = _read_rows(path)
    nonblank = [r for r in rows if any(f.strip() for f in r)]
    blanks = len(rows) - len(nonblank)
    if not nonblank:
        raise InputError(f"{path}: zero usable rows")
    header = None
    if not all(_is_number(f.strip()) or f.strip().lower() in MISSING for f in nonblank[0]):
        header = [f.strip() for f in nonblank[0]]
        nonblank = nonblank[1:]
    widths = [len(r) for r in nonblank] + ([len(header)] if header else [])
    width = max(widths or [1])
    out = []
    for column in columns:
        idx, name = _resolve_column(header, column, width)
        values, skipped = [], blanks
        for lineno, row in enumerate(nonblank, start=2 if header else 1):
            field = row[idx].strip() if idx < len(row) else ""
            if field.lower() in MISSING:
                skipped += 1
                continue
            try:
                v = float(field)
            except ValueError:
                raise InputError(f"{path}: non-numeric value {field!r} in column {name!r} "
                                 f"(data row {lineno})") from None
            if not math.isfinite(v):
                skipped += 1
                continue
            values.append(v)
        if not values:
            raise InputError(f"{path}: zero usable rows in column {name!r}")
        x = np.asarray(values, dtype=np.float64)
        out.append((x, IngestReport(str(path), name, int(x.size), int(skipped), float(x.min()),
                                    float(x.max()), math.fsum(values) / x.size)))
    return out


def ingest(path, column=None, name: str = "") -> tuple[Sample, IngestReport]:
    (values, report), = read_columns(path, [column])
    return Sample.from_values(values, name or Path(path).stem), report


def write_sample_csv(values, path, header: str = "value") -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(header + "\n")
        for v in np.asarray(values, dtype=np.float64).tolist():
            fh.write(repr(v) + "\n")


def jsonable(obj):
    """Convert numpy scalars/arrays, enums, tuples and non-finite floats for JSON."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        if math.isnan(f):
            return None
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        return f
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def dumps(doc: dict) -> str:
    return json.dumps(jsonable(doc), sort_keys=True, indent=2, allow_nan=False) + "\n"


def envelope(command: str, config: dict, result: dict) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command, "config": config,
            "seed": config.get("seed"), "result": result}


def write_text(text: str, path) -> None:
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from None


def csv_text(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_csv_field(r.get(c)) for c in columns])
    return buf.getvalue()


def _csv_field(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    return "" if v is None else v


def write_table(path, columns: list[str], data: dict) -> None:
    """Write equal-length columns as CSV."""
    n = len(next(iter(data.values()))) if data else 0
    rows = [{c: data[c][i] for c in columns} for i in range(n)]
    write_text(csv_text(rows, columns), path)
