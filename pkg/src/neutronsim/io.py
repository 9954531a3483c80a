"""Result serialization: delimited text (CSV) and JSON.

Both formats embed the exact configuration and seed needed to
reproduce the run.  Reals are written with 17 significant digits,
which round-trips IEEE doubles exactly.
"""

from __future__ import annotations

import csv
import io as _io
import json

import numpy as np

FIXED_COLUMNS = ("beam", "label", "count", "normalized", "oracle", "stderr")

# Setting columns per experiment, in stable order.
SETTING_COLUMNS = {
    "mzi": ("chi",),
    "absorber": ("a", "chi"),
    "bell": ("alpha", "chi"),
    "bell-random-chi": ("alpha", "chi"),
    "rf": ("phi", "chi"),
    "lowcount": ("replica", "chi"),
    "shutter": ("chi",),
}


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return "%.17g" % value
    return str(value)


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def record_to_csv(record) -> str:
    """Delimited table: a '# config: {...}' provenance comment line,
    a header row, then one row per (setting, beam, label)."""
    columns = SETTING_COLUMNS[record.experiment] + FIXED_COLUMNS
    buf = _io.StringIO()
    provenance = json.dumps(
        {"experiment": record.experiment, "config": record.config,
         "seed": record.seed},
        sort_keys=True, default=_json_default)
    buf.write(f"# config: {provenance}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in record.rows:
        writer.writerow([_fmt(row.get(c, "")) for c in columns])
    return buf.getvalue()


def record_to_json(record) -> str:
    """JSON mirror of the CSV table plus the derived statistics."""
    payload = {
        "experiment": record.experiment,
        "config": record.config,
        "seed": record.seed,
        "columns": list(SETTING_COLUMNS[record.experiment] + FIXED_COLUMNS),
        "rows": record.rows,
        "derived": record.derived,
    }
    return json.dumps(payload, sort_keys=True, indent=2,
                      default=_json_default) + "\n"


def read_csv(text: str):
    """Parse a table written by record_to_csv back into (provenance,
    list-of-row-dicts) with numeric fields restored."""
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# config: "):
        raise ValueError("missing '# config:' provenance line")
    provenance = json.loads(lines[0][len("# config: "):])
    reader = csv.reader(lines[1:])
    header = next(reader)
    rows = []
    for raw in reader:
        row = {}
        for key, value in zip(header, raw):
            if key in ("beam", "label"):
                row[key] = value
            elif key in ("count", "replica"):
                row[key] = int(value)
            else:
                row[key] = float(value) if value else value
        rows.append(row)
    return provenance, rows


def write_results(record, path, fmt: str = "csv") -> None:
    if fmt == "csv":
        text = record_to_csv(record)
    elif fmt == "json":
        text = record_to_json(record)
    else:
        raise ValueError(f"unknown output format {fmt!r}")
    with open(path, "w") as fh:
        fh.write(text)
