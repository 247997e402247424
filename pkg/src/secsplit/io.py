"""Deterministic CSV/JSON writers with an embedded metadata header.

Floats are written with 17 significant digits.  CSV files start with
``# key: value`` comment lines (values JSON-encoded, keys sorted) followed by
a normal header row.  JSON files wrap the payload as
``{"metadata": ..., "data": ...}``.
"""

from __future__ import annotations

import csv
import json
import math
import os

import numpy as np

from . import __version__

FORMAT = "{:.17g}"


def fmt(x):
    """Format a scalar for a data file."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return FORMAT.format(x)
    return str(x)


def _clean(obj):
    """Recursively convert numpy types, complex numbers and non-finite floats for JSON."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": _clean(obj.real), "im": _clean(obj.imag)}
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return None
        return float(FORMAT.format(x))
    return obj


def metadata(cfg, kind, tolerances, reconciliation):
    """Header common to every output file.

    ``reconciliation`` describes the outcome of the residue-versus-quadrature
    check (or why it was not run).
    """
    return {
        "kind": kind,
        "software": f"secsplit {__version__}",
        "config_hash": cfg.hash,
        "seed": cfg.seed,
        "tolerances": tolerances,
        "reconciliation": reconciliation,
    }


def write_csv(path, columns, rows, meta):
    """Write rows (iterables of scalars) under ``columns`` with a metadata header."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for key in sorted(meta):
            fh.write(f"# {key}: {json.dumps(_clean(meta[key]), sort_keys=True)}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def write_json(path, payload, meta):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"metadata": _clean(meta), "data": _clean(payload)}, fh,
                  indent=2, sort_keys=True)
        fh.write("\n")
    return path


def read_csv(path):
    """Return ``(metadata, columns, rows)``; rows are lists of strings."""
    meta, lines = {}, []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("# "):
                key, _, value = line[2:].partition(": ")
                meta[key] = json.loads(value)
            else:
                lines.append(line)
    rows = list(csv.reader(lines))
    return meta, rows[0], rows[1:]


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
