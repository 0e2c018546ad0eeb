"""CSV and JSON writers shared by the report types.

Floats are written with repr(), the shortest decimal that round-trips, so
identical results give byte-identical files.
"""
import csv
import json
import math

import numpy as np


def to_builtin(value):
    """Recursively convert numpy scalars/arrays and non-finite floats to JSON-safe values."""
    if isinstance(value, dict):
        return {str(key): to_builtin(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_builtin(item) for item in value]
    if isinstance(value, np.ndarray):
        return to_builtin(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    return value


def format_cell(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path, header, rows):
    """Write an RFC-4180 CSV file with a header row."""
    with open(path, "w", encoding="utf-8", newline="") as stream:
        writer = csv.writer(stream, lineterminator="\r\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_cell(cell) for cell in row])


def dumps_json(data):
    return json.dumps(to_builtin(data), sort_keys=True, indent=2)


def write_json(path, data):
    with open(path, "w", encoding="utf-8") as stream:
        stream.write(dumps_json(data))
        stream.write("\n")
