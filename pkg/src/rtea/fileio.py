"""CSV/JSON artifact plumbing: atomic writes, digests, signal tables.

CSV files carry a header row, full-precision decimal floats and LF line
endings; floats are written with ``repr`` so a re-read round-trips exactly.
All writes go through a temp file renamed into place.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import tempfile
from datetime import datetime, timezone

import numpy as np


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _atomic_write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_columns_csv(path: str, columns: dict[str, np.ndarray]) -> None:
    """Write named columns of equal length as a CSV table."""
    names = list(columns)
    arrays = [np.asarray(columns[n]) for n in names]
    lengths = {a.shape[0] for a in arrays}
    if len(lengths) != 1:
        raise ValueError(f"columns have unequal lengths: {sorted(lengths)}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(names)
    for row in zip(*arrays):
        writer.writerow([_fmt(v) for v in row])
    _atomic_write_text(path, buf.getvalue())


def read_columns_csv(path: str) -> dict[str, np.ndarray]:
    """Read a CSV written by :func:`write_columns_csv` (or any headered
    numeric table; a single headerless column is accepted as ``y``)."""
    with open(path, "r", newline="") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r]
    if not rows:
        raise ValueError(f"{path}: empty CSV")
    header = rows[0]
    try:
        [float(v) for v in header]
    except ValueError:
        data_rows = rows[1:]
    else:
        if len(header) != 1:
            raise ValueError(f"{path}: headerless CSV must have a single column")
        header = ["y"]
        data_rows = rows
    cols = {name: np.empty(len(data_rows)) for name in header}
    for i, row in enumerate(data_rows):
        if len(row) != len(header):
            raise ValueError(f"{path}: row {i + 1} has {len(row)} fields, expected {len(header)}")
        for name, v in zip(header, row):
            cols[name][i] = float(v)
    return cols


def write_json(path: str, obj) -> None:
    _atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def sha256_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def utc_timestamp() -> str:
    return datetime.now(timezone.utc).isoformat()
