"""Artifact writers and readers: 17-digit CSV, canonical JSON, atomic writes.

Every float is serialized with enough digits to round-trip exactly, so
regression diffs of artifacts are bit-stable; readers reconstruct values
bit for bit.
"""

from __future__ import annotations

import json
import os
import tempfile

import numpy as np

__all__ = [
    "format_float",
    "write_text_atomic",
    "dumps_canonical",
    "write_csv",
    "read_csv",
    "write_json",
    "read_json",
]


def format_float(v) -> str:
    """Shortest-or-17-significant-digit decimal that round-trips a double."""
    return f"{float(v):.17g}"


def write_text_atomic(path, text: str) -> None:
    """Write via a temp file in the target directory plus rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def dumps_canonical(obj) -> str:
    """Deterministic JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_csv(path, header, columns) -> None:
    """Write named float columns; all columns must share a length."""
    cols = [np.asarray(c, dtype=np.float64) for c in columns]
    if len(cols) != len(header):
        raise ValueError(f"{len(header)} header names for {len(cols)} columns")
    lines = [",".join(header)]
    if cols:
        length = cols[0].size
        for c in cols:
            if c.size != length:
                raise ValueError("all columns must have the same length")
        for row in zip(*cols):
            lines.append(",".join(format_float(v) for v in row))
    write_text_atomic(path, "\n".join(lines) + "\n")


def read_csv(path):
    """Read a CSV written by write_csv: returns (header, list of arrays)."""
    with open(path, "r", encoding="utf-8") as fh:
        header = [name.strip() for name in fh.readline().strip().split(",")]
        rows = [line.strip() for line in fh if line.strip()]
    if not rows:
        return header, [np.empty(0) for _ in header]
    parsed = []
    for lineno, row in enumerate(rows, start=2):
        toks = row.split(",")
        if len(toks) != len(header):
            raise ValueError(f"CSV line {lineno} has {len(toks)} fields but header has {len(header)}")
        parsed.append([float(tok) for tok in toks])
    data = np.array(parsed)
    return header, [data[:, i] for i in range(len(header))]


def write_json(path, obj) -> None:
    write_text_atomic(path, dumps_canonical(obj))


def read_json(path):
    with open(os.fspath(path), "r", encoding="utf-8") as fh:
        return json.load(fh)
