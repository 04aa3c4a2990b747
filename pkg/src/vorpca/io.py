"""Plain-text matrix and label files.

Matrix file::

    # vor-matrix p=<p> n=<n>
    <p lines of n comma-separated values>

Line ``i`` holds row ``i``, so column ``j`` of the matrix is the j-th value
across the rows.  Values use Python's shortest round-trip ``repr``.

Labels file::

    # vor-labels n=<n> c=<c>
    <n lines, one integer each>

Files are written to a temporary sibling and renamed into place.
"""

from __future__ import annotations

import math
import os
import re
import tempfile
from pathlib import Path

import numpy as np

from ._errors import FormatError

__all__ = ["read_matrix", "write_matrix", "read_labels", "write_labels", "atomic_write_text"]

_MATRIX_HEADER = re.compile(r"^#?\s*(?:vor-matrix\s+)?p\s*=\s*(\d+)\s*[,\s]\s*n\s*=\s*(\d+)\s*$")
_LABELS_HEADER = re.compile(r"^#\s*vor-labels\s+n\s*=\s*(\d+)\s+c\s*=\s*(\d+)\s*$")


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    if path.parent != Path(""):
        path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x}")
    return repr(x)


def write_matrix(M, path) -> None:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {M.shape}")
    p, n = M.shape
    lines = [f"# vor-matrix p={p} n={n}"]
    lines += [",".join(_fmt(v) for v in row) for row in M]
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_matrix(path) -> np.ndarray:
    """Read a matrix file, raising :class:`FormatError` with the line number
    on any malformed content."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise FormatError(str(exc), path=path) from exc
    lines = text.splitlines()
    if not lines:
        raise FormatError("empty file", line=1, path=path)
    m = _MATRIX_HEADER.match(lines[0].strip())
    if not m:
        raise FormatError(f"bad header {lines[0]!r}", line=1, path=path)
    p, n = int(m.group(1)), int(m.group(2))
    if p < 1 or n < 1:
        raise FormatError("dimensions must be positive", line=1, path=path)
    rows = [ln for ln in enumerate(lines[1:], start=2) if ln[1].strip()]
    if len(rows) != p:
        raise FormatError(f"expected {p} rows, found {len(rows)}",
                          line=rows[p][0] if len(rows) > p else len(lines), path=path)
    M = np.empty((p, n))
    for i, (lineno, line) in enumerate(rows):
        tokens = line.split(",")
        if len(tokens) != n:
            raise FormatError(f"expected {n} values, found {len(tokens)}",
                              line=lineno, path=path)
        for j, tok in enumerate(tokens):
            try:
                v = float(tok)
            except ValueError:
                raise FormatError(f"bad number {tok.strip()!r}", line=lineno, path=path) from None
            if not math.isfinite(v):
                raise FormatError(f"non-finite value {tok.strip()!r}", line=lineno, path=path)
            M[i, j] = v
    return M


def write_labels(labels, path, c=None) -> None:
    labels = np.asarray(labels, dtype=int).ravel()
    if c is None:
        c = int(labels.max()) + 1 if labels.size else 0
    lines = [f"# vor-labels n={labels.size} c={int(c)}"] + [str(int(v)) for v in labels]
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_labels(path):
    """Return ``(labels, c)``."""
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise FormatError(str(exc), path=path) from exc
    if not lines:
        raise FormatError("empty file", line=1, path=path)
    m = _LABELS_HEADER.match(lines[0].strip())
    if not m:
        raise FormatError(f"bad header {lines[0]!r}", line=1, path=path)
    n, c = int(m.group(1)), int(m.group(2))
    body = [(i, ln.strip()) for i, ln in enumerate(lines[1:], start=2) if ln.strip()]
    if len(body) != n:
        raise FormatError(f"expected {n} labels, found {len(body)}", path=path)
    out = np.empty(n, dtype=int)
    for k, (lineno, tok) in enumerate(body):
        try:
            v = int(tok)
        except ValueError:
            raise FormatError(f"bad integer {tok!r}", line=lineno, path=path) from None
        if not 0 <= v < max(c, 1):
            raise FormatError(f"label {v} outside [0, {c})", line=lineno, path=path)
        out[k] = v
    return out, c
