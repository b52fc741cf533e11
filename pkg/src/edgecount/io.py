"""File formats: edge-list graphs, condensed distance matrices, point CSVs.

Graph text format: header line ``N <num_nodes>`` then one ``u v`` pair per
line (0-indexed).  Distance matrices: binary (magic ``EDM1``, little-endian
u64 node count, float64 condensed entries in row-major upper-triangle
order) or a plain-text twin (``EDM-TEXT <n>`` header, one value per line).
"""

from __future__ import annotations

import hashlib
import json
import os
import struct
import tempfile

import numpy as np

from .construct import DistanceMatrix
from .errors import DataError
from .graph import Graph

_EDM_MAGIC = b"EDM1"


def write_graph_text(g: Graph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"N {g.n_nodes}\n")
        for u, v in zip(g.edge_u.tolist(), g.edge_v.tolist()):
            fh.write(f"{u} {v}\n")


def read_graph_text(path) -> Graph:
    try:
        with open(path, encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
    except OSError as exc:
        raise DataError(f"cannot read graph file: {exc}") from exc
    if not lines or not lines[0].startswith("N "):
        raise DataError("graph file must start with a 'N <num_nodes>' header")
    try:
        n_nodes = int(lines[0][2:])
        edges = [tuple(int(tok) for tok in ln.split()) for ln in lines[1:]]
    except ValueError as exc:
        raise DataError(f"malformed graph file: {exc}") from exc
    if any(len(e) != 2 for e in edges):
        raise DataError("each edge line must hold exactly two node ids")
    try:
        return Graph(n_nodes, edges)
    except Exception as exc:
        raise DataError(f"invalid graph: {exc}") from exc


def write_edm(dm: DistanceMatrix, path) -> None:
    with open(path, "wb") as fh:
        fh.write(_EDM_MAGIC)
        fh.write(struct.pack("<Q", dm.n))
        fh.write(dm.condensed.astype("<f8").tobytes())


def read_edm(path) -> DistanceMatrix:
    try:
        with open(path, "rb") as fh:
            magic = fh.read(4)
            if magic != _EDM_MAGIC:
                raise DataError("not an EDM1 file")
            (n,) = struct.unpack("<Q", fh.read(8))
            data = np.frombuffer(fh.read(), dtype="<f8")
    except OSError as exc:
        raise DataError(f"cannot read distance file: {exc}") from exc
    try:
        return DistanceMatrix(int(n), data.astype(np.float64))
    except Exception as exc:
        raise DataError(f"invalid distance matrix: {exc}") from exc


def write_edm_text(dm: DistanceMatrix, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"EDM-TEXT {dm.n}\n")
        for value in dm.condensed.tolist():
            fh.write(f"{value!r}\n")


def read_edm_text(path) -> DistanceMatrix:
    try:
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().split()
            if len(header) != 2 or header[0] != "EDM-TEXT":
                raise DataError("text distance file must start with 'EDM-TEXT <n>'")
            n = int(header[1])
            data = np.array([float(ln) for ln in fh if ln.strip()], dtype=np.float64)
    except OSError as exc:
        raise DataError(f"cannot read distance file: {exc}") from exc
    except ValueError as exc:
        raise DataError(f"malformed distance file: {exc}") from exc
    try:
        return DistanceMatrix(n, data)
    except Exception as exc:
        raise DataError(f"invalid distance matrix: {exc}") from exc


def read_labels_text(path) -> np.ndarray:
    """Group labels, one 1 or 2 per line, aligned with graph node ids."""
    try:
        with open(path, encoding="utf-8") as fh:
            values = [int(ln) for ln in fh if ln.strip()]
    except OSError as exc:
        raise DataError(f"cannot read labels file: {exc}") from exc
    except ValueError as exc:
        raise DataError(f"malformed labels file: {exc}") from exc
    if not values or any(v not in (1, 2) for v in values):
        raise DataError("labels file must hold one 1 or 2 per line")
    return np.asarray(values, dtype=np.int64)


def read_distances(path) -> DistanceMatrix:
    """Distance matrix in either the binary (EDM1) or text (EDM-TEXT) format."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
    if magic == _EDM_MAGIC:
        return read_edm(path)
    return read_edm_text(path)


def read_point_csv(path) -> np.ndarray:
    """Numeric CSV, one observation per row; autodetects delimiter
    (comma/tab) and an optional header row."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    except OSError as exc:
        raise DataError(f"cannot read CSV: {exc}") from exc
    if not lines:
        raise DataError("CSV file is empty")
    delim = "\t" if "\t" in lines[0] else ","

    def parse(line):
        return [float(tok) for tok in line.split(delim)]

    start = 0
    try:
        parse(lines[0])
    except ValueError:
        start = 1  # header row
    if start >= len(lines):
        raise DataError("CSV holds a header but no data rows")
    rows = []
    width = None
    for lineno, line in enumerate(lines[start:], start + 1):
        try:
            row = parse(line)
        except ValueError as exc:
            raise DataError(f"CSV line {lineno}: {exc}") from exc
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise DataError(
                f"CSV line {lineno}: expected {width} columns, got {len(row)}"
            )
        rows.append(row)
    out = np.asarray(rows, dtype=np.float64)
    if not np.all(np.isfinite(out)):
        raise DataError("CSV contains non-finite values")
    return out


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_json_atomic(obj, path) -> None:
    """Serialize to JSON via a temp file + rename so readers never see halves."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(obj, fh, indent=2, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
