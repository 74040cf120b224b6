"""Reading and writing graph files.

The canonical format is a plain edge list::

    # optional comments
    n 4
    1 2
    2 3

The ``n <count>`` header comes first, then one ``i j`` line per directed edge
``i -> j`` with 1-based labels.  Blank lines and ``#`` comments are ignored.
:func:`write_edge_list` sorts edges, so equal graphs serialise to identical
bytes.

A dense adjacency CSV is accepted on input only.  Entry ``(i, j)`` equal to
1 means the edge ``i -> j``, with the source as row and the destination as
column.
"""

from __future__ import annotations

import csv
import hashlib
import io
from pathlib import Path

from .graph import Digraph, GraphError, from_adjacency, from_edge_list


class GraphFormatError(ValueError):
    """The text is not a valid graph file."""


def parse_edge_list(text: str, undirected: bool = False) -> Digraph:
    """Parse the edge-list format; ``undirected`` adds the reverse of every edge."""
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if n is None:
            if len(fields) != 2 or fields[0] != "n":
                raise GraphFormatError(f"line {lineno}: expected header 'n <count>', got {raw!r}")
            n = _to_int(fields[1], lineno)
            continue
        if len(fields) != 2:
            raise GraphFormatError(f"line {lineno}: expected 'i j', got {raw!r}")
        i, j = _to_int(fields[0], lineno), _to_int(fields[1], lineno)
        edges.append((i, j))
        if undirected:
            edges.append((j, i))
    if n is None:
        raise GraphFormatError("missing 'n <count>' header")
    try:
        return from_edge_list(n, edges)
    except GraphError as exc:
        raise GraphFormatError(str(exc)) from exc


def _to_int(token: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise GraphFormatError(f"line {lineno}: {token!r} is not an integer") from None


def parse_adjacency_csv(text: str, undirected: bool = False) -> Digraph:
    """Parse a square 0/1 CSV matrix, source row and destination column."""
    rows = [r for r in csv.reader(io.StringIO(text)) if r and not r[0].lstrip().startswith("#")]
    try:
        matrix = [[int(v) for v in row] for row in rows]
    except ValueError as exc:
        raise GraphFormatError(f"adjacency CSV has a non-integer entry: {exc}") from None
    if not matrix or any(len(row) != len(matrix) for row in matrix):
        raise GraphFormatError("adjacency CSV must be a nonempty square matrix")
    if undirected:
        m = len(matrix)
        matrix = [[matrix[i][j] | matrix[j][i] for j in range(m)] for i in range(m)]
    try:
        return from_adjacency(matrix)
    except GraphError as exc:
        raise GraphFormatError(str(exc)) from exc


def read_graph(path: str | Path, undirected: bool = False) -> tuple[Digraph, bytes]:
    """Load a graph file, picking the CSV reader for ``.csv`` files; also return the raw bytes."""
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise GraphFormatError(f"cannot read {path}: {exc.strerror}") from None
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError:
        raise GraphFormatError(f"{path} is not UTF-8 text") from None
    if path.suffix.lower() == ".csv":
        return parse_adjacency_csv(text, undirected), data
    return parse_edge_list(text, undirected), data


def write_edge_list(D: Digraph) -> str:
    """Canonical edge-list text with edges sorted by ``(i, j)``."""
    lines = [f"n {D.n}"]
    lines.extend(f"{i} {j}" for i, j in sorted(D.edges()))
    return "\n".join(lines) + "\n"


def graph_digest(D: Digraph) -> str:
    """SHA-256 of the canonical edge list, independent of the input file's layout."""
    return hashlib.sha256(write_edge_list(D).encode()).hexdigest()


__all__ = [
    "GraphFormatError",
    "graph_digest",
    "parse_adjacency_csv",
    "parse_edge_list",
    "read_graph",
    "write_edge_list",
]
