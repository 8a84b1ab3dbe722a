# -*- coding: utf-8 -*-
"""
graph_io.py - The BIPARTITE edge-list format, checksums and JSON files.

File layout:

    BIPARTITE <n_left> <n_right> <m>
    <u> <v>            (m lines, 0-based, left index then right index)
    # manifest <path>  (optional trailing reference)

Repeated edge lines are parallel edges. Other lines starting with '#' are
ignored on read. Edges are written in the graph's stored order (sorted by
left vertex, stable), so write -> read -> write is byte-identical.
"""

from __future__ import annotations

import hashlib
import json
import os
from typing import Any

import numpy as np

from errors import GraphFormatError
from events import jsonable
from graphs import DenseBipartiteGraph

_HEADER = "BIPARTITE"
_MANIFEST_TAG = "# manifest "


def format_graph(g: DenseBipartiteGraph, manifest_ref: str | None = None) -> str:
    lines = [f"{_HEADER} {g.n_left} {g.n_right} {g.n_edges}"]
    lines.extend(f"{u} {v}" for u, v in g.edges.tolist())
    if manifest_ref:
        lines.append(f"{_MANIFEST_TAG}{manifest_ref}")
    return "\n".join(lines) + "\n"


def checksum(g: DenseBipartiteGraph) -> str:
    """sha256 of the graph's file text without the manifest line."""
    return hashlib.sha256(format_graph(g).encode("utf-8")).hexdigest()


def parse_graph(text: str, name: str = "graph") -> tuple[DenseBipartiteGraph, str | None]:
    """Parse file text into (graph, manifest reference or None).

    Raises:
        GraphFormatError: on a bad header, a wrong edge count or an
            out-of-range index.
    """
    manifest_ref = None
    rows: list[str] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if raw.startswith(_MANIFEST_TAG):
                manifest_ref = raw[len(_MANIFEST_TAG):].strip()
            continue
        rows.append(line)
    if not rows:
        raise GraphFormatError("empty graph file")

    head = rows[0].split()
    if len(head) != 4 or head[0] != _HEADER:
        raise GraphFormatError(f"expected '{_HEADER} n_left n_right m', got {rows[0]!r}")
    try:
        n_left, n_right, m = (int(x) for x in head[1:])
    except ValueError as e:
        raise GraphFormatError(f"bad header numbers: {rows[0]!r}") from e
    body = rows[1:]
    if len(body) != m:
        raise GraphFormatError(f"header promises {m} edges, file has {len(body)}")

    try:
        edges = np.array([[int(x) for x in line.split()] for line in body], dtype=np.int64).reshape(-1, 2)
    except ValueError as e:
        raise GraphFormatError(f"bad edge line: {e}") from e
    if m and (edges[:, 0].min() < 0 or edges[:, 0].max() >= n_left
              or edges[:, 1].min() < 0 or edges[:, 1].max() >= n_right):
        raise GraphFormatError(f"edge index out of range for {n_left}+{n_right} vertices")
    return DenseBipartiteGraph(n_left, n_right, edges, name=name), manifest_ref


def write_graph(g: DenseBipartiteGraph, path: str, manifest_ref: str | None = None) -> str:
    """Write g to path and return its checksum."""
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(format_graph(g, manifest_ref))
    return checksum(g)


def read_graph(path: str) -> tuple[DenseBipartiteGraph, str | None]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise GraphFormatError(f"cannot read {path}: {e}") from e
    name = os.path.splitext(os.path.basename(path))[0]
    return parse_graph(text, name=name)


def write_json(path: str, data: Any) -> None:
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(data, f, ensure_ascii=False, indent=2, default=jsonable)
        f.write("\n")


def read_json(path: str) -> Any:
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def _ensure_parent(path: str) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
