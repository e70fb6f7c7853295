"""Line-oriented graph corpus files.

One block per graph::

    G <n> <m>
    <u> <v>          (m edge lines, 0 <= u < v < n)
    F <node> <f1> ... <fk>   (optional, one per node if present)
    L <node> <class-id>      (optional, one per node if present)

Blocks are separated by blank lines; ``#`` starts a comment.  All parse
errors report the offending line number.
"""

from __future__ import annotations

import io
from collections.abc import Iterable, Sequence
from pathlib import Path

from .errors import FormatError
from .graphs import Graph


def save_corpus(graphs: Sequence[Graph], path, header_comment: str | None = None) -> None:
    """Write graphs in the corpus format; edges emitted sorted for stable output."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        if header_comment:
            for line in header_comment.splitlines():
                fh.write(f"# {line}\n")
        for k, g in enumerate(graphs):
            if k > 0:
                fh.write("\n")
            fh.write(f"G {g.n} {g.num_edges}\n")
            for u, v in sorted(g.edges):
                fh.write(f"{u} {v}\n")
            if g.features is not None:
                for node, row in enumerate(g.features):
                    vals = " ".join(repr(x) for x in row)
                    fh.write(f"F {node} {vals}\n")
            if g.labels is not None:
                for node, label in enumerate(g.labels):
                    fh.write(f"L {node} {label}\n")


def load_corpus(path) -> list[Graph]:
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        return list(_parse(fh))


def loads_corpus(text: str) -> list[Graph]:
    return list(_parse(io.StringIO(text)))


def _parse(fh) -> Iterable[Graph]:
    n = None
    m = 0
    edges: list[tuple[int, int]] = []
    feats: dict[int, tuple[float, ...]] = {}
    labels: dict[int, int] = {}
    start_line = 0

    def finish():
        nonlocal n
        if n is None:
            return None
        if len(edges) != m:
            raise FormatError(
                f"graph declared {m} edges but {len(edges)} were read", line=start_line
            )
        g = _build_graph(n, edges, feats, labels, start_line)
        n = None
        edges.clear()
        feats.clear()
        labels.clear()
        return g

    for lineno, raw in enumerate(fh, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            g = finish()
            if g is not None:
                yield g
            continue
        parts = line.split()
        if parts[0] == "G":
            g = finish()
            if g is not None:
                yield g
            if len(parts) != 3:
                raise FormatError(f"malformed header {line!r}", line=lineno)
            try:
                n, m = int(parts[1]), int(parts[2])
            except ValueError:
                raise FormatError(f"malformed header {line!r}", line=lineno) from None
            if n < 0 or m < 0:
                raise FormatError(f"negative counts in header {line!r}", line=lineno)
            start_line = lineno
        elif parts[0] == "F":
            if n is None:
                raise FormatError("feature line outside a graph block", line=lineno)
            node = _parse_node(parts, n, lineno)
            if node in feats:
                raise FormatError(f"duplicate feature line for node {node}", line=lineno)
            try:
                feats[node] = tuple(float(x) for x in parts[2:])
            except ValueError:
                raise FormatError(f"malformed feature values {line!r}", line=lineno) from None
        elif parts[0] == "L":
            if n is None:
                raise FormatError("label line outside a graph block", line=lineno)
            node = _parse_node(parts, n, lineno)
            if node in labels:
                raise FormatError(f"duplicate label line for node {node}", line=lineno)
            if len(parts) != 3:
                raise FormatError(f"malformed label line {line!r}", line=lineno)
            labels[node] = int(parts[2])
        else:
            if n is None:
                raise FormatError(f"edge line before any header: {line!r}", line=lineno)
            if len(edges) >= m:
                raise FormatError(
                    f"graph declared {m} edges but more edge lines follow", line=lineno
                )
            if len(parts) != 2:
                raise FormatError(f"malformed edge line {line!r}", line=lineno)
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise FormatError(f"malformed edge line {line!r}", line=lineno) from None
            if u == v:
                raise FormatError(f"self-loop at node {u}", line=lineno)
            if not (0 <= u < v < n):
                raise FormatError(
                    f"edge ({u}, {v}) violates 0 <= u < v < n for n={n}", line=lineno
                )
            if (u, v) in edges:
                raise FormatError(f"duplicate edge ({u}, {v})", line=lineno)
            edges.append((u, v))
    g = finish()
    if g is not None:
        yield g


def _parse_node(parts, n, lineno) -> int:
    try:
        node = int(parts[1])
    except (IndexError, ValueError):
        raise FormatError(f"malformed node index in {' '.join(parts)!r}", line=lineno) from None
    if not 0 <= node < n:
        raise FormatError(f"node {node} out of range for n={n}", line=lineno)
    return node


def _build_graph(n, edges, feats, labels, start_line) -> Graph:
    features = None
    if feats:
        if len(feats) != n:
            raise FormatError(
                f"feature lines cover {len(feats)} of {n} nodes", line=start_line
            )
        features = tuple(feats[i] for i in range(n))
    label_tuple = None
    if labels:
        if len(labels) != n:
            raise FormatError(
                f"label lines cover {len(labels)} of {n} nodes", line=start_line
            )
        label_tuple = tuple(labels[i] for i in range(n))
    return Graph.from_edges(n, edges, features=features, labels=label_tuple)
