"""Graph drawings: DOT, GraphML, and SVG with a seeded force-directed layout.

Every emitted file starts with a comment carrying the tool version and the
seed so outputs are replayable byte for byte.
"""

from __future__ import annotations

import numpy as np

from ._version import __version__
from .errors import InputError
from .graphs import Graph
from .layout import CLASS_NAMES

FORMATS = ("dot", "graphml", "svg")


def _stamp(seed) -> str:
    return f"layoutgraphs {__version__} seed={seed}"


def to_dot(g: Graph, seed=None) -> str:
    lines = [f"// {_stamp(seed)}", "graph g {"]
    for v in range(g.n):
        label = str(v)
        if g.labels is not None:
            label = f"{v}:{CLASS_NAMES.get(g.labels[v], g.labels[v])}"
        lines.append(f'  {v} [label="{label}"];')
    for u, v in sorted(g.edges):
        lines.append(f"  {u} -- {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_graphml(g: Graph, seed=None) -> str:
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f"<!-- {_stamp(seed)} -->",
        '<graphml xmlns="http://graphml.graphdrawing.org/xmlns"',
        '         xmlns:xsi="http://www.w3.org/2001/XMLSchema-instance"',
        '         xsi:schemaLocation="http://graphml.graphdrawing.org/xmlns'
        ' http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd">',
        '  <key id="label" for="node" attr.name="label" attr.type="string"/>',
        '  <graph id="G" edgedefault="undirected">',
    ]
    for v in range(g.n):
        if g.labels is not None:
            name = CLASS_NAMES.get(g.labels[v], str(g.labels[v]))
            lines.append(f'    <node id="n{v}"><data key="label">{name}</data></node>')
        else:
            lines.append(f'    <node id="n{v}"/>')
    for i, (u, v) in enumerate(sorted(g.edges)):
        lines.append(f'    <edge id="e{i}" source="n{u}" target="n{v}"/>')
    lines.extend(["  </graph>", "</graphml>"])
    return "\n".join(lines) + "\n"


def _force_layout(g: Graph, rng, iterations: int = 60) -> np.ndarray:
    """Fruchterman-Reingold-style layout on the unit square, seeded."""
    n = g.n
    pos = rng.random((n, 2))
    if n <= 1:
        return pos
    k = 1.0 / np.sqrt(n)
    edges = np.array(sorted(g.edges), dtype=np.int64) if g.edges else None
    temperature = 0.1
    for it in range(iterations):
        delta = pos[:, None, :] - pos[None, :, :]
        dist = np.sqrt((delta * delta).sum(axis=2))
        np.fill_diagonal(dist, 1.0)
        repulse = (k * k / dist)[:, :, None] * delta / dist[:, :, None]
        disp = repulse.sum(axis=1)
        if edges is not None:
            dvec = pos[edges[:, 0]] - pos[edges[:, 1]]
            dlen = np.sqrt((dvec * dvec).sum(axis=1, keepdims=True))
            dlen = np.maximum(dlen, 1e-9)
            pull = (dlen / k) * dvec / dlen
            np.add.at(disp, edges[:, 0], -pull)
            np.add.at(disp, edges[:, 1], pull)
        length = np.sqrt((disp * disp).sum(axis=1, keepdims=True))
        length = np.maximum(length, 1e-9)
        step = temperature * (1.0 - it / iterations)
        pos += disp / length * np.minimum(length, step)
        pos = np.clip(pos, 0.0, 1.0)
    return pos


def to_svg(g: Graph, seed=None, size: int = 480, margin: int = 20) -> str:
    rng = np.random.default_rng(seed)
    pos = _force_layout(g, rng)
    span = size - 2 * margin
    xy = margin + pos * span

    def fmt(v: float) -> str:
        return f"{v:.2f}"

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f"<!-- {_stamp(seed)} -->",
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}"'
        f' viewBox="0 0 {size} {size}">',
        f'  <rect width="{size}" height="{size}" fill="white"/>',
    ]
    for u, v in sorted(g.edges):
        lines.append(
            f'  <line x1="{fmt(xy[u, 0])}" y1="{fmt(xy[u, 1])}"'
            f' x2="{fmt(xy[v, 0])}" y2="{fmt(xy[v, 1])}"'
            ' stroke="#666" stroke-width="1"/>'
        )
    for v in range(g.n):
        lines.append(
            f'  <circle cx="{fmt(xy[v, 0])}" cy="{fmt(xy[v, 1])}" r="6"'
            ' fill="#4878cf" stroke="#1b2a4a"/>'
        )
        lines.append(
            f'  <text x="{fmt(xy[v, 0] + 8)}" y="{fmt(xy[v, 1] - 8)}"'
            f' font-size="10" font-family="monospace">{v}</text>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def render(g: Graph, fmt: str, seed=None) -> str:
    if fmt == "dot":
        return to_dot(g, seed)
    if fmt == "graphml":
        return to_graphml(g, seed)
    if fmt == "svg":
        return to_svg(g, seed)
    raise InputError(f"unknown render format {fmt!r} (choose from {', '.join(FORMATS)})")
