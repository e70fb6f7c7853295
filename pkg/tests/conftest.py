import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from layoutgraphs.graphs import Graph
from layoutgraphs.layout import LayoutPage, Region


def random_er_graph(rng, n, p) -> Graph:
    edges = set()
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                edges.add((u, v))
    return Graph.from_edges(n, edges)


def random_connected_er_graph(rng, n, p) -> Graph:
    while True:
        g = random_er_graph(rng, n, p)
        if g.is_connected():
            return g


def random_page(rng, n_regions, width=120, height=100) -> LayoutPage:
    """Random page with integer-coordinate boxes (fan-oracle compatible)."""
    regions = []
    for _ in range(n_regions):
        w = int(rng.integers(2, 30))
        h = int(rng.integers(2, 20))
        x0 = int(rng.integers(0, width - w))
        y0 = int(rng.integers(0, height - h))
        regions.append(
            Region(
                class_id=int(rng.integers(0, 6)),
                box=(x0, y0, x0 + w, y0 + h),
                histogram=tuple(int(c) for c in rng.integers(0, 20, size=3)),
            )
        )
    return LayoutPage(width=width, height=height, regions=tuple(regions))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_path(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def make_star(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def make_complete(n: int) -> Graph:
    return Graph.from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n)])
