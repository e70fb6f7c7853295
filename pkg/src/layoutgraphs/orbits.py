"""Node orbit counts over connected induced subgraphs of up to 4 nodes.

There are 15 orbits across the connected 2-, 3-, and 4-node graphlets
(standard numbering): 0 degree, 1 path-end, 2 path-mid, 3 triangle,
4/5 4-path end/mid, 6/7 star leaf/center, 8 cycle, 9/10/11 tailed-triangle
tail/rim/hub, 12/13 diamond rim/hub, 14 complete.

Connected subsets are enumerated once each with the ESU scheme (expand a
root only with exclusive neighbours of higher index) and classified through
a precomputed edge-mask table built by permutation matching against the
canonical graphlets.
"""

from __future__ import annotations

import itertools

import numpy as np

from .errors import InputError
from .graphs import Graph

NUM_ORBITS = 15

_PAIRS3 = ((0, 1), (0, 2), (1, 2))
_PAIRS4 = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))

# canonical graphlets: edge set on positions 0..k-1 -> orbit of each position
_CANONICAL3 = (
    ({(0, 1), (0, 2)}, (2, 1, 1)),                      # 3-path
    ({(0, 1), (0, 2), (1, 2)}, (3, 3, 3)),              # triangle
)
_CANONICAL4 = (
    ({(0, 1), (1, 2), (2, 3)}, (4, 5, 5, 4)),           # 4-path
    ({(0, 1), (0, 2), (0, 3)}, (7, 6, 6, 6)),           # star
    ({(0, 1), (1, 2), (2, 3), (0, 3)}, (8, 8, 8, 8)),   # cycle
    ({(0, 1), (0, 2), (1, 2), (0, 3)}, (11, 10, 10, 9)),  # tailed triangle
    ({(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)}, (13, 13, 12, 12)),  # diamond
    (set(_PAIRS4), (14, 14, 14, 14)),                   # complete
)


def _build_table(k: int, pairs, canonical):
    """Map every k-node edge mask to per-position orbits (None if not a
    connected graphlet), by matching against canonical graphs under all
    position permutations."""
    table: list[tuple[int, ...] | None] = [None] * (1 << len(pairs))
    for mask in range(1 << len(pairs)):
        edges = {pairs[bit] for bit in range(len(pairs)) if mask >> bit & 1}
        for canon_edges, orbits in canonical:
            if len(edges) != len(canon_edges):
                continue
            for perm in itertools.permutations(range(k)):
                mapped = {
                    (min(perm[a], perm[b]), max(perm[a], perm[b])) for a, b in canon_edges
                }
                if mapped == edges:
                    inv = [0] * k
                    for c, p in enumerate(perm):
                        inv[p] = c
                    table[mask] = tuple(orbits[inv[p]] for p in range(k))
                    break
            if table[mask] is not None:
                break
    return tuple(table)


_TABLE3 = _build_table(3, _PAIRS3, _CANONICAL3)
_TABLE4 = _build_table(4, _PAIRS4, _CANONICAL4)


def connected_subsets(adj: list[set[int]], k: int):
    """Yield every k-node subset inducing a connected subgraph exactly once."""
    n = len(adj)
    for v in range(n):
        ext = {u for u in adj[v] if u > v}
        yield from _extend([v], ext, v, adj, k)


def _extend(sub, ext, root, adj, k):
    if len(sub) == k:
        yield tuple(sub)
        return
    ext = set(ext)
    while ext:
        w = ext.pop()
        exclusive = {
            u
            for u in adj[w]
            if u > root and u not in sub and not any(u in adj[s] for s in sub)
        }
        yield from _extend(sub + [w], ext | exclusive, root, adj, k)


def _subset_mask(nodes, adj, pairs) -> int:
    mask = 0
    for bit, (a, b) in enumerate(pairs):
        if nodes[b] in adj[nodes[a]]:
            mask |= 1 << bit
    return mask


def orbit_counts(g: Graph) -> np.ndarray:
    """Per-node counts of orbits 0..14, shape (n, 15), exact integers."""
    if g.n < 1:
        raise InputError("orbit counts need at least one node")
    counts = np.zeros((g.n, NUM_ORBITS), dtype=np.int64)
    counts[:, 0] = g.degrees()
    adj = [set() for _ in range(g.n)]
    for u, v in g.edges:
        adj[u].add(v)
        adj[v].add(u)
    for subset in connected_subsets(adj, 3):
        nodes = sorted(subset)
        orbits = _TABLE3[_subset_mask(nodes, adj, _PAIRS3)]
        for node, orbit in zip(nodes, orbits):
            counts[node, orbit] += 1
    for subset in connected_subsets(adj, 4):
        nodes = sorted(subset)
        orbits = _TABLE4[_subset_mask(nodes, adj, _PAIRS4)]
        for node, orbit in zip(nodes, orbits):
            counts[node, orbit] += 1
    return counts


def mean_orbit_counts(g: Graph) -> np.ndarray:
    """Graph-level descriptor: mean of the per-node orbit vectors."""
    return orbit_counts(g).mean(axis=0)
