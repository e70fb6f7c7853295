"""Undirected simple graphs, node orderings, and the BFS adjacency-sequence codec.

A graph is encoded, under a node ordering, as one binary adjacency vector per
node: row ``i`` records which of the ``min(i, m)`` most recently placed nodes
the node at position ``i`` connects to, most-recent-first (slot 0 is position
``i - 1``).  BFS orderings keep those vectors short because every neighbour of
a node is placed soon after it, which bounds the positional distance spanned
by any edge (the "bandwidth" of the ordering).
"""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

from .errors import FormatError, InputError
from .validation import check_ordering

Edge = tuple[int, int]


def _normalize_edge(u: int, v: int) -> Edge:
    u, v = int(u), int(v)
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph with optional per-node features and labels.

    ``edges`` holds unordered pairs normalized to (min, max); ``features``
    is either None or one equal-length vector of floats per node; ``labels``
    is either None or one small int per node.
    """

    n: int
    edges: frozenset[Edge] = field(default_factory=frozenset)
    features: tuple[tuple[float, ...], ...] | None = None
    labels: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.n < 0:
            raise InputError(f"node count must be non-negative, got {self.n}")
        edges = frozenset(_normalize_edge(u, v) for u, v in self.edges)
        object.__setattr__(self, "edges", edges)
        for u, v in edges:
            if u == v:
                raise InputError(f"self-loop at node {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise InputError(f"edge ({u}, {v}) out of range for n={self.n}")
        if self.features is not None:
            feats = tuple(tuple(float(x) for x in row) for row in self.features)
            if len(feats) != self.n:
                raise InputError(f"expected {self.n} feature vectors, got {len(feats)}")
            if feats and len({len(row) for row in feats}) > 1:
                raise InputError("feature vectors must all have the same length")
            object.__setattr__(self, "features", feats)
        if self.labels is not None:
            labels = tuple(int(c) for c in self.labels)
            if len(labels) != self.n:
                raise InputError(f"expected {self.n} labels, got {len(labels)}")
            object.__setattr__(self, "labels", labels)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], **kw) -> "Graph":
        return cls(n=n, edges=frozenset(_normalize_edge(u, v) for u, v in edges), **kw)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        return _normalize_edge(u, v) in self.edges

    def neighbors(self) -> list[list[int]]:
        """Adjacency lists, each sorted ascending."""
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        for lst in adj:
            lst.sort()
        return adj

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def adjacency_bitsets(self) -> list[int]:
        """Neighbourhoods as int bitmasks (bit v of entry u set iff u~v)."""
        bits = [0] * self.n
        for u, v in self.edges:
            bits[u] |= 1 << v
            bits[v] |= 1 << u
        return bits

    def is_connected(self) -> bool:
        if self.n <= 1:
            return True
        adj = self.neighbors()
        seen = bytearray(self.n)
        seen[0] = 1
        queue = deque([0])
        count = 1
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if not seen[v]:
                    seen[v] = 1
                    count += 1
                    queue.append(v)
        return count == self.n


@dataclass(frozen=True)
class BfsSequence:
    """Adjacency-vector sequence of a graph under some node ordering.

    ``rows[0]`` is empty; ``rows[i]`` (i >= 1) has length ``min(i, m)`` with
    slot t giving the connection bit to position ``i - 1 - t``.
    """

    n: int
    rows: tuple[tuple[int, ...], ...]
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise InputError(f"truncation width must be >= 1, got {self.m}")
        rows = tuple(tuple(int(b) for b in row) for row in self.rows)
        object.__setattr__(self, "rows", rows)
        if len(rows) != self.n:
            raise FormatError(f"expected {self.n} rows, got {len(rows)}")
        for i, row in enumerate(rows):
            want = min(i, self.m)
            if len(row) != want:
                raise FormatError(f"row {i} has length {len(row)}, expected {want}")
            if any(b not in (0, 1) for b in row):
                raise FormatError(f"row {i} contains non-binary entries")


def identity_ordering(n: int) -> tuple[int, ...]:
    return tuple(range(n))


def bfs_order(g: Graph, pi: Sequence[int]) -> tuple[int, ...]:
    """BFS visiting order seeded by the permutation ``pi``.

    Starts at ``pi[0]``; neighbours of a dequeued node are appended in
    ascending rank under ``pi``.  If the queue drains with nodes unvisited
    (disconnected graph) the lowest-rank unvisited node seeds the next tree.
    Pure and deterministic given (g, pi).
    """
    perm = check_ordering(g.n, pi)
    if g.n == 0:
        return ()
    rank = [0] * g.n
    for pos, node in enumerate(perm):
        rank[node] = pos
    adj = g.neighbors()
    for u in range(g.n):
        adj[u].sort(key=rank.__getitem__)
    visited = bytearray(g.n)
    order: list[int] = []
    queue: deque[int] = deque()
    for seed in perm:
        if visited[seed]:
            continue
        visited[seed] = 1
        queue.append(seed)
        while queue:
            u = queue.popleft()
            order.append(u)
            for v in adj[u]:
                if not visited[v]:
                    visited[v] = 1
                    queue.append(v)
    return tuple(order)


def relabel(g: Graph, order: Sequence[int]) -> Graph:
    """Relabel so the node at new index k is the old node ``order[k]``."""
    perm = check_ordering(g.n, order)
    pos = [0] * g.n
    for k, old in enumerate(perm):
        pos[old] = k
    edges = frozenset(_normalize_edge(pos[u], pos[v]) for u, v in g.edges)
    features = tuple(g.features[old] for old in perm) if g.features is not None else None
    labels = tuple(g.labels[old] for old in perm) if g.labels is not None else None
    return Graph(n=g.n, edges=edges, features=features, labels=labels)


def bfs_bandwidth(g: Graph, order: Sequence[int]) -> int:
    """Maximum positional distance |i - j| spanned by any edge under ``order``.

    Zero for edgeless graphs; the minimal lossless truncation width for this
    ordering.
    """
    perm = check_ordering(g.n, order)
    pos = [0] * g.n
    for k, old in enumerate(perm):
        pos[old] = k
    return max((abs(pos[u] - pos[v]) for u, v in g.edges), default=0)


def graph_to_sequence(g: Graph, order: Sequence[int], m: int) -> BfsSequence:
    """Encode ``g`` under ``order`` as adjacency vectors truncated to width ``m``.

    Position i connects to position j < i iff the original pair is an edge
    and i - j <= m; edges spanning further are silently dropped (use a width
    of at least ``bfs_bandwidth(g, order)`` for a lossless encoding).
    """
    perm = check_ordering(g.n, order)
    if m < 1:
        raise InputError(f"truncation width must be >= 1, got {m}")
    pos = [0] * g.n
    for k, old in enumerate(perm):
        pos[old] = k
    rows = [[0] * min(i, m) for i in range(g.n)]
    for u, v in g.edges:
        i, j = pos[u], pos[v]
        if i < j:
            i, j = j, i
        if i - j <= m:
            rows[i][i - j - 1] = 1
    return BfsSequence(n=g.n, rows=tuple(tuple(r) for r in rows), m=m)


def sequence_to_graph(s: BfsSequence) -> Graph:
    """Decode a sequence back to the unique graph it encodes under the identity ordering."""
    edges = set()
    for i, row in enumerate(s.rows):
        for t, bit in enumerate(row):
            if bit:
                edges.add((i - 1 - t, i))
    return Graph.from_edges(s.n, edges)
