"""Synthetic graph generators and corpus splitting."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .graphs import Graph
from .validation import check_graphs, check_rng


@dataclass(frozen=True)
class CommunityParams:
    """Knobs for the two-community construction."""

    num_graphs: int = 500
    community_size_range: tuple[int, int] = (6, 10)
    p_intra: float = 0.7
    inter_edges: int = 2

    def __post_init__(self):
        lo, hi = self.community_size_range
        if lo < 2 or hi < lo:
            raise InputError(f"invalid community size range [{lo}, {hi}]")
        if not 0.0 <= self.p_intra <= 1.0:
            raise InputError(f"p_intra must be in [0, 1], got {self.p_intra}")
        if self.inter_edges < 1:
            raise InputError("inter_edges must be >= 1")


def gen_er(n: int, p: float, rng) -> Graph:
    """Erdős–Rényi G(n, p): each of the C(n, 2) pairs is an edge w.p. ``p``."""
    if not 0.0 <= p <= 1.0:
        raise InputError(f"edge probability must be in [0, 1], got {p}")
    rng = check_rng(rng)
    edges = set()
    if n >= 2 and p > 0.0:
        iu, iv = np.triu_indices(n, k=1)
        mask = rng.random(iu.shape[0]) < p
        edges = {(int(u), int(v)) for u, v in zip(iu[mask], iv[mask])}
    return Graph.from_edges(n, edges)


def gen_two_community(params: CommunityParams, rng) -> Graph:
    """Two E-R communities joined by a fixed number of random cross edges.

    Community sizes are drawn independently from the configured range; the
    cross edges are distinct uniformly random pairs spanning the partition.
    """
    rng = check_rng(rng)
    lo, hi = params.community_size_range
    size_a = int(rng.integers(lo, hi + 1))
    size_b = int(rng.integers(lo, hi + 1))
    a = gen_er(size_a, params.p_intra, rng)
    b = gen_er(size_b, params.p_intra, rng)
    edges = set(a.edges)
    edges.update((u + size_a, v + size_a) for u, v in b.edges)
    n_cross = min(params.inter_edges, size_a * size_b)
    cross: set[tuple[int, int]] = set()
    while len(cross) < n_cross:
        u = int(rng.integers(0, size_a))
        v = size_a + int(rng.integers(0, size_b))
        cross.add((u, v))
    edges.update(cross)
    return Graph.from_edges(size_a + size_b, edges)


def gen_community_corpus(params: CommunityParams, rng) -> list[Graph]:
    rng = check_rng(rng)
    return [gen_two_community(params, rng) for _ in range(params.num_graphs)]


def split(corpus, train_fraction: float = 0.7, rng=None) -> tuple[list[Graph], list[Graph]]:
    """Shuffle and split into (train, test); train gets floor(fraction * N)."""
    corpus = check_graphs(corpus)
    if len(corpus) < 2:
        raise InputError("need at least 2 graphs to split")
    if not 0.0 < train_fraction < 1.0:
        raise InputError(f"train_fraction must be in (0, 1), got {train_fraction}")
    rng = check_rng(rng)
    idx = rng.permutation(len(corpus))
    cut = int(train_fraction * len(corpus))
    train = [corpus[i] for i in idx[:cut]]
    test = [corpus[i] for i in idx[cut:]]
    return train, test
