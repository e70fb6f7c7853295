import numpy as np
import pytest

from layoutgraphs.errors import InputError
from layoutgraphs.graphs import Graph
from layoutgraphs.orbits import connected_subsets, mean_orbit_counts, orbit_counts

from conftest import make_complete, make_path, make_star, random_er_graph
from oracles import orbit_counts_oracle


def adjacency_sets(g):
    adj = [set() for _ in range(g.n)]
    for u, v in g.edges:
        adj[u].add(v)
        adj[v].add(u)
    return adj


class TestConnectedSubsets:
    def test_path_triples(self):
        subsets = {tuple(sorted(s)) for s in connected_subsets(adjacency_sets(make_path(4)), 3)}
        assert subsets == {(0, 1, 2), (1, 2, 3)}

    def test_counts_match_brute_force(self, rng):
        from itertools import combinations

        for _ in range(20):
            g = random_er_graph(rng, int(rng.integers(4, 14)), 0.35)
            adj = adjacency_sets(g)
            for k in (3, 4):
                esu = sorted(tuple(sorted(s)) for s in connected_subsets(adj, k))
                assert len(esu) == len(set(esu)), "subset enumerated twice"
                brute = []
                for subset in combinations(range(g.n), k):
                    sub_adj = {
                        v: {u for u in adj[v] if u in subset} for v in subset
                    }
                    seen = {subset[0]}
                    stack = [subset[0]]
                    while stack:
                        for u in sub_adj[stack.pop()]:
                            if u not in seen:
                                seen.add(u)
                                stack.append(u)
                    if len(seen) == k:
                        brute.append(subset)
                assert esu == sorted(brute)


class TestOrbitCounts:
    def test_complete_four(self):
        counts = orbit_counts(make_complete(4))
        for v in range(4):
            assert counts[v, 14] == 1
            assert counts[v, 3] == 3
            assert counts[v, 0] == 3
        assert counts[:, 1:3].sum() == 0
        assert counts[:, 4:14].sum() == 0

    def test_edgeless(self):
        counts = orbit_counts(Graph(n=5))
        assert counts.shape == (5, 15)
        assert counts.sum() == 0

    def test_star_orbits(self):
        counts = orbit_counts(make_star(3))
        assert counts[0, 7] == 1  # center of the claw
        for leaf in (1, 2, 3):
            assert counts[leaf, 6] == 1
        assert counts[0, 2] == 3  # middle of each 3-path
        assert counts[0, 0] == 3

    def test_path_orbits(self):
        counts = orbit_counts(make_path(4))
        assert counts[0, 4] == 1 and counts[3, 4] == 1
        assert counts[1, 5] == 1 and counts[2, 5] == 1

    def test_orbit_zero_is_degree(self, rng):
        for _ in range(20):
            g = random_er_graph(rng, int(rng.integers(1, 25)), 0.3)
            assert np.array_equal(orbit_counts(g)[:, 0], g.degrees())

    def test_empty_graph_rejected(self):
        with pytest.raises(InputError):
            orbit_counts(Graph(n=0))

    def test_matches_exhaustive_oracle(self, rng):
        for _ in range(25):
            g = random_er_graph(rng, int(rng.integers(4, 18)), rng.uniform(0.1, 0.6))
            assert np.array_equal(orbit_counts(g), orbit_counts_oracle(g))

    def test_mean_orbit_counts(self):
        g = make_complete(4)
        mean = mean_orbit_counts(g)
        assert mean[14] == 1.0
        assert mean[0] == 3.0
