import math

import numpy as np
import pytest

from layoutgraphs.errors import InputError
from layoutgraphs.graphs import Graph
from layoutgraphs.stats import (
    KernelSpec,
    clustering_coefficients,
    clustering_histogram,
    degree_histogram,
    evaluate_sets,
    mmd_squared,
    wasserstein1,
)

from conftest import make_complete, make_star, random_er_graph
from oracles import clustering_oracle, degree_histogram_oracle


class TestDegreeHistogram:
    def test_triangle(self):
        assert np.array_equal(degree_histogram(make_complete(3)), [0.0, 0.0, 1.0])

    def test_star(self):
        assert np.array_equal(degree_histogram(make_star(3)), [0.0, 0.75, 0.0, 0.25])

    def test_edgeless(self):
        assert np.array_equal(degree_histogram(Graph(n=5)), [1.0])

    def test_empty_graph_rejected(self):
        with pytest.raises(InputError):
            degree_histogram(Graph(n=0))

    def test_matches_oracle(self, rng):
        for _ in range(100):
            g = random_er_graph(rng, int(rng.integers(1, 51)), rng.uniform(0, 0.5))
            assert np.array_equal(degree_histogram(g), degree_histogram_oracle(g))


class TestClustering:
    def test_triangle_all_ones(self):
        assert np.array_equal(clustering_coefficients(make_complete(3)), [1.0, 1.0, 1.0])

    def test_star_all_zero(self):
        assert np.array_equal(clustering_coefficients(make_star(4)), np.zeros(5))

    def test_diamond(self):
        g = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)])
        coeffs = clustering_coefficients(g)
        # hubs (degree 3) sit on 2 of 3 possible neighbour pairs; rims close
        # their single pair
        assert coeffs[0] == pytest.approx(2 / 3)
        assert coeffs[1] == pytest.approx(2 / 3)
        assert coeffs[2] == coeffs[3] == 1.0
        assert np.allclose(coeffs, clustering_oracle(g))

    def test_matches_oracle(self, rng):
        for _ in range(100):
            g = random_er_graph(rng, int(rng.integers(2, 51)), rng.uniform(0, 0.4))
            assert np.allclose(clustering_coefficients(g), clustering_oracle(g), atol=1e-12)

    def test_histogram_normalized(self, rng):
        g = random_er_graph(rng, 20, 0.3)
        hist = clustering_histogram(g)
        assert hist.sum() == pytest.approx(1.0)
        assert len(hist) == 100


class TestWasserstein1:
    def test_identical(self):
        assert wasserstein1([0.5, 0.5], [0.5, 0.5]) == 0.0

    def test_adjacent_point_masses(self):
        assert wasserstein1([1.0, 0.0], [0.0, 1.0]) == 1.0

    def test_distance_three(self):
        assert wasserstein1([1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0]) == 3.0

    def test_zero_pads_shorter(self):
        assert wasserstein1([1.0], [0.0, 0.0, 0.0, 1.0]) == 3.0

    def test_rejects_unnormalized(self):
        with pytest.raises(InputError):
            wasserstein1([0.5, 0.2], [1.0, 0.0])

    def test_symmetry_and_triangle_inequality(self, rng):
        for _ in range(200):
            size = int(rng.integers(1, 12))
            hs = []
            for _ in range(3):
                h = rng.uniform(size=size)
                hs.append(h / h.sum())
            a, b, c = hs
            assert wasserstein1(a, b) == pytest.approx(wasserstein1(b, a), abs=1e-12)
            assert wasserstein1(a, c) <= wasserstein1(a, b) + wasserstein1(b, c) + 1e-9


class TestMmd:
    def test_identical_sets_zero(self, rng):
        descs = [rng.uniform(size=5) for _ in range(10)]
        descs = [d / d.sum() for d in descs]
        spec = KernelSpec("emd", 1.0)
        assert mmd_squared(descs, descs, spec, clamp=False) <= 1e-12
        assert mmd_squared(descs, descs, spec) >= 0.0

    def test_singleton_closed_form(self):
        x = np.array([1.0, 0.0, 0.0])
        y = np.array([0.0, 0.0, 1.0])
        spec = KernelSpec("emd", 1.0)
        k_xy = math.exp(-(2.0**2) / 2.0)
        assert mmd_squared([x], [y], spec) == pytest.approx(2 - 2 * k_xy, abs=1e-12)

    def test_constant_kernel_vanishes(self, rng):
        a = [rng.uniform(size=4) for _ in range(6)]
        b = [rng.uniform(size=4) for _ in range(9)]
        a = [h / h.sum() for h in a]
        b = [h / h.sum() for h in b]
        spec = KernelSpec("emd", 1e9)
        assert abs(mmd_squared(a, b, spec, clamp=False)) < 1e-9

    def test_symmetry(self, rng):
        spec = KernelSpec("euclidean", 2.0)
        a = [rng.normal(size=6) for _ in range(8)]
        b = [rng.normal(size=6) for _ in range(5)]
        assert mmd_squared(a, b, spec) == pytest.approx(mmd_squared(b, a, spec), abs=1e-12)

    def test_empty_set_rejected(self):
        with pytest.raises(InputError):
            mmd_squared([], [np.array([1.0])], KernelSpec("emd", 1.0))

    def test_euclidean_singletons(self):
        x = np.array([0.0, 0.0])
        y = np.array([3.0, 4.0])
        spec = KernelSpec("euclidean", 5.0)
        expected = 2 - 2 * math.exp(-(25.0) / (2 * 25.0))
        assert mmd_squared([x], [y], spec) == pytest.approx(expected, abs=1e-12)


class TestEvaluateSets:
    def test_identical_sets_all_zero(self, rng):
        graphs = [random_er_graph(rng, 10, 0.3) for _ in range(5)]
        report = evaluate_sets(graphs, graphs)
        assert report.degree_mmd == 0.0
        assert report.clustering_mmd == 0.0
        assert report.orbit_mmd == 0.0

    def test_triangles_vs_stars_closed_form(self):
        test = [make_complete(3)] * 50
        generated = [make_star(3)] * 50
        report = evaluate_sets(test, generated)
        # all descriptors within a set identical: MMD^2 = 2 - 2 k(a, b)
        emd = wasserstein1(degree_histogram(make_complete(3)), degree_histogram(make_star(3)))
        expected = 2 - 2 * math.exp(-(emd**2) / 2.0)
        # CDFs [0, 0, 1, 1] vs [0, .75, .75, 1] differ by .75 + .25
        assert emd == pytest.approx(1.0)
        assert report.degree_mmd == pytest.approx(expected, abs=1e-9)
        assert report.degree_mmd > 0.0

    def test_report_lines_format(self, rng):
        graphs = [random_er_graph(rng, 8, 0.4) for _ in range(4)]
        report = evaluate_sets(graphs, graphs)
        lines = report.lines()
        assert len(lines) == 3
        for line in lines:
            assert line.startswith("metric=")
            fields = dict(part.split("=") for part in line.split())
            assert set(fields) == {"metric", "value", "sigma", "bins", "nA", "nB"}
            assert fields["nA"] == "4"

    def test_kernel_overrides_recorded(self, rng):
        graphs = [random_er_graph(rng, 8, 0.4) for _ in range(4)]
        report = evaluate_sets(graphs, graphs, degree_sigma=2.5, clustering_bins=50)
        assert report.degree_sigma == 2.5
        assert report.clustering_bins == 50

    def test_node_level_orbit_flag(self, rng):
        a = [random_er_graph(rng, 8, 0.4) for _ in range(3)]
        b = [random_er_graph(rng, 8, 0.5) for _ in range(3)]
        r_mean = evaluate_sets(a, b)
        r_node = evaluate_sets(a, b, orbit_node_level=True)
        assert r_mean.orbit_mmd != r_node.orbit_mmd

    def test_empty_set_rejected(self, rng):
        with pytest.raises(InputError):
            evaluate_sets([], [random_er_graph(rng, 5, 0.5)])
