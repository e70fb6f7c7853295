"""Scikit-learn style facade over the generator and the visibility extractor.

``GraphRnnGenerator`` follows the fit/sample shape of sklearn's density
estimators (``KernelDensity``, ``GaussianMixture``): ``fit`` trains on a list
of graphs, ``sample`` draws new ones.  ``VisibilityGraphTransformer`` maps
``LayoutPage`` values to visibility graphs.  Both cooperate with
``get_params``/``set_params``/``clone``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .errors import InputError
from .graphs import Graph, bfs_order, graph_to_sequence, identity_ordering
from .layout import LayoutPage, build_visibility_graph
from .model import (
    GrnnHyperparams,
    TrainConfig,
    batch_loss,
    corpus_truncation_width,
    init_model,
    sample_graphs,
    train,
    with_stop_row,
)
from .validation import check_graphs


class GraphRnnGenerator(BaseEstimator):
    """Autoregressive graph generator trained on BFS adjacency sequences.

    Parameters
    ----------
    m : int or None
        Adjacency-vector truncation width; None derives it from the training
        corpus via random-start BFS bandwidth probes.
    n_max : int or None
        Maximum generable node count; None uses the largest training graph.
    epochs, batch_size, base_lr : optimization settings (base_lr decays by
        0.2 every 100 epochs).
    random_state : int or None
        Seeds initialization, orderings, and minibatch shuffling; None draws
        a seed from OS entropy (recorded in ``seed_``).
    """

    def __init__(
        self,
        m=None,
        n_max=None,
        graph_layers=4,
        graph_hidden=128,
        edge_layers=4,
        edge_hidden=16,
        head_hidden=8,
        epochs=100,
        batch_size=32,
        base_lr=0.001,
        bandwidth_probes=10,
        random_state=None,
    ):
        self.m = m
        self.n_max = n_max
        self.graph_layers = graph_layers
        self.graph_hidden = graph_hidden
        self.edge_layers = edge_layers
        self.edge_hidden = edge_hidden
        self.head_hidden = head_hidden
        self.epochs = epochs
        self.batch_size = batch_size
        self.base_lr = base_lr
        self.bandwidth_probes = bandwidth_probes
        self.random_state = random_state

    def fit(self, X, y=None):
        """Train on a list of Graph values; returns self."""
        graphs = check_graphs(X)
        if self.random_state is None:
            seed = int(np.random.SeedSequence().entropy % (2**32))
        else:
            seed = int(self.random_state)
        rng = np.random.default_rng(seed)

        m = self.m if self.m is not None else corpus_truncation_width(
            graphs, rng, self.bandwidth_probes
        )
        n_max = self.n_max if self.n_max is not None else max(g.n for g in graphs)
        for g in graphs:
            if g.n > n_max:
                raise InputError(f"graph with {g.n} nodes exceeds n_max={n_max}")

        hp = GrnnHyperparams(
            m=m,
            n_max=n_max,
            graph_layers=self.graph_layers,
            graph_hidden=self.graph_hidden,
            edge_layers=self.edge_layers,
            edge_hidden=self.edge_hidden,
            head_hidden=self.head_hidden,
        )
        model = init_model(hp, seed)
        model.seed = seed
        cfg = TrainConfig(
            epochs=self.epochs,
            batch_size=self.batch_size,
            base_lr=self.base_lr,
            seed=seed,
            m=m,
            n_max=n_max,
            bandwidth_probes=self.bandwidth_probes,
        )
        self.loss_history_ = train(model, graphs, cfg, rng)
        self.model_ = model
        self.m_ = m
        self.n_max_ = n_max
        self.seed_ = seed
        return self

    def _check_fitted(self):
        if not hasattr(self, "model_"):
            raise NotFittedError("fit the generator before sampling or scoring")

    def sample(self, n_samples: int = 1, random_state=None) -> list[Graph]:
        """Draw graphs from the fitted model; deterministic per seed."""
        self._check_fitted()
        seed = self.seed_ if random_state is None else random_state
        return sample_graphs(self.model_, n_samples, seed)

    def score(self, X, y=None) -> float:
        """Negative teacher-forced BCE on ``X`` under canonical (identity-seeded
        BFS) orderings; higher is better."""
        self._check_fitted()
        graphs = check_graphs(X)
        seqs = [
            with_stop_row(
                graph_to_sequence(g, bfs_order(g, identity_ordering(g.n)), self.m_)
            )
            for g in graphs
        ]
        loss, _ = batch_loss(self.model_, seqs)
        return -loss


class VisibilityGraphTransformer(TransformerMixin, BaseEstimator):
    """Stateless transformer from LayoutPage values to visibility graphs."""

    def __init__(self, max_vertical_gap_fraction=0.25, max_horizontal_gap_fraction=None):
        self.max_vertical_gap_fraction = max_vertical_gap_fraction
        self.max_horizontal_gap_fraction = max_horizontal_gap_fraction

    def fit(self, X, y=None):
        return self

    def transform(self, X) -> list[Graph]:
        out = []
        for i, page in enumerate(X):
            if not isinstance(page, LayoutPage):
                raise InputError(f"item {i} is not a LayoutPage: {type(page).__name__}")
            out.append(
                build_visibility_graph(
                    page,
                    self.max_vertical_gap_fraction,
                    self.max_horizontal_gap_fraction,
                )
            )
        return out
