"""Document layouts as visibility graphs, an autoregressive graph generator,
and MMD-based evaluation of generated graph sets."""

from ._version import __version__
from .corpus import load_corpus, loads_corpus, save_corpus
from .errors import FormatError, InputError, LayoutGraphsError, NumericError
from .estimator import GraphRnnGenerator, VisibilityGraphTransformer
from .generators import CommunityParams, gen_community_corpus, gen_er, gen_two_community, split
from .graphs import (
    BfsSequence,
    Graph,
    bfs_bandwidth,
    bfs_order,
    graph_to_sequence,
    identity_ordering,
    relabel,
    sequence_to_graph,
)
from .layout import (
    CLASS_IDS,
    CLASS_NAMES,
    LayoutPage,
    Region,
    build_visibility_graph,
    content_histogram,
    load_page,
    node_features,
    visible_axis,
)
from .model import (
    GrnnHyperparams,
    GrnnModel,
    TrainConfig,
    corpus_truncation_width,
    forward_teacher_forced,
    init_model,
    load_checkpoint,
    sample_graph,
    sample_graphs,
    save_checkpoint,
    train,
    train_epoch,
)
from .orbits import mean_orbit_counts, orbit_counts
from .render import to_dot, to_graphml, to_svg
from .stats import (
    KernelSpec,
    MmdReport,
    clustering_coefficients,
    degree_histogram,
    evaluate_sets,
    mmd_squared,
    wasserstein1,
)

__all__ = [
    "__version__",
    "BfsSequence",
    "CLASS_IDS",
    "CLASS_NAMES",
    "CommunityParams",
    "FormatError",
    "Graph",
    "GraphRnnGenerator",
    "GrnnHyperparams",
    "GrnnModel",
    "InputError",
    "KernelSpec",
    "LayoutGraphsError",
    "LayoutPage",
    "MmdReport",
    "NumericError",
    "Region",
    "TrainConfig",
    "VisibilityGraphTransformer",
    "bfs_bandwidth",
    "bfs_order",
    "build_visibility_graph",
    "clustering_coefficients",
    "content_histogram",
    "corpus_truncation_width",
    "degree_histogram",
    "evaluate_sets",
    "forward_teacher_forced",
    "gen_community_corpus",
    "gen_er",
    "gen_two_community",
    "graph_to_sequence",
    "identity_ordering",
    "init_model",
    "load_checkpoint",
    "load_corpus",
    "load_page",
    "loads_corpus",
    "mean_orbit_counts",
    "mmd_squared",
    "node_features",
    "orbit_counts",
    "relabel",
    "sample_graph",
    "sample_graphs",
    "save_checkpoint",
    "save_corpus",
    "sequence_to_graph",
    "split",
    "to_dot",
    "to_graphml",
    "to_svg",
    "train",
    "train_epoch",
    "visible_axis",
    "wasserstein1",
]
