"""Hierarchical recurrent graph generator over BFS adjacency sequences.

A graph-level GRU stack advances one step per node, consuming the previous
node's adjacency row (an all-ones start token at step 1).  Its top hidden
state, passed through a linear projection, initializes every layer of an
edge-level GRU stack that walks the current row bit by bit (previous bit as
input, 1 at the first slot) and emits a Bernoulli probability per slot
through a small relu/sigmoid head.

Training is teacher-forced on ground-truth rows, extended with one all-zero
"stop" row per sequence so the model also learns to terminate; sampling feeds
its own bits back and stops at the first all-zero sampled row.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._version import __version__
from .errors import FormatError, InputError, NumericError
from .graphs import BfsSequence, Graph, bfs_bandwidth, bfs_order, graph_to_sequence, sequence_to_graph
from .nn import (
    BCE_EPS,
    AdamState,
    GruStack,
    Linear,
    Mlp,
    adam_step,
    bce_loss_grad,
    lr_schedule,
    zero_grads,
)
from .validation import check_graphs, check_rng

CHECKPOINT_MAGIC = b"GRNN"
CHECKPOINT_VERSION = 1
INIT_POLICY = "uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)), zero biases"


@dataclass(frozen=True)
class GrnnHyperparams:
    """Architecture sizes; defaults follow the reference configuration."""

    m: int
    n_max: int
    graph_layers: int = 4
    graph_hidden: int = 128
    edge_layers: int = 4
    edge_hidden: int = 16
    head_hidden: int = 8

    def __post_init__(self):
        for name in ("m", "n_max", "graph_layers", "graph_hidden", "edge_layers",
                     "edge_hidden", "head_hidden"):
            if getattr(self, name) < 1:
                raise InputError(f"{name} must be positive, got {getattr(self, name)}")

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "n_max": self.n_max,
            "graph_layers": self.graph_layers,
            "graph_hidden": self.graph_hidden,
            "edge_layers": self.edge_layers,
            "edge_hidden": self.edge_hidden,
            "head_hidden": self.head_hidden,
        }


@dataclass
class TrainConfig:
    """Optimization settings; ``m``/``n_max`` of None mean "derive from corpus"."""

    epochs: int = 1
    batch_size: int = 32
    base_lr: float = 0.001
    seed: int | None = None
    m: int | None = None
    n_max: int | None = None
    bandwidth_probes: int = 10

    def __post_init__(self):
        if self.batch_size < 1:
            raise InputError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.epochs < 0:
            raise InputError(f"epochs must be >= 0, got {self.epochs}")
        if self.bandwidth_probes < 1:
            raise InputError(f"bandwidth_probes must be >= 1, got {self.bandwidth_probes}")


class GrnnModel:
    """All learnable parameters plus the hyperparameters they realize."""

    def __init__(self, hp: GrnnHyperparams, rng=None, seed: int | None = None):
        self.hp = hp
        self.seed = seed
        # rng consumption order defines the seeded init: graph stack, edge
        # stack, init projection, head (matrices in construction order).
        self.graph_rnn = GruStack(hp.graph_layers, hp.m, hp.graph_hidden, rng)
        self.edge_rnn = GruStack(hp.edge_layers, 1, hp.edge_hidden, rng)
        self.init_proj = Linear(hp.graph_hidden, hp.edge_hidden, rng)
        self.head = Mlp([hp.edge_hidden, hp.head_hidden, 1], ["relu", "sigmoid"], rng)

    @classmethod
    def zeros(cls, hp: GrnnHyperparams) -> "GrnnModel":
        return cls(hp, rng=None)

    def named_parameters(self) -> dict[str, np.ndarray]:
        params: dict[str, np.ndarray] = {}
        params.update(self.graph_rnn.named_params("graph"))
        params.update(self.edge_rnn.named_params("edge"))
        params.update(self.init_proj.named_params("init"))
        params.update(self.head.named_params("head"))
        return params

    def num_parameters(self) -> int:
        return sum(v.size for v in self.named_parameters().values())


def init_model(hp: GrnnHyperparams, seed) -> GrnnModel:
    """Seed-deterministic initialization per the engine's uniform policy."""
    rng = check_rng(seed)
    return GrnnModel(hp, rng=rng, seed=seed if isinstance(seed, int) else None)


def corpus_truncation_width(corpus, rng, probes: int = 10) -> int:
    """Conservative truncation width: max BFS bandwidth over ``probes``
    random-start BFS orderings of every graph (at least 1)."""
    corpus = check_graphs(corpus)
    rng = check_rng(rng)
    width = 1
    for g in corpus:
        if g.n < 2:
            continue
        for _ in range(probes):
            pi = tuple(int(v) for v in rng.permutation(g.n))
            width = max(width, bfs_bandwidth(g, bfs_order(g, pi)))
    return width


def with_stop_row(seq: BfsSequence) -> BfsSequence:
    """Append the all-zero termination row (a virtual trailing isolated node)."""
    stop = tuple([0] * min(seq.n, seq.m))
    return BfsSequence(n=seq.n + 1, rows=seq.rows + (stop,), m=seq.m)


def _pack_batch(seqs: list[BfsSequence], m: int):
    """Pad sequences to the batch-max step count.

    Returns (x, y, mask, e_in): graph-level inputs, target bits, valid-slot
    mask, and edge-level inputs, all (B, T, m); padded slots are masked out.
    """
    steps = [s.n - 1 for s in seqs]
    t_max = max(steps)
    batch = len(seqs)
    x = np.zeros((batch, t_max, m))
    y = np.zeros((batch, t_max, m))
    mask = np.zeros((batch, t_max, m), dtype=bool)
    for b, s in enumerate(seqs):
        x[b, 0, :] = 1.0  # start-of-sequence token
        for j in range(1, s.n):
            row = s.rows[j]
            y[b, j - 1, : len(row)] = row
            mask[b, j - 1, : len(row)] = True
            if j < s.n - 1:
                x[b, j, : len(row)] = row
    e_in = np.zeros((batch, t_max, m))
    e_in[:, :, 0] = 1.0  # first edge-level input
    e_in[:, :, 1:] = y[:, :, :-1]
    return x, y, mask, e_in


def _forward_batch(model: GrnnModel, x: np.ndarray, e_in: np.ndarray):
    """Teacher-forced forward over a packed batch.

    Returns (probs (B, T, T_edge), caches) where T_edge = min(T, m);
    probabilities are the raw head outputs (clamping happens at the
    consumer: emission or the BCE's internal clip).
    """
    batch, t_max, m = x.shape
    hp = model.hp
    t_edge = min(t_max, m)

    hs_g = model.graph_rnn.zero_state(batch)
    g_caches = []
    tops = np.empty((t_max, batch, hp.graph_hidden))
    for j in range(t_max):
        hs_g, caches = model.graph_rnn.step(x[:, j, :], hs_g)
        g_caches.append(caches)
        tops[j] = hs_g[-1]

    tops_flat = np.ascontiguousarray(tops.transpose(1, 0, 2)).reshape(
        batch * t_max, hp.graph_hidden
    )
    e0, lin_cache = model.init_proj.forward(tops_flat)

    hs_e = [e0.copy() for _ in range(hp.edge_layers)]
    e_caches = []
    e_tops = np.empty((t_edge, batch * t_max, hp.edge_hidden))
    e_in_flat = e_in.reshape(batch * t_max, m)
    for t in range(t_edge):
        hs_e, caches = model.edge_rnn.step(e_in_flat[:, t : t + 1], hs_e)
        e_caches.append(caches)
        e_tops[t] = hs_e[-1]

    head_in = np.ascontiguousarray(e_tops.transpose(1, 0, 2)).reshape(
        batch * t_max * t_edge, hp.edge_hidden
    )
    p_flat, head_cache = model.head.forward(head_in)
    probs = p_flat.reshape(batch, t_max, t_edge)
    caches = (g_caches, lin_cache, e_caches, head_cache, x.shape, t_edge)
    return probs, caches


def _backward_batch(model: GrnnModel, caches, d_probs: np.ndarray, grads) -> None:
    """Reverse pass matching ``_forward_batch``; accumulates into ``grads``."""
    g_caches, lin_cache, e_caches, head_cache, (batch, t_max, m), t_edge = caches
    hp = model.hp

    d_head_in = model.head.backward(
        head_cache, d_probs.reshape(batch * t_max * t_edge, 1), grads, "head"
    )
    d_e_tops = np.ascontiguousarray(
        d_head_in.reshape(batch * t_max, t_edge, hp.edge_hidden).transpose(1, 0, 2)
    )

    carries = [np.zeros((batch * t_max, hp.edge_hidden)) for _ in range(hp.edge_layers)]
    for t in reversed(range(t_edge)):
        d_hs = carries
        d_hs[-1] = d_hs[-1] + d_e_tops[t]
        _, carries = model.edge_rnn.backward_step(e_caches[t], d_hs, grads, "edge")
    d_e0 = carries[0]
    for carry in carries[1:]:
        d_e0 = d_e0 + carry

    d_tops_flat = model.init_proj.backward(lin_cache, d_e0, grads, "init")
    d_tops = np.ascontiguousarray(
        d_tops_flat.reshape(batch, t_max, hp.graph_hidden).transpose(1, 0, 2)
    )

    g_carries = [np.zeros((batch, hp.graph_hidden)) for _ in range(hp.graph_layers)]
    for j in reversed(range(t_max)):
        d_hs = g_carries
        d_hs[-1] = d_hs[-1] + d_tops[j]
        _, g_carries = model.graph_rnn.backward_step(g_caches[j], d_hs, grads, "graph")


def batch_loss_and_grads(model: GrnnModel, seqs: list[BfsSequence]):
    """Masked mean BCE over a batch of sequences plus gradients for every parameter."""
    for s in seqs:
        if s.m != model.hp.m:
            raise InputError(f"sequence width {s.m} does not match model width {model.hp.m}")
    x, y, mask, e_in = _pack_batch(seqs, model.hp.m)
    probs, caches = _forward_batch(model, x, e_in)
    t_edge = probs.shape[2]
    loss, d_probs = bce_loss_grad(probs, y[:, :, :t_edge], mask[:, :, :t_edge])
    grads = zero_grads(model.named_parameters())
    _backward_batch(model, caches, d_probs, grads)
    return loss, int(mask.sum()), grads


def batch_loss(model: GrnnModel, seqs: list[BfsSequence]):
    """Forward-only masked mean BCE (plus slot count) over a batch."""
    x, y, mask, e_in = _pack_batch(seqs, model.hp.m)
    probs, _ = _forward_batch(model, x, e_in)
    t_edge = probs.shape[2]
    loss, _ = bce_loss_grad(probs, y[:, :, :t_edge], mask[:, :, :t_edge])
    return loss, int(mask.sum())


def forward_teacher_forced(model: GrnnModel, seq: BfsSequence):
    """Edge probabilities for one sequence's ground-truth rows.

    Returns (probs, mask), both (n-1, m); slot (i-1, t) is P(bit t of row i
    = 1) and is valid where t < min(i, m).  A 1-node sequence yields empty
    arrays.  Emitted probabilities are clamped into (0, 1).
    """
    if seq.m != model.hp.m:
        raise InputError(f"sequence width {seq.m} does not match model width {model.hp.m}")
    m = model.hp.m
    if seq.n <= 1:
        return np.zeros((0, m)), np.zeros((0, m), dtype=bool)
    x, _, mask, e_in = _pack_batch([seq], m)
    probs, _ = _forward_batch(model, x, e_in)
    t_edge = probs.shape[2]
    out = np.zeros((seq.n - 1, m))
    out[:, :t_edge] = np.clip(probs[0], BCE_EPS, 1.0 - BCE_EPS)
    out[~mask[0]] = 0.0
    return out, mask[0]


def encode_training_sequence(g: Graph, rng, m: int) -> BfsSequence:
    """Fresh random-permutation BFS ordering, encoded and stop-row extended."""
    pi = tuple(int(v) for v in check_rng(rng).permutation(g.n))
    return with_stop_row(graph_to_sequence(g, bfs_order(g, pi), m))


def train_epoch(
    model: GrnnModel,
    corpus,
    cfg: TrainConfig,
    rng,
    epoch: int = 0,
    opt_state: AdamState | None = None,
) -> float:
    """One pass over the corpus; returns the masked mean BCE across the epoch.

    Per epoch the corpus order is reshuffled and every graph gets a fresh
    BFS ordering, both drawn from ``rng`` (shuffle first, then one
    permutation per graph in shuffled order); minibatches are consecutive
    chunks of ``cfg.batch_size`` and each takes one Adam step at the
    scheduled learning rate.  Deterministic given the rng state.
    """
    corpus = check_graphs(corpus)
    rng = check_rng(rng)
    if opt_state is None:
        opt_state = AdamState(model.named_parameters())
    for g in corpus:
        if g.n < 1:
            raise InputError("cannot train on an empty graph")
        if g.n > model.hp.n_max:
            raise InputError(f"graph with {g.n} nodes exceeds n_max={model.hp.n_max}")
    lr = lr_schedule(cfg.base_lr, epoch)
    order = [int(i) for i in rng.permutation(len(corpus))]
    seqs = [encode_training_sequence(corpus[i], rng, model.hp.m) for i in order]
    params = model.named_parameters()
    total = 0.0
    slots = 0
    for lo in range(0, len(seqs), cfg.batch_size):
        batch = seqs[lo : lo + cfg.batch_size]
        loss, count, grads = batch_loss_and_grads(model, batch)
        if not np.isfinite(loss):
            raise NumericError(f"non-finite training loss at epoch {epoch}")
        adam_step(params, grads, opt_state, lr)
        total += loss * count
        slots += count
    return total / slots


def train(model: GrnnModel, corpus, cfg: TrainConfig, rng, on_epoch=None) -> list[float]:
    """Run ``cfg.epochs`` epochs with one persistent Adam state; returns per-epoch losses."""
    rng = check_rng(rng)
    opt_state = AdamState(model.named_parameters())
    losses = []
    for epoch in range(cfg.epochs):
        loss = train_epoch(model, corpus, cfg, rng, epoch=epoch, opt_state=opt_state)
        losses.append(loss)
        if on_epoch is not None:
            on_epoch(epoch, lr_schedule(cfg.base_lr, epoch), loss)
    return losses


def sample_graph(model: GrnnModel, rng) -> Graph:
    """Autoregressively sample one graph.

    Each node step seeds the edge stack from the projected graph state and
    samples the row bit by bit, feeding each sampled bit back in; the row
    then becomes the next graph-level input.  Generation stops at the first
    all-zero sampled row (that node is not added) or at ``n_max`` nodes.
    """
    rng = check_rng(rng)
    hp = model.hp
    m = hp.m
    rows: list[tuple[int, ...]] = [()]
    hs_g = model.graph_rnn.zero_state(1)
    x = np.ones((1, m))
    for i in range(1, hp.n_max):
        hs_g, _ = model.graph_rnn.step(x, hs_g)
        e0, _ = model.init_proj.forward(hs_g[-1])
        hs_e = [e0.copy() for _ in range(hp.edge_layers)]
        width = min(i, m)
        bits = []
        prev = 1.0
        for _t in range(width):
            hs_e, _ = model.edge_rnn.step(np.array([[prev]]), hs_e)
            p_raw, _ = model.head.forward(hs_e[-1])
            p = float(np.clip(p_raw[0, 0], BCE_EPS, 1.0 - BCE_EPS))
            bit = 1 if rng.random() < p else 0
            bits.append(bit)
            prev = float(bit)
        if not any(bits):
            break
        rows.append(tuple(bits))
        x = np.zeros((1, m))
        x[0, :width] = bits
    return sequence_to_graph(BfsSequence(n=len(rows), rows=tuple(rows), m=m))


def sample_graphs(model: GrnnModel, count: int, seed) -> list[Graph]:
    """Sample ``count`` graphs from independent per-sample generator streams."""
    if count < 0:
        raise InputError(f"count must be >= 0, got {count}")
    children = np.random.SeedSequence(seed).spawn(count)
    return [sample_graph(model, np.random.default_rng(c)) for c in children]


def save_checkpoint(model: GrnnModel, path) -> None:
    """Bit-exact binary checkpoint: magic, version, JSON metadata, raw float64 arrays.

    The metadata carries the hyperparameters and a (name, shape) manifest in
    the exact order the arrays follow, so the payload is self-describing.
    """
    params = model.named_parameters()
    meta = {
        "tool": "layoutgraphs",
        "tool_version": __version__,
        "hyperparams": model.hp.to_dict(),
        "m": model.hp.m,
        "n_max": model.hp.n_max,
        "seed": model.seed,
        "init_policy": INIT_POLICY,
        "params": [{"name": k, "shape": list(v.shape)} for k, v in params.items()],
    }
    blob = json.dumps(meta, sort_keys=True).encode("utf-8")
    path = Path(path)
    with path.open("wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<I", CHECKPOINT_VERSION))
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        for arr in params.values():
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def load_checkpoint(path) -> GrnnModel:
    path = Path(path)
    with path.open("rb") as fh:
        data = fh.read()
    if len(data) < 12 or data[:4] != CHECKPOINT_MAGIC:
        raise FormatError(f"{path.name}: not a GRNN checkpoint (bad magic)")
    (version,) = struct.unpack("<I", data[4:8])
    if version != CHECKPOINT_VERSION:
        raise FormatError(f"{path.name}: unsupported checkpoint version {version}")
    (meta_len,) = struct.unpack("<I", data[8:12])
    if len(data) < 12 + meta_len:
        raise FormatError(f"{path.name}: truncated metadata block")
    try:
        meta = json.loads(data[12 : 12 + meta_len].decode("utf-8"))
        hp = GrnnHyperparams(**meta["hyperparams"])
        manifest = meta["params"]
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise FormatError(f"{path.name}: malformed checkpoint metadata ({exc})") from exc
    model = GrnnModel.zeros(hp)
    model.seed = meta.get("seed")
    params = model.named_parameters()
    if [entry["name"] for entry in manifest] != list(params.keys()):
        raise FormatError(f"{path.name}: parameter manifest does not match hyperparameters")
    offset = 12 + meta_len
    for entry in manifest:
        arr = params[entry["name"]]
        if list(arr.shape) != list(entry["shape"]):
            raise FormatError(
                f"{path.name}: shape mismatch for {entry['name']}:"
                f" manifest {entry['shape']} vs model {list(arr.shape)}"
            )
        nbytes = arr.size * 8
        if offset + nbytes > len(data):
            raise FormatError(f"{path.name}: truncated parameter payload")
        arr[...] = np.frombuffer(data[offset : offset + nbytes], dtype="<f8").reshape(arr.shape)
        offset += nbytes
    if offset != len(data):
        raise FormatError(f"{path.name}: {len(data) - offset} trailing bytes after payload")
    return model
