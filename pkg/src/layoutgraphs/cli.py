"""Command-line pipeline: extract, synth, train, sample, eval, render.

Logs go to stderr, data to files or stdout.  Exit codes: 0 success, 1 input
error, 2 numeric failure.  Flags override values from the optional JSON
config file (``--config``); every output artifact embeds the tool version
and the seed that produced it.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from ._version import __version__
from .corpus import load_corpus, save_corpus
from .errors import InputError, LayoutGraphsError, NumericError
from .generators import CommunityParams, gen_community_corpus, gen_er
from .layout import build_visibility_graph, load_page
from .model import (
    GrnnHyperparams,
    TrainConfig,
    corpus_truncation_width,
    init_model,
    load_checkpoint,
    sample_graphs,
    save_checkpoint,
    train,
)
from .render import FORMATS, render
from .stats import (
    CLUSTERING_BINS,
    CLUSTERING_SIGMA,
    DEGREE_SIGMA,
    ORBIT_SIGMA,
    evaluate_sets,
)


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors (exit 1), not numeric failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _log(message: str) -> None:
    print(message, file=sys.stderr)


def _pick(args_value, config: dict, key: str, default):
    if args_value is not None:
        return args_value
    if key in config:
        return config[key]
    return default


def _stamp(seed) -> str:
    return f"layoutgraphs {__version__} seed={seed}"


def cmd_extract(args, config) -> int:
    in_dir = Path(args.annotations)
    if not in_dir.is_dir():
        raise InputError(f"annotation directory not found: {in_dir}")
    files = sorted(in_dir.glob("*.json"))
    threads = max(1, args.threads)
    graphs = []
    failures = 0

    def one(path):
        page = load_page(path)
        return build_visibility_graph(page)

    if threads > 1 and files:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = []
            for path, fut in [(p, pool.submit(one, p)) for p in files]:
                results.append((path, fut))
            for path, fut in results:
                try:
                    graphs.append(fut.result())
                except LayoutGraphsError as exc:
                    failures += 1
                    _log(f"extract: {path.name}: {exc}")
    else:
        for path in files:
            try:
                graphs.append(one(path))
            except LayoutGraphsError as exc:
                failures += 1
                _log(f"extract: {path.name}: {exc}")

    if not files:
        _log(f"extract: no annotation files in {in_dir}, writing empty corpus")
    save_corpus(graphs, args.out, header_comment=f"{_stamp(args.seed)} extract")
    _log(f"extract: wrote {len(graphs)} graphs to {args.out} ({failures} failures)")
    return 1 if failures else 0


def cmd_synth(args, config) -> int:
    kind = _pick(args.kind, config, "kind", "community")
    count = _pick(args.count, config, "count", 500)
    seed = args.seed
    rng = np.random.default_rng(seed)
    if kind == "community":
        params = CommunityParams(
            num_graphs=count,
            community_size_range=(
                _pick(args.size_lo, config, "size_lo", 6),
                _pick(args.size_hi, config, "size_hi", 10),
            ),
            p_intra=_pick(args.p_intra, config, "p_intra", 0.7),
            inter_edges=_pick(args.inter_edges, config, "inter_edges", 2),
        )
        graphs = gen_community_corpus(params, rng)
    elif kind == "er":
        n = _pick(args.n, config, "n", 20)
        p = _pick(args.p, config, "p", 0.2)
        graphs = [gen_er(n, p, rng) for _ in range(count)]
    else:
        raise InputError(f"unknown corpus kind {kind!r} (choose community or er)")
    save_corpus(graphs, args.out, header_comment=f"{_stamp(seed)} synth kind={kind}")
    _log(f"synth: wrote {len(graphs)} {kind} graphs to {args.out}")
    return 0


def cmd_train(args, config) -> int:
    graphs = load_corpus(args.corpus)
    if not graphs:
        raise InputError(f"corpus {args.corpus} is empty")
    seed = args.seed
    rng = np.random.default_rng(seed)
    cfg = TrainConfig(
        epochs=_pick(args.epochs, config, "epochs", 100),
        batch_size=_pick(args.batch_size, config, "batch_size", 32),
        base_lr=_pick(args.lr, config, "lr", 0.001),
        seed=seed,
        m=_pick(args.m, config, "m", None),
        n_max=_pick(args.n_max, config, "n_max", None),
        bandwidth_probes=_pick(args.probes, config, "probes", 10),
    )
    m = cfg.m if cfg.m is not None else corpus_truncation_width(graphs, rng, cfg.bandwidth_probes)
    n_max = cfg.n_max if cfg.n_max is not None else max(g.n for g in graphs)
    hp = GrnnHyperparams(
        m=m,
        n_max=n_max,
        graph_layers=_pick(args.graph_layers, config, "graph_layers", 4),
        graph_hidden=_pick(args.graph_hidden, config, "graph_hidden", 128),
        edge_layers=_pick(args.edge_layers, config, "edge_layers", 4),
        edge_hidden=_pick(args.edge_hidden, config, "edge_hidden", 16),
        head_hidden=_pick(args.head_hidden, config, "head_hidden", 8),
    )
    model = init_model(hp, seed)
    log_path = Path(args.log) if args.log else Path(str(args.checkpoint) + ".log")
    with log_path.open("w", encoding="utf-8") as log_fh:
        log_fh.write(f"# {_stamp(seed)} train m={m} n_max={n_max}\n")

        def on_epoch(epoch, lr, loss):
            line = f"epoch={epoch} lr={lr:.12g} loss={loss:.9f}"
            log_fh.write(line + "\n")
            _log(f"train: {line}")

        train(model, graphs, cfg, rng, on_epoch=on_epoch)
    save_checkpoint(model, args.checkpoint)
    _log(f"train: wrote checkpoint to {args.checkpoint} (loss log: {log_path})")
    return 0


def cmd_sample(args, config) -> int:
    model = load_checkpoint(args.checkpoint)
    count = _pick(args.count, config, "count", 1)
    graphs = sample_graphs(model, count, args.seed)
    save_corpus(graphs, args.out, header_comment=f"{_stamp(args.seed)} sample")
    _log(f"sample: wrote {len(graphs)} graphs to {args.out}")
    return 0


def cmd_eval(args, config) -> int:
    test = load_corpus(args.test)
    generated = load_corpus(args.generated)
    if not test or not generated:
        raise InputError("both corpora must be non-empty")
    report = evaluate_sets(
        test,
        generated,
        degree_sigma=_pick(args.degree_sigma, config, "degree_sigma", DEGREE_SIGMA),
        clustering_sigma=_pick(
            args.clustering_sigma, config, "clustering_sigma", CLUSTERING_SIGMA
        ),
        clustering_bins=_pick(args.clustering_bins, config, "clustering_bins", CLUSTERING_BINS),
        orbit_sigma=_pick(args.orbit_sigma, config, "orbit_sigma", ORBIT_SIGMA),
        orbit_node_level=args.orbit_node_level,
    )
    body = "\n".join(report.lines()) + "\n"
    sys.stdout.write(body)
    if args.json:
        sys.stdout.write(json.dumps(report.to_dict(), sort_keys=True) + "\n")
    out = Path(args.out)
    with out.open("w", encoding="utf-8") as fh:
        fh.write(f"# {_stamp(args.seed)} eval\n")
        fh.write(body)
        if args.json:
            fh.write(json.dumps(report.to_dict(), sort_keys=True) + "\n")
    return 0


def cmd_render(args, config) -> int:
    graphs = load_corpus(args.corpus)
    if not 0 <= args.index < len(graphs):
        raise InputError(f"index {args.index} out of range (corpus has {len(graphs)} graphs)")
    text = render(graphs[args.index], args.format, seed=args.seed)
    Path(args.out).write_text(text, encoding="utf-8")
    _log(f"render: wrote {args.format} drawing of graph {args.index} to {args.out}")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="layoutgraphs", description=__doc__)
    parser.add_argument("--version", action="version", version=f"layoutgraphs {__version__}")
    parser.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    parser.add_argument("--config", default=None, help="JSON config file with flag defaults")
    parser.add_argument("--threads", type=int, default=1, help="worker threads where supported")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="annotation directory -> visibility-graph corpus")
    p.add_argument("annotations", help="directory of page annotation JSON files")
    p.add_argument("--out", required=True, help="output corpus file")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("synth", help="generate a synthetic corpus")
    p.add_argument("--kind", choices=("community", "er"), default=None)
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--size-lo", dest="size_lo", type=int, default=None)
    p.add_argument("--size-hi", dest="size_hi", type=int, default=None)
    p.add_argument("--p-intra", dest="p_intra", type=float, default=None)
    p.add_argument("--inter-edges", dest="inter_edges", type=int, default=None)
    p.add_argument("--n", type=int, default=None, help="nodes per graph (er)")
    p.add_argument("--p", type=float, default=None, help="edge probability (er)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="train a generator on a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--checkpoint", required=True, help="output checkpoint path")
    p.add_argument("--log", default=None, help="loss log path (default: <checkpoint>.log)")
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--batch-size", dest="batch_size", type=int, default=None)
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--m", type=int, default=None, help="truncation width (default: auto)")
    p.add_argument("--n-max", dest="n_max", type=int, default=None)
    p.add_argument("--probes", type=int, default=None, help="BFS bandwidth probes per graph")
    p.add_argument("--graph-layers", dest="graph_layers", type=int, default=None)
    p.add_argument("--graph-hidden", dest="graph_hidden", type=int, default=None)
    p.add_argument("--edge-layers", dest="edge_layers", type=int, default=None)
    p.add_argument("--edge-hidden", dest="edge_hidden", type=int, default=None)
    p.add_argument("--head-hidden", dest="head_hidden", type=int, default=None)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("sample", help="sample graphs from a checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("eval", help="MMD report between two corpora")
    p.add_argument("--test", required=True)
    p.add_argument("--generated", required=True)
    p.add_argument("--out", default="mmd_report.txt")
    p.add_argument("--degree-sigma", dest="degree_sigma", type=float, default=None)
    p.add_argument("--clustering-sigma", dest="clustering_sigma", type=float, default=None)
    p.add_argument("--clustering-bins", dest="clustering_bins", type=int, default=None)
    p.add_argument("--orbit-sigma", dest="orbit_sigma", type=float, default=None)
    p.add_argument("--orbit-node-level", action="store_true")
    p.add_argument("--json", action="store_true", help="append a machine-readable block")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("render", help="draw one corpus graph")
    p.add_argument("--corpus", required=True)
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--format", choices=FORMATS, default="dot")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_render)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = {}
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                config = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            _log(f"error: config file {args.config}: {exc}")
            return 1
        if not isinstance(config, dict):
            _log(f"error: config file {args.config} must hold a JSON object")
            return 1
    try:
        return args.func(args, config)
    except NumericError as exc:
        _log(f"numeric error: {exc}")
        return 2
    except (InputError, OSError) as exc:
        _log(f"error: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
