"""Command-line entry point.

Subcommands mirror the pipeline stages (ingest, sim, embed-objects, train,
link, eval), plus synth for benchmark data and pipeline to run everything.
Exit codes: 0 ok, 2 input error, 3 numeric divergence.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .evaluation import compute_metrics, load_ground_truth, name_baseline, save_rankings
from .exceptions import DivergenceError, InputError
from .network import load_network, write_network
from .pipeline import (
    PREDICATE_CHOICES,
    PipelineConfig,
    run_pipeline,
    stage_embed_objects,
    stage_eval,
    stage_ingest,
    stage_link,
    stage_sim,
    stage_train,
)
from .synthetic import generate_synthetic_pair

THREADS_ENV = "FACTOIDLINK_THREADS"


def _apply_thread_cap():
    value = os.environ.get(THREADS_ENV)
    if not value:
        return
    try:
        threads = max(1, int(value))
    except ValueError:
        raise InputError(f"{THREADS_ENV} must be an integer, got {value!r}")
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS", "NUMBA_NUM_THREADS"):
        os.environ.setdefault(var, str(threads))


def _add_input_args(parser):
    parser.add_argument("--source-users", required=True, help="source users JSONL")
    parser.add_argument("--source-edges", required=True, help="source edges CSV")
    parser.add_argument("--target-users", required=True, help="target users JSONL")
    parser.add_argument("--target-edges", required=True, help="target edges CSV")
    parser.add_argument(
        "--preds",
        default="username,screen_name,image",
        help=f"comma-separated predicates from {sorted(PREDICATE_CHOICES)}",
    )
    parser.add_argument("--anchors", default=None, help="known matching pairs CSV (semi-supervised)")


def _add_common_args(parser):
    parser.add_argument("--out-dir", default=".", help="stage artifact directory")
    parser.add_argument("--seed", type=int, default=0, help="master seed for all stages")


def _add_model_args(parser):
    parser.add_argument("--dim-obj", type=int, default=32, help="object embedding dimension")
    parser.add_argument("--dim-user", type=int, default=64, help="user embedding dimension")
    parser.add_argument("--neg", type=int, default=5, help="negative samples per factoid")
    parser.add_argument("--epochs", type=int, default=50, help="training epochs")
    parser.add_argument("--obj-epochs", type=int, default=100, help="object embedding epochs")
    parser.add_argument("--batch", type=int, default=256, help="factoids per batch")
    parser.add_argument("--lr", type=float, default=0.025, help="initial learning rate")
    parser.add_argument("--obj-lr", type=float, default=0.05, help="object embedding learning rate")
    parser.add_argument("--norm-cap", type=float, default=1.0, help="projection Frobenius norm cap")
    parser.add_argument("--w-update-period", type=int, default=100, help="batches between projection updates")
    parser.add_argument("--lsh-tables", type=int, default=None, help="LSH tables for vector blocking")
    parser.add_argument("--lsh-bits", type=int, default=None, help="LSH bits per table")


def _config(args):
    fields = {
        "out_dir": args.out_dir,
        "seed": args.seed,
    }
    for name, attr in [
        ("source_users", "source_users"), ("source_edges", "source_edges"),
        ("target_users", "target_users"), ("target_edges", "target_edges"),
        ("anchors", "anchors"), ("truth", "truth"), ("top_k", "top_k"),
        ("dim_obj", "dim_obj"), ("dim_user", "dim_user"),
        ("negatives", "neg"), ("epochs", "epochs"), ("obj_epochs", "obj_epochs"),
        ("batch_size", "batch"), ("learning_rate", "lr"), ("obj_learning_rate", "obj_lr"),
        ("norm_cap", "norm_cap"), ("w_update_period", "w_update_period"),
        ("lsh_tables", "lsh_tables"), ("lsh_bits", "lsh_bits"),
    ]:
        if hasattr(args, attr):
            fields[name] = getattr(args, attr)
    if hasattr(args, "preds"):
        fields["preds"] = [p.strip() for p in args.preds.split(",") if p.strip()]
    return PipelineConfig(**fields)


def cmd_ingest(args):
    net = stage_ingest(_config(args))
    print(f"unified network: {net.n_nodes} nodes, {len(net.factoids)} factoids")
    return 0


def cmd_sim(args):
    matrices = stage_sim(_config(args))
    for predicate, matrix in matrices.items():
        print(f"{predicate}: n={matrix.n} stored={len(matrix.entries)}")
    return 0


def cmd_embed_objects(args):
    tables = stage_embed_objects(_config(args))
    for predicate, table in tables.items():
        print(f"{predicate}: {len(table)} objects at dim {table.dim}")
    return 0


def cmd_train(args):
    _table, report = stage_train(_config(args))
    norms = ", ".join(f"{p}={v:.4f}" for p, v in report["final_w_norms"].items())
    print(f"trained user embeddings; projection norms: {norms}")
    return 0


def cmd_link(args):
    rankings = stage_link(_config(args))
    print(f"ranked targets for {len(rankings)} source users")
    return 0


def cmd_eval(args):
    metrics = stage_eval(_config(args))
    print(json.dumps(metrics.to_dict(), indent=2, sort_keys=True))
    return 0


def cmd_baseline(args):
    cfg = _config(args)
    os.makedirs(cfg.out_dir, exist_ok=True)
    attr = PREDICATE_CHOICES[args.name_pred][0]
    allowed = tuple(key for key, _ in PREDICATE_CHOICES.values())
    source = load_network(cfg.source_users, cfg.source_edges, "source", allowed_attrs=allowed)
    target = load_network(cfg.target_users, cfg.target_edges, "target", allowed_attrs=allowed)
    rankings = name_baseline(source, target, attr=attr)
    save_rankings(rankings, cfg.path("baseline_rankings.csv"), top_k=cfg.top_k)
    if cfg.truth:
        metrics = compute_metrics(rankings, load_ground_truth(cfg.truth))
        print(json.dumps(metrics.to_dict(), indent=2, sort_keys=True))
    return 0


def cmd_synth(args):
    os.makedirs(args.out_dir, exist_ok=True)
    edge_prob = args.edge_prob
    if args.mean_degree is not None:
        if args.n < 2:
            raise InputError("--mean-degree needs at least two users")
        edge_prob = min(1.0, args.mean_degree / (args.n - 1))
    source, target, truth = generate_synthetic_pair(
        args.n, edge_prob, args.overlap_frac, args.name_noise, args.feature_dim, args.seed
    )
    write_network(source, os.path.join(args.out_dir, "source_users.jsonl"),
                  os.path.join(args.out_dir, "source_edges.csv"))
    write_network(target, os.path.join(args.out_dir, "target_users.jsonl"),
                  os.path.join(args.out_dir, "target_edges.csv"))
    with open(os.path.join(args.out_dir, "truth.csv"), "w", encoding="utf-8") as fh:
        for source_id, target_id in truth:
            fh.write(f"{source_id},{target_id}\n")
    print(f"wrote synthetic pair: {args.n} users, {len(source.edges)}/{len(target.edges)} edges")
    return 0


def cmd_pipeline(args):
    metrics = run_pipeline(_config(args))
    if metrics is not None:
        print(json.dumps(metrics.to_dict(), indent=2, sort_keys=True))
    else:
        print("pipeline complete (no --truth given, metrics skipped)")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="factoidlink",
        description="Unsupervised cross-network user identity linkage via factoid embeddings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="build the unified network snapshot")
    _add_input_args(p)
    _add_common_args(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("sim", help="build per-predicate similarity matrices")
    _add_common_args(p)
    p.add_argument("--lsh-tables", type=int, default=None)
    p.add_argument("--lsh-bits", type=int, default=None)
    p.set_defaults(func=cmd_sim)

    p = sub.add_parser("embed-objects", help="train object embeddings")
    _add_common_args(p)
    p.add_argument("--dim-obj", type=int, default=32)
    p.add_argument("--obj-epochs", type=int, default=100)
    p.add_argument("--obj-lr", type=float, default=0.05)
    p.set_defaults(func=cmd_embed_objects)

    p = sub.add_parser("train", help="train user embeddings from factoids")
    _add_common_args(p)
    _add_model_args(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("link", help="rank target candidates per source user")
    _add_common_args(p)
    p.add_argument("--top-k", type=int, default=30, help="ranking rows kept per source")
    p.set_defaults(func=cmd_link)

    p = sub.add_parser("eval", help="score persisted rankings against ground truth")
    _add_common_args(p)
    p.add_argument("--truth", required=True, help="ground truth CSV")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("baseline", help="name-similarity baseline rankings")
    _add_input_args(p)
    _add_common_args(p)
    p.add_argument("--truth", default=None)
    p.add_argument("--top-k", type=int, default=30)
    p.add_argument("--name-pred", default="username", choices=[k for k in PREDICATE_CHOICES])
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("synth", help="generate a synthetic benchmark pair")
    _add_common_args(p)
    p.add_argument("--n", type=int, default=200, help="users per network")
    p.add_argument("--edge-prob", type=float, default=0.04)
    p.add_argument("--mean-degree", type=float, default=None, help="overrides --edge-prob")
    p.add_argument("--overlap-frac", type=float, default=0.8)
    p.add_argument("--name-noise", type=float, default=0.3)
    p.add_argument("--feature-dim", type=int, default=16)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("pipeline", help="run every stage end to end")
    _add_input_args(p)
    _add_common_args(p)
    _add_model_args(p)
    p.add_argument("--truth", default=None, help="ground truth CSV for metrics")
    p.add_argument("--top-k", type=int, default=30)
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv=None):
    try:
        _apply_thread_cap()
        args = build_parser().parse_args(argv)
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DivergenceError as exc:
        print(f"numeric divergence: {exc}", file=sys.stderr)
        return 3
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
