"""File-based pipeline stages: ingest, sim, embed-objects, train, link, eval.

Every stage reads its inputs from and persists its outputs to one output
directory, so stages can be run separately or end to end. All randomness
derives from a single seed hashed with the stage name, which makes reruns
byte-identical.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
from dataclasses import dataclass, field

from .embeddings import load_embeddings, save_embeddings, save_user_embeddings
from .evaluation import (
    DEFAULT_K_GRID,
    RankingResult,
    compute_metrics,
    link_networks,
    link_prefixed_table,
    load_ground_truth,
    save_rankings,
)
from .exceptions import InputError
from .factoid_embedding import FactoidTrainConfig, train
from .network import load_anchor_pairs, load_network
from .object_embedding import ObjectTrainConfig, embed_objects
from .similarity import (
    build_similarity_matrix,
    load_similarity_matrix,
    lsh_candidate_pairs,
    save_similarity_matrix,
    trigram_candidate_pairs,
)
from .unified import build_unified_network, load_unified, merge_anchor_pairs, save_unified

# Short predicate names accepted by --preds: (attribute key, predicate).
PREDICATE_CHOICES = {
    "username": ("username", "has_username"),
    "screen_name": ("screen_name", "has_screen_name"),
    "image": ("image_features", "has_image"),
    "name": ("name", "has_name"),
}

UNIFIED_FILE = "unified.jsonl"
USERS_FILE = "users.emb"
REPORT_FILE = "train_report.json"
RANKINGS_FILE = "rankings.csv"
METRICS_FILE = "metrics.json"


def derive_seed(seed, stage):
    """Stable per-stage RNG seed from the master seed and stage name."""
    digest = hashlib.sha256(f"{seed}:{stage}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass
class PipelineConfig:
    source_users: str = None
    source_edges: str = None
    target_users: str = None
    target_edges: str = None
    out_dir: str = "."
    preds: list = field(default_factory=lambda: ["username", "screen_name", "image"])
    anchors: str = None
    truth: str = None
    seed: int = 0
    dim_obj: int = 32
    obj_learning_rate: float = 0.05
    obj_epochs: int = 100
    dim_user: int = 64
    negatives: int = 5
    learning_rate: float = 0.025
    batch_size: int = 256
    epochs: int = 50
    w_update_period: int = 100
    norm_cap: float = 1.0
    lsh_tables: int = None
    lsh_bits: int = None
    top_k: int = 30

    def __post_init__(self):
        unknown = [p for p in self.preds if p not in PREDICATE_CHOICES]
        if unknown:
            raise InputError(f"unknown predicates {unknown}; choose from {sorted(PREDICATE_CHOICES)}")

    def predicate_map(self):
        return {PREDICATE_CHOICES[p][0]: PREDICATE_CHOICES[p][1] for p in self.preds}

    def path(self, name):
        return os.path.join(self.out_dir, name)


def _ensure_out_dir(cfg):
    os.makedirs(cfg.out_dir, exist_ok=True)


def stage_ingest(cfg):
    """Load both networks, build the unified network, merge anchors."""
    _ensure_out_dir(cfg)
    allowed = tuple(cfg.predicate_map())
    source = load_network(cfg.source_users, cfg.source_edges, "source", allowed_attrs=allowed)
    target = load_network(cfg.target_users, cfg.target_edges, "target", allowed_attrs=allowed)
    net = build_unified_network(source, target, predicate_map=cfg.predicate_map())
    if cfg.anchors:
        net = merge_anchor_pairs(net, load_anchor_pairs(cfg.anchors))
    save_unified(net, cfg.path(UNIFIED_FILE))
    return net


def stage_sim(cfg, net=None):
    """Build and persist one sparse similarity matrix per predicate."""
    if net is None:
        net = load_unified(cfg.path(UNIFIED_FILE))
    matrices = {}
    for predicate, objects in net.object_catalog.items():
        if objects and objects[0].is_text:
            candidates = trigram_candidate_pairs([obj.text for obj in objects])
        else:
            kwargs = {}
            if cfg.lsh_tables is not None:
                kwargs["tables"] = cfg.lsh_tables
            if cfg.lsh_bits is not None:
                kwargs["bits"] = cfg.lsh_bits
            candidates = lsh_candidate_pairs(
                [obj.feature_vector for obj in objects],
                seed=derive_seed(cfg.seed, f"sim:{predicate}"),
                **kwargs,
            )
        matrix = build_similarity_matrix(predicate, objects, candidates)
        save_similarity_matrix(matrix, cfg.path(f"sim_{predicate}.csv"))
        matrices[predicate] = matrix
    return matrices


def stage_embed_objects(cfg, net=None, matrices=None):
    """Train object embeddings per predicate from the similarity matrices."""
    if net is None:
        net = load_unified(cfg.path(UNIFIED_FILE))
    if matrices is None:
        matrices = {
            predicate: load_similarity_matrix(cfg.path(f"sim_{predicate}.csv"))
            for predicate in net.object_catalog
        }
    tables = {}
    for predicate, matrix in matrices.items():
        obj_cfg = ObjectTrainConfig(
            dim=cfg.dim_obj,
            learning_rate=cfg.obj_learning_rate,
            epochs=cfg.obj_epochs,
            seed=derive_seed(cfg.seed, f"embed:{predicate}"),
        )
        table = embed_objects(matrix, obj_cfg)
        save_embeddings(table, cfg.path(f"objects_{predicate}.emb"))
        tables[predicate] = table
    return tables


def stage_train(cfg, net=None, object_tables=None):
    """Train user embeddings and persist them with the training report."""
    if net is None:
        net = load_unified(cfg.path(UNIFIED_FILE))
    if object_tables is None:
        object_tables = {
            predicate: load_embeddings(cfg.path(f"objects_{predicate}.emb"), id_parser=int)
            for predicate in net.object_catalog
        }
    train_cfg = FactoidTrainConfig(
        dim=cfg.dim_user,
        negatives=cfg.negatives,
        learning_rate=cfg.learning_rate,
        batch_size=cfg.batch_size,
        epochs=cfg.epochs,
        w_update_period=cfg.w_update_period,
        norm_cap=cfg.norm_cap,
        seed=derive_seed(cfg.seed, "train"),
    )
    table, report = train(net, object_tables, train_cfg)
    save_user_embeddings(table, net, cfg.path(USERS_FILE))
    with open(cfg.path(REPORT_FILE), "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return table, report


def stage_link(cfg, net=None, table=None):
    """Rank all target users per source user; persist top-k rows."""
    if table is not None and net is not None:
        rankings = link_networks(net, table)
    else:
        rankings = link_prefixed_table(load_embeddings(cfg.path(USERS_FILE)))
    save_rankings(rankings, cfg.path(RANKINGS_FILE), top_k=cfg.top_k)
    return rankings


def load_rankings(path):
    """Read a rankings CSV back into RankingResult objects."""
    per_source = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["source_id", "rank", "target_id", "score"]:
            raise InputError(f"{path}: unexpected header {header!r}")
        for row in reader:
            if not row:
                continue
            source_id, rank, target_id, score = row
            per_source.setdefault(source_id, []).append((int(rank), target_id, float(score)))
    rankings = {}
    for source_id, rows in per_source.items():
        rows.sort()
        rankings[source_id] = RankingResult(source_id, [(t, s) for _, t, s in rows])
    return rankings


def stage_eval(cfg, rankings=None, ks=DEFAULT_K_GRID):
    """Compute HR@K / MRR against the ground-truth pairs."""
    if not cfg.truth:
        raise InputError("eval requires a ground-truth file (--truth)")
    if rankings is None:
        rankings = load_rankings(cfg.path(RANKINGS_FILE))
    truth = load_ground_truth(cfg.truth)
    metrics = compute_metrics(rankings, truth, ks=ks)
    with open(cfg.path(METRICS_FILE), "w", encoding="utf-8") as fh:
        json.dump(metrics.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return metrics


def run_pipeline(cfg):
    """Run every stage in order; returns the Metrics (or None without truth).

    Metrics are computed from the full in-memory rankings, not from the
    truncated rankings CSV.
    """
    net = stage_ingest(cfg)
    matrices = stage_sim(cfg, net)
    object_tables = stage_embed_objects(cfg, net, matrices)
    table, _report = stage_train(cfg, net, object_tables)
    rankings = stage_link(cfg, net, table)
    if cfg.truth:
        return stage_eval(cfg, rankings)
    return None
