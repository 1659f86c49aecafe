"""Cosine ranking of target candidates and HR@K / MRR evaluation."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .exceptions import InputError
from .similarity import jaro_winkler

DEFAULT_K_GRID = (1, 2, 3, 4, 5, 10, 30)


@dataclass
class RankingResult:
    """Target candidates of one source user, best first.

    Scores are non-increasing; equal scores are ordered by ascending
    target id.
    """

    source_id: object
    ranked: list  # (target_id, score), descending score


@dataclass
class Metrics:
    hr_at_k: dict
    mrr: float
    n_pairs: int
    n_missing: int

    def to_dict(self):
        return {
            "hr": {str(k): v for k, v in self.hr_at_k.items()},
            "mrr": self.mrr,
            "n_pairs": self.n_pairs,
            "n_missing": self.n_missing,
        }


def _cosine_rows(matrix, row, candidate_rows):
    target = matrix[row]
    nt = np.linalg.norm(target)
    candidates = matrix[candidate_rows]
    norms = np.linalg.norm(candidates, axis=1)
    denom = nt * norms
    scores = np.zeros(len(candidate_rows))
    ok = denom > 0.0
    scores[ok] = (candidates[ok] @ target) / denom[ok]
    return scores


def rank_targets(table, source_id, target_ids):
    """Sort target ids by cosine similarity to one source user."""
    if source_id not in table:
        raise KeyError(source_id)
    if not target_ids:
        raise ValueError("no target candidates to rank")
    rows = [table.row_of(t) for t in target_ids]
    scores = _cosine_rows(table.matrix, table.row_of(source_id), rows)
    order = sorted(range(len(target_ids)), key=lambda p: (-scores[p], target_ids[p]))
    return RankingResult(source_id, [(target_ids[p], float(scores[p])) for p in order])


def link_networks(net, table, sources=None):
    """Rank every target-network identity for each source-network identity.

    Returns {source local_id: RankingResult over target local_ids}. An
    anchor-merged node takes part on both sides and scores 1.0 against
    itself.
    """
    target_members = sorted(net.members(net.target_id))
    if not target_members:
        raise InputError("target network has no users")
    target_locals = [local for local, _ in target_members]
    target_rows = [table.row_of(uid) for _, uid in target_members]

    rankings = {}
    for local, uid in sorted(net.members(net.source_id)):
        if sources is not None and local not in sources:
            continue
        scores = _cosine_rows(table.matrix, table.row_of(uid), target_rows)
        order = sorted(range(len(target_locals)), key=lambda p: (-scores[p], target_locals[p]))
        rankings[local] = RankingResult(local, [(target_locals[p], float(scores[p])) for p in order])
    return rankings


def link_prefixed_table(table):
    """Per-source rankings for a table keyed by src:/tgt: prefixed ids.

    This is the file-based twin of link_networks: the persisted user
    embedding format carries network membership in the id prefix.
    """
    sources = sorted(i[4:] for i in table.ids if i.startswith("src:"))
    targets = sorted(i[4:] for i in table.ids if i.startswith("tgt:"))
    if not targets:
        raise InputError("user embedding table has no tgt: rows")
    target_rows = [table.row_of(f"tgt:{t}") for t in targets]
    rankings = {}
    for local in sources:
        scores = _cosine_rows(table.matrix, table.row_of(f"src:{local}"), target_rows)
        order = sorted(range(len(targets)), key=lambda p: (-scores[p], targets[p]))
        rankings[local] = RankingResult(local, [(targets[p], float(scores[p])) for p in order])
    return rankings


def compute_metrics(rankings, truth, ks=DEFAULT_K_GRID):
    """HR@K and MRR of ground-truth pairs against per-source rankings.

    The rank of a pair is the 1-based position of the true target; a true
    target absent from the candidate list counts as a miss for every K and
    contributes 0 to MRR, reported via n_missing.
    """
    hits = {k: 0 for k in ks}
    reciprocal_sum = 0.0
    n_missing = 0
    for source_id, target_id in truth:
        if source_id not in rankings:
            raise InputError(f"no ranking for ground-truth source {source_id!r}")
        rank = None
        for position, (candidate, _score) in enumerate(rankings[source_id].ranked, start=1):
            if candidate == target_id:
                rank = position
                break
        if rank is None:
            n_missing += 1
            continue
        reciprocal_sum += 1.0 / rank
        for k in ks:
            if rank <= k:
                hits[k] += 1
    n_pairs = len(truth)
    if n_pairs == 0:
        raise InputError("empty ground truth")
    return Metrics(
        hr_at_k={k: hits[k] / n_pairs for k in ks},
        mrr=reciprocal_sum / n_pairs,
        n_pairs=n_pairs,
        n_missing=n_missing,
    )


def name_baseline(source_net, target_net, attr="username"):
    """Rank targets by Jaro-Winkler similarity of one text attribute.

    A user missing the attribute scores 0 against everything.
    """
    target_names = []
    for user in target_net.users:
        obj = user.attributes.get(attr)
        if obj is not None and not obj.is_text:
            raise InputError(f"attribute {attr!r} is not textual")
        target_names.append((user.local_id, obj.text.lower() if obj is not None else None))
    target_names.sort()

    rankings = {}
    for user in source_net.users:
        obj = user.attributes.get(attr)
        source_name = obj.text.lower() if obj is not None else None
        scored = []
        for target_id, target_name in target_names:
            if source_name is None or target_name is None:
                score = 0.0
            else:
                score = jaro_winkler(source_name, target_name)
            scored.append((target_id, score))
        scored.sort(key=lambda pair: (-pair[1], pair[0]))
        rankings[user.local_id] = RankingResult(user.local_id, scored)
    return rankings


def load_ground_truth(path):
    """Read ``source_id,target_id`` truth rows; pairs must be one-to-one."""
    pairs = []
    sources = set()
    targets = set()
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row:
                continue
            if len(row) != 2:
                raise InputError(f"{path}:{lineno}: expected 'source_id,target_id', got {row!r}")
            source_id, target_id = row[0].strip(), row[1].strip()
            if source_id in sources or target_id in targets:
                raise InputError(f"{path}:{lineno}: ground truth is not one-to-one")
            sources.add(source_id)
            targets.add(target_id)
            pairs.append((source_id, target_id))
    return pairs


def save_rankings(rankings, path, top_k=None):
    """Write ``source_id,rank,target_id,score`` rows, top_k per source."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["source_id", "rank", "target_id", "score"])
        for source_id in sorted(rankings):
            ranked = rankings[source_id].ranked
            if top_k is not None:
                ranked = ranked[:top_k]
            for position, (target_id, score) in enumerate(ranked, start=1):
                writer.writerow([source_id, position, target_id, repr(score)])
