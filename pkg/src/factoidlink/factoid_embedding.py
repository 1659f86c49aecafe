"""User embedding training over factoids with negative sampling.

Each observed factoid is scored against K sampled "fake" subjects drawn
from a noise distribution: uniform for user-object factoids, out-degree
powered for follows factoids. Gradient ascent pushes a subject toward the
projected context and the fakes away from it. Per-predicate linear
projections map object space into user space and keep a bounded Frobenius
norm so similar objects land near each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .embeddings import EmbeddingTable
from .exceptions import DivergenceError, InputError
from .unified import FOLLOWS

OUT_DEGREE_POWER = 0.75


def sigmoid(x):
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def log_sigmoid(x):
    # stable on both tails: min(x, 0) - log(1 + exp(-|x|))
    return min(x, 0.0) - math.log1p(math.exp(-abs(x)))


@dataclass
class ProjectionParams:
    """Linear map W v + b from object space into user space.

    The Frobenius norm of W is kept at or below norm_cap, which bounds the
    Lipschitz constant of the projection.
    """

    predicate: str
    W: np.ndarray
    b: np.ndarray
    norm_cap: float = 1.0

    def __post_init__(self):
        self.W = np.ascontiguousarray(self.W, dtype=np.float64)
        self.b = np.ascontiguousarray(self.b, dtype=np.float64)
        if self.W.ndim != 2 or self.b.shape != (self.W.shape[0],):
            raise ValueError("W must be (m_user, m_obj) and b (m_user,)")
        if self.norm_cap <= 0:
            raise ValueError("norm_cap must be positive")

    @property
    def norm(self):
        return float(np.linalg.norm(self.W))

    def rescale_to_cap(self):
        norm = self.norm
        if norm > self.norm_cap:
            self.W *= self.norm_cap / norm


def initial_projection(predicate, m_user, m_obj, norm_cap):
    """Identity padded/truncated to shape, rescaled to min(cap, its norm)."""
    W = np.zeros((m_user, m_obj))
    d = min(m_user, m_obj)
    W[:d, :d] = np.eye(d)
    target = min(norm_cap, np.sqrt(d))
    W *= target / np.sqrt(d)
    return ProjectionParams(predicate, W, np.zeros(m_user), norm_cap)


def project(params, v):
    """Apply the projection to one object-or-user vector."""
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (params.W.shape[1],):
        raise ValueError(f"vector of dim {v.shape} does not match W columns {params.W.shape[1]}")
    return params.W @ v + params.b


@dataclass
class NoiseDistribution:
    """Sampler over unified node ids with fixed cumulative weights."""

    kind: str
    ids: np.ndarray
    cumulative: np.ndarray

    @classmethod
    def from_weights(cls, kind, ids, weights):
        ids = np.asarray(ids, dtype=np.int64)
        weights = np.asarray(weights, dtype=np.float64)
        if ids.size == 0:
            raise InputError("noise distribution over an empty user set")
        total = weights.sum()
        if total <= 0.0:
            raise InputError(f"noise distribution {kind!r} has all-zero weights")
        cumulative = np.cumsum(weights / total)
        cumulative[-1] = 1.0
        return cls(kind, ids, cumulative)

    @classmethod
    def uniform(cls, net):
        ids = sorted(net.nodes)
        return cls.from_weights("uniform", ids, np.ones(len(ids)))

    @classmethod
    def out_degree_powered(cls, net, power=OUT_DEGREE_POWER):
        degrees = net.out_degrees()
        ids = sorted(net.nodes)
        weights = np.array([degrees[uid] for uid in ids], dtype=np.float64) ** power
        return cls.from_weights("out_degree", ids, weights)

    def probabilities(self):
        probs = np.diff(self.cumulative, prepend=0.0)
        return dict(zip(self.ids.tolist(), probs.tolist()))

    def sample_array(self, rng, size):
        return self.ids[np.searchsorted(self.cumulative, rng.random(size), side="right")]


def sample_negative(dist, rng):
    """Draw one node id from a noise distribution."""
    return int(dist.sample_array(rng, ()))


def _sample_excluding(dist, rng, subjects, n_neg):
    """(len(subjects), n_neg) negative ids, none equal to its row's subject."""
    negs = dist.sample_array(rng, (subjects.shape[0], n_neg))
    clash = negs == subjects[:, None]
    attempts = 0
    while clash.any():
        negs[clash] = dist.sample_array(rng, int(clash.sum()))
        clash = negs == subjects[:, None]
        attempts += 1
        if attempts > 200:
            raise InputError("cannot sample negatives distinct from the factoid subject")
    return negs


def score_user_object(v_u, params, v_o, neg_vectors):
    """Negative-sampling objective for one user-object factoid."""
    c = project(params, v_o)
    value = log_sigmoid(float(np.dot(v_u, c)))
    for v_k in neg_vectors:
        value += log_sigmoid(-float(np.dot(v_k, c)))
    return float(value)


def score_user_user(v_ui, params, v_uj, neg_vectors):
    """Negative-sampling objective for one follows factoid."""
    return score_user_object(v_ui, params, v_uj, neg_vectors)


def user_object_gradients(v_u, params, v_o, neg_vectors):
    """Analytic ascent gradients of the user-object objective.

    Returns (g_u, g_negs, g_W, g_b) evaluated at the given point.
    """
    c = project(params, v_o)
    a = sigmoid(-float(np.dot(v_u, c)))
    g_u = a * c
    dfdc = a * np.asarray(v_u, dtype=np.float64)
    for v_k in neg_vectors:
        dfdc = dfdc - sigmoid(float(np.dot(v_k, c))) * np.asarray(v_k, dtype=np.float64)
    g_negs = [-sigmoid(float(np.dot(v_k, c))) * c for v_k in neg_vectors]
    g_W = np.outer(dfdc, v_o)
    return g_u, g_negs, g_W, dfdc


def user_user_gradients(v_ui, params, v_uj, neg_vectors):
    """Analytic ascent gradients of the follows objective.

    Returns (g_ui, g_uj, g_negs, g_W, g_b); g_uj is the chain-rule
    gradient of the followee through the projection.
    """
    g_ui, g_negs, g_W, g_b = user_object_gradients(v_ui, params, v_uj, neg_vectors)
    g_uj = params.W.T @ g_b
    return g_ui, g_uj, g_negs, g_W, g_b


class _GradAccumulator:
    """Sums projection gradients between periodic parameter updates."""

    def __init__(self, params):
        self.gW = np.zeros_like(params.W)
        self.gb = np.zeros_like(params.b)
        self.count = 0

    def apply(self, params, eta):
        if self.count:
            params.W += eta * self.gW / self.count
            params.b += eta * self.gb / self.count
            params.rescale_to_cap()
        self.gW[:] = 0.0
        self.gb[:] = 0.0
        self.count = 0


def sgd_step_user_object(factoid, negatives, user_table, object_table, params, eta, accum=None):
    """One ascent step for a user-object factoid; returns its objective.

    User rows move immediately; projection gradients go into ``accum`` (if
    given) for a later periodic parameter update.
    """
    v_o = object_table.vector(factoid.obj)
    v_u = user_table.vector(factoid.subject)
    neg_vectors = [user_table.vector(k) for k in negatives]
    value = score_user_object(v_u, params, v_o, neg_vectors)
    g_u, g_negs, g_W, g_b = user_object_gradients(v_u, params, v_o, neg_vectors)
    updates = [(factoid.subject, g_u)]
    updates.extend(zip(negatives, g_negs))
    for uid, grad in updates:
        user_table.matrix[user_table.row_of(uid)] += eta * grad
    if accum is not None:
        accum.gW += g_W
        accum.gb += g_b
        accum.count += 1
    return value


def sgd_step_user_user(factoid, negatives, user_table, params, eta, accum=None):
    """One ascent step for a follows factoid; returns its objective."""
    v_ui = user_table.vector(factoid.subject)
    v_uj = user_table.vector(factoid.obj)
    neg_vectors = [user_table.vector(k) for k in negatives]
    value = score_user_user(v_ui, params, v_uj, neg_vectors)
    g_ui, g_uj, g_negs, g_W, g_b = user_user_gradients(v_ui, params, v_uj, neg_vectors)
    updates = [(factoid.subject, g_ui)]
    updates.extend(zip(negatives, g_negs))
    updates.append((factoid.obj, g_uj))
    for uid, grad in updates:
        user_table.matrix[user_table.row_of(uid)] += eta * grad
    if accum is not None:
        accum.gW += g_W
        accum.gb += g_b
        accum.count += 1
    return value


@dataclass
class FactoidTrainConfig:
    dim: int = 64
    negatives: int = 5
    learning_rate: float = 0.025
    min_learning_rate: float = 0.0001
    batch_size: int = 256
    epochs: int = 50
    w_update_period: int = 100
    norm_cap: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.negatives < 1:
            raise ValueError("negatives must be >= 1")
        if self.negatives > _kernels.MAX_NEGATIVES:
            raise ValueError(f"negatives must be <= {_kernels.MAX_NEGATIVES}")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


@dataclass
class _PredicateBatch:
    subjects: np.ndarray
    contexts: np.ndarray  # catalog indices, or followee rows for follows
    params: ProjectionParams = None
    accum: _GradAccumulator = None
    batches_seen: int = 0
    objective: list = field(default_factory=list)


def train(net, object_tables, cfg):
    """Run the round-robin negative-sampled training schedule.

    Per epoch: one batch for each user-object predicate in catalog order,
    then one batch of follows factoids. All randomness flows from
    cfg.seed, so identical inputs reproduce the table bit for bit.
    Returns (user EmbeddingTable, report dict).
    """
    rng = np.random.default_rng(cfg.seed)
    node_order = sorted(net.nodes)
    row_of = {uid: row for row, uid in enumerate(node_order)}

    groups = {}
    for f in net.factoids:
        groups.setdefault(f.predicate, []).append(f)
    if not any(groups.values()):
        raise InputError("no factoids to train on")

    uo_predicates = [p for p in net.predicates() if p in groups]
    has_follows = FOLLOWS in groups

    object_matrices = {}
    for predicate in uo_predicates:
        if predicate not in object_tables:
            raise InputError(f"missing object embeddings for predicate {predicate!r}")
        table = object_tables[predicate]
        n_objects = len(net.object_catalog[predicate])
        rows = np.empty((n_objects, table.dim), dtype=np.float64)
        for index in range(n_objects):
            if index not in table:
                raise InputError(f"object {index} of predicate {predicate!r} has no embedding")
            rows[index] = table.vector(index)
        object_matrices[predicate] = rows

    scale = 0.5 / np.sqrt(cfg.dim)
    U = np.ascontiguousarray(rng.uniform(-scale, scale, size=(len(node_order), cfg.dim)))

    batches = {}
    for predicate in uo_predicates:
        factoids = groups[predicate]
        batches[predicate] = _PredicateBatch(
            subjects=np.asarray([row_of[f.subject] for f in factoids], dtype=np.int64),
            contexts=np.asarray([f.obj for f in factoids], dtype=np.int64),
            params=initial_projection(
                predicate, cfg.dim, object_matrices[predicate].shape[1], cfg.norm_cap
            ),
        )
    if has_follows:
        factoids = groups[FOLLOWS]
        batches[FOLLOWS] = _PredicateBatch(
            subjects=np.asarray([row_of[f.subject] for f in factoids], dtype=np.int64),
            contexts=np.asarray([row_of[f.obj] for f in factoids], dtype=np.int64),
            params=initial_projection(FOLLOWS, cfg.dim, cfg.dim, cfg.norm_cap),
        )
    for entry in batches.values():
        entry.accum = _GradAccumulator(entry.params)

    # Noise distributions in row space: uniform for user-object factoids,
    # out-degree powered for follows.
    uniform_rows = NoiseDistribution.from_weights(
        "uniform", np.arange(len(node_order)), np.ones(len(node_order))
    )
    degree_rows = None
    if has_follows:
        degrees = np.zeros(len(node_order))
        for f in groups[FOLLOWS]:
            degrees[row_of[f.subject]] += 1.0
        degree_rows = NoiseDistribution.from_weights(
            "out_degree", np.arange(len(node_order)), degrees ** OUT_DEGREE_POWER
        )

    schedule = [(p, uniform_rows) for p in uo_predicates]
    if has_follows:
        schedule.append((FOLLOWS, degree_rows))
    total_batches = max(1, cfg.epochs * len(schedule))
    batch_counter = 0

    for _epoch in range(cfg.epochs):
        for predicate, noise in schedule:
            entry = batches[predicate]
            eta = (
                cfg.learning_rate
                + (cfg.min_learning_rate - cfg.learning_rate) * batch_counter / total_batches
            )
            picks = rng.integers(0, entry.subjects.shape[0], size=cfg.batch_size)
            subjects = entry.subjects[picks]
            contexts = entry.contexts[picks]
            negatives = _sample_excluding(noise, rng, subjects, cfg.negatives)
            if predicate == FOLLOWS:
                value = _kernels.user_user_batch(
                    U, entry.params.W, entry.params.b,
                    subjects, contexts, negatives, eta,
                    entry.accum.gW, entry.accum.gb,
                )
            else:
                value = _kernels.user_object_batch(
                    U, entry.params.W, entry.params.b, object_matrices[predicate],
                    subjects, contexts, negatives, eta,
                    entry.accum.gW, entry.accum.gb,
                )
            if not np.isfinite(value):
                raise DivergenceError(f"objective for {predicate!r} became non-finite")
            entry.accum.count += cfg.batch_size
            entry.objective.append(value / cfg.batch_size)
            entry.batches_seen += 1
            batch_counter += 1
            if entry.batches_seen % cfg.w_update_period == 0:
                entry.accum.apply(entry.params, eta)
                if not np.all(np.isfinite(entry.params.W)):
                    raise DivergenceError(f"projection for {predicate!r} became non-finite")

    table = EmbeddingTable(cfg.dim, node_order, U)
    report = {
        "seed": cfg.seed,
        "config": {
            "dim": cfg.dim,
            "negatives": cfg.negatives,
            "learning_rate": cfg.learning_rate,
            "min_learning_rate": cfg.min_learning_rate,
            "batch_size": cfg.batch_size,
            "epochs": cfg.epochs,
            "w_update_period": cfg.w_update_period,
            "norm_cap": cfg.norm_cap,
        },
        "predicate_order": [p for p, _ in schedule],
        "epoch_objective": {p: batches[p].objective for p, _ in schedule},
        "final_w_norms": {p: batches[p].params.norm for p, _ in schedule},
        "followee_chain_rule": True,
    }
    return table, report
