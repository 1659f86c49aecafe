"""Object embedding: fit vectors whose dot products track pairwise similarity.

For each predicate the stored similarity entries, plus an implicit unit
diagonal, are treated as targets for v_i . v_j and minimized by plain SGD.
The diagonal terms pull every vector toward unit norm, which is what makes
dot products behave like cosines downstream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DivergenceError


@dataclass
class ObjectTrainConfig:
    dim: int = 32
    learning_rate: float = 0.05
    min_learning_rate: float = 0.001
    epochs: int = 100
    seed: int = 0
    init_scale: float = 0.5

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")


def _training_entries(matrix):
    """Stored off-diagonal entries plus the implicit diagonal targets."""
    entries = [(i, j, s) for i, j, s in matrix.entries]
    entries.extend((i, i, 1.0) for i in range(matrix.n))
    return entries


def reconstruction_error(matrix, table):
    """Exact squared-residual loss over stored entries and the diagonal."""
    total = 0.0
    for i, j, s in _training_entries(matrix):
        vi = table.vector(i)
        vj = table.vector(j)
        r = float(np.dot(vi, vj)) - s
        total += r * r
    return total


def embed_objects(matrix, cfg):
    """Train object vectors for one similarity matrix.

    Entries are visited in a seed-shuffled order each epoch; the update for
    an entry (i, j, s) is v_i -= eta * r * v_j and symmetrically, with
    r = v_i . v_j - s evaluated before either side moves. Identical config
    and seed reproduce the table bit for bit.
    """
    from .embeddings import EmbeddingTable

    rng = np.random.default_rng(cfg.seed)
    n = matrix.n
    scale = cfg.init_scale / np.sqrt(cfg.dim)
    vectors = rng.uniform(-scale, scale, size=(n, cfg.dim))

    entries = _training_entries(matrix)
    order = np.arange(len(entries))
    denominator = max(1, cfg.epochs - 1)
    for epoch in range(cfg.epochs):
        frac = epoch / denominator
        eta = cfg.learning_rate * (1.0 - frac) + cfg.min_learning_rate * frac
        rng.shuffle(order)
        for position in order:
            i, j, s = entries[position]
            vi = vectors[i]
            if i == j:
                r = float(np.dot(vi, vi)) - s
                vectors[i] = vi - (2.0 * eta * r) * vi
            else:
                vj = vectors[j]
                r = float(np.dot(vi, vj)) - s
                # evaluate both updates at the pre-step point
                new_i = vi - (eta * r) * vj
                new_j = vj - (eta * r) * vi
                vectors[i] = new_i
                vectors[j] = new_j
        if not np.all(np.isfinite(vectors)):
            raise DivergenceError(
                f"object embedding for {matrix.predicate!r} diverged at epoch {epoch}"
            )

    return EmbeddingTable(cfg.dim, range(n), vectors)
