"""String/vector similarity and blocking for sparse similarity matrices.

Per predicate we score only candidate pairs found by cheap blocking
(character trigrams for text, random-hyperplane LSH for vectors) and store
them in a symmetric sparse matrix with values in [-1, 1]. The diagonal is
implicit: an object is always maximally similar to itself.
"""

from __future__ import annotations

import csv
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .exceptions import InputError

# Blocking defaults. Eight 8-bit tables keep >=0.9 candidate recall for
# vector pairs with cosine above 0.9 (hyperplane collision probability
# (1 - theta/pi)^bits per table).
LSH_TABLES = 8
LSH_BITS = 8

JW_PREFIX_SCALE = 0.1
JW_MAX_PREFIX = 4


def jaro_winkler(a, b):
    """Jaro-Winkler similarity in [0, 1]; 1.0 iff the strings are equal.

    Case-sensitive; callers that want case-insensitive matching lowercase
    the inputs first.
    """
    if a == b:
        return 1.0
    len_a, len_b = len(a), len(b)
    if len_a == 0 or len_b == 0:
        return 0.0

    window = max(len_a, len_b) // 2 - 1
    a_matched = [False] * len_a
    b_matched = [False] * len_b
    matches = 0
    for i in range(len_a):
        lo = max(0, i - window)
        hi = min(i + window + 1, len_b)
        for j in range(lo, hi):
            if b_matched[j] or a[i] != b[j]:
                continue
            a_matched[i] = True
            b_matched[j] = True
            matches += 1
            break
    if matches == 0:
        return 0.0

    transpositions = 0
    k = 0
    for i in range(len_a):
        if not a_matched[i]:
            continue
        while not b_matched[k]:
            k += 1
        if a[i] != b[k]:
            transpositions += 1
        k += 1
    transpositions //= 2

    jaro = (
        matches / len_a
        + matches / len_b
        + (matches - transpositions) / matches
    ) / 3.0

    prefix = 0
    for i in range(min(len_a, len_b, JW_MAX_PREFIX)):
        if a[i] != b[i]:
            break
        prefix += 1
    return jaro + prefix * JW_PREFIX_SCALE * (1.0 - jaro)


def cosine_similarity(x, y):
    """Cosine of the angle between two equal-length nonzero vectors."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    nx = np.linalg.norm(x)
    ny = np.linalg.norm(y)
    if nx == 0.0 or ny == 0.0:
        raise ValueError("cosine similarity undefined for zero vectors")
    return float(np.dot(x, y) / (nx * ny))


def trigram_candidate_pairs(objects):
    """All index pairs whose lowercased strings share a character 3-gram.

    Strings shorter than three characters are bucketed by their whole
    text, so identical short strings still pair up. Returns (i, j) with
    i < j; values are a blocking filter only, never similarities.
    """
    buckets = defaultdict(set)
    for idx, text in enumerate(objects):
        text = text.lower()
        if len(text) < 3:
            buckets[text].add(idx)
            continue
        for start in range(len(text) - 2):
            buckets[text[start:start + 3]].add(idx)

    pairs = set()
    for members in buckets.values():
        if len(members) < 2:
            continue
        ordered = sorted(members)
        for i_pos, i in enumerate(ordered):
            for j in ordered[i_pos + 1:]:
                pairs.add((i, j))
    return pairs


def lsh_candidate_pairs(vectors, tables=LSH_TABLES, bits=LSH_BITS, seed=0):
    """Random-hyperplane LSH blocking over unit-normalized directions.

    A pair is a candidate iff its sign signatures agree in at least one
    table. Deterministic for a given seed.
    """
    if len(vectors) < 2:
        return set()
    mat = np.asarray(vectors, dtype=np.float64)
    if mat.ndim != 2:
        raise ValueError("vectors must share one dimensionality")
    rng = np.random.default_rng(seed)
    pairs = set()
    for _ in range(tables):
        planes = rng.standard_normal((bits, mat.shape[1]))
        signatures = (mat @ planes.T) >= 0.0
        buckets = defaultdict(list)
        for idx in range(mat.shape[0]):
            buckets[signatures[idx].tobytes()].append(idx)
        for members in buckets.values():
            for i_pos in range(len(members) - 1):
                for j in members[i_pos + 1:]:
                    pairs.add((members[i_pos], j))
    return pairs


@dataclass
class SparseSimilarityMatrix:
    """Symmetric sparse similarity matrix with an implicit unit diagonal."""

    predicate: str
    n: int
    entries: list[tuple[int, int, float]]

    def __post_init__(self):
        for i, j, s in self.entries:
            if not 0 <= i < j < self.n:
                raise ValueError(f"entry ({i}, {j}) outside upper triangle of n={self.n}")
            if not -1.0 <= s <= 1.0:
                raise ValueError(f"similarity {s} outside [-1, 1]")


def build_similarity_matrix(predicate, objects, candidate_pairs):
    """Score candidate pairs of one predicate's objects.

    Text objects are compared with Jaro-Winkler on lowercased strings,
    mapped onto [-1, 1] via s = 2*jw - 1 so that identical strings score 1
    and fully dissimilar ones -1. Vector objects use cosine similarity.
    """
    if not objects:
        return SparseSimilarityMatrix(predicate, 0, [])
    is_text = objects[0].is_text
    texts = [obj.text.lower() for obj in objects] if is_text else None

    canonical = set()
    for i, j in candidate_pairs:
        if not (0 <= i < len(objects) and 0 <= j < len(objects)):
            raise ValueError(f"candidate pair ({i}, {j}) out of range")
        if i == j:
            continue
        canonical.add((i, j) if i < j else (j, i))

    entries = []
    for i, j in sorted(canonical):
        if is_text:
            s = 2.0 * jaro_winkler(texts[i], texts[j]) - 1.0
        else:
            s = cosine_similarity(objects[i].feature_vector, objects[j].feature_vector)
            s = min(1.0, max(-1.0, s))
        entries.append((i, j, s))
    return SparseSimilarityMatrix(predicate, len(objects), entries)


def save_similarity_matrix(matrix, path):
    """Write ``i,j,s`` rows under a ``# pred=<name> n=<count>`` header."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# pred={matrix.predicate} n={matrix.n}\n")
        writer = csv.writer(fh)
        for i, j, s in matrix.entries:
            writer.writerow([i, j, repr(s)])


def load_similarity_matrix(path):
    with open(path, "r", encoding="utf-8", newline="") as fh:
        header = fh.readline().strip()
        if not header.startswith("# pred="):
            raise InputError(f"{path}:1: expected '# pred=<name> n=<count>' header")
        try:
            pred_part, n_part = header[2:].split()
            predicate = pred_part.split("=", 1)[1]
            n = int(n_part.split("=", 1)[1])
        except (ValueError, IndexError) as exc:
            raise InputError(f"{path}:1: malformed header {header!r}") from exc
        entries = []
        for lineno, row in enumerate(csv.reader(fh), start=2):
            if not row:
                continue
            try:
                entries.append((int(row[0]), int(row[1]), float(row[2])))
            except (ValueError, IndexError) as exc:
                raise InputError(f"{path}:{lineno}: malformed entry {row!r}") from exc
    try:
        return SparseSimilarityMatrix(predicate, n, entries)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc
