#!/usr/bin/env python3
"""Tour of the similarity layer: string scores, blocking, object geometry.

Shows how candidate pairs are found without comparing everything against
everything (character trigrams for text, random-hyperplane LSH for
vectors), and how the resulting sparse similarity matrix turns into
object vectors whose dot products mirror the similarities.
"""

import numpy as np

from factoidlink import (
    AttributeObject,
    ObjectTrainConfig,
    build_similarity_matrix,
    cosine_similarity,
    embed_objects,
    jaro_winkler,
    lsh_candidate_pairs,
    reconstruction_error,
    trigram_candidate_pairs,
)

# ------------------------------------------------------- string similarity
print("Jaro-Winkler scores:")
for a, b in [("desmond", "desmond ng"), ("joey lim", "joey l"),
             ("amy tan", "nicole tan"), ("martha", "marhta"), ("abcd", "efgh")]:
    print(f"  {a!r:14s} vs {b!r:14s} -> {jaro_winkler(a, b):.4f}")

# ------------------------------------------------------------ text blocks
names = ["Amy Tan", "Desmond", "C L", "Joey Lim", "Nicole Tan",
         "Desmond Ng", "Cindy Lim", "Joey L"]
pairs = trigram_candidate_pairs(names)
print(f"\ntrigram blocking keeps {len(pairs)} of {len(names) * (len(names) - 1) // 2} pairs:")
for i, j in sorted(pairs):
    print(f"  {names[i]!r} ~ {names[j]!r}")

# ---------------------------------------------------------- vector blocks
rng = np.random.default_rng(0)
base = rng.normal(size=(300, 8))
base /= np.linalg.norm(base, axis=1, keepdims=True)
noisy = base + rng.normal(scale=0.05, size=base.shape)
noisy /= np.linalg.norm(noisy, axis=1, keepdims=True)
vectors = np.vstack([base, noisy])  # each row i matches row i+300

candidates = lsh_candidate_pairs(vectors, seed=1)
matched = sum(1 for i in range(300) if (i, i + 300) in candidates)
total_pairs = len(vectors) * (len(vectors) - 1) // 2
print(f"\nLSH blocking: {len(candidates)} of {total_pairs} pairs kept; "
      f"{matched}/300 planted near-duplicates recovered")
print(f"planted pair cosine example: {cosine_similarity(vectors[0], vectors[300]):.3f}")

# ------------------------------------------------- sparse matrix + fitting
objects = [AttributeObject(text=n) for n in names]
matrix = build_similarity_matrix("has_name", objects, pairs)
table = embed_objects(matrix, ObjectTrainConfig(dim=16, epochs=400, seed=7))
print(f"\nobject embedding: residual loss {reconstruction_error(matrix, table):.4f}")
print("dot products track the similarity targets:")
for i, j, s in matrix.entries:
    fitted = float(table.vector(i) @ table.vector(j))
    print(f"  {names[i]!r:14s} ~ {names[j]!r:14s} target {s:+.3f} fitted {fitted:+.3f}")
norms = [float(np.linalg.norm(table.vector(i))) for i in range(len(names))]
print(f"norms stay near 1: min {min(norms):.3f} max {max(norms):.3f}")
