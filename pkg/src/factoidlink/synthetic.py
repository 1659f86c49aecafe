"""Synthetic two-network benchmark pairs with known ground truth.

One latent population (names from a seeded syllable lexicon, unit feature
vectors, a random directed graph) is observed twice. Each view keeps each
latent edge with probability overlap_frac, perturbs names with probability
name_noise, and adds renormalized Gaussian noise to the feature vectors.
The identity alignment is the ground truth.
"""

from __future__ import annotations

import numpy as np

from .exceptions import InputError
from .network import AttributeObject, SocialNetwork, UserRecord

_CONSONANTS = "bcdfghjklmnprstvwz"
_VOWELS = "aeiou"
LEXICON_SIZE = 2000
# feature noise rides the same knob as name noise so zero noise really
# means two identical views
FEATURE_NOISE_FRACTION = 0.25


def _make_lexicon(rng, count):
    words = []
    seen = set()
    while len(words) < count:
        n_syllables = int(rng.integers(2, 4))
        parts = []
        for _ in range(n_syllables):
            parts.append(_CONSONANTS[int(rng.integers(len(_CONSONANTS)))])
            parts.append(_VOWELS[int(rng.integers(len(_VOWELS)))])
        if rng.random() < 0.4:
            parts.append(_CONSONANTS[int(rng.integers(len(_CONSONANTS)))])
        word = "".join(parts).capitalize()
        if word not in seen:
            seen.add(word)
            words.append(word)
    return words


def _perturb_name(rng, name):
    tokens = name.split()
    op = int(rng.integers(3))
    if op == 0 and len(tokens) > 1:
        drop = int(rng.integers(len(tokens)))
        tokens = [t for pos, t in enumerate(tokens) if pos != drop]
    elif op == 1:
        pos = int(rng.integers(len(tokens)))
        keep = int(rng.integers(1, 3))
        tokens[pos] = tokens[pos][:keep]
    else:
        pos = int(rng.integers(len(tokens)))
        token = tokens[pos]
        if len(token) >= 2:
            at = int(rng.integers(len(token) - 1))
            token = token[:at] + token[at + 1] + token[at] + token[at + 2:]
            tokens[pos] = token
    return " ".join(tokens)


def _view(rng, network_id, names, features, adjacency, overlap_frac, name_noise):
    n = len(names)
    users = []
    for i in range(n):
        name = names[i]
        if name_noise > 0.0 and rng.random() < name_noise:
            name = _perturb_name(rng, name)
        attrs = {"username": AttributeObject(text=name)}
        if features is not None:
            sigma = FEATURE_NOISE_FRACTION * name_noise
            vec = features[i] + (rng.normal(0.0, sigma, size=features.shape[1]) if sigma > 0.0 else 0.0)
            vec = vec / np.linalg.norm(vec)
            attrs["image_features"] = AttributeObject(feature_vector=vec)
        users.append(UserRecord(local_id=f"u{i}", attributes=attrs))

    keep = rng.random(size=adjacency.shape) < overlap_frac
    edges = [
        (f"u{i}", f"u{j}")
        for i, j in zip(*np.nonzero(adjacency & keep))
    ]
    return SocialNetwork(network_id=network_id, users=users, edges=edges)


def generate_synthetic_pair(n_users, edge_prob, overlap_frac, name_noise, feature_dim, seed):
    """Build (source, target, truth) views of one latent population.

    feature_dim=0 drops the feature-vector attribute entirely. The output
    is a pure function of the arguments.
    """
    if n_users < 1:
        raise InputError("n_users must be >= 1")
    for label, value in (("edge_prob", edge_prob), ("overlap_frac", overlap_frac), ("name_noise", name_noise)):
        if not 0.0 <= value <= 1.0:
            raise InputError(f"{label} must lie in [0, 1]")
    if feature_dim < 0:
        raise InputError("feature_dim must be >= 0")

    rng = np.random.default_rng(seed)
    first = _make_lexicon(rng, LEXICON_SIZE)
    last = _make_lexicon(rng, LEXICON_SIZE)
    names = [
        f"{first[int(rng.integers(LEXICON_SIZE))]} {last[int(rng.integers(LEXICON_SIZE))]}"
        for _ in range(n_users)
    ]
    features = None
    if feature_dim > 0:
        features = rng.normal(size=(n_users, feature_dim))
        features /= np.linalg.norm(features, axis=1, keepdims=True)

    adjacency = rng.random(size=(n_users, n_users)) < edge_prob
    np.fill_diagonal(adjacency, False)

    source = _view(rng, "source", names, features, adjacency, overlap_frac, name_noise)
    target = _view(rng, "target", names, features, adjacency, overlap_frac, name_noise)
    truth = [(f"u{i}", f"u{i}") for i in range(n_users)]
    return source, target, truth


def twin_name_instance(community_size=4):
    """Two source users share one name but have disjoint neighborhoods.

    Name similarity alone cannot split the pair (exact tie). Each twin
    anchors its own small community (mutual follows to every neighbor,
    plus a ring among the neighbors) whose distinctively named members are
    mirrored in the other network, so the follow structure disambiguates.
    Truth pairs cover only the twins.
    """
    shared = "Jordan Pike"
    left_names = [f"Left{i} Vex" for i in range(community_size)]
    right_names = [f"Right{i} Moo" for i in range(community_size)]

    def build(network_id, twin_ids, left_ids, right_ids):
        users = [
            UserRecord(twin_ids[0], {"username": AttributeObject(text=shared)}),
            UserRecord(twin_ids[1], {"username": AttributeObject(text=shared)}),
        ]
        edges = []
        for names, ids, owner in ((left_names, left_ids, twin_ids[0]),
                                  (right_names, right_ids, twin_ids[1])):
            for name, nid in zip(names, ids):
                users.append(UserRecord(nid, {"username": AttributeObject(text=name)}))
                edges.extend([(owner, nid), (nid, owner)])
            for pos in range(len(ids)):
                edges.append((ids[pos], ids[(pos + 1) % len(ids)]))
        return SocialNetwork(network_id=network_id, users=users, edges=edges)

    k = community_size
    source = build("source", ["p1", "p2"],
                   [f"n{i}" for i in range(k)], [f"nn{i}" for i in range(k)])
    target = build("target", ["q1", "q2"],
                   [f"m{i}" for i in range(k)], [f"mm{i}" for i in range(k)])
    truth = [("p1", "q1"), ("p2", "q2")]
    return source, target, truth
