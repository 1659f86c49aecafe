#!/usr/bin/env python3
"""Walk through linking two tiny overlapping social networks, in memory.

Two networks describe the same handful of people under different account
ids. Names differ in form ("Desmond" vs "Desmond Ng"), so exact matching
fails; the embedding pipeline combines name similarity with the follow
structure and ranks the right counterpart first.
"""

import numpy as np

from factoidlink import (
    AttributeObject,
    FactoidTrainConfig,
    ObjectTrainConfig,
    SocialNetwork,
    UserRecord,
    build_similarity_matrix,
    build_unified_network,
    embed_objects,
    link_networks,
    train,
    trigram_candidate_pairs,
)


def user(local_id, name):
    return UserRecord(str(local_id), {"name": AttributeObject(text=name)})


# ---------------------------------------------------------------- networks
blue = SocialNetwork(
    "blue",
    [user(1, "Amy Tan"), user(2, "Desmond"), user(3, "C L"),
     user(4, "Joey Lim"), user(5, "Nicole Tan")],
    [("1", "2"), ("2", "1"), ("1", "3"), ("3", "1"), ("3", "2"), ("4", "3"), ("5", "3")],
)
green = SocialNetwork(
    "green",
    [user(6, "Amy Tan"), user(7, "Desmond Ng"), user(8, "Cindy Lim"), user(9, "Joey L")],
    [("6", "7"), ("7", "6"), ("6", "8"), ("8", "6"),
     ("7", "8"), ("8", "7"), ("8", "9"), ("9", "8")],
)

net = build_unified_network(blue, green, predicate_map={"name": "has_name"})
print(f"unified network: {net.n_nodes} nodes, {len(net.factoids)} factoids")
print("factoid examples:")
for factoid in net.factoids[:3]:
    print("  ", factoid)

# ------------------------------------------------- name similarity matrix
names = net.object_catalog["has_name"]
candidates = trigram_candidate_pairs([obj.text for obj in names])
matrix = build_similarity_matrix("has_name", names, candidates)
print(f"\n{len(names)} distinct names, {len(matrix.entries)} scored pairs:")
for i, j, s in matrix.entries:
    print(f"  {names[i].text!r} ~ {names[j].text!r}: {s:+.3f}")

# --------------------------------------------------------- name embedding
name_table = embed_objects(matrix, ObjectTrainConfig(dim=16, epochs=300, seed=7))
v_desmond = name_table.vector(1)
v_desmond_ng = name_table.vector(5)
aligned = float(v_desmond @ v_desmond_ng
                / (np.linalg.norm(v_desmond) * np.linalg.norm(v_desmond_ng)))
print(f"\nname space: cos('Desmond', 'Desmond Ng') = {aligned:.3f}")

# ---------------------------------------------------------- user training
cfg = FactoidTrainConfig(dim=32, negatives=2, epochs=1000, batch_size=32,
                         learning_rate=0.025, min_learning_rate=1e-5, seed=11)
user_table, training_report = train(net, {"has_name": name_table}, cfg)
print(f"\ntrained user embeddings at dim {cfg.dim}; "
      f"projection norms: { {p: round(v, 3) for p, v in training_report['final_w_norms'].items()} }")

# ------------------------------------------------------------------ links
# Accounts 1 and 2 are recovered through their names plus mutual follows.
# Account 3 ("C L") shares no character trigram with "Cindy Lim", so
# blocking never scores that pair and only weak structure evidence remains.
rankings = link_networks(net, user_table)
print("\nnearest green-network account per blue-network account:")
for source_id in ["1", "2", "3", "4", "5"]:
    name = blue.user(source_id).attributes["name"].text
    (top_target, score) = rankings[source_id].ranked[0]
    target_name = green.user(top_target).attributes["name"].text
    print(f"  {source_id} ({name:10s}) -> {top_target} ({target_name:10s})  cos={score:+.3f}")
