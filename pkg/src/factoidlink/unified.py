"""Unified network construction: factoid generation and anchor merging.

Both input networks are folded into one graph whose nodes carry dense
integer ids (source users first, in input order). Every present attribute
becomes a user-object factoid, every directed edge a user-user ``follows``
factoid, and attribute values are deduplicated into a per-predicate object
catalog.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InputError
from .network import AttributeObject

FOLLOWS = "follows"

# Attribute key -> user-object predicate name. "name" is used by small
# in-memory examples; files default to the username/screen_name/image set.
DEFAULT_PREDICATE_MAP = {
    "username": "has_username",
    "screen_name": "has_screen_name",
    "image_features": "has_image",
    "name": "has_name",
}


@dataclass(frozen=True)
class Factoid:
    """One <subject, predicate, object> triplet.

    ``obj`` is a unified node id for ``follows`` factoids and an index into
    the predicate's object catalog otherwise.
    """

    subject: int
    predicate: str
    obj: int

    @property
    def is_user_user(self):
        return self.predicate == FOLLOWS


@dataclass
class UnifiedNetwork:
    """Merged view of a source and a target network.

    ``nodes`` maps each unified id to its primary (network_id, local_id);
    ``node_ids`` maps every known (network_id, local_id) to its unified id,
    so an anchor-merged identity stays addressable under both networks.
    Instances are treated as immutable once built (merging returns a new
    network) and are safe to share across threads read-only.
    """

    source_id: str
    target_id: str
    nodes: dict[int, tuple[str, str]]
    node_ids: dict[tuple[str, str], int]
    factoids: list[Factoid]
    object_catalog: dict[str, list[AttributeObject]] = field(default_factory=dict)

    @property
    def n_nodes(self):
        return len(self.nodes)

    def members(self, network_id):
        """(local_id, unified_id) pairs belonging to one network, input order."""
        return [(local, uid) for (net, local), uid in self.node_ids.items() if net == network_id]

    def resolve(self, network_id, local_id):
        key = (network_id, local_id)
        if key not in self.node_ids:
            raise InputError(f"unknown user id {local_id!r} in network {network_id!r}")
        return self.node_ids[key]

    def factoids_for(self, predicate):
        return [f for f in self.factoids if f.predicate == predicate]

    def predicates(self):
        """User-object predicate names in catalog order."""
        return list(self.object_catalog)

    def out_degrees(self):
        """Unified-node out-degree counted over follows factoids."""
        degrees = {uid: 0 for uid in self.nodes}
        for f in self.factoids:
            if f.is_user_user:
                degrees[f.subject] += 1
        return degrees


def build_unified_network(source, target, predicate_map=None):
    """Fold two SocialNetworks into a UnifiedNetwork.

    Node ids are assigned 0..N-1, source users first, preserving input
    order. Identical attribute values share one catalog entry per
    predicate. A user holding no attributes contributes only follows
    factoids.
    """
    if predicate_map is None:
        predicate_map = DEFAULT_PREDICATE_MAP
    if source.network_id == target.network_id:
        raise InputError("source and target networks must have distinct network_id labels")

    nodes = {}
    node_ids = {}
    next_id = 0
    for net in (source, target):
        for user in net.users:
            key = (net.network_id, user.local_id)
            nodes[next_id] = key
            node_ids[key] = next_id
            next_id += 1

    factoids = []
    catalog = {}
    catalog_index = {}

    def object_ref(predicate, obj):
        entries = catalog.setdefault(predicate, [])
        index = catalog_index.setdefault(predicate, {})
        if entries:
            first = entries[0]
            if first.is_text != obj.is_text:
                raise InputError(f"predicate {predicate!r} mixes text and vector objects")
            if not obj.is_text and first.feature_vector.size != obj.feature_vector.size:
                raise InputError(
                    f"predicate {predicate!r} mixes vector dimensions "
                    f"{first.feature_vector.size} and {obj.feature_vector.size}"
                )
        key = obj.key()
        if key not in index:
            index[key] = len(entries)
            entries.append(obj)
        return index[key]

    for net in (source, target):
        for user in net.users:
            uid = node_ids[(net.network_id, user.local_id)]
            for attr_key, obj in user.attributes.items():
                if attr_key not in predicate_map:
                    raise InputError(f"attribute {attr_key!r} has no configured predicate")
                predicate = predicate_map[attr_key]
                factoids.append(Factoid(uid, predicate, object_ref(predicate, obj)))
        for follower, followee in net.edges:
            factoids.append(
                Factoid(
                    node_ids[(net.network_id, follower)],
                    FOLLOWS,
                    node_ids[(net.network_id, followee)],
                )
            )

    return UnifiedNetwork(
        source_id=source.network_id,
        target_id=target.network_id,
        nodes=nodes,
        node_ids=node_ids,
        factoids=factoids,
        object_catalog=catalog,
    )


def merge_anchor_pairs(net, anchors):
    """Collapse known cross-network matches into single nodes.

    Each (source local_id, target local_id) pair keeps the source node's
    unified id; factoids are rewritten to it and exact duplicates dropped.
    A node may appear in at most one pair.
    """
    if not anchors:
        return net

    remap = {}
    used = set()
    for src_local, tgt_local in anchors:
        src_uid = net.resolve(net.source_id, src_local)
        tgt_uid = net.resolve(net.target_id, tgt_local)
        if net.nodes[src_uid][0] != net.source_id or net.nodes[tgt_uid][0] != net.target_id:
            raise InputError(f"anchor ({src_local!r}, {tgt_local!r}) does not span both networks")
        if src_uid in used or tgt_uid in used:
            raise InputError(f"conflicting anchors: node reused in ({src_local!r}, {tgt_local!r})")
        used.update((src_uid, tgt_uid))
        remap[tgt_uid] = src_uid

    nodes = {uid: ref for uid, ref in net.nodes.items() if uid not in remap}
    node_ids = {key: remap.get(uid, uid) for key, uid in net.node_ids.items()}

    factoids = []
    seen = set()
    for f in net.factoids:
        subject = remap.get(f.subject, f.subject)
        obj = remap.get(f.obj, f.obj) if f.is_user_user else f.obj
        triple = (subject, f.predicate, obj)
        if triple in seen:
            continue
        seen.add(triple)
        factoids.append(Factoid(subject, f.predicate, obj))

    return UnifiedNetwork(
        source_id=net.source_id,
        target_id=net.target_id,
        nodes=nodes,
        node_ids=node_ids,
        factoids=factoids,
        object_catalog=net.object_catalog,
    )


def save_unified(net, path):
    """Persist a UnifiedNetwork as a JSONL snapshot."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({
            "kind": "meta",
            "source": net.source_id,
            "target": net.target_id,
        }, sort_keys=True) + "\n")
        for uid in sorted(net.nodes):
            network_id, local = net.nodes[uid]
            fh.write(json.dumps({
                "kind": "node", "id": uid, "network": network_id, "local": local,
            }, sort_keys=True) + "\n")
        for (network_id, local), uid in net.node_ids.items():
            if net.nodes[uid] != (network_id, local):
                fh.write(json.dumps({
                    "kind": "alias", "id": uid, "network": network_id, "local": local,
                }, sort_keys=True) + "\n")
        for predicate in net.object_catalog:
            for index, obj in enumerate(net.object_catalog[predicate]):
                record = {"kind": "object", "pred": predicate, "index": index}
                if obj.is_text:
                    record["text"] = obj.text
                else:
                    record["vector"] = obj.feature_vector.tolist()
                fh.write(json.dumps(record, sort_keys=True) + "\n")
        for f in net.factoids:
            fh.write(json.dumps({
                "kind": "factoid", "s": f.subject, "p": f.predicate, "o": f.obj,
            }, sort_keys=True) + "\n")


def load_unified(path):
    """Load a UnifiedNetwork snapshot written by save_unified."""
    meta = None
    nodes = {}
    node_ids = {}
    aliases = []
    catalog = {}
    factoids = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputError(f"{path}:{lineno}: invalid JSON: {exc.msg}") from exc
            kind = record.get("kind")
            if kind == "meta":
                meta = record
            elif kind == "node":
                nodes[record["id"]] = (record["network"], record["local"])
                node_ids[(record["network"], record["local"])] = record["id"]
            elif kind == "alias":
                aliases.append(record)
            elif kind == "object":
                entries = catalog.setdefault(record["pred"], [])
                if record["index"] != len(entries):
                    raise InputError(f"{path}:{lineno}: object catalog out of order")
                if "text" in record:
                    entries.append(AttributeObject(text=record["text"]))
                else:
                    entries.append(AttributeObject(feature_vector=np.asarray(record["vector"])))
            elif kind == "factoid":
                factoids.append(Factoid(record["s"], record["p"], record["o"]))
            else:
                raise InputError(f"{path}:{lineno}: unknown record kind {kind!r}")
    if meta is None:
        raise InputError(f"{path}: missing meta record")
    for record in aliases:
        node_ids[(record["network"], record["local"])] = record["id"]
    return UnifiedNetwork(
        source_id=meta["source"],
        target_id=meta["target"],
        nodes=nodes,
        node_ids=node_ids,
        factoids=factoids,
        object_catalog=catalog,
    )
