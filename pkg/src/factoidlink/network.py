"""Social network data model and file ingestion.

A network is a set of user records (each with optional profile attributes)
plus directed follow edges between local user ids. Files are read from a
JSONL users file and a header-less ``follower_id,followee_id`` CSV.
"""

from __future__ import annotations

import csv
import json
import unicodedata
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InputError

# Attribute keys accepted in user files, and the text/vector kind of each.
TEXT_ATTRS = ("username", "screen_name", "name")
VECTOR_ATTRS = ("image_features",)
DEFAULT_ATTRS = ("username", "screen_name", "image_features")


class AttributeObject:
    """A single profile attribute value: either text or a feature vector.

    Text is NFC-normalized and stripped on construction; vectors are
    converted to read-only float64 arrays. Exactly one of the two is set.
    """

    __slots__ = ("text", "feature_vector")

    def __init__(self, text=None, feature_vector=None):
        if (text is None) == (feature_vector is None):
            raise InputError("attribute must have exactly one of text or feature_vector")
        if text is not None:
            if not isinstance(text, str):
                raise InputError(f"attribute text must be a string, got {type(text).__name__}")
            text = unicodedata.normalize("NFC", text).strip()
            if not text:
                raise InputError("attribute text is empty")
            self.text = text
            self.feature_vector = None
        else:
            vec = np.asarray(feature_vector, dtype=np.float64)
            if vec.ndim != 1 or vec.size == 0:
                raise InputError("feature vector must be a non-empty 1-D sequence of reals")
            if not np.all(np.isfinite(vec)):
                raise InputError("feature vector contains non-finite values")
            vec.setflags(write=False)
            self.text = None
            self.feature_vector = vec

    @property
    def is_text(self):
        return self.text is not None

    def key(self):
        """Hashable identity used for catalog deduplication."""
        if self.text is not None:
            return ("text", self.text)
        return ("vec", self.feature_vector.tobytes())

    def __eq__(self, other):
        return isinstance(other, AttributeObject) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        if self.text is not None:
            return f"AttributeObject(text={self.text!r})"
        return f"AttributeObject(feature_vector=<{self.feature_vector.size}d>)"


@dataclass
class UserRecord:
    """One user identity: an opaque local id plus optional attributes."""

    local_id: str
    attributes: dict[str, AttributeObject] = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.local_id, str) or not self.local_id:
            raise InputError(f"user id must be a non-empty string, got {self.local_id!r}")
        if any(ch.isspace() for ch in self.local_id):
            raise InputError(f"user id {self.local_id!r} contains whitespace")


@dataclass
class SocialNetwork:
    """A single OSN: users plus directed (follower, followee) edges."""

    network_id: str
    users: list[UserRecord]
    edges: list[tuple[str, str]]

    def __post_init__(self):
        seen = set()
        for u in self.users:
            if u.local_id in seen:
                raise InputError(f"duplicate user id {u.local_id!r} in network {self.network_id!r}")
            seen.add(u.local_id)
        for follower, followee in self.edges:
            if follower not in seen:
                raise InputError(f"edge references undeclared user id {follower!r}")
            if followee not in seen:
                raise InputError(f"edge references undeclared user id {followee!r}")
            if follower == followee:
                raise InputError(f"self-loop edge on user id {follower!r}")

    @property
    def user_ids(self):
        return [u.local_id for u in self.users]

    def user(self, local_id):
        for u in self.users:
            if u.local_id == local_id:
                return u
        raise KeyError(local_id)


def _reject_duplicate_keys(pairs):
    seen = {}
    for key, value in pairs:
        if key in seen:
            raise InputError(f"duplicate key {key!r}")
        seen[key] = value
    return seen


def _parse_attributes(raw, allowed_attrs, path, lineno):
    attrs = {}
    for key, value in raw.items():
        if key not in allowed_attrs:
            raise InputError(f"{path}:{lineno}: unknown attribute key {key!r}")
        try:
            if key in VECTOR_ATTRS:
                attrs[key] = AttributeObject(feature_vector=value)
            else:
                attrs[key] = AttributeObject(text=value)
        except InputError as exc:
            raise InputError(f"{path}:{lineno}: attribute {key!r}: {exc}") from exc
    return attrs


def load_network(users_path, edges_path, network_id, allowed_attrs=DEFAULT_ATTRS):
    """Read a SocialNetwork from a JSONL users file and an edges CSV.

    Each users line looks like
    ``{"id": "...", "attrs": {"username": "...", "image_features": [...]}}``
    with all attrs optional. The edges file holds ``follower_id,followee_id``
    rows without a header. Raises InputError (with line numbers) on malformed
    records, duplicate ids, or edges referencing undeclared users.
    """
    users = []
    vector_dims = {}
    with open(users_path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line, object_pairs_hook=_reject_duplicate_keys)
            except json.JSONDecodeError as exc:
                raise InputError(f"{users_path}:{lineno}: invalid JSON: {exc.msg}") from exc
            except InputError as exc:
                raise InputError(f"{users_path}:{lineno}: {exc}") from exc
            if not isinstance(record, dict) or not isinstance(record.get("id"), str):
                raise InputError(f"{users_path}:{lineno}: record must be an object with a string 'id' field")
            raw_attrs = record.get("attrs", {})
            if not isinstance(raw_attrs, dict):
                raise InputError(f"{users_path}:{lineno}: 'attrs' must be an object")
            attrs = _parse_attributes(raw_attrs, allowed_attrs, users_path, lineno)
            try:
                user = UserRecord(local_id=record["id"], attributes=attrs)
            except InputError as exc:
                raise InputError(f"{users_path}:{lineno}: {exc}") from exc
            for key, obj in attrs.items():
                if obj.feature_vector is not None:
                    dim = obj.feature_vector.size
                    if vector_dims.setdefault(key, dim) != dim:
                        raise InputError(
                            f"{users_path}:{lineno}: attribute {key!r} has dimension {dim}, "
                            f"expected {vector_dims[key]}"
                        )
            users.append(user)

    edges = []
    with open(edges_path, "r", encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row:
                continue
            if len(row) != 2:
                raise InputError(f"{edges_path}:{lineno}: expected 'follower_id,followee_id', got {row!r}")
            edges.append((row[0].strip(), row[1].strip()))

    try:
        return SocialNetwork(network_id=network_id, users=users, edges=edges)
    except InputError as exc:
        raise InputError(f"{edges_path}: {exc}") from exc


def write_network(net, users_path, edges_path):
    """Write a SocialNetwork in the same format load_network reads."""
    with open(users_path, "w", encoding="utf-8") as fh:
        for u in net.users:
            attrs = {}
            for key, obj in u.attributes.items():
                attrs[key] = obj.text if obj.is_text else obj.feature_vector.tolist()
            fh.write(json.dumps({"id": u.local_id, "attrs": attrs}, sort_keys=True))
            fh.write("\n")
    with open(edges_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        for edge in net.edges:
            writer.writerow(edge)


def load_anchor_pairs(path):
    """Read ``source_id,target_id`` anchor rows (no header)."""
    pairs = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row:
                continue
            if len(row) != 2:
                raise InputError(f"{path}:{lineno}: expected 'source_id,target_id', got {row!r}")
            pairs.append((row[0].strip(), row[1].strip()))
    return pairs
