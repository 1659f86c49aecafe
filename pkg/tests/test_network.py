import json

import numpy as np
import pytest

from factoidlink.exceptions import InputError
from factoidlink.network import (
    AttributeObject,
    SocialNetwork,
    UserRecord,
    load_anchor_pairs,
    load_network,
    write_network,
)


def write_users(path, records):
    with open(path, "w") as fh:
        for record in records:
            fh.write(json.dumps(record) + "\n")


def write_edges(path, rows):
    with open(path, "w") as fh:
        for follower, followee in rows:
            fh.write(f"{follower},{followee}\n")


class TestAttributeObject:
    def test_text_normalized_and_trimmed(self):
        # NFC: "e" + combining acute collapses to a single code point
        obj = AttributeObject(text="  Amélie ")
        assert obj.text == "Amélie"

    def test_empty_text_rejected(self):
        with pytest.raises(InputError):
            AttributeObject(text="   ")

    def test_vector_is_readonly_float64(self):
        obj = AttributeObject(feature_vector=[1, 2, 3])
        assert obj.feature_vector.dtype == np.float64
        with pytest.raises(ValueError):
            obj.feature_vector[0] = 9.0

    def test_exactly_one_kind(self):
        with pytest.raises(InputError):
            AttributeObject(text="x", feature_vector=[1.0])
        with pytest.raises(InputError):
            AttributeObject()

    def test_non_finite_vector_rejected(self):
        with pytest.raises(InputError):
            AttributeObject(feature_vector=[1.0, float("nan")])

    def test_identical_text_objects_compare_equal(self):
        assert AttributeObject(text="Amy Tan") == AttributeObject(text="Amy Tan ")


class TestSocialNetworkInvariants:
    def test_duplicate_ids_rejected(self):
        users = [UserRecord("a"), UserRecord("a")]
        with pytest.raises(InputError, match="duplicate"):
            SocialNetwork("n", users, [])

    def test_dangling_edge_rejected(self):
        with pytest.raises(InputError, match="undeclared"):
            SocialNetwork("n", [UserRecord("a")], [("a", "99")])

    def test_self_loop_rejected(self):
        with pytest.raises(InputError, match="self-loop"):
            SocialNetwork("n", [UserRecord("a")], [("a", "a")])

    def test_whitespace_id_rejected(self):
        with pytest.raises(InputError):
            UserRecord("a b")


class TestLoadNetwork:
    def test_loads_users_and_edges(self, tmp_path):
        users = tmp_path / "users.jsonl"
        edges = tmp_path / "edges.csv"
        write_users(users, [
            {"id": str(i), "attrs": {"username": f"user {i}"}} for i in range(1, 6)
        ])
        write_edges(edges, [("1", "2"), ("2", "1"), ("1", "3"), ("3", "1"),
                            ("3", "2"), ("4", "3"), ("5", "3")])
        net = load_network(users, edges, "twitter")
        assert len(net.users) == 5
        assert len(net.edges) == 7
        assert net.user("1").attributes["username"].text == "user 1"

    def test_empty_users_file(self, tmp_path):
        users = tmp_path / "users.jsonl"
        edges = tmp_path / "edges.csv"
        users.write_text("")
        edges.write_text("")
        net = load_network(users, edges, "empty")
        assert net.users == [] and net.edges == []

    def test_dangling_edge_error(self, tmp_path):
        users = tmp_path / "users.jsonl"
        edges = tmp_path / "edges.csv"
        write_users(users, [{"id": "1"}])
        write_edges(edges, [("1", "99")])
        with pytest.raises(InputError, match="99"):
            load_network(users, edges, "n")

    def test_parse_error_carries_line_number(self, tmp_path):
        users = tmp_path / "users.jsonl"
        edges = tmp_path / "edges.csv"
        users.write_text('{"id": "1"}\n{broken\n')
        edges.write_text("")
        with pytest.raises(InputError, match=":2"):
            load_network(users, edges, "n")

    def test_unknown_attribute_rejected(self, tmp_path):
        users = tmp_path / "users.jsonl"
        edges = tmp_path / "edges.csv"
        write_users(users, [{"id": "1", "attrs": {"shoe_size": "42"}}])
        edges.write_text("")
        with pytest.raises(InputError, match="shoe_size"):
            load_network(users, edges, "n")

    def test_duplicate_id_error(self, tmp_path):
        users = tmp_path / "users.jsonl"
        edges = tmp_path / "edges.csv"
        write_users(users, [{"id": "1"}, {"id": "1"}])
        edges.write_text("")
        with pytest.raises(InputError, match="duplicate"):
            load_network(users, edges, "n")

    def test_duplicate_attr_key_rejected(self, tmp_path):
        users = tmp_path / "users.jsonl"
        edges = tmp_path / "edges.csv"
        users.write_text('{"id": "1", "attrs": {"username": "a", "username": "b"}}\n')
        edges.write_text("")
        with pytest.raises(InputError, match="duplicate key"):
            load_network(users, edges, "n")

    def test_vector_dimensions_must_agree(self, tmp_path):
        users = tmp_path / "users.jsonl"
        edges = tmp_path / "edges.csv"
        write_users(users, [
            {"id": "1", "attrs": {"image_features": [1.0, 2.0]}},
            {"id": "2", "attrs": {"image_features": [1.0, 2.0, 3.0]}},
        ])
        edges.write_text("")
        with pytest.raises(InputError, match="dimension"):
            load_network(users, edges, "n")

    def test_round_trip_through_write_network(self, tmp_path):
        original = SocialNetwork("n", [
            UserRecord("a", {"username": AttributeObject(text="Ann"),
                             "image_features": AttributeObject(feature_vector=[0.5, -0.25])}),
            UserRecord("b", {"screen_name": AttributeObject(text="Bee")}),
        ], [("a", "b")])
        write_network(original, tmp_path / "u.jsonl", tmp_path / "e.csv")
        loaded = load_network(tmp_path / "u.jsonl", tmp_path / "e.csv", "n")
        assert loaded.user_ids == ["a", "b"]
        assert loaded.edges == [("a", "b")]
        assert loaded.user("a").attributes["username"].text == "Ann"
        assert np.allclose(loaded.user("a").attributes["image_features"].feature_vector, [0.5, -0.25])


def test_load_anchor_pairs(tmp_path):
    path = tmp_path / "anchors.csv"
    path.write_text("1,6\n2,7\n")
    assert load_anchor_pairs(path) == [("1", "6"), ("2", "7")]
