import dataclasses
import json
import random

import pytest

from heurex.design_tree import (
    ChildrenOnNonGroupError,
    DuplicateIdError,
    MalformedJsonError,
    NegativeDimensionError,
    is_placeholder_name,
    lookup,
    parse_document,
    serialize_document,
    unnamed_groups,
    validate_document,
)

from conftest import make_doc, make_group, make_node, random_document_obj

MINIMAL = '{"root":{"id":"r","name":"screen","type":"GROUP","bounds":[0,0,375,812],"children":[]}}'


class TestParse:
    def test_minimal_document(self):
        doc = parse_document(MINIMAL)
        assert doc.root.id == "r"
        assert doc.root.is_group
        assert doc.root.children == ()
        assert doc.root.bounds.width == 375
        # Screen defaults to the root bounds when absent.
        assert doc.screen == doc.root.bounds

    def test_accepts_bytes(self):
        doc = parse_document(MINIMAL.encode("utf-8"))
        assert doc.root.id == "r"

    def test_unknown_fields_ignored(self):
        raw = json.loads(MINIMAL)
        raw["root"]["visible"] = True
        raw["root"]["plugin_data"] = {"x": 1}
        raw["export_settings"] = []
        doc = parse_document(json.dumps(raw))
        assert doc.root.id == "r"

    def test_duplicate_id(self):
        raw = {
            "root": {
                "id": "r",
                "type": "GROUP",
                "bounds": [0, 0, 100, 100],
                "children": [
                    {"id": "a", "type": "TEXT", "bounds": [0, 0, 10, 10]},
                    {"id": "a", "type": "TEXT", "bounds": [20, 0, 10, 10]},
                ],
            }
        }
        with pytest.raises(DuplicateIdError) as excinfo:
            parse_document(json.dumps(raw))
        assert excinfo.value.node_id == "a"

    def test_children_on_non_group(self):
        raw = {
            "root": {
                "id": "r",
                "type": "GROUP",
                "bounds": [0, 0, 100, 100],
                "children": [
                    {
                        "id": "t",
                        "type": "TEXT",
                        "bounds": [0, 0, 10, 10],
                        "children": [
                            {"id": "x", "type": "TEXT", "bounds": [0, 0, 5, 5]}
                        ],
                    }
                ],
            }
        }
        with pytest.raises(ChildrenOnNonGroupError) as excinfo:
            parse_document(json.dumps(raw))
        assert excinfo.value.node_id == "t"

    def test_negative_dimension(self):
        raw = {
            "root": {
                "id": "r",
                "type": "GROUP",
                "bounds": [0, 0, 100, 100],
                "children": [{"id": "b", "type": "ICON", "bounds": [0, 0, -4, 10]}],
            }
        }
        with pytest.raises(NegativeDimensionError) as excinfo:
            parse_document(json.dumps(raw))
        assert excinfo.value.node_id == "b"

    def test_not_json(self):
        with pytest.raises(MalformedJsonError):
            parse_document("{not json")

    def test_root_must_be_group(self):
        raw = {"root": {"id": "r", "type": "TEXT", "bounds": [0, 0, 10, 10]}}
        with pytest.raises(MalformedJsonError):
            parse_document(json.dumps(raw))

    def test_non_finite_bounds(self):
        raw = json.loads(MINIMAL)
        raw["root"]["bounds"] = [0, 0, float("nan"), 812]
        with pytest.raises(MalformedJsonError):
            parse_document(json.dumps(raw))

    def test_color_forms_agree(self):
        def doc_with_fill(fill):
            raw = {
                "root": {
                    "id": "r",
                    "type": "GROUP",
                    "bounds": [0, 0, 100, 100],
                    "children": [
                        {"id": "t", "type": "TEXT", "bounds": [0, 0, 10, 10], "fill": fill}
                    ],
                }
            }
            return parse_document(json.dumps(raw))

        hex_fill = doc_with_fill("#1a2b3c").lookup("t").fill
        list_fill = doc_with_fill([26, 43, 60]).lookup("t").fill
        dict_fill = doc_with_fill({"r": 26, "g": 43, "b": 60}).lookup("t").fill
        assert hex_fill == list_fill == dict_fill
        assert hex_fill.a == 1.0

    def test_out_of_range_channel_rejected(self):
        raw = {
            "root": {
                "id": "r",
                "type": "GROUP",
                "bounds": [0, 0, 100, 100],
                "children": [
                    {"id": "t", "type": "TEXT", "bounds": [0, 0, 10, 10],
                     "fill": [300, 0, 0]}
                ],
            }
        }
        with pytest.raises(MalformedJsonError):
            parse_document(json.dumps(raw))


class TestImmutability:
    def test_nodes_frozen(self):
        doc = parse_document(MINIMAL)
        with pytest.raises(dataclasses.FrozenInstanceError):
            doc.root.name = "other"
        with pytest.raises(dataclasses.FrozenInstanceError):
            doc.root.bounds.x = 5


class TestRoundTrip:
    def test_parse_serialize_identity_on_random_trees(self):
        rng = random.Random(401)
        for _ in range(100):
            obj = random_document_obj(rng)
            doc = parse_document(json.dumps(obj))
            again = parse_document(serialize_document(doc))
            assert again == doc


def _mutate_duplicate_id(obj, rng):
    nodes = _flatten(obj["root"])
    if len(nodes) < 2:
        return None
    a, b = rng.sample(nodes, 2)
    b["id"] = a["id"]
    return DuplicateIdError


def _mutate_children_on_leaf(obj, rng):
    leaves = [n for n in _flatten(obj["root"]) if n.get("type", "").upper() != "GROUP"]
    if not leaves:
        return None
    leaf = rng.choice(leaves)
    leaf["children"] = [{"id": "mutant", "type": "TEXT", "bounds": [0, 0, 1, 1]}]
    return ChildrenOnNonGroupError


def _mutate_negative_dimension(obj, rng):
    victim = rng.choice(_flatten(obj["root"]))
    victim["bounds"][rng.choice([2, 3])] = -abs(victim["bounds"][2]) - 1
    return NegativeDimensionError


def _mutate_non_finite(obj, rng):
    victim = rng.choice(_flatten(obj["root"]))
    victim["bounds"][rng.randrange(4)] = float("inf")
    return MalformedJsonError


def _flatten(node_obj):
    out = [node_obj]
    for child in node_obj.get("children", []):
        out.extend(_flatten(child))
    return out


class TestValidationFuzz:
    def test_targeted_mutations_rejected(self):
        """Each mutation violates exactly one invariant and must raise
        exactly the matching error; the unmutated document must parse."""
        rng = random.Random(402)
        mutators = [
            _mutate_duplicate_id,
            _mutate_children_on_leaf,
            _mutate_negative_dimension,
            _mutate_non_finite,
        ]
        applied = 0
        for i in range(200):
            obj = random_document_obj(rng)
            parse_document(json.dumps(obj))  # sanity: valid before mutation
            expected = mutators[i % len(mutators)](obj, rng)
            if expected is None:
                continue
            applied += 1
            with pytest.raises(expected):
                parse_document(json.dumps(obj))
        assert applied > 150

    def test_validate_document_matches_parser(self):
        root = make_group("r", [make_node("a"), make_node("a")])
        with pytest.raises(DuplicateIdError):
            validate_document(make_doc(root))


class TestLookup:
    def test_lookup_against_linear_scan(self):
        """Oracle: an independent recursive search over the tree."""

        def scan(node, wanted):
            if node.id == wanted:
                return node
            for child in node.children:
                found = scan(child, wanted)
                if found is not None:
                    return found
            return None

        children = [make_node(f"leaf{i}", x=i) for i in range(999)]
        doc = make_doc(make_group("r", children))
        rng = random.Random(403)
        for _ in range(50):
            wanted = f"leaf{rng.randrange(999)}"
            assert lookup(doc, wanted) is scan(doc.root, wanted)
        assert lookup(doc, "missing") is None
        assert scan(doc.root, "missing") is None

    def test_lookup_faster_than_scan_in_spirit(self):
        # The index is built once; a thousand lookups should not re-walk.
        children = [make_node(f"leaf{i}") for i in range(1000)]
        doc = make_doc(make_group("r", children))
        for i in range(1000):
            assert lookup(doc, f"leaf{i}").id == f"leaf{i}"


class TestUnnamedGroups:
    def test_placeholder_names(self):
        assert is_placeholder_name("")
        assert is_placeholder_name("   ")
        assert is_placeholder_name("Group 406")
        assert is_placeholder_name("Rectangle 12")
        assert not is_placeholder_name("Group of friends")
        assert not is_placeholder_name("search bar")
        assert not is_placeholder_name("group 12")

    def test_matches_preorder_filter_oracle(self):
        """Oracle: filter over an independently written preorder walk."""

        def preorder(node):
            yield node
            for child in node.children:
                yield from preorder(child)

        rng = random.Random(404)
        for _ in range(50):
            obj = random_document_obj(rng)
            doc = parse_document(json.dumps(obj))
            expected = [
                n.id
                for n in preorder(doc.root)
                if n.kind == "GROUP"
                and (
                    n.name.strip() == ""
                    or (
                        n.name.split(" ")[0] in ("Group", "Rectangle")
                        and len(n.name.split(" ")) == 2
                        and n.name.split(" ")[1].isdigit()
                    )
                )
            ]
            assert [n.id for n in unnamed_groups(doc)] == expected
