"""Shared builders for tests: quick node construction and random documents."""

from __future__ import annotations

import random
from pathlib import Path

import pytest

from heurex.design_tree import (
    Bounds,
    DesignDocument,
    DesignNode,
    SourceMeta,
    parse_document,
)

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"
SCREENS = sorted(FIXTURES.glob("screens/screen_*.json"))

NON_GROUP_KINDS = ("TEXT", "IMAGE", "ICON", "BUTTON", "INPUT", "RECTANGLE", "VECTOR")


def make_node(node_id, kind="RECTANGLE", x=0.0, y=0.0, w=10.0, h=10.0, **extra):
    return DesignNode(id=node_id, kind=kind, bounds=Bounds(x, y, w, h), **extra)


def make_group(node_id, children, x=0.0, y=0.0, w=375.0, h=812.0, **extra):
    return DesignNode(
        id=node_id,
        kind="GROUP",
        bounds=Bounds(x, y, w, h),
        children=tuple(children),
        **extra,
    )


def make_doc(root, title="test screen"):
    return DesignDocument(root=root, screen=root.bounds, meta=SourceMeta(title=title))


def load_screen(index: int) -> DesignDocument:
    return parse_document(SCREENS[index - 1].read_bytes())


@pytest.fixture
def screen_doc():
    return load_screen(1)


# ---------------------------------------------------------------------------
# Random document JSON in the wire format, for round-trip and fuzz tests.


def random_color_obj(rng: random.Random):
    r, g, b = rng.randrange(256), rng.randrange(256), rng.randrange(256)
    form = rng.randrange(3)
    if form == 0:
        return "#{:02x}{:02x}{:02x}".format(r, g, b)
    alpha = rng.choice([1.0, 1.0, round(rng.random(), 3)])
    if form == 1:
        return [r, g, b, alpha]
    return {"r": r, "g": g, "b": b, "a": alpha}


def random_name(rng: random.Random) -> str:
    roll = rng.random()
    if roll < 0.25:
        return ""
    if roll < 0.45:
        return f"{rng.choice(['Group', 'Rectangle'])} {rng.randrange(1000)}"
    return rng.choice(
        ["header", "price label", "search bar", "avatar", "cta button", "hero image"]
    )


def random_node_obj(rng: random.Random, counter: list[int], depth: int) -> dict:
    counter[0] += 1
    node_id = f"n{counter[0]}"
    as_group = depth > 0 and rng.random() < 0.4
    kind = "GROUP" if as_group else rng.choice(NON_GROUP_KINDS)
    obj = {
        "id": node_id,
        "type": kind if rng.random() < 0.8 else kind.lower(),
        "bounds": [
            round(rng.uniform(0, 400), 3),
            round(rng.uniform(0, 800), 3),
            round(rng.uniform(0, 300), 3),
            round(rng.uniform(0, 300), 3),
        ],
    }
    if rng.random() < 0.8:
        obj["name"] = random_name(rng)
    if not as_group:
        if kind in ("TEXT", "text") or rng.random() < 0.2:
            obj["text"] = rng.choice(["Continue", "9:41", "Add to cart", "Hello"])
            obj["font"] = {
                "family": rng.choice(["Inter", "SF Pro"]),
                "size": float(rng.choice([12, 14, 15, 17, 20])),
                "weight": rng.choice([400, 500, 600, 700]),
            }
        if rng.random() < 0.6:
            obj["fill"] = random_color_obj(rng)
        if rng.random() < 0.2:
            obj["stroke"] = {
                "color": random_color_obj(rng),
                "weight": rng.choice([0.0, 1.0, 2.0]),
            }
    else:
        if rng.random() < 0.3:
            obj["background"] = random_color_obj(rng)
        obj["children"] = [
            random_node_obj(rng, counter, depth - 1)
            for _ in range(rng.randrange(0, 4))
        ]
    return obj


def random_document_obj(rng: random.Random) -> dict:
    counter = [0]
    root = {
        "id": "root",
        "name": rng.choice(["", "screen"]),
        "type": "GROUP",
        "bounds": [0.0, 0.0, 375.0, 812.0],
        "children": [random_node_obj(rng, counter, 3) for _ in range(rng.randrange(1, 5))],
    }
    doc: dict = {"root": root}
    if rng.random() < 0.7:
        doc["screen"] = [0.0, 0.0, 375.0, 812.0]
    if rng.random() < 0.7:
        doc["meta"] = {"title": "fuzz screen", "exported_at": "2024-01-01T00:00:00Z"}
    return doc
