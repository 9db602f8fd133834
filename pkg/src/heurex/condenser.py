"""Shrink a design document into the compact JSON handed to the model.

Condensation is lossy only for things a reviewer cannot see: source metadata,
placeholder names, default-valued styling, and sub-pixel coordinates. Text
content is never summarized. Output key order is fixed so the same document
always condenses to the same bytes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .design_tree import Color, DesignDocument, DesignNode, is_placeholder_name
from .errors import HeurexError

DEFAULT_TOKEN_BUDGET = 8100
DEFAULT_CHARS_PER_TOKEN = 4


class UnknownIdError(HeurexError, KeyError):
    def __init__(self, node_id: str):
        super().__init__(f"no node with id {node_id!r}")
        self.node_id = node_id


@dataclass(frozen=True)
class CondenseOptions:
    round_px: bool = True
    drop_defaults: bool = True


@dataclass(frozen=True)
class TokenEstimate:
    tokens: int

    def __post_init__(self):
        if self.tokens < 0:
            raise ValueError("token estimate cannot be negative")


@dataclass(frozen=True)
class CondensedUiJson:
    """The serialized text plus the tree it was rendered from."""

    text: str
    root: dict


def condense(
    doc: DesignDocument, opts: CondenseOptions = CondenseOptions()
) -> CondensedUiJson:
    root = _condense_node(doc.root, opts)
    return CondensedUiJson(text=_render(root), root=root)


def subtree_condensed(
    doc: DesignDocument, node_id: str, opts: CondenseOptions = CondenseOptions()
) -> CondensedUiJson:
    """Condensed form of a single subtree, used for dismissal snapshots."""
    node = doc.lookup(node_id)
    if node is None:
        raise UnknownIdError(node_id)
    root = _condense_node(node, opts)
    return CondensedUiJson(text=_render(root), root=root)


def estimate_tokens(
    text: str | CondensedUiJson, chars_per_token: int = DEFAULT_CHARS_PER_TOKEN
) -> TokenEstimate:
    """Upper-bound token count via the characters-per-token heuristic."""
    if isinstance(text, CondensedUiJson):
        text = text.text
    if chars_per_token < 1:
        raise ValueError("chars_per_token must be >= 1")
    return TokenEstimate(tokens=math.ceil(len(text) / chars_per_token))


def _render(root: dict) -> str:
    return json.dumps(root, separators=(",", ":"), ensure_ascii=False)


def _condense_node(node: DesignNode, opts: CondenseOptions) -> dict:
    obj: dict = {"id": node.id}
    if not is_placeholder_name(node.name):
        obj["name"] = node.name
    obj["type"] = node.kind
    obj["bounds"] = [_px(v, opts) for v in node.bounds.as_list()]
    if node.text:
        obj["text"] = node.text
    if node.font is not None:
        font: dict = {}
        if node.font.family is not None:
            font["family"] = node.font.family
        if node.font.size is not None:
            font["size"] = _px(node.font.size, opts)
        if node.font.weight is not None:
            font["weight"] = node.font.weight
        if font:
            obj["font"] = font
    if node.fill is not None:
        obj["fill"] = _color_value(node.fill, opts)
    if node.background is not None:
        obj["background"] = _color_value(node.background, opts)
    if node.stroke is not None and not (opts.drop_defaults and node.stroke.weight == 0):
        obj["stroke"] = {
            "color": _color_value(node.stroke.color, opts),
            "weight": _px(node.stroke.weight, opts),
        }
    if node.is_group:
        obj["children"] = [_condense_node(c, opts) for c in node.children]
    elif node.children:
        obj["children"] = [_condense_node(c, opts) for c in node.children]
    return obj


def _px(value: float, opts: CondenseOptions):
    if not opts.round_px:
        return value
    return int(round(value))


def _color_value(color: Color, opts: CondenseOptions):
    # Fully opaque colors collapse to a hex string; translucency keeps the
    # alpha channel alongside it.
    if opts.drop_defaults and color.a == 1.0:
        return color.hex_rgb()
    return {"color": color.hex_rgb(), "alpha": color.a}
