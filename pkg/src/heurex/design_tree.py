"""Parse, validate, and index design documents describing one static UI screen.

The wire format is the "heurex-design/1" JSON dialect: a tree of nodes, each
with a unique id, a type, pixel bounds serialized as [x, y, width, height],
and optional name, text, font, and color attributes. Only GROUP nodes carry
children. Documents are immutable after parsing.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator

from .errors import HeurexError

SCHEMA_VERSION = "heurex-design/1"

GROUP = "GROUP"
TEXT = "TEXT"
IMAGE = "IMAGE"
ICON = "ICON"
BUTTON = "BUTTON"
INPUT = "INPUT"
RECTANGLE = "RECTANGLE"

KNOWN_KINDS = frozenset({GROUP, TEXT, IMAGE, ICON, BUTTON, INPUT, RECTANGLE})

# Auto-generated editor names carry no meaning and are treated as absent.
_PLACEHOLDER_RE = re.compile(r"^(Group|Rectangle) \d+$")


class DesignTreeError(HeurexError, ValueError):
    """A document failed structural validation."""


class MalformedJsonError(DesignTreeError):
    pass


class DuplicateIdError(DesignTreeError):
    def __init__(self, node_id: str):
        super().__init__(f"duplicate node id {node_id!r}")
        self.node_id = node_id


class ChildrenOnNonGroupError(DesignTreeError):
    def __init__(self, node_id: str):
        super().__init__(f"node {node_id!r} is not a GROUP but has children")
        self.node_id = node_id


class NegativeDimensionError(DesignTreeError):
    def __init__(self, node_id: str):
        super().__init__(f"node {node_id!r} has a negative width or height")
        self.node_id = node_id


@dataclass(frozen=True)
class Bounds:
    """Axis-aligned pixel rectangle, positioned from the screen's top-left."""

    x: float
    y: float
    width: float
    height: float

    @property
    def right(self) -> float:
        return self.x + self.width

    @property
    def bottom(self) -> float:
        return self.y + self.height

    @property
    def center_x(self) -> float:
        return self.x + self.width / 2

    @property
    def center_y(self) -> float:
        return self.y + self.height / 2

    @property
    def area(self) -> float:
        return self.width * self.height

    def translate(self, dx: float, dy: float) -> "Bounds":
        return Bounds(self.x + dx, self.y + dy, self.width, self.height)

    def as_list(self) -> list[float]:
        return [self.x, self.y, self.width, self.height]


@dataclass(frozen=True)
class Color:
    """RGB channels as 0-255 integers plus an opacity in [0, 1]."""

    r: int
    g: int
    b: int
    a: float = 1.0

    def hex_rgb(self) -> str:
        return "#{:02x}{:02x}{:02x}".format(self.r, self.g, self.b)


@dataclass(frozen=True)
class Font:
    family: str | None = None
    size: float | None = None
    weight: int | None = None


@dataclass(frozen=True)
class Stroke:
    color: Color
    weight: float = 1.0


@dataclass(frozen=True)
class SourceMeta:
    title: str = ""
    exported_at: str = ""


@dataclass(frozen=True)
class DesignNode:
    """One element of the design tree. Children are ordered and only GROUP
    nodes may have any."""

    id: str
    kind: str
    bounds: Bounds
    name: str = ""
    text: str | None = None
    font: Font | None = None
    fill: Color | None = None
    background: Color | None = None
    stroke: Stroke | None = None
    children: tuple["DesignNode", ...] = ()

    @property
    def is_group(self) -> bool:
        return self.kind == GROUP

    def walk(self) -> Iterator["DesignNode"]:
        """Yield this node and all descendants in preorder."""
        yield self
        for child in self.children:
            yield from child.walk()


@dataclass(frozen=True)
class DesignDocument:
    root: DesignNode
    screen: Bounds
    meta: SourceMeta = field(default_factory=SourceMeta)

    @cached_property
    def _index(self) -> dict[str, DesignNode]:
        return {node.id: node for node in self.root.walk()}

    @cached_property
    def _parents(self) -> dict[str, str]:
        parents: dict[str, str] = {}
        for node in self.root.walk():
            for child in node.children:
                parents[child.id] = node.id
        return parents

    def lookup(self, node_id: str) -> DesignNode | None:
        return self._index.get(node_id)

    def parent_of(self, node_id: str) -> DesignNode | None:
        parent_id = self._parents.get(node_id)
        return None if parent_id is None else self._index[parent_id]

    def path_to(self, node_id: str) -> list[DesignNode]:
        """Nodes from the root down to (and including) node_id."""
        if node_id not in self._index:
            return []
        chain = [self._index[node_id]]
        while chain[-1].id in self._parents:
            chain.append(self._index[self._parents[chain[-1].id]])
        chain.reverse()
        return chain


def is_placeholder_name(name: str) -> bool:
    """True for empty names and editor-generated ones like "Group 406"."""
    stripped = name.strip()
    return stripped == "" or _PLACEHOLDER_RE.match(stripped) is not None


def lookup(doc: DesignDocument, node_id: str) -> DesignNode | None:
    return doc.lookup(node_id)


def unnamed_groups(doc: DesignDocument) -> list[DesignNode]:
    """All GROUP nodes with an empty or placeholder name, in preorder."""
    return [
        node
        for node in doc.root.walk()
        if node.is_group and is_placeholder_name(node.name)
    ]


# ---------------------------------------------------------------------------
# Parsing


def parse_document(data: str | bytes) -> DesignDocument:
    """Parse and validate a heurex-design/1 JSON document.

    Unknown fields are ignored. Raises MalformedJsonError for structural
    problems, DuplicateIdError, ChildrenOnNonGroupError, or
    NegativeDimensionError for invariant violations.
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedJsonError(f"document is not valid UTF-8: {exc}") from exc
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise MalformedJsonError(f"document is not valid JSON: {exc}") from exc
    return document_from_obj(obj)


def document_from_obj(obj: object) -> DesignDocument:
    """Build a document from already-decoded JSON data."""
    if not isinstance(obj, dict):
        raise MalformedJsonError("top-level value must be an object")
    if "root" not in obj or not isinstance(obj["root"], dict):
        raise MalformedJsonError('document must carry a "root" object')

    seen: set[str] = set()
    root = _parse_node(obj["root"], seen)
    if not root.is_group:
        raise MalformedJsonError("root node must be a GROUP")

    screen = root.bounds
    if "screen" in obj:
        screen = _parse_bounds(obj["screen"], root.id)
    meta = SourceMeta()
    if isinstance(obj.get("meta"), dict):
        raw = obj["meta"]
        meta = SourceMeta(
            title=str(raw.get("title", "")),
            exported_at=str(raw.get("exported_at", "")),
        )
    return DesignDocument(root=root, screen=screen, meta=meta)


def _parse_node(obj: dict, seen: set[str]) -> DesignNode:
    node_id = obj.get("id")
    if not isinstance(node_id, str) or node_id == "":
        raise MalformedJsonError("every node needs a non-empty string id")
    if node_id in seen:
        raise DuplicateIdError(node_id)
    seen.add(node_id)

    kind = obj.get("type")
    if not isinstance(kind, str) or kind == "":
        raise MalformedJsonError(f"node {node_id!r} needs a string type")
    kind = kind.upper()

    bounds = _parse_bounds(obj.get("bounds"), node_id)
    if bounds.width < 0 or bounds.height < 0:
        raise NegativeDimensionError(node_id)

    name = obj.get("name", "")
    if not isinstance(name, str):
        raise MalformedJsonError(f"node {node_id!r} has a non-string name")

    text = obj.get("text")
    if text is not None and not isinstance(text, str):
        raise MalformedJsonError(f"node {node_id!r} has non-string text")

    font = _parse_font(obj.get("font"), node_id)
    fill = _parse_color(obj.get("fill"), node_id, "fill")
    background = _parse_color(obj.get("background"), node_id, "background")
    stroke = _parse_stroke(obj.get("stroke"), node_id)

    raw_children = obj.get("children", [])
    if not isinstance(raw_children, list):
        raise MalformedJsonError(f"node {node_id!r} children must be a list")
    if raw_children and kind != GROUP:
        raise ChildrenOnNonGroupError(node_id)
    children = tuple(_parse_node(c, seen) for c in raw_children)

    return DesignNode(
        id=node_id,
        kind=kind,
        bounds=bounds,
        name=name,
        text=text,
        font=font,
        fill=fill,
        background=background,
        stroke=stroke,
        children=children,
    )


def _parse_bounds(value: object, node_id: str) -> Bounds:
    if (
        not isinstance(value, list)
        or len(value) != 4
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        raise MalformedJsonError(
            f"node {node_id!r} bounds must be [x, y, width, height]"
        )
    coords = [float(v) for v in value]
    if not all(math.isfinite(v) for v in coords):
        raise MalformedJsonError(f"node {node_id!r} has non-finite bounds")
    return Bounds(*coords)


def _parse_color(value: object, node_id: str, field_name: str) -> Color | None:
    if value is None:
        return None
    if isinstance(value, str):
        m = re.fullmatch(r"#([0-9a-fA-F]{6})([0-9a-fA-F]{2})?", value)
        if not m:
            raise MalformedJsonError(
                f"node {node_id!r} {field_name} is not a #RRGGBB color"
            )
        rgb = m.group(1)
        alpha = int(m.group(2), 16) / 255 if m.group(2) else 1.0
        return Color(int(rgb[0:2], 16), int(rgb[2:4], 16), int(rgb[4:6], 16), alpha)
    if isinstance(value, list):
        if len(value) == 3:
            value = [*value, 1.0]
        if len(value) != 4:
            raise MalformedJsonError(
                f"node {node_id!r} {field_name} must be [r, g, b] or [r, g, b, a]"
            )
        r, g, b, a = value
        return _make_color(r, g, b, a, node_id, field_name)
    if isinstance(value, dict):
        missing = {"r", "g", "b"} - value.keys()
        if missing:
            raise MalformedJsonError(
                f"node {node_id!r} {field_name} is missing {sorted(missing)}"
            )
        return _make_color(
            value["r"], value["g"], value["b"], value.get("a", 1.0), node_id, field_name
        )
    raise MalformedJsonError(f"node {node_id!r} has an unreadable {field_name} color")


def _make_color(r, g, b, a, node_id: str, field_name: str) -> Color:
    channels = []
    for v in (r, g, b):
        if not isinstance(v, (int, float)) or isinstance(v, bool) or v != int(v):
            raise MalformedJsonError(
                f"node {node_id!r} {field_name} channels must be integers"
            )
        v = int(v)
        if not 0 <= v <= 255:
            raise MalformedJsonError(
                f"node {node_id!r} {field_name} channel {v} outside 0-255"
            )
        channels.append(v)
    if not isinstance(a, (int, float)) or isinstance(a, bool) or not 0.0 <= a <= 1.0:
        raise MalformedJsonError(
            f"node {node_id!r} {field_name} opacity must be within [0, 1]"
        )
    return Color(channels[0], channels[1], channels[2], float(a))


def _parse_font(value: object, node_id: str) -> Font | None:
    if value is None:
        return None
    if not isinstance(value, dict):
        raise MalformedJsonError(f"node {node_id!r} font must be an object")
    family = value.get("family")
    size = value.get("size")
    weight = value.get("weight")
    if family is not None and not isinstance(family, str):
        raise MalformedJsonError(f"node {node_id!r} font family must be a string")
    if size is not None:
        if not isinstance(size, (int, float)) or isinstance(size, bool) or size < 0:
            raise MalformedJsonError(f"node {node_id!r} font size must be >= 0")
        size = float(size)
    if weight is not None:
        if not isinstance(weight, int) or isinstance(weight, bool):
            raise MalformedJsonError(f"node {node_id!r} font weight must be an integer")
    return Font(family=family, size=size, weight=weight)


def _parse_stroke(value: object, node_id: str) -> Stroke | None:
    if value is None:
        return None
    if not isinstance(value, dict) or "color" not in value:
        raise MalformedJsonError(f"node {node_id!r} stroke needs a color")
    color = _parse_color(value["color"], node_id, "stroke")
    weight = value.get("weight", 1.0)
    if not isinstance(weight, (int, float)) or isinstance(weight, bool) or weight < 0:
        raise MalformedJsonError(f"node {node_id!r} stroke weight must be >= 0")
    return Stroke(color=color, weight=float(weight))


def validate_document(doc: DesignDocument) -> None:
    """Re-check the parse invariants on an in-memory document.

    Used when a session receives an updated document built programmatically
    rather than parsed from JSON.
    """
    if not doc.root.is_group:
        raise MalformedJsonError("root node must be a GROUP")
    seen: set[str] = set()
    for node in doc.root.walk():
        if node.id in seen:
            raise DuplicateIdError(node.id)
        seen.add(node.id)
        if node.children and not node.is_group:
            raise ChildrenOnNonGroupError(node.id)
        if node.bounds.width < 0 or node.bounds.height < 0:
            raise NegativeDimensionError(node.id)
        coords = (node.bounds.x, node.bounds.y, node.bounds.width, node.bounds.height)
        if not all(math.isfinite(v) for v in coords):
            raise MalformedJsonError(f"node {node.id!r} has non-finite bounds")


# ---------------------------------------------------------------------------
# Serialization


def serialize_document(doc: DesignDocument) -> str:
    """Full-fidelity JSON for a document; parse_document inverts it."""
    return json.dumps(document_to_obj(doc), separators=(",", ":"), ensure_ascii=False)


def document_to_obj(doc: DesignDocument) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "meta": {"title": doc.meta.title, "exported_at": doc.meta.exported_at},
        "screen": doc.screen.as_list(),
        "root": _node_to_obj(doc.root),
    }


def _node_to_obj(node: DesignNode) -> dict:
    obj: dict = {
        "id": node.id,
        "name": node.name,
        "type": node.kind,
        "bounds": node.bounds.as_list(),
    }
    if node.text is not None:
        obj["text"] = node.text
    if node.font is not None:
        font: dict = {}
        if node.font.family is not None:
            font["family"] = node.font.family
        if node.font.size is not None:
            font["size"] = node.font.size
        if node.font.weight is not None:
            font["weight"] = node.font.weight
        obj["font"] = font
    if node.fill is not None:
        obj["fill"] = _color_to_obj(node.fill)
    if node.background is not None:
        obj["background"] = _color_to_obj(node.background)
    if node.stroke is not None:
        obj["stroke"] = {
            "color": _color_to_obj(node.stroke.color),
            "weight": node.stroke.weight,
        }
    obj["children"] = [_node_to_obj(c) for c in node.children]
    return obj


def _color_to_obj(color: Color) -> dict:
    return {"r": color.r, "g": color.g, "b": color.b, "a": color.a}
