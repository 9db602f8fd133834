"""Deterministic lint checks for the computable subset of the guidelines.

Each check inspects raw geometry or color and reports findings with the
measured values attached. The checks are intentionally narrower than a full
review: they only flag what can be decided from bounds and colors alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from statistics import median

from .design_tree import GROUP, TEXT, Bounds, Color, DesignDocument, DesignNode
from .errors import HeurexError


class RuleEngineError(HeurexError, ValueError):
    pass


class MissingColorError(RuleEngineError):
    def __init__(self, node_id: str, which: str):
        super().__init__(f"node {node_id!r} has no {which} color to measure")
        self.node_id = node_id
        self.which = which


@dataclass(frozen=True)
class RuleConfig:
    epsilon_align: float = 1.0
    epsilon_gap: float = 2.0
    min_contrast: float = 4.5
    overlap_min_fraction: float = 0.05

    def __post_init__(self):
        for name in ("epsilon_align", "epsilon_gap", "overlap_min_fraction"):
            if getattr(self, name) < 0:
                raise RuleEngineError(f"{name} must be >= 0")
        if self.min_contrast < 1.0:
            raise RuleEngineError("min_contrast must be >= 1")


@dataclass(frozen=True)
class RuleFinding:
    rule_id: str
    guideline: str
    node_ids: tuple[str, ...]
    values: dict
    message: str

    def __post_init__(self):
        if not self.node_ids:
            raise RuleEngineError("a finding must reference at least one node")


# Which guideline (and set) each rule reports against. Rules whose set is not
# selected are skipped entirely.
RULE_GUIDELINES: dict[str, tuple[str, str]] = {
    "edge_alignment": ("nielsen", "Consistency and Standards"),
    "center_alignment": ("nielsen", "Consistency and Standards"),
    "spacing": ("nielsen", "Consistency and Standards"),
    "size_consistency": ("nielsen", "Consistency and Standards"),
    "overlap": ("crowdcrit", "Layout"),
    "contrast": ("crowdcrit", "Readability"),
}


def _fmt(value: float) -> str:
    """Pixels and ratios without float noise: 3 -> "3", 3.25 -> "3.25"."""
    rounded = round(value, 2)
    if rounded == int(rounded):
        return str(int(rounded))
    return f"{rounded:g}"


def _modal_value(
    values: list[float], eps: float, min_support: int
) -> tuple[float, int] | None:
    """The value supported by the most peers within eps; ties pick the
    smallest value. None when even the best line has fewer than min_support
    members."""
    best: tuple[float, int] | None = None
    for candidate in sorted(set(values)):
        support = sum(1 for v in values if abs(v - candidate) <= eps)
        if best is None or support > best[1]:
            best = (candidate, support)
    if best is None or best[1] < min_support:
        return None
    return best


def check_edge_alignment(
    siblings: list[DesignNode], cfg: RuleConfig = RuleConfig()
) -> list[RuleFinding]:
    """Flag siblings whose left, right, or top edge strays from the edge line
    shared by at least two peers."""
    findings: list[RuleFinding] = []
    if len(siblings) < 2:
        return findings
    guideline = RULE_GUIDELINES["edge_alignment"][1]
    edges = (
        ("left", lambda b: b.x),
        ("right", lambda b: b.right),
        ("top", lambda b: b.y),
    )
    for edge_name, getter in edges:
        values = [getter(n.bounds) for n in siblings]
        modal = _modal_value(values, cfg.epsilon_align, min_support=2)
        if modal is None:
            continue
        line, _ = modal
        for node, value in zip(siblings, values):
            offset = abs(value - line)
            if offset > cfg.epsilon_align:
                findings.append(
                    RuleFinding(
                        rule_id="edge_alignment",
                        guideline=guideline,
                        node_ids=(node.id,),
                        values={"edge": edge_name, "offset": offset, "line": line},
                        message=(
                            f"{edge_name} edge at {_fmt(value)}px sits {_fmt(offset)}px "
                            f"off the shared {edge_name} edge at {_fmt(line)}px"
                        ),
                    )
                )
    return findings


def check_center_alignment(
    siblings: list[DesignNode], cfg: RuleConfig = RuleConfig()
) -> list[RuleFinding]:
    """Flag siblings whose center strays from the most common center line.

    Centers, not bounding-box edges, decide alignment here: boxes of different
    sizes with equal centers are aligned.
    """
    findings: list[RuleFinding] = []
    if len(siblings) < 2:
        return findings
    guideline = RULE_GUIDELINES["center_alignment"][1]
    axes = (
        ("x", lambda b: b.center_x),
        ("y", lambda b: b.center_y),
    )
    for axis, getter in axes:
        values = [getter(n.bounds) for n in siblings]
        modal = _modal_value(values, cfg.epsilon_align, min_support=1)
        if modal is None:
            continue
        line, _ = modal
        for node, value in zip(siblings, values):
            offset = abs(value - line)
            if offset > cfg.epsilon_align:
                findings.append(
                    RuleFinding(
                        rule_id="center_alignment",
                        guideline=guideline,
                        node_ids=(node.id,),
                        values={"axis": axis, "offset": offset, "line": line},
                        message=(
                            f"center-{axis} at {_fmt(value)}px is {_fmt(offset)}px off "
                            f"the common center line at {_fmt(line)}px"
                        ),
                    )
                )
    return findings


def check_spacing(
    siblings: list[DesignNode], cfg: RuleConfig = RuleConfig(), axis: str = "x"
) -> list[RuleFinding]:
    """Flag gaps between consecutive siblings that deviate from the median
    gap along the given axis. Needs at least three siblings."""
    if axis not in ("x", "y"):
        raise RuleEngineError(f"axis must be 'x' or 'y', got {axis!r}")
    if len(siblings) < 3:
        return []
    guideline = RULE_GUIDELINES["spacing"][1]
    if axis == "x":
        ordered = sorted(siblings, key=lambda n: (n.bounds.x, n.id))
        gaps = [
            (a, b, b.bounds.x - a.bounds.right)
            for a, b in zip(ordered, ordered[1:])
        ]
    else:
        ordered = sorted(siblings, key=lambda n: (n.bounds.y, n.id))
        gaps = [
            (a, b, b.bounds.y - a.bounds.bottom)
            for a, b in zip(ordered, ordered[1:])
        ]
    med = median(g for _, _, g in gaps)
    findings: list[RuleFinding] = []
    for a, b, gap in gaps:
        deviation = abs(gap - med)
        if deviation > cfg.epsilon_gap:
            findings.append(
                RuleFinding(
                    rule_id="spacing",
                    guideline=guideline,
                    node_ids=(a.id, b.id),
                    values={"axis": axis, "gap": gap, "median": med},
                    message=(
                        f"gap of {_fmt(gap)}px along {axis} deviates from the "
                        f"median gap of {_fmt(med)}px"
                    ),
                )
            )
    return findings


def check_size_consistency(
    siblings: list[DesignNode], cfg: RuleConfig = RuleConfig()
) -> list[RuleFinding]:
    """Flag same-kind siblings whose width or height strays from the modal
    size of their kind. Nodes of different kinds are never compared."""
    findings: list[RuleFinding] = []
    by_kind: dict[str, list[DesignNode]] = {}
    for node in siblings:
        by_kind.setdefault(node.kind, []).append(node)
    guideline = RULE_GUIDELINES["size_consistency"][1]
    for kind in sorted(by_kind):
        peers = by_kind[kind]
        if len(peers) < 2:
            continue
        for dimension, getter in (
            ("width", lambda b: b.width),
            ("height", lambda b: b.height),
        ):
            values = [getter(n.bounds) for n in peers]
            modal = _modal_value(values, cfg.epsilon_align, min_support=2)
            if modal is None:
                continue
            size, _ = modal
            for node, value in zip(peers, values):
                deviation = abs(value - size)
                if deviation > cfg.epsilon_align:
                    findings.append(
                        RuleFinding(
                            rule_id="size_consistency",
                            guideline=guideline,
                            node_ids=(node.id,),
                            values={
                                "kind": kind,
                                "dimension": dimension,
                                "value": value,
                                "modal": size,
                            },
                            message=(
                                f"{kind} {dimension} of {_fmt(value)}px differs from "
                                f"the {_fmt(size)}px shared by its peers"
                            ),
                        )
                    )
    return findings


def _intersection_area(a: Bounds, b: Bounds) -> float:
    w = min(a.right, b.right) - max(a.x, b.x)
    h = min(a.bottom, b.bottom) - max(a.y, b.y)
    if w <= 0 or h <= 0:
        return 0.0
    return w * h


def check_overlap(
    nodes: list[DesignNode], cfg: RuleConfig = RuleConfig()
) -> list[RuleFinding]:
    """Flag node pairs whose intersection covers more than the configured
    fraction of the smaller box. Ancestor/descendant pairs are exempt since
    containment is how trees work."""
    findings: list[RuleFinding] = []
    guideline = RULE_GUIDELINES["overlap"][1]
    subtree_ids = [frozenset(n.id for n in node.walk()) for node in nodes]
    for i in range(len(nodes)):
        for j in range(i + 1, len(nodes)):
            a, b = nodes[i], nodes[j]
            if b.id in subtree_ids[i] or a.id in subtree_ids[j]:
                continue
            smaller = min(a.bounds.area, b.bounds.area)
            if smaller <= 0:
                continue
            inter = _intersection_area(a.bounds, b.bounds)
            fraction = inter / smaller
            if fraction > cfg.overlap_min_fraction:
                findings.append(
                    RuleFinding(
                        rule_id="overlap",
                        guideline=guideline,
                        node_ids=(a.id, b.id),
                        values={"fraction": fraction, "area": inter},
                        message=(
                            f"boxes overlap by {_fmt(fraction * 100)}% of the "
                            f"smaller element"
                        ),
                    )
                )
    return findings


# ---------------------------------------------------------------------------
# Contrast


def relative_luminance(color: Color) -> float:
    """WCAG 2.x relative luminance of an sRGB color."""

    def channel(v: int) -> float:
        c = v / 255
        return c / 12.92 if c <= 0.03928 else ((c + 0.055) / 1.055) ** 2.4

    return (
        0.2126 * channel(color.r)
        + 0.7152 * channel(color.g)
        + 0.0722 * channel(color.b)
    )


def contrast_ratio(a: Color, b: Color) -> float:
    """WCAG contrast ratio between two opaque colors, from 1 to 21."""
    la, lb = relative_luminance(a), relative_luminance(b)
    lighter, darker = max(la, lb), min(la, lb)
    return (lighter + 0.05) / (darker + 0.05)


def composite_over(top: Color, base: Color) -> Color:
    """Alpha-composite `top` over an opaque `base`."""
    a = top.a
    return Color(
        r=int(round(top.r * a + base.r * (1 - a))),
        g=int(round(top.g * a + base.g * (1 - a))),
        b=int(round(top.b * a + base.b * (1 - a))),
        a=1.0,
    )


def effective_background(doc: DesignDocument, node_id: str) -> Color | None:
    """Background color behind a node, compositing ancestor fills from the
    root downward. The outermost layer is taken as opaque. None when no
    ancestor paints anything."""
    path = doc.path_to(node_id)
    if not path:
        return None
    layers: list[Color] = []
    for ancestor in path[:-1]:
        paint = ancestor.background or ancestor.fill
        if paint is not None:
            layers.append(paint)
    own = path[-1].background
    if own is not None:
        layers.append(own)
    if not layers:
        return None
    base = Color(layers[0].r, layers[0].g, layers[0].b, 1.0)
    for layer in layers[1:]:
        base = composite_over(layer, base)
    return base


def check_contrast(
    node: DesignNode,
    cfg: RuleConfig = RuleConfig(),
    background: Color | None = None,
) -> list[RuleFinding]:
    """Flag a text node whose fill fails the WCAG contrast threshold against
    its effective background."""
    fill = node.fill
    if fill is None:
        raise MissingColorError(node.id, "fill")
    bg = background if background is not None else node.background
    if bg is None:
        raise MissingColorError(node.id, "background")
    bg = Color(bg.r, bg.g, bg.b, 1.0)
    # Translucent text blends into its background before contrast is judged.
    ratio = contrast_ratio(composite_over(fill, bg), bg)
    if ratio >= cfg.min_contrast:
        return []
    return [
        RuleFinding(
            rule_id="contrast",
            guideline=RULE_GUIDELINES["contrast"][1],
            node_ids=(node.id,),
            values={"ratio": ratio, "minimum": cfg.min_contrast},
            message=(
                f"text contrast ratio {ratio:.2f}:1 is below the "
                f"{_fmt(cfg.min_contrast)}:1 minimum"
            ),
        )
    ]


# ---------------------------------------------------------------------------
# Orchestration


def _arrangement_axis(children: tuple[DesignNode, ...]) -> str | None:
    """"x" when siblings form a left-to-right row, "y" for a top-to-bottom
    column, None when neither holds."""
    eps = 1e-9
    by_x = sorted(children, key=lambda n: (n.bounds.x, n.id))
    if all(b.bounds.x >= a.bounds.right - eps for a, b in zip(by_x, by_x[1:])):
        return "x"
    by_y = sorted(children, key=lambda n: (n.bounds.y, n.id))
    if all(b.bounds.y >= a.bounds.bottom - eps for a, b in zip(by_y, by_y[1:])):
        return "y"
    return None


def run_rules(
    doc: DesignDocument,
    set_ids: list[str] | tuple[str, ...],
    cfg: RuleConfig = RuleConfig(),
) -> list[RuleFinding]:
    """Run every check whose mapped guideline belongs to a selected set.

    Findings come back in a deterministic order: by preorder position of the
    first referenced node, then by rule id.
    """
    selected = set(set_ids)
    active = {
        rule for rule, (set_id, _) in RULE_GUIDELINES.items() if set_id in selected
    }
    findings: list[RuleFinding] = []

    for node in doc.root.walk():
        if not node.is_group or len(node.children) < 2:
            continue
        children = list(node.children)
        if "edge_alignment" in active:
            findings.extend(check_edge_alignment(children, cfg))
        if "size_consistency" in active:
            findings.extend(check_size_consistency(children, cfg))
        axis = _arrangement_axis(node.children)
        if "center_alignment" in active:
            # Cross-axis centers matter in a row or column; for free-form
            # groups both axes are checked.
            if axis == "x":
                findings.extend(_center_axis(children, cfg, "y"))
            elif axis == "y":
                findings.extend(_center_axis(children, cfg, "x"))
            else:
                findings.extend(check_center_alignment(children, cfg))
        if "spacing" in active and axis is not None and len(children) >= 3:
            findings.extend(check_spacing(children, cfg, axis=axis))

    if "overlap" in active:
        findings.extend(check_overlap(list(doc.root.walk()), cfg))

    if "contrast" in active:
        for node in doc.root.walk():
            if node.kind != TEXT or node.fill is None:
                continue
            bg = effective_background(doc, node.id)
            if bg is None:
                continue
            findings.extend(check_contrast(node, cfg, background=bg))

    order = {n.id: i for i, n in enumerate(doc.root.walk())}
    findings.sort(key=lambda f: (order.get(f.node_ids[0], len(order)), f.rule_id))
    return findings


def _center_axis(
    siblings: list[DesignNode], cfg: RuleConfig, axis: str
) -> list[RuleFinding]:
    """check_center_alignment restricted to one axis."""
    all_findings = check_center_alignment(siblings, cfg)
    return [f for f in all_findings if f.values["axis"] == axis]
