"""Regenerate the bundled 12-screen fixture set.

The screens are synthetic mobile mockups with the kinds of flaws the engine
looks for: stray edges, uneven gaps, odd-one-out sizes, low-contrast text,
and colliding boxes. Output is deterministic; run from the repo root:

    python scripts/gen_screens.py
"""

from __future__ import annotations

import json
import random
from pathlib import Path

OUT_DIR = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "screens"

WHITE = {"r": 255, "g": 255, "b": 255, "a": 1.0}
INK = {"r": 26, "g": 26, "b": 26, "a": 1.0}
MUTED = {"r": 120, "g": 125, "b": 133, "a": 1.0}
FAINT = {"r": 213, "g": 216, "b": 220, "a": 1.0}  # low contrast on white
BRAND = {"r": 84, "g": 61, "b": 214, "a": 1.0}
ACCENT = {"r": 255, "g": 90, "b": 95, "a": 1.0}
CARD = {"r": 245, "g": 246, "b": 248, "a": 1.0}

THEMES = [
    ("login", "Login"),
    ("shop-home", "Shop Home"),
    ("product", "Product Detail"),
    ("cart", "Cart"),
    ("profile", "Profile"),
    ("settings", "Settings"),
    ("player", "Music Player"),
    ("chats", "Chat List"),
    ("event", "Event Detail"),
    ("onboarding", "Onboarding"),
    ("search", "Search Results"),
    ("checkout", "Checkout"),
]


class Builder:
    def __init__(self, screen_index: int, rng: random.Random):
        self.prefix = f"s{screen_index:02d}"
        self.counter = 0
        self.rng = rng

    def next_id(self) -> str:
        self.counter += 1
        return f"{self.prefix}n{self.counter}"

    def jitter(self, value: float) -> float:
        # Sub-pixel noise like real design-tool exports carry; the condenser
        # is expected to round it away.
        return value + self.rng.uniform(-0.49, 0.49)

    def node(self, kind, name, x, y, w, h, **extra) -> dict:
        obj = {
            "id": self.next_id(),
            "name": name,
            "type": kind,
            "bounds": [self.jitter(x), self.jitter(y), self.jitter(w), self.jitter(h)],
        }
        obj.update(extra)
        return obj

    def text(self, name, content, x, y, w, h, size=15, weight=400, fill=INK) -> dict:
        return self.node(
            "TEXT",
            name,
            x,
            y,
            w,
            h,
            text=content,
            font={"family": "Inter", "size": float(size), "weight": weight},
            fill=dict(fill),
        )

    def group(self, name, children, pad=0, background=None, **extra) -> dict:
        xs = [c["bounds"][0] for c in children]
        ys = [c["bounds"][1] for c in children]
        x2 = [c["bounds"][0] + c["bounds"][2] for c in children]
        y2 = [c["bounds"][1] + c["bounds"][3] for c in children]
        obj = {
            "id": self.next_id(),
            "name": name,
            "type": "GROUP",
            "bounds": [
                min(xs) - pad,
                min(ys) - pad,
                max(x2) - min(xs) + 2 * pad,
                max(y2) - min(ys) + 2 * pad,
            ],
        }
        if background is not None:
            obj["background"] = dict(background)
        obj.update(extra)
        obj["children"] = children
        return obj

    def placeholder(self) -> str:
        return f"Group {self.rng.randint(100, 999)}"


def status_bar(b: Builder) -> dict:
    return b.group(
        "status bar",
        [
            b.text("time", "9:41", 21, 12, 40, 18, size=14, weight=600),
            b.node("ICON", "signal", 286, 16, 17, 10, fill=dict(INK)),
            b.node("ICON", "wifi", 307, 15, 15, 11, fill=dict(INK)),
            b.node("ICON", "battery", 326, 15, 24, 11, fill=dict(INK)),
        ],
    )


def nav_bar(b: Builder, title: str) -> dict:
    return b.group(
        b.placeholder(),
        [
            b.node("ICON", "back arrow", 16, 56, 24, 24, fill=dict(INK)),
            b.text("screen title", title, 140, 58, 96, 22, size=17, weight=600),
            b.node("ICON", "more", 335, 56, 24, 24, fill=dict(INK)),
        ],
    )


def icon_row(b: Builder, y: float, misaligned: bool) -> dict:
    # Four category icons; one drops a few pixels when misaligned is set.
    icons = []
    for i, name in enumerate(["home", "grid", "heart", "bag"]):
        top = y + (4 if misaligned and i == 2 else 0)
        icons.append(
            b.node("ICON", f"{name} icon", 32 + i * 88, top, 28, 28, fill=dict(BRAND))
        )
    return b.group("category icons", icons)


def button(b: Builder, label: str, x, y, w=160, h=48, wide=False) -> dict:
    if wide:
        w = 343
    back = b.node("RECTANGLE", "Rectangle " + str(b.rng.randint(10, 99)), x, y, w, h,
                  fill=dict(BRAND), stroke={"color": dict(BRAND), "weight": 0.0})
    text = b.text("", label, x + w / 2 - 40, y + 14, 80, 20,
                  size=15, weight=600, fill=WHITE)
    return b.group(f"{label.lower()} button", [back, text])


def card(b: Builder, title: str, price: str, x, y, w=163, h=180) -> dict:
    # Disabled borders survive in exports as zero-weight strokes.
    dead_stroke = {"color": dict(FAINT), "weight": 0.0}
    return b.group(
        b.placeholder(),
        [
            b.node("IMAGE", "product photo", x, y, w, 120, stroke=dead_stroke),
            b.text("product title", title, x, y + 128, w, 18, size=14, weight=500),
            b.text("product price", price, x, y + 150, 60, 16, size=13, weight=600,
                   fill=BRAND),
        ],
    )


def list_row(b: Builder, label: str, value: str, y: float, odd_height=False) -> dict:
    h = 64 if odd_height else 56
    return b.group(
        f"{label.lower()} row",
        [
            b.node("RECTANGLE", "Rectangle " + str(b.rng.randint(100, 999)),
                   16, y, 343, h, fill=dict(CARD),
                   stroke={"color": dict(FAINT), "weight": 0.0}),
            b.text("", label, 32, y + 18, 140, 20),
            b.text("", value, 260, y + 18, 85, 20, fill=MUTED),
        ],
    )


def footer_tabs(b: Builder) -> dict:
    tabs = []
    for i, name in enumerate(["home", "search", "cart", "profile"]):
        tabs.append(b.node("ICON", f"{name} tab", 36 + i * 86, 764, 26, 26,
                           fill=dict(MUTED)))
    return b.group("tab bar", tabs, background=WHITE)


def build_screen(index: int, slug: str, title: str) -> dict:
    rng = random.Random(1000 + index)
    b = Builder(index, rng)
    sections: list[dict] = [status_bar(b), nav_bar(b, title)]
    y = 104.0

    # Hero or form area, varied by theme.
    if slug in ("login", "onboarding", "checkout"):
        sections.append(
            b.group(
                "input fields",
                [
                    b.node("INPUT", "email field", 16, y, 343, 48,
                           stroke={"color": dict(FAINT), "weight": 1.0}),
                    b.node("INPUT", "password field", 16, y + 64, 343, 48,
                           stroke={"color": dict(FAINT), "weight": 1.0}),
                ],
            )
        )
        # Caption in a color too close to the white background.
        sections.append(
            b.text("forgot password", "Forgot your password?", 16, y + 128, 180, 16,
                   size=13, fill=FAINT)
        )
        sections.append(button(b, "Continue", 16, y + 168, wide=True))
        y += 240
    elif slug in ("shop-home", "search", "product"):
        sections.append(icon_row(b, y, misaligned=index % 2 == 0))
        y += 56
        # Two-column card grid; the second column collides with the first a
        # little on purpose.
        overlap = 12 if index % 3 == 0 else 0
        sections.append(
            b.group(
                "product grid",
                [
                    card(b, "Canvas tote", "$48", 16, y),
                    card(b, "Wool scarf", "$72", 196 - overlap, y),
                    card(b, "Leather belt", "$54", 16, y + 196),
                    card(b, "Knit beanie", "$38", 196, y + 196),
                ],
            )
        )
        y += 400
    elif slug in ("player", "event"):
        sections.append(
            b.group(
                "event photo and logo",
                [
                    b.node("IMAGE", "event photo", 16, y, 343, 180,
                           stroke={"color": dict(FAINT), "weight": 0.0}),
                    b.node("IMAGE", "logo", 32, y + 148, 48, 48,
                           stroke={"color": dict(WHITE), "weight": 2.0}),
                ],
            )
        )
        sections.append(
            b.text("event title", f"{title} Live", 16, y + 212, 260, 24, size=20,
                   weight=700)
        )
        sections.append(
            b.text("event caption", "Starts at 8:00 PM - doors open 7:15", 16,
                   y + 244, 300, 16, size=13, fill=MUTED)
        )
        y += 280
    else:
        # Settings-style stacked rows with one uneven gap and one odd height.
        rows = []
        row_y = y
        row_gap = 12
        labels = [
            ("Notifications", "On"),
            ("Appearance", "Light"),
            ("Language", "English"),
            ("Privacy", ""),
        ]
        for i, (label, value) in enumerate(labels):
            odd = index % 2 == 1 and i == 2
            rows.append(list_row(b, label, value, row_y, odd_height=odd))
            row_y += (64 if odd else 56) + row_gap + (10 if i == 1 else 0)
        sections.append(b.group("settings list", rows))
        y = row_y + 8

    # Action row with one odd-sized button on some screens.
    if slug in ("cart", "product", "checkout", "profile"):
        small = index % 2 == 0
        sections.append(
            b.group(
                "actions",
                [
                    button(b, "Save", 16, y, w=160, h=48),
                    button(b, "Share", 192, y, w=160, h=40 if small else 48),
                ],
            )
        )
        y += 72

    sections.append(footer_tabs(b))

    root = {
        "id": f"s{index:02d}root",
        "name": "",
        "type": "GROUP",
        "bounds": [0.0, 0.0, 375.0, 812.0],
        "background": dict(WHITE),
        "children": sections,
    }
    return {
        "schema": "heurex-design/1",
        "meta": {
            "title": f"{title} mockup",
            "exported_at": f"2024-03-{10 + index:02d}T09:{30 + index:02d}:00Z",
        },
        "screen": [0.0, 0.0, 375.0, 812.0],
        "root": root,
    }


def main() -> None:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    for index, (slug, title) in enumerate(THEMES, start=1):
        screen = build_screen(index, slug, title)
        path = OUT_DIR / f"screen_{index:02d}.json"
        path.write_text(json.dumps(screen, indent=2) + "\n", encoding="utf-8")
        print(path)


if __name__ == "__main__":
    main()
