"""Guideline catalog: built-in sets, custom parsing, and prompt rendering."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .errors import HeurexError

BUILTIN_SET_IDS = ("nielsen", "crowdcrit", "semantic")

_NUMBERED_PREFIX = re.compile(r"^\s*\d+\s*[.)]\s+")


class GuidelineError(HeurexError, ValueError):
    pass


class EmptyInputError(GuidelineError):
    pass


class UnknownSetError(GuidelineError):
    def __init__(self, set_id: str):
        super().__init__(f"no guideline set named {set_id!r}")
        self.set_id = set_id


@dataclass(frozen=True)
class Guideline:
    id: str
    name: str
    body: str
    set_id: str

    def __post_init__(self):
        if not self.id or not self.name:
            raise GuidelineError("guidelines need a non-empty id and name")


@dataclass(frozen=True)
class GuidelineSet:
    id: str
    title: str
    guidelines: tuple[Guideline, ...]


@lru_cache(maxsize=1)
def builtin_sets() -> tuple[GuidelineSet, ...]:
    """The three bundled guideline sets, in a fixed order."""
    return tuple(_load_builtin(set_id) for set_id in BUILTIN_SET_IDS)


def builtin_set(set_id: str) -> GuidelineSet:
    for gset in builtin_sets():
        if gset.id == set_id:
            return gset
    raise UnknownSetError(set_id)


def _load_builtin(set_id: str) -> GuidelineSet:
    path = resources.files("heurex").joinpath(f"data/guidelines/{set_id}.json")
    obj = json.loads(path.read_text(encoding="utf-8"))
    guidelines = tuple(
        Guideline(id=g["id"], name=g["name"], body=g["body"], set_id=obj["id"])
        for g in obj["guidelines"]
    )
    return GuidelineSet(id=obj["id"], title=obj["title"], guidelines=guidelines)


def parse_custom(
    text: str, set_id: str = "custom", title: str = "Custom Guidelines"
) -> GuidelineSet:
    """Turn free-form text into a guideline set.

    Each non-blank line is one guideline; leading list numbers are stripped
    and markdown-style header lines are skipped. A "Name: body" line splits
    on the first colon, otherwise the first six words serve as the name.
    """
    if not text or not text.strip():
        raise EmptyInputError("custom guideline text is empty")

    guidelines: list[Guideline] = []
    used_ids: set[str] = set()
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        line = _NUMBERED_PREFIX.sub("", line).strip()
        if not line:
            continue
        if ":" in line:
            name, body = line.split(":", 1)
            name, body = name.strip(), body.strip()
        else:
            words = line.split()
            name, body = " ".join(words[:6]), line
        if not name:
            name = body
        guidelines.append(
            Guideline(
                id=_unique_slug(name, used_ids), name=name, body=body, set_id=set_id
            )
        )
    if not guidelines:
        raise EmptyInputError("custom guideline text contains no guidelines")
    return GuidelineSet(id=set_id, title=title, guidelines=tuple(guidelines))


def _unique_slug(name: str, used: set[str]) -> str:
    slug = re.sub(r"[^a-z0-9]+", "-", name.lower()).strip("-") or "guideline"
    candidate, n = slug, 1
    while candidate in used:
        n += 1
        candidate = f"{slug}-{n}"
    used.add(candidate)
    return candidate


def render_guidelines_text(sets: list[GuidelineSet] | tuple[GuidelineSet, ...]) -> str:
    """Deterministic plain-text rendering used inside prompts."""
    blocks: list[str] = []
    for gset in sets:
        lines = [f"## {gset.title}", ""]
        for i, g in enumerate(gset.guidelines, start=1):
            lines.append(f"{i}. {g.name}: {g.body}")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def resolve_sets(
    set_ids: list[str] | tuple[str, ...] | None = None,
    custom_text: str | None = None,
) -> tuple[GuidelineSet, ...]:
    """Selected builtin sets plus an optional custom set parsed from text."""
    chosen: list[GuidelineSet] = []
    for set_id in set_ids or ():
        chosen.append(builtin_set(set_id))
    if custom_text is not None:
        chosen.append(parse_custom(custom_text))
    if not chosen:
        raise EmptyInputError("no guideline sets selected")
    return tuple(chosen)


def guideline_names(sets: tuple[GuidelineSet, ...]) -> set[str]:
    return {g.name for gset in sets for g in gset.guidelines}
