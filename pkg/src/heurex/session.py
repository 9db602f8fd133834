"""Iterative review sessions.

A session owns one design document, a guideline selection, and the history of
rounds and dismissals. Dismissed suggestions feed the next round's prompt as
a three-message self-reflection exchange, and their ids are filtered out of
every later round.
"""

from __future__ import annotations

import json
import time
import uuid
from dataclasses import dataclass, field
from typing import Sequence

from . import prompts
from .condenser import DEFAULT_TOKEN_BUDGET, condense, subtree_condensed
from .design_tree import (
    DesignDocument,
    document_from_obj,
    document_to_obj,
    validate_document,
)
from .errors import HeurexError
from .guidelines import Guideline, GuidelineSet
from .pipeline import (
    RawViolation,
    Suggestion,
    build_eval_prompt,
    evaluate_ui,
    messages_token_estimate,
)
from .rule_engine import RuleConfig, RuleFinding, run_rules
from .transport import CompletionParams, CompletionTransport, PromptMessage, TransportError

SESSION_SCHEMA_VERSION = "heurex-session/1"

ENGINE_LLM = "llm"
ENGINE_RULES = "rules"

STATUS_ACTIVE = "active"
STATUS_DISMISSED = "dismissed"


class SessionError(HeurexError):
    pass


class UnknownSuggestionError(SessionError, KeyError):
    def __init__(self, suggestion_id: str):
        super().__init__(f"no suggestion with id {suggestion_id!r}")
        self.suggestion_id = suggestion_id


class AlreadyDismissedError(SessionError):
    def __init__(self, suggestion_id: str):
        super().__init__(f"suggestion {suggestion_id!r} is already dismissed")
        self.suggestion_id = suggestion_id


class VersionMismatchError(SessionError):
    def __init__(self, found: str):
        super().__init__(
            f"expected schema {SESSION_SCHEMA_VERSION!r}, found {found!r}"
        )
        self.found = found


class CorruptStateError(SessionError):
    pass


@dataclass
class DismissalRecord:
    suggestion_id: str
    violation: RawViolation
    # Condensed JSON per referenced node, captured when the dismissal
    # happened. Nodes already deleted from the document leave gaps, flagged
    # in missing_node_ids.
    snapshots: dict[str, str]
    round_number: int
    timestamp: float
    reflection: str
    missing_node_ids: tuple[str, ...] = ()


@dataclass
class Round:
    number: int
    ui_snapshot: str
    suggestions: list[Suggestion]
    statuses: dict[str, str]
    node_refs: dict[str, dict]
    engine: str


@dataclass
class SessionState:
    session_id: str
    document: DesignDocument
    sets: tuple[GuidelineSet, ...]
    engine: str = ENGINE_LLM
    budget: int = DEFAULT_TOKEN_BUDGET
    params: CompletionParams = field(default_factory=CompletionParams)
    rule_config: RuleConfig = field(default_factory=RuleConfig)
    suppress_node_repeats: bool = False
    rounds: list[Round] = field(default_factory=list)
    dismissals: list[DismissalRecord] = field(default_factory=list)

    def dismissed_ids(self) -> set[str]:
        return {record.suggestion_id for record in self.dismissals}

    def find_suggestion(self, suggestion_id: str) -> Suggestion:
        for rnd in self.rounds:
            for suggestion in rnd.suggestions:
                if suggestion.suggestion_id == suggestion_id:
                    return suggestion
        raise UnknownSuggestionError(suggestion_id)


def create_session(
    doc: DesignDocument,
    sets: Sequence[GuidelineSet],
    engine: str = ENGINE_LLM,
    *,
    budget: int = DEFAULT_TOKEN_BUDGET,
    params: CompletionParams | None = None,
    rule_config: RuleConfig | None = None,
    suppress_node_repeats: bool = False,
    session_id: str | None = None,
) -> SessionState:
    if engine not in (ENGINE_LLM, ENGINE_RULES):
        raise SessionError(f"engine must be {ENGINE_LLM!r} or {ENGINE_RULES!r}")
    if not sets:
        raise SessionError("a session needs at least one guideline set")
    if budget <= 0:
        raise SessionError("token budget must be positive")
    return SessionState(
        session_id=session_id or uuid.uuid4().hex,
        document=doc,
        sets=tuple(sets),
        engine=engine,
        budget=budget,
        params=params or CompletionParams(),
        rule_config=rule_config or RuleConfig(),
        suppress_node_repeats=suppress_node_repeats,
    )


# ---------------------------------------------------------------------------
# History


def history_for_next_round(session: SessionState) -> list[PromptMessage]:
    """Self-reflection exchanges for retained dismissals, oldest first.

    Each dismissal contributes three messages: the assistant restating its bad
    violation alongside the element JSON, the user asking it to reflect, and
    the assistant's reflection. When the whole history does not fit in the
    budget next to the base prompt, the oldest records are evicted first.
    """
    if not session.dismissals:
        return []
    base = build_eval_prompt(
        condense(session.document), session.sets, history=(), budget=None
    )
    available = session.budget - messages_token_estimate(base)

    retained: list[list[PromptMessage]] = []
    used = 0
    for record in reversed(session.dismissals):
        block = _reflection_block(record)
        cost = messages_token_estimate(block)
        if used + cost > available:
            break
        retained.append(block)
        used += cost
    retained.reverse()
    return [message for block in retained for message in block]


def _reflection_block(record: DismissalRecord) -> list[PromptMessage]:
    violation_json = json.dumps(
        [
            {
                "guideline": record.violation.guideline,
                "elements": list(record.violation.node_ids),
                "explanation": record.violation.explanation,
            }
        ],
        separators=(",", ":"),
        ensure_ascii=False,
    )
    snapshot_lines = [record.snapshots[nid] for nid in record.violation.node_ids
                      if nid in record.snapshots]
    assistant = violation_json
    if snapshot_lines:
        assistant += "\n\nElement JSON:\n" + "\n".join(snapshot_lines)
    return [
        PromptMessage(role="assistant", content=assistant),
        PromptMessage(role="user", content=prompts.REFLECTION_REQUEST),
        PromptMessage(role="assistant", content=record.reflection),
    ]


# ---------------------------------------------------------------------------
# Rounds


def run_round(
    session: SessionState,
    updated_doc: DesignDocument | None = None,
    transport: CompletionTransport | None = None,
) -> Round:
    """Evaluate the (possibly updated) document and append a new round.

    Suggestions matching a dismissed id never come back. With
    suppress_node_repeats enabled, suggestions naming exactly the node set of
    any dismissal are dropped too, whatever their guideline.
    """
    if updated_doc is not None:
        validate_document(updated_doc)
        session.document = updated_doc

    if session.engine == ENGINE_LLM:
        if transport is None:
            raise SessionError("the llm engine needs a completion transport")
        history = history_for_next_round(session)
        suggestions = evaluate_ui(
            session.document,
            session.sets,
            history,
            transport,
            session.params,
            budget=session.budget,
        )
    else:
        findings = run_rules(
            session.document, [s.id for s in session.sets], session.rule_config
        )
        suggestions = suggestions_from_findings(findings)

    dismissed = session.dismissed_ids()
    dismissed_node_sets = {
        frozenset(record.violation.node_ids) for record in session.dismissals
    }
    kept: list[Suggestion] = []
    seen: set[str] = set()
    for suggestion in suggestions:
        sid = suggestion.suggestion_id
        if sid in dismissed or sid in seen:
            continue
        if (
            session.suppress_node_repeats
            and suggestion.violation.node_ids
            and frozenset(suggestion.violation.node_ids) in dismissed_node_sets
        ):
            continue
        seen.add(sid)
        kept.append(suggestion)

    node_refs: dict[str, dict] = {}
    for suggestion in kept:
        for node_id in suggestion.violation.node_ids:
            node = session.document.lookup(node_id)
            if node is not None and node_id not in node_refs:
                node_refs[node_id] = {
                    "name": node.name,
                    "bounds": node.bounds.as_list(),
                }

    rnd = Round(
        number=len(session.rounds) + 1,
        ui_snapshot=condense(session.document).text,
        suggestions=kept,
        statuses={s.suggestion_id: STATUS_ACTIVE for s in kept},
        node_refs=node_refs,
        engine=session.engine,
    )
    session.rounds.append(rnd)
    return rnd


def dismiss(
    session: SessionState,
    suggestion_id: str,
    transport: CompletionTransport | None = None,
    *,
    now: float | None = None,
) -> DismissalRecord:
    """Mark a suggestion as rejected and capture everything the next round's
    history needs: the violation, element snapshots, and a self-reflection.

    The reflection comes from one extra transport call when a transport is
    available; otherwise a canned stub stands in.
    """
    suggestion = session.find_suggestion(suggestion_id)
    if suggestion_id in session.dismissed_ids():
        raise AlreadyDismissedError(suggestion_id)

    snapshots: dict[str, str] = {}
    missing: list[str] = []
    for node_id in suggestion.violation.node_ids:
        if session.document.lookup(node_id) is None:
            missing.append(node_id)
        else:
            snapshots[node_id] = subtree_condensed(session.document, node_id).text

    reflection = prompts.REFLECTION_STUB
    if transport is not None:
        record_stub = DismissalRecord(
            suggestion_id=suggestion_id,
            violation=suggestion.violation,
            snapshots=snapshots,
            round_number=len(session.rounds),
            timestamp=0.0,
            reflection="",
        )
        reflection_prompt = _reflection_block(record_stub)[:2]
        try:
            reflection = transport.complete(reflection_prompt, session.params).strip()
        except TransportError:
            reflection = prompts.REFLECTION_STUB
        if not reflection:
            reflection = prompts.REFLECTION_STUB

    record = DismissalRecord(
        suggestion_id=suggestion_id,
        violation=suggestion.violation,
        snapshots=snapshots,
        round_number=len(session.rounds),
        timestamp=time.time() if now is None else now,
        reflection=reflection,
        missing_node_ids=tuple(missing),
    )
    session.dismissals.append(record)
    for rnd in session.rounds:
        if suggestion_id in rnd.statuses:
            rnd.statuses[suggestion_id] = STATUS_DISMISSED
    return record


# ---------------------------------------------------------------------------
# Rule findings as suggestions

_RULE_STANDARDS = {
    "edge_alignment": (
        "Elements that form a visual line should share the same edge position."
    ),
    "center_alignment": (
        "Elements meant to be centered with their peers should share the same "
        "center coordinate."
    ),
    "spacing": (
        "Gaps between consecutive elements in a row or column should be even."
    ),
    "size_consistency": (
        "Elements of the same kind in a group should share the same dimensions."
    ),
    "overlap": (
        "Elements should not collide: boxes belonging to different parts of "
        "the layout should not cover each other."
    ),
    "contrast": (
        "Text should stay readable: WCAG recommends a contrast ratio of at "
        "least 4.5:1 against the background."
    ),
}

_RULE_FIXES = {
    "edge_alignment": "Move the element so its {edge} edge sits at {line}px.",
    "center_alignment": "Move the element so its center-{axis} sits at {line}px.",
    "spacing": "Adjust the gap between these elements to the median {median}px.",
    "size_consistency": "Resize the element's {dimension} to {modal}px to match its peers.",
    "overlap": "Separate the two elements or nest one inside the other.",
    "contrast": "Pick a darker or lighter text color to reach at least {minimum}:1.",
}


def _fmt_value(value) -> str:
    if isinstance(value, float):
        rounded = round(value, 2)
        return str(int(rounded)) if rounded == int(rounded) else f"{rounded:g}"
    return str(value)


def suggestions_from_findings(findings: Sequence[RuleFinding]) -> list[Suggestion]:
    """Deterministic constructive phrasing for rule findings, mirroring the
    standard/gap/fix shape the model produces."""
    suggestions: list[Suggestion] = []
    for finding in findings:
        violation = RawViolation(
            guideline=finding.guideline,
            node_ids=finding.node_ids,
            explanation=finding.message,
        )
        values = {k: _fmt_value(v) for k, v in finding.values.items()}
        fix = _RULE_FIXES[finding.rule_id].format(**values)
        suggestions.append(
            Suggestion(
                violation=violation,
                standard=_RULE_STANDARDS[finding.rule_id],
                gap=f"{finding.message[0].upper()}{finding.message[1:]}.",
                fix=fix,
            )
        )
    return suggestions


# ---------------------------------------------------------------------------
# Persistence


def save_session(session: SessionState) -> str:
    """Serialize the whole session to versioned JSON."""
    obj = {
        "schema": SESSION_SCHEMA_VERSION,
        "session_id": session.session_id,
        "engine": session.engine,
        "budget": session.budget,
        "suppress_node_repeats": session.suppress_node_repeats,
        "params": {
            "temperature": session.params.temperature,
            "max_output_tokens": session.params.max_output_tokens,
            "model": session.params.model,
        },
        "rule_config": {
            "epsilon_align": session.rule_config.epsilon_align,
            "epsilon_gap": session.rule_config.epsilon_gap,
            "min_contrast": session.rule_config.min_contrast,
            "overlap_min_fraction": session.rule_config.overlap_min_fraction,
        },
        "document": document_to_obj(session.document),
        "sets": [_set_to_obj(s) for s in session.sets],
        "rounds": [_round_to_obj(r) for r in session.rounds],
        "dismissals": [_dismissal_to_obj(d) for d in session.dismissals],
    }
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def load_session(data: str | bytes) -> SessionState:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise CorruptStateError(f"session is not valid UTF-8: {exc}") from exc
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise CorruptStateError(f"session is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise CorruptStateError("session must be a JSON object")
    schema = obj.get("schema")
    if schema != SESSION_SCHEMA_VERSION:
        raise VersionMismatchError(str(schema))
    try:
        return SessionState(
            session_id=obj["session_id"],
            document=document_from_obj(obj["document"]),
            sets=tuple(_set_from_obj(s) for s in obj["sets"]),
            engine=obj["engine"],
            budget=obj["budget"],
            params=CompletionParams(**obj["params"]),
            rule_config=RuleConfig(**obj["rule_config"]),
            suppress_node_repeats=obj["suppress_node_repeats"],
            rounds=[_round_from_obj(r) for r in obj["rounds"]],
            dismissals=[_dismissal_from_obj(d) for d in obj["dismissals"]],
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, SessionError):
            raise
        raise CorruptStateError(f"session state is incomplete: {exc}") from exc


def _set_to_obj(gset: GuidelineSet) -> dict:
    return {
        "id": gset.id,
        "title": gset.title,
        "guidelines": [
            {"id": g.id, "name": g.name, "body": g.body} for g in gset.guidelines
        ],
    }


def _set_from_obj(obj: dict) -> GuidelineSet:
    return GuidelineSet(
        id=obj["id"],
        title=obj["title"],
        guidelines=tuple(
            Guideline(id=g["id"], name=g["name"], body=g["body"], set_id=obj["id"])
            for g in obj["guidelines"]
        ),
    )


def _violation_to_obj(violation: RawViolation) -> dict:
    return {
        "guideline": violation.guideline,
        "node_ids": list(violation.node_ids),
        "explanation": violation.explanation,
        "guideline_resolved": violation.guideline_resolved,
        "unresolved_node_ids": list(violation.unresolved_node_ids),
    }


def _violation_from_obj(obj: dict) -> RawViolation:
    return RawViolation(
        guideline=obj["guideline"],
        node_ids=tuple(obj["node_ids"]),
        explanation=obj["explanation"],
        guideline_resolved=obj["guideline_resolved"],
        unresolved_node_ids=tuple(obj["unresolved_node_ids"]),
    )


def _suggestion_to_obj(suggestion: Suggestion) -> dict:
    return {
        "id": suggestion.suggestion_id,
        "violation": _violation_to_obj(suggestion.violation),
        "standard": suggestion.standard,
        "gap": suggestion.gap,
        "fix": suggestion.fix,
    }


def _suggestion_from_obj(obj: dict) -> Suggestion:
    return Suggestion(
        violation=_violation_from_obj(obj["violation"]),
        standard=obj["standard"],
        gap=obj["gap"],
        fix=obj["fix"],
        suggestion_id=obj["id"],
    )


def _round_to_obj(rnd: Round) -> dict:
    return {
        "number": rnd.number,
        "ui_snapshot": rnd.ui_snapshot,
        "suggestions": [_suggestion_to_obj(s) for s in rnd.suggestions],
        "statuses": rnd.statuses,
        "node_refs": rnd.node_refs,
        "engine": rnd.engine,
    }


def _round_from_obj(obj: dict) -> Round:
    return Round(
        number=obj["number"],
        ui_snapshot=obj["ui_snapshot"],
        suggestions=[_suggestion_from_obj(s) for s in obj["suggestions"]],
        statuses=dict(obj["statuses"]),
        node_refs={k: dict(v) for k, v in obj["node_refs"].items()},
        engine=obj["engine"],
    )


def _dismissal_to_obj(record: DismissalRecord) -> dict:
    return {
        "suggestion_id": record.suggestion_id,
        "violation": _violation_to_obj(record.violation),
        "snapshots": record.snapshots,
        "round_number": record.round_number,
        "timestamp": record.timestamp,
        "reflection": record.reflection,
        "missing_node_ids": list(record.missing_node_ids),
    }


def _dismissal_from_obj(obj: dict) -> DismissalRecord:
    return DismissalRecord(
        suggestion_id=obj["suggestion_id"],
        violation=_violation_from_obj(obj["violation"]),
        snapshots=dict(obj["snapshots"]),
        round_number=obj["round_number"],
        timestamp=obj["timestamp"],
        reflection=obj["reflection"],
        missing_node_ids=tuple(obj["missing_node_ids"]),
    )
