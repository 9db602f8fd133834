"""The two-call evaluation chain: find violations, then rephrase them into
constructive suggestions.

Call one sends the condensed UI plus guidelines and parses a JSON array of
raw violations. Call two sends only the violation texts and parses one
standard/gap/fix triple per violation. Group labeling and the ablation prompt
variants live here too since they share the same building blocks.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from typing import Sequence

from . import prompts
from .condenser import (
    DEFAULT_TOKEN_BUDGET,
    CondensedUiJson,
    CondenseOptions,
    condense,
    estimate_tokens,
    subtree_condensed,
)
from .design_tree import DesignDocument, unnamed_groups
from .errors import HeurexError
from .guidelines import GuidelineSet, render_guidelines_text
from .transport import (
    CompletionParams,
    CompletionTransport,
    PromptMessage,
    TransportError,
)

ABLATION_VARIANTS = ("complete", "one-call", "no-heuristics", "general-feedback")


class PipelineError(HeurexError):
    pass


class BudgetExceededError(PipelineError):
    def __init__(self, estimate: int, budget: int):
        super().__init__(
            f"prompt needs ~{estimate} tokens but the budget is {budget}"
        )
        self.estimate = estimate
        self.budget = budget


class UnparseableResponseError(PipelineError):
    """The model's reply could not be read. Keeps the raw text for debugging."""

    def __init__(self, message: str, raw_text: str):
        super().__init__(message)
        self.raw_text = raw_text


class CountMismatchError(PipelineError):
    def __init__(self, expected: int, got: int):
        super().__init__(f"expected {expected} rephrased violations, got {got}")
        self.expected = expected
        self.got = got


class MissingSegmentError(PipelineError):
    def __init__(self, segment: str, index: int):
        super().__init__(f"rephrased violation {index} is missing its {segment!r}")
        self.segment = segment
        self.index = index


class MissingLabelError(PipelineError):
    def __init__(self, node_id: str):
        super().__init__(f"response contains no label for group {node_id!r}")
        self.node_id = node_id


class PipelineStageError(PipelineError):
    """Wraps a transport or parse failure with the stage it happened in."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage} stage failed: {cause}")
        self.stage = stage


@dataclass(frozen=True)
class RawViolation:
    """One violation as the model reported it. Node ids that do not resolve
    against the document are kept but marked."""

    guideline: str
    node_ids: tuple[str, ...]
    explanation: str
    guideline_resolved: bool = True
    unresolved_node_ids: tuple[str, ...] = ()


@dataclass(frozen=True)
class Suggestion:
    violation: RawViolation
    standard: str
    gap: str
    fix: str
    suggestion_id: str = field(default="")

    def __post_init__(self):
        if not self.suggestion_id:
            object.__setattr__(self, "suggestion_id", stable_suggestion_id(self.violation))


def stable_suggestion_id(violation: RawViolation) -> str:
    """Content hash that survives re-evaluation: same guideline, elements,
    and normalized explanation always produce the same id."""
    normalized = "|".join(
        (
            violation.guideline.strip().casefold(),
            ",".join(sorted(violation.node_ids)),
            re.sub(r"\s+", " ", violation.explanation).strip().casefold(),
        )
    )
    return hashlib.sha256(normalized.encode("utf-8")).hexdigest()[:12]


# ---------------------------------------------------------------------------
# Prompt assembly


def _format_mistakes(mistakes: Sequence[str]) -> str:
    return "\n".join(f"- {m}" for m in mistakes)


def messages_token_estimate(messages: Sequence[PromptMessage]) -> int:
    return sum(estimate_tokens(m.content).tokens for m in messages)


def build_eval_prompt(
    ui: CondensedUiJson,
    sets: Sequence[GuidelineSet],
    history: Sequence[PromptMessage] = (),
    *,
    budget: int | None = DEFAULT_TOKEN_BUDGET,
    mistakes: Sequence[str] = prompts.COMMON_ERROR_AVOIDANCE,
) -> list[PromptMessage]:
    """Assemble the violation-finding prompt: system, history, then user.

    Raises BudgetExceededError when the result exceeds the token budget; the
    caller is responsible for evicting history before retrying.
    """
    system = PromptMessage(
        role="system",
        content=prompts.EVAL_SYSTEM_TEMPLATE.format(
            guidelines=render_guidelines_text(sets)
        ),
    )
    user = PromptMessage(
        role="user",
        content=prompts.EVAL_USER_TEMPLATE.format(
            description=prompts.UI_DESCRIPTION,
            ui_json=ui.text,
            mistakes=_format_mistakes(mistakes),
            output_format=prompts.EVAL_OUTPUT_FORMAT,
        ),
    )
    messages = [system, *history, user]
    if budget is not None:
        estimate = messages_token_estimate(messages)
        if estimate > budget:
            raise BudgetExceededError(estimate, budget)
    return messages


def build_rephrase_prompt(violations: Sequence[RawViolation]) -> list[PromptMessage]:
    """Assemble the rephrasing prompt. Carries only the violation texts; the
    UI JSON never appears here."""
    if not violations:
        raise PipelineError("nothing to rephrase")
    lines = [
        f"{i}. [{v.guideline}] {v.explanation}"
        for i, v in enumerate(violations, start=1)
    ]
    return [
        PromptMessage(role="system", content=prompts.REPHRASE_SYSTEM),
        PromptMessage(
            role="user",
            content=prompts.REPHRASE_USER_TEMPLATE.format(violations="\n".join(lines)),
        ),
    ]


def build_label_prompt(groups: Sequence[CondensedUiJson]) -> list[PromptMessage]:
    if not groups:
        raise PipelineError("no groups to label")
    rendered = "\n".join(g.text for g in groups)
    return [
        PromptMessage(role="system", content=prompts.LABEL_SYSTEM),
        PromptMessage(
            role="user", content=prompts.LABEL_USER_TEMPLATE.format(groups=rendered)
        ),
    ]


# ---------------------------------------------------------------------------
# Response parsing


_FENCE_RE = re.compile(r"^```[a-zA-Z]*\n(.*)\n```$", re.DOTALL)


def _strip_fences(text: str) -> str:
    stripped = text.strip()
    m = _FENCE_RE.match(stripped)
    return m.group(1) if m else stripped


def _load_json(text: str, what: str):
    try:
        return json.loads(_strip_fences(text))
    except json.JSONDecodeError as exc:
        raise UnparseableResponseError(f"{what} is not valid JSON: {exc}", text) from exc


def parse_eval_response(
    text: str, doc: DesignDocument, sets: Sequence[GuidelineSet]
) -> list[RawViolation]:
    """Read the violation array. An empty array is a valid "no violations"."""
    data = _load_json(text, "evaluation response")
    if not isinstance(data, list):
        raise UnparseableResponseError("evaluation response must be a JSON array", text)
    known_names = {g.name.casefold(): g.name for s in sets for g in s.guidelines}
    violations: list[RawViolation] = []
    for i, item in enumerate(data):
        if not isinstance(item, dict):
            raise UnparseableResponseError(f"violation {i} is not an object", text)
        guideline = item.get("guideline", item.get("issue"))
        elements = item.get("elements")
        explanation = item.get("explanation")
        if not isinstance(guideline, str) or not guideline.strip():
            raise UnparseableResponseError(f"violation {i} has no guideline", text)
        if not isinstance(elements, list) or not all(
            isinstance(e, str) for e in elements
        ):
            raise UnparseableResponseError(
                f"violation {i} elements must be an array of node ids", text
            )
        if not isinstance(explanation, str) or not explanation.strip():
            raise UnparseableResponseError(f"violation {i} has no explanation", text)
        resolved_name = known_names.get(guideline.strip().casefold())
        unresolved = tuple(e for e in elements if doc.lookup(e) is None)
        violations.append(
            RawViolation(
                guideline=resolved_name or guideline.strip(),
                node_ids=tuple(elements),
                explanation=explanation.strip(),
                guideline_resolved=resolved_name is not None,
                unresolved_node_ids=unresolved,
            )
        )
    return violations


def parse_rephrase_response(
    text: str, violations: Sequence[RawViolation]
) -> list[Suggestion]:
    """Read one standard/gap/fix triple per input violation, in order."""
    data = _load_json(text, "rephrase response")
    if not isinstance(data, list):
        raise UnparseableResponseError("rephrase response must be a JSON array", text)
    if len(data) != len(violations):
        raise CountMismatchError(expected=len(violations), got=len(data))
    suggestions: list[Suggestion] = []
    for i, (item, violation) in enumerate(zip(data, violations)):
        if not isinstance(item, dict):
            raise UnparseableResponseError(f"rephrased violation {i} is not an object", text)
        parts = {}
        for segment in ("standard", "gap", "fix"):
            value = item.get(segment)
            if not isinstance(value, str) or not value.strip():
                raise MissingSegmentError(segment, i)
            parts[segment] = value.strip()
        suggestions.append(
            Suggestion(
                violation=violation,
                standard=parts["standard"],
                gap=parts["gap"],
                fix=parts["fix"],
            )
        )
    return suggestions


def parse_label_response(text: str, expected_ids: Sequence[str]) -> dict[str, str]:
    """Read the id-to-label map. Labels for ids that were never asked about
    are dropped; every requested id must come back with a non-empty label."""
    data = _load_json(text, "label response")
    if not isinstance(data, dict):
        raise UnparseableResponseError("label response must be a JSON object", text)
    labels: dict[str, str] = {}
    wanted = set(expected_ids)
    for key, value in data.items():
        if key not in wanted:
            continue
        if not isinstance(value, str) or not value.strip():
            raise MissingLabelError(key)
        labels[key] = value.strip()
    for node_id in expected_ids:
        if node_id not in labels:
            raise MissingLabelError(node_id)
    return labels


# ---------------------------------------------------------------------------
# Orchestration


def evaluate_ui(
    doc: DesignDocument,
    sets: Sequence[GuidelineSet],
    history: Sequence[PromptMessage],
    transport: CompletionTransport,
    params: CompletionParams = CompletionParams(),
    *,
    budget: int = DEFAULT_TOKEN_BUDGET,
    opts: CondenseOptions = CondenseOptions(),
    mistakes: Sequence[str] = prompts.COMMON_ERROR_AVOIDANCE,
) -> list[Suggestion]:
    """Run the full chain. Exactly one transport call when the UI is clean,
    exactly two when violations are found."""
    ui = condense(doc, opts)
    messages = build_eval_prompt(ui, sets, history, budget=budget, mistakes=mistakes)
    try:
        reply = transport.complete(messages, params)
    except TransportError as exc:
        raise PipelineStageError("evaluate", exc) from exc
    try:
        violations = parse_eval_response(reply, doc, sets)
    except UnparseableResponseError as exc:
        raise PipelineStageError("evaluate", exc) from exc
    if not violations:
        return []
    rephrase_messages = build_rephrase_prompt(violations)
    try:
        reply = transport.complete(rephrase_messages, params)
    except TransportError as exc:
        raise PipelineStageError("rephrase", exc) from exc
    try:
        return parse_rephrase_response(reply, violations)
    except (UnparseableResponseError, CountMismatchError, MissingSegmentError) as exc:
        raise PipelineStageError("rephrase", exc) from exc


def generate_labels(
    doc: DesignDocument,
    transport: CompletionTransport,
    params: CompletionParams = CompletionParams(),
) -> dict[str, str]:
    """Propose names for every unnamed or placeholder-named group."""
    groups = unnamed_groups(doc)
    if not groups:
        return {}
    condensed = [subtree_condensed(doc, g.id) for g in groups]
    messages = build_label_prompt(condensed)
    try:
        reply = transport.complete(messages, params)
    except TransportError as exc:
        raise PipelineStageError("labels", exc) from exc
    try:
        return parse_label_response(reply, [g.id for g in groups])
    except (UnparseableResponseError, MissingLabelError) as exc:
        raise PipelineStageError("labels", exc) from exc


# ---------------------------------------------------------------------------
# Ablation prompt variants


def ablation_condition(
    variant: str,
    ui: CondensedUiJson,
    sets: Sequence[GuidelineSet],
    history: Sequence[PromptMessage] = (),
    *,
    mistakes: Sequence[str] = prompts.COMMON_ERROR_AVOIDANCE,
) -> list[PromptMessage]:
    """Prompt for one study condition. "complete" is the production prompt;
    the others strip or merge parts of it."""
    if variant not in ABLATION_VARIANTS:
        raise PipelineError(
            f"unknown ablation variant {variant!r}; expected one of {ABLATION_VARIANTS}"
        )
    if variant == "complete":
        return build_eval_prompt(ui, sets, history, budget=None, mistakes=mistakes)

    if variant == "one-call":
        system = PromptMessage(
            role="system",
            content=prompts.EVAL_SYSTEM_TEMPLATE.format(
                guidelines=render_guidelines_text(sets)
            )
            + prompts.ONE_CALL_SYSTEM_SUFFIX,
        )
        user = PromptMessage(
            role="user",
            content=prompts.EVAL_USER_TEMPLATE.format(
                description=prompts.UI_DESCRIPTION,
                ui_json=ui.text,
                mistakes=_format_mistakes(mistakes),
                output_format=prompts.ONE_CALL_OUTPUT_FORMAT,
            ),
        )
        return [system, *history, user]

    if variant == "no-heuristics":
        phrases: list[str] = []
        for gset in sets:
            phrase = prompts.NO_HEURISTICS_PHRASES.get(
                gset.id, prompts.NO_HEURISTICS_FALLBACK_PHRASE
            )
            if phrase not in phrases:
                phrases.append(phrase)
        system = PromptMessage(
            role="system",
            content=prompts.NO_HEURISTICS_SYSTEM_TEMPLATE.format(
                issue_phrases=" and ".join(phrases)
            ),
        )
        user = PromptMessage(
            role="user",
            content=prompts.EVAL_USER_TEMPLATE.format(
                description=prompts.UI_DESCRIPTION,
                ui_json=ui.text,
                mistakes=_format_mistakes(mistakes),
                output_format=prompts.NO_HEURISTICS_OUTPUT_FORMAT,
            ),
        )
        return [system, *history, user]

    # general-feedback: no guidelines, and "violations" becomes "feedback".
    general_mistakes = tuple(m.replace("violations", "feedback") for m in mistakes)
    system = PromptMessage(role="system", content=prompts.GENERAL_FEEDBACK_SYSTEM)
    user = PromptMessage(
        role="user",
        content=prompts.GENERAL_FEEDBACK_USER_TEMPLATE.format(
            description=prompts.UI_DESCRIPTION,
            ui_json=ui.text,
            mistakes=_format_mistakes(general_mistakes),
            output_format=prompts.GENERAL_FEEDBACK_OUTPUT_FORMAT,
        ),
    )
    return [system, *history, user]
