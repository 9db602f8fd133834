"""Round results shaped for consumers: JSON for clients, markdown for humans.

Node bounds in a report are the ones captured when the round ran, so a later
document update never changes what an old report points at.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .session import Round, SessionState


@dataclass(frozen=True)
class NodeRef:
    id: str
    name: str
    bounds: tuple[float, float, float, float]


@dataclass(frozen=True)
class ReportSuggestion:
    suggestion_id: str
    guideline: str
    standard: str
    gap: str
    fix: str
    explanation: str
    status: str
    nodes: tuple[NodeRef, ...]
    unresolved_node_ids: tuple[str, ...]


@dataclass(frozen=True)
class Report:
    session_id: str
    round: int
    engine: str
    suggestions: tuple[ReportSuggestion, ...]


def build_report(session: SessionState, rnd: Round) -> Report:
    suggestions = []
    for suggestion in rnd.suggestions:
        nodes = tuple(
            NodeRef(
                id=node_id,
                name=rnd.node_refs[node_id]["name"],
                bounds=tuple(rnd.node_refs[node_id]["bounds"]),
            )
            for node_id in suggestion.violation.node_ids
            if node_id in rnd.node_refs
        )
        suggestions.append(
            ReportSuggestion(
                suggestion_id=suggestion.suggestion_id,
                guideline=suggestion.violation.guideline,
                standard=suggestion.standard,
                gap=suggestion.gap,
                fix=suggestion.fix,
                explanation=suggestion.violation.explanation,
                status=rnd.statuses[suggestion.suggestion_id],
                nodes=nodes,
                unresolved_node_ids=suggestion.violation.unresolved_node_ids,
            )
        )
    return Report(
        session_id=session.session_id,
        round=rnd.number,
        engine=rnd.engine,
        suggestions=tuple(suggestions),
    )


def report_to_obj(report: Report) -> dict:
    return {
        "session_id": report.session_id,
        "round": report.round,
        "engine": report.engine,
        "suggestions": [
            {
                "id": s.suggestion_id,
                "guideline": s.guideline,
                "standard": s.standard,
                "gap": s.gap,
                "fix": s.fix,
                "explanation": s.explanation,
                "status": s.status,
                "nodes": [
                    {"id": n.id, "name": n.name, "bounds": list(n.bounds)}
                    for n in s.nodes
                ],
                "unresolved_node_ids": list(s.unresolved_node_ids),
            }
            for s in report.suggestions
        ],
    }


def report_to_json(report: Report) -> str:
    return json.dumps(report_to_obj(report), indent=2, ensure_ascii=False) + "\n"


def render_report_markdown(report: Report) -> str:
    """Markdown view: one section per suggestion with the standard, gap, and
    fix spelled out and elements linked as [name](#node-id)."""
    lines = [
        f"# Review report: round {report.round} ({report.engine} engine)",
        "",
    ]
    if not report.suggestions:
        lines.append("No suggestions for this round.")
        lines.append("")
        return "\n".join(lines)
    for s in report.suggestions:
        lines.append(f"## {s.guideline}")
        lines.append("")
        lines.append(f"**Standard.** {s.standard}")
        lines.append("")
        lines.append(f"**Gap.** {s.gap}")
        lines.append("")
        lines.append(f"**Fix.** {s.fix}")
        lines.append("")
        if s.nodes:
            links = ", ".join(
                f"[{n.name or n.id}](#{n.id})" for n in s.nodes
            )
            lines.append(f"Elements: {links}")
            lines.append("")
    return "\n".join(lines)
