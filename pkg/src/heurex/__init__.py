"""Guideline-based review of static UI mockups.

A design document is parsed into an immutable tree, condensed into compact
JSON, and reviewed either by an LLM prompt chain or by deterministic rule
checks. Review sessions iterate: dismissed suggestions become self-reflection
history for the next round. The analysis module reproduces the study metrics.
"""

from .analysis import (
    GroundTruth,
    MetricsReport,
    RatingRecord,
    fleiss_kappa,
    load_ground_truth,
    load_ratings,
    precision_recall_f1,
    rating_distribution,
    word_count_analysis,
)
from .condenser import (
    DEFAULT_TOKEN_BUDGET,
    CondensedUiJson,
    CondenseOptions,
    TokenEstimate,
    condense,
    estimate_tokens,
    subtree_condensed,
)
from .design_tree import (
    Bounds,
    Color,
    DesignDocument,
    DesignNode,
    lookup,
    parse_document,
    serialize_document,
    unnamed_groups,
)
from .errors import HeurexError
from .guidelines import (
    Guideline,
    GuidelineSet,
    builtin_sets,
    parse_custom,
    render_guidelines_text,
)
from .pipeline import (
    RawViolation,
    Suggestion,
    ablation_condition,
    build_eval_prompt,
    build_label_prompt,
    build_rephrase_prompt,
    evaluate_ui,
    generate_labels,
    parse_eval_response,
    parse_label_response,
    parse_rephrase_response,
    stable_suggestion_id,
)
from .report import Report, build_report, render_report_markdown
from .rule_engine import (
    RuleConfig,
    RuleFinding,
    check_center_alignment,
    check_contrast,
    check_edge_alignment,
    check_overlap,
    check_size_consistency,
    check_spacing,
    run_rules,
)
from .session import (
    SessionState,
    create_session,
    dismiss,
    history_for_next_round,
    load_session,
    run_round,
    save_session,
)
from .transport import (
    CompletionParams,
    HttpTransport,
    PromptMessage,
    ScriptedTransport,
)

__version__ = "0.1.0"

__all__ = [
    "Bounds",
    "Color",
    "CompletionParams",
    "CondenseOptions",
    "CondensedUiJson",
    "DEFAULT_TOKEN_BUDGET",
    "DesignDocument",
    "DesignNode",
    "GroundTruth",
    "Guideline",
    "GuidelineSet",
    "HeurexError",
    "HttpTransport",
    "MetricsReport",
    "PromptMessage",
    "RatingRecord",
    "RawViolation",
    "Report",
    "RuleConfig",
    "RuleFinding",
    "ScriptedTransport",
    "SessionState",
    "Suggestion",
    "TokenEstimate",
    "ablation_condition",
    "build_eval_prompt",
    "build_label_prompt",
    "build_report",
    "build_rephrase_prompt",
    "builtin_sets",
    "check_center_alignment",
    "check_contrast",
    "check_edge_alignment",
    "check_overlap",
    "check_size_consistency",
    "check_spacing",
    "condense",
    "create_session",
    "dismiss",
    "estimate_tokens",
    "evaluate_ui",
    "fleiss_kappa",
    "generate_labels",
    "history_for_next_round",
    "load_ground_truth",
    "load_ratings",
    "load_session",
    "lookup",
    "parse_custom",
    "parse_document",
    "parse_eval_response",
    "parse_label_response",
    "parse_rephrase_response",
    "precision_recall_f1",
    "rating_distribution",
    "render_guidelines_text",
    "render_report_markdown",
    "run_round",
    "run_rules",
    "save_session",
    "serialize_document",
    "stable_suggestion_id",
    "subtree_condensed",
    "unnamed_groups",
    "word_count_analysis",
]
