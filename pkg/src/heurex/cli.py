"""Command-line interface.

Handled failures print a machine-readable JSON payload to stderr and exit
nonzero: 2 for input problems, 3 for transport or pipeline failures.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .analysis import (
    display_round,
    fleiss_kappa,
    kappa_table_from_records,
    load_ground_truth,
    load_ratings,
    precision_recall_f1,
    rating_distribution,
    word_count_analysis,
)
from .condenser import DEFAULT_TOKEN_BUDGET, condense
from .design_tree import parse_document
from .errors import HeurexError
from .guidelines import EmptyInputError, builtin_set, parse_custom
from .pipeline import PipelineStageError, ablation_condition, generate_labels
from .report import build_report, render_report_markdown, report_to_json
from .rule_engine import RuleConfig, run_rules
from .session import _set_from_obj, create_session, run_round
from .transport import (
    CompletionParams,
    CompletionTransport,
    HttpTransport,
    ScriptedTransport,
    TransportError,
    default_model,
)

EXIT_INPUT_ERROR = 2
EXIT_PIPELINE_ERROR = 3


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (PipelineStageError, TransportError) as exc:
        _print_error(exc)
        return EXIT_PIPELINE_ERROR
    except HeurexError as exc:
        _print_error(exc)
        return EXIT_INPUT_ERROR


def _print_error(exc: HeurexError) -> None:
    payload = {"error": str(exc), "type": type(exc).__name__}
    if isinstance(exc, PipelineStageError):
        payload["stage"] = exc.stage
    print(json.dumps(payload), file=sys.stderr)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heurex",
        description="Guideline-based review of static UI mockups.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    evaluate = sub.add_parser("evaluate", help="run one review round on a design")
    _add_design_arg(evaluate)
    _add_guideline_args(evaluate)
    evaluate.add_argument("--engine", choices=("llm", "rules"), default="llm")
    evaluate.add_argument(
        "--transport",
        default="http",
        help='"http" or "scripted:<fixtures.json>"',
    )
    evaluate.add_argument("--model", default=None)
    evaluate.add_argument("--budget", type=int, default=None)
    evaluate.add_argument("--config", default=None, help="key = value tolerances file")
    evaluate.add_argument("--session-id", default=None)
    evaluate.add_argument("--format", choices=("json", "markdown"), default="json")
    evaluate.add_argument("--out", default=None)
    evaluate.set_defaults(handler=_cmd_evaluate)

    lint = sub.add_parser("lint", help="run only the deterministic rule checks")
    _add_design_arg(lint)
    lint.add_argument("--config", default=None, help="key = value tolerances file")
    lint.add_argument(
        "--guidelines", default="nielsen,crowdcrit", help="comma-separated set ids"
    )
    lint.add_argument("--out", default=None)
    lint.set_defaults(handler=_cmd_lint)

    labels = sub.add_parser("labels", help="propose names for unnamed groups")
    _add_design_arg(labels)
    labels.add_argument("--transport", default="http")
    labels.add_argument("--model", default=None)
    labels.add_argument("--out", default=None)
    labels.set_defaults(handler=_cmd_labels)

    serve = sub.add_parser("serve", help="start the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--transport", default="http")
    serve.add_argument("--model", default=None)
    serve.set_defaults(handler=_cmd_serve)

    ablate = sub.add_parser("ablate", help="emit prompts for the study conditions")
    _add_design_arg(ablate)
    _add_guideline_args(ablate)
    ablate.add_argument(
        "--condition",
        choices=("complete", "one-call", "no-heuristics", "general", "all"),
        default="all",
    )
    ablate.add_argument("--out-dir", default=".")
    ablate.set_defaults(handler=_cmd_ablate)

    analyze = sub.add_parser("analyze", help="study metrics over rating data")
    analyze_sub = analyze.add_subparsers(dest="analysis", required=True)

    metrics = analyze_sub.add_parser("metrics", help="precision / recall / F1")
    metrics.add_argument("--counts", default=None, help="reported,helpful,groundtruth")
    metrics.add_argument("--ground-truth", default=None)
    metrics.add_argument("--reported", type=int, default=None)
    metrics.add_argument("--out", default=None)
    metrics.set_defaults(handler=_cmd_metrics)

    kappa = analyze_sub.add_parser("kappa", help="Fleiss' kappa over ratings")
    kappa.add_argument("--ratings", required=True)
    kappa.add_argument(
        "--dimension", choices=("accuracy", "helpfulness"), default="accuracy"
    )
    kappa.add_argument("--out", default=None)
    kappa.set_defaults(handler=_cmd_kappa)

    words = analyze_sub.add_parser("words", help="top words per rating bucket")
    words.add_argument("--ratings", required=True)
    words.add_argument("--k", type=int, default=20)
    words.add_argument("--drop", default="", help="extra comma-separated drop words")
    words.add_argument("--out", default=None)
    words.set_defaults(handler=_cmd_words)

    distribution = analyze_sub.add_parser(
        "distribution", help="rating percentages per bucket"
    )
    distribution.add_argument("--ratings", required=True)
    distribution.add_argument(
        "--dimension", choices=("accuracy", "helpfulness"), default="accuracy"
    )
    distribution.add_argument("--out", default=None)
    distribution.set_defaults(handler=_cmd_distribution)

    return parser


def _add_design_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--design", required=True, help="design JSON file")


def _add_guideline_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--guidelines", default=None, help="comma-separated builtin set ids"
    )
    parser.add_argument(
        "--guidelines-file",
        default=None,
        help="custom set: JSON {id,title,guidelines} or plain text, one per line",
    )


# ---------------------------------------------------------------------------
# Shared helpers


def _load_design(path: str):
    return parse_document(Path(path).read_bytes())


def _resolve_transport(spec: str) -> CompletionTransport:
    if spec.startswith("scripted:"):
        return ScriptedTransport.from_file(spec.split(":", 1)[1])
    if spec == "http":
        return HttpTransport.from_env()
    raise TransportError(f"unknown transport {spec!r}")


def _selected_sets(args):
    set_ids = [s for s in (args.guidelines or "").split(",") if s]
    chosen = [builtin_set(set_id) for set_id in set_ids]
    if args.guidelines_file:
        raw = Path(args.guidelines_file).read_text(encoding="utf-8")
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError:
            obj = None
        if isinstance(obj, dict) and "guidelines" in obj:
            chosen.append(_set_from_obj(obj))
        else:
            chosen.append(parse_custom(raw))
    if not chosen:
        raise EmptyInputError("no guideline sets selected")
    return tuple(chosen)


def _load_rule_config(path: str | None) -> tuple[RuleConfig, int | None]:
    """Read "key = value" lines; unknown keys are rejected. Returns the rule
    tolerances and an optional token budget override."""
    if path is None:
        return RuleConfig(), None
    values: dict[str, float] = {}
    for lineno, line in enumerate(
        Path(path).read_text(encoding="utf-8").splitlines(), start=1
    ):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise HeurexError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        try:
            values[key] = float(value)
        except ValueError as exc:
            raise HeurexError(f"{path}:{lineno}: {value!r} is not a number") from exc
    budget = values.pop("token_budget", None)
    known = {"epsilon_align", "epsilon_gap", "min_contrast", "overlap_min_fraction"}
    unknown = set(values) - known
    if unknown:
        raise HeurexError(f"{path}: unknown config keys {sorted(unknown)}")
    return RuleConfig(**values), int(budget) if budget is not None else None


def _write_output(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _params(model: str | None) -> CompletionParams:
    return CompletionParams(model=model or default_model())


# ---------------------------------------------------------------------------
# Commands


def _cmd_evaluate(args) -> int:
    doc = _load_design(args.design)
    sets = _selected_sets(args)
    rule_config, config_budget = _load_rule_config(args.config)
    budget = args.budget or config_budget or DEFAULT_TOKEN_BUDGET
    session = create_session(
        doc,
        sets,
        engine=args.engine,
        budget=budget,
        params=_params(args.model),
        rule_config=rule_config,
        session_id=args.session_id,
    )
    transport = _resolve_transport(args.transport) if args.engine == "llm" else None
    rnd = run_round(session, None, transport)
    report = build_report(session, rnd)
    if args.format == "markdown":
        _write_output(render_report_markdown(report), args.out)
    else:
        _write_output(report_to_json(report), args.out)
    return 0


def _cmd_lint(args) -> int:
    doc = _load_design(args.design)
    rule_config, _ = _load_rule_config(args.config)
    set_ids = [s for s in args.guidelines.split(",") if s]
    findings = run_rules(doc, set_ids, rule_config)
    payload = {
        "findings": [
            {
                "rule_id": f.rule_id,
                "guideline": f.guideline,
                "node_ids": list(f.node_ids),
                "values": f.values,
                "message": f.message,
            }
            for f in findings
        ]
    }
    _write_output(json.dumps(payload, indent=2, ensure_ascii=False) + "\n", args.out)
    return 0


def _cmd_labels(args) -> int:
    doc = _load_design(args.design)
    transport = _resolve_transport(args.transport)
    labels = generate_labels(doc, transport, _params(args.model))
    _write_output(json.dumps({"labels": labels}, indent=2, sort_keys=True) + "\n", args.out)
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(
        transport=_resolve_transport(args.transport), params=_params(args.model)
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _cmd_ablate(args) -> int:
    doc = _load_design(args.design)
    sets = _selected_sets(args)
    ui = condense(doc)
    if args.condition == "all":
        conditions = ("complete", "one-call", "no-heuristics", "general-feedback")
    else:
        name = "general-feedback" if args.condition == "general" else args.condition
        conditions = (name,)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for condition in conditions:
        messages = ablation_condition(condition, ui, sets)
        payload = [{"role": m.role, "content": m.content} for m in messages]
        path = out_dir / f"{condition.replace('-', '_')}.json"
        path.write_text(
            json.dumps(payload, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
        )
        print(path)
    return 0


def _cmd_metrics(args) -> int:
    if args.counts:
        parts = args.counts.split(",")
        if len(parts) != 3:
            raise HeurexError("--counts wants reported,helpful,groundtruth")
        reported, helpful, total = (int(p) for p in parts)
    elif args.ground_truth and args.reported is not None:
        truth = load_ground_truth(args.ground_truth)
        reported, helpful, total = args.reported, truth.llm_found, truth.total
    else:
        raise HeurexError("need --counts or both --ground-truth and --reported")
    metrics = precision_recall_f1(reported, helpful, total)
    payload = {
        "precision": display_round(metrics.precision),
        "recall": display_round(metrics.recall),
        "f1": display_round(metrics.f1),
        "reported": metrics.reported,
        "helpful": metrics.helpful,
        "ground_truth_size": metrics.ground_truth_size,
    }
    _write_output(json.dumps(payload, indent=2) + "\n", args.out)
    return 0


def _cmd_kappa(args) -> int:
    records = load_ratings(args.ratings)
    table, n_raters = kappa_table_from_records(records, args.dimension)
    kappa = fleiss_kappa(table, n_raters)
    payload = {
        "dimension": args.dimension,
        "kappa": display_round(kappa),
        "items": len(table),
        "raters": n_raters,
    }
    _write_output(json.dumps(payload, indent=2) + "\n", args.out)
    return 0


def _cmd_words(args) -> int:
    records = load_ratings(args.ratings)
    extra = tuple(w for w in args.drop.split(",") if w)
    report = word_count_analysis(records, k=args.k, extra_drop=extra)
    payload = {
        "k": report.k,
        "top": {
            category: [{"word": w, "count": c} for w, c in entries]
            for category, entries in report.top.items()
        },
        "distinct": report.distinct,
    }
    _write_output(json.dumps(payload, indent=2) + "\n", args.out)
    return 0


def _cmd_distribution(args) -> int:
    records = load_ratings(args.ratings)
    report = rating_distribution(records, args.dimension)

    def dist_obj(dist):
        return {
            "total": dist.total,
            "counts": {str(k): v for k, v in dist.counts.items()},
            "percent": {str(k): display_round(v, 1) for k, v in dist.percent.items()},
        }

    payload = {
        "dimension": report.dimension,
        "labels": {str(k): v for k, v in report.labels.items()},
        "overall": dist_obj(report.overall),
        "by_guideline": {k: dist_obj(v) for k, v in report.by_guideline.items()},
        "by_round": {str(k): dist_obj(v) for k, v in report.by_round.items()},
    }
    _write_output(json.dumps(payload, indent=2) + "\n", args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
