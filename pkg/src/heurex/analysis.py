"""Evaluation arithmetic for the rating study: precision/recall/F1 against a
ground-truth partition, rating distributions, inter-rater agreement, and the
word-count contrast between helpful and unhelpful suggestions.

Quantities whose denominator is zero come back as None rather than raising,
so downstream tables can print them as absent.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .errors import HeurexError

ACCURACY_SCALE = (1, 2, 3)
ACCURACY_LABELS = {1: "not accurate", 2: "partially accurate", 3: "accurate"}

HELPFULNESS_SCALE = (1, 2, 3, 4, 5)
HELPFULNESS_LABELS = {
    1: "not at all helpful",
    2: "slightly helpful",
    3: "moderately helpful",
    4: "helpful",
    5: "very helpful",
}

# Ratings counted as helpful / unhelpful in the word analysis.
HELPFUL_RATINGS = frozenset({4, 5})
UNHELPFUL_RATINGS = frozenset({1})

PROVENANCES = ("llm-only", "both", "human-only")

# Domain words that dominate every suggestion and carry no signal.
DEFAULT_DROP_WORDS = ("interface", "guideline")


class AnalysisError(HeurexError, ValueError):
    pass


class InvalidCountsError(AnalysisError):
    pass


class EmptyInputError(AnalysisError):
    pass


class RowSumMismatchError(AnalysisError):
    def __init__(self, row: int, expected: int, got: int):
        super().__init__(
            f"rating table row {row} sums to {got}, expected {expected} raters"
        )
        self.row = row
        self.expected = expected
        self.got = got


class SchemaError(AnalysisError):
    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row


# ---------------------------------------------------------------------------
# Records


@dataclass(frozen=True)
class RatingRecord:
    suggestion_id: str
    rater_id: str
    accuracy: int
    helpfulness: int
    explanation: str = ""
    guideline: str = ""
    round: int | None = None
    text: str = ""

    def __post_init__(self):
        if self.accuracy not in ACCURACY_SCALE:
            raise AnalysisError(
                f"accuracy must be in {ACCURACY_SCALE}, got {self.accuracy!r}"
            )
        if self.helpfulness not in HELPFULNESS_SCALE:
            raise AnalysisError(
                f"helpfulness must be in {HELPFULNESS_SCALE}, got {self.helpfulness!r}"
            )


@dataclass(frozen=True)
class GroundTruthEntry:
    entry_id: str
    provenance: str

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise AnalysisError(
                f"provenance must be one of {PROVENANCES}, got {self.provenance!r}"
            )


@dataclass(frozen=True)
class GroundTruth:
    entries: tuple[GroundTruthEntry, ...]

    def counts(self) -> dict[str, int]:
        out = {p: 0 for p in PROVENANCES}
        for entry in self.entries:
            out[entry.provenance] += 1
        return out

    @property
    def total(self) -> int:
        return len(self.entries)

    @property
    def llm_found(self) -> int:
        """Ground-truth issues the model surfaced: its own plus the shared ones."""
        counts = self.counts()
        return counts["llm-only"] + counts["both"]


@dataclass(frozen=True)
class MetricsReport:
    precision: float | None
    recall: float | None
    f1: float | None
    reported: int
    helpful: int
    ground_truth_size: int


# ---------------------------------------------------------------------------
# Metrics


def precision_recall_f1(
    reported: int, helpful: int, ground_truth_size: int
) -> MetricsReport:
    """Precision = helpful/reported, recall = helpful/ground truth, F1 their
    harmonic mean. Undefined ratios come back as None."""
    if reported < 0 or helpful < 0 or ground_truth_size < 0:
        raise InvalidCountsError("counts cannot be negative")
    if helpful > reported:
        raise InvalidCountsError(
            f"helpful ({helpful}) cannot exceed reported ({reported})"
        )
    if helpful > ground_truth_size:
        raise InvalidCountsError(
            f"helpful ({helpful}) cannot exceed the ground truth ({ground_truth_size})"
        )
    precision = helpful / reported if reported > 0 else None
    recall = helpful / ground_truth_size if ground_truth_size > 0 else None
    f1 = None
    if precision is not None and recall is not None and precision + recall > 0:
        f1 = 2 * precision * recall / (precision + recall)
    return MetricsReport(
        precision=precision,
        recall=recall,
        f1=f1,
        reported=reported,
        helpful=helpful,
        ground_truth_size=ground_truth_size,
    )


def display_round(value: float | None, places: int = 3) -> float | None:
    """Half-even rounding used for every number a human will see."""
    return None if value is None else round(value, places)


# ---------------------------------------------------------------------------
# Rating distribution


@dataclass(frozen=True)
class Distribution:
    total: int
    counts: dict[int, int]
    percent: dict[int, float]


@dataclass(frozen=True)
class DistributionReport:
    dimension: str
    overall: Distribution
    by_guideline: dict[str, Distribution]
    by_round: dict[int, Distribution]
    labels: dict[int, str]


def rating_distribution(
    records: Sequence[RatingRecord], dimension: str = "accuracy"
) -> DistributionReport:
    """Percent of ratings in each scale bucket, with per-guideline and
    per-round breakdowns keyed off the records' metadata."""
    if dimension == "accuracy":
        scale, labels = ACCURACY_SCALE, ACCURACY_LABELS
    elif dimension == "helpfulness":
        scale, labels = HELPFULNESS_SCALE, HELPFULNESS_LABELS
    else:
        raise AnalysisError(f"unknown rating dimension {dimension!r}")
    if not records:
        raise EmptyInputError("no rating records to analyze")

    def bucket(subset: Sequence[RatingRecord]) -> Distribution:
        counts = {v: 0 for v in scale}
        for record in subset:
            counts[getattr(record, dimension)] += 1
        total = len(subset)
        percent = {v: counts[v] * 100 / total for v in scale}
        return Distribution(total=total, counts=counts, percent=percent)

    by_guideline: dict[str, list[RatingRecord]] = {}
    by_round: dict[int, list[RatingRecord]] = {}
    for record in records:
        if record.guideline:
            by_guideline.setdefault(record.guideline, []).append(record)
        if record.round is not None:
            by_round.setdefault(record.round, []).append(record)

    return DistributionReport(
        dimension=dimension,
        overall=bucket(records),
        by_guideline={k: bucket(v) for k, v in sorted(by_guideline.items())},
        by_round={k: bucket(v) for k, v in sorted(by_round.items())},
        labels=dict(labels),
    )


# ---------------------------------------------------------------------------
# Fleiss' kappa


def fleiss_kappa(table: Sequence[Sequence[int]], n_raters: int) -> float | None:
    """Fleiss' kappa for a items-by-categories count table.

    Every row must sum to n_raters. Returns None when expected agreement is 1
    (all ratings in a single category), where kappa is undefined.
    """
    if n_raters < 2:
        raise AnalysisError("fleiss_kappa needs at least 2 raters")
    if not table:
        raise EmptyInputError("rating table is empty")
    width = len(table[0])
    for i, row in enumerate(table):
        if len(row) != width:
            raise AnalysisError(f"row {i} has {len(row)} categories, expected {width}")
        if any(v < 0 for v in row):
            raise AnalysisError(f"row {i} contains a negative count")
        if sum(row) != n_raters:
            raise RowSumMismatchError(i, n_raters, sum(row))

    n_items = len(table)
    # Per-item agreement: fraction of rater pairs that agree.
    p_items = [
        (sum(v * v for v in row) - n_raters) / (n_raters * (n_raters - 1))
        for row in table
    ]
    p_bar = sum(p_items) / n_items
    # Expected agreement from the marginal category proportions.
    p_categories = [
        sum(row[j] for row in table) / (n_items * n_raters) for j in range(width)
    ]
    p_expected = sum(p * p for p in p_categories)
    if p_expected == 1.0:
        return None
    return (p_bar - p_expected) / (1.0 - p_expected)


def kappa_table_from_records(
    records: Sequence[RatingRecord], dimension: str = "accuracy"
) -> tuple[list[list[int]], int]:
    """Group ratings by suggestion into the count table fleiss_kappa wants.

    Every suggestion must have been rated by the same number of raters.
    """
    if dimension == "accuracy":
        scale = ACCURACY_SCALE
    elif dimension == "helpfulness":
        scale = HELPFULNESS_SCALE
    else:
        raise AnalysisError(f"unknown rating dimension {dimension!r}")
    if not records:
        raise EmptyInputError("no rating records to analyze")
    by_item: dict[str, list[int]] = {}
    for record in records:
        by_item.setdefault(record.suggestion_id, []).append(
            getattr(record, dimension)
        )
    sizes = {len(v) for v in by_item.values()}
    if len(sizes) != 1:
        raise AnalysisError(
            f"suggestions have uneven rater counts: {sorted(sizes)}"
        )
    n_raters = sizes.pop()
    table = []
    for item_id in sorted(by_item):
        row = [0] * len(scale)
        for value in by_item[item_id]:
            row[scale.index(value)] += 1
        table.append(row)
    return table, n_raters


# ---------------------------------------------------------------------------
# Word counts


@dataclass(frozen=True)
class WordCountReport:
    top: dict[str, list[tuple[str, int]]]
    distinct: dict[str, list[str]]
    k: int


@lru_cache(maxsize=1)
def default_stopwords() -> frozenset[str]:
    text = resources.files("heurex").joinpath("data/stopwords.txt").read_text("utf-8")
    return frozenset(w for w in text.split() if w)


def tokenize(text: str) -> list[str]:
    return re.findall(r"[a-z0-9]+", text.lower())


def word_count_analysis(
    records: Sequence[RatingRecord],
    k: int = 20,
    stopwords: frozenset[str] | None = None,
    extra_drop: Sequence[str] = (),
) -> WordCountReport:
    """Top-k words per rating category plus the words unique to each side.

    Categories: accurate (accuracy 3), inaccurate (accuracy 1), helpful
    (helpfulness 4-5), unhelpful (helpfulness 1). Ties in the top-k order
    break alphabetically. The drop list extends the fixed stopword list.
    """
    if not records:
        raise EmptyInputError("no rated suggestions to analyze")
    if k < 1:
        raise AnalysisError("k must be >= 1")
    drop = (stopwords if stopwords is not None else default_stopwords()) | set(
        DEFAULT_DROP_WORDS
    ) | {w.lower() for w in extra_drop}

    categories: dict[str, dict[str, int]] = {
        "accurate": {},
        "inaccurate": {},
        "helpful": {},
        "unhelpful": {},
    }

    def add(counter: dict[str, int], text: str) -> None:
        for token in tokenize(text):
            if token in drop:
                continue
            counter[token] = counter.get(token, 0) + 1

    for record in records:
        if not record.text:
            continue
        if record.accuracy == 3:
            add(categories["accurate"], record.text)
        if record.accuracy == 1:
            add(categories["inaccurate"], record.text)
        if record.helpfulness in HELPFUL_RATINGS:
            add(categories["helpful"], record.text)
        if record.helpfulness in UNHELPFUL_RATINGS:
            add(categories["unhelpful"], record.text)

    def top_k(counter: dict[str, int]) -> list[tuple[str, int]]:
        return sorted(counter.items(), key=lambda kv: (-kv[1], kv[0]))[:k]

    top = {name: top_k(counter) for name, counter in categories.items()}

    def distinct(a: str, b: str) -> list[str]:
        only = {w for w, _ in top[a]} - {w for w, _ in top[b]}
        return sorted(only)

    return WordCountReport(
        top=top,
        distinct={
            "accurate_only": distinct("accurate", "inaccurate"),
            "inaccurate_only": distinct("inaccurate", "accurate"),
            "helpful_only": distinct("helpful", "unhelpful"),
            "unhelpful_only": distinct("unhelpful", "helpful"),
        },
        k=k,
    )


# ---------------------------------------------------------------------------
# Loading and saving

_RATING_FIELDS = ("suggestion_id", "rater_id", "accuracy", "helpfulness")
_OPTIONAL_FIELDS = ("explanation", "guideline", "round", "text")


def load_ratings(path: str | Path) -> list[RatingRecord]:
    """Read rating records from .csv or .jsonl, validating scales strictly."""
    path = Path(path)
    rows: Iterable[tuple[int, dict]]
    if path.suffix == ".jsonl":
        rows = _jsonl_rows(path)
    elif path.suffix == ".csv":
        rows = _csv_rows(path)
    else:
        raise AnalysisError(f"unsupported ratings format {path.suffix!r}")
    records = []
    for row_number, raw in rows:
        records.append(_record_from_row(raw, row_number))
    if not records:
        raise EmptyInputError(f"{path} contains no rating records")
    return records


def _jsonl_rows(path: Path) -> Iterable[tuple[int, dict]]:
    for i, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaError(i, f"invalid JSON: {exc}") from exc
        if not isinstance(obj, dict):
            raise SchemaError(i, "each line must be a JSON object")
        yield i, obj


def _csv_rows(path: Path) -> Iterable[tuple[int, dict]]:
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        # Header is line 1; data starts at line 2.
        for i, raw in enumerate(reader, start=2):
            yield i, raw


def _record_from_row(raw: dict, row_number: int) -> RatingRecord:
    for column in _RATING_FIELDS:
        if raw.get(column) in (None, ""):
            raise SchemaError(row_number, f"missing required column {column!r}")
    try:
        accuracy = int(raw["accuracy"])
        helpfulness = int(raw["helpfulness"])
    except (TypeError, ValueError) as exc:
        raise SchemaError(row_number, f"ratings must be integers: {exc}") from exc
    round_value = raw.get("round")
    if round_value in (None, ""):
        round_number = None
    else:
        try:
            round_number = int(round_value)
        except (TypeError, ValueError) as exc:
            raise SchemaError(row_number, f"round must be an integer: {exc}") from exc
    try:
        return RatingRecord(
            suggestion_id=str(raw["suggestion_id"]),
            rater_id=str(raw["rater_id"]),
            accuracy=accuracy,
            helpfulness=helpfulness,
            explanation=str(raw.get("explanation") or ""),
            guideline=str(raw.get("guideline") or ""),
            round=round_number,
            text=str(raw.get("text") or ""),
        )
    except AnalysisError as exc:
        raise SchemaError(row_number, str(exc)) from exc


def write_ratings(records: Sequence[RatingRecord], path: str | Path) -> None:
    path = Path(path)
    columns = [*_RATING_FIELDS, *_OPTIONAL_FIELDS]
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=columns)
        writer.writeheader()
        for record in records:
            writer.writerow(
                {
                    "suggestion_id": record.suggestion_id,
                    "rater_id": record.rater_id,
                    "accuracy": record.accuracy,
                    "helpfulness": record.helpfulness,
                    "explanation": record.explanation,
                    "guideline": record.guideline,
                    "round": "" if record.round is None else record.round,
                    "text": record.text,
                }
            )


def load_ground_truth(path: str | Path) -> GroundTruth:
    """Read the ground-truth partition from .csv or .jsonl. Entry ids must be
    distinct."""
    path = Path(path)
    if path.suffix == ".jsonl":
        rows = _jsonl_rows(path)
    elif path.suffix == ".csv":
        rows = _csv_rows(path)
    else:
        raise AnalysisError(f"unsupported ground-truth format {path.suffix!r}")
    entries: list[GroundTruthEntry] = []
    seen: set[str] = set()
    for row_number, raw in rows:
        entry_id = raw.get("id") or raw.get("entry_id")
        provenance = raw.get("provenance")
        if not entry_id:
            raise SchemaError(row_number, "missing entry id")
        if entry_id in seen:
            raise SchemaError(row_number, f"duplicate entry id {entry_id!r}")
        seen.add(entry_id)
        try:
            entries.append(
                GroundTruthEntry(entry_id=str(entry_id), provenance=str(provenance))
            )
        except AnalysisError as exc:
            raise SchemaError(row_number, str(exc)) from exc
    if not entries:
        raise EmptyInputError(f"{path} contains no ground-truth entries")
    return GroundTruth(entries=tuple(entries))
