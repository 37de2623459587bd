"""Scoring of predicted labels against gold annotations.

Three binary tasks are derived from the four-state labels: mention
detection (any label vs blank), negation detection (0 vs rest) and
uncertainty detection (u vs rest).  F1 is reported per observation with
macro (mean over defined observations) and micro (pooled counts) averages.
AUROC and Brier scores support probability-based model evaluation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator, Mapping, Optional, Sequence, TextIO

from .aggregation import Label, LabelVector, read_label_rows
from .errors import DegenerateClass, ReportIdMismatch
from .observations import OBSERVATIONS, Observation


class Task(enum.Enum):
    MENTION = "mention"
    NEGATION = "negation"
    UNCERTAINTY = "uncertainty"


@dataclass(frozen=True)
class GoldAnnotation:
    """Radiologist-annotated labels over all 14 observations for one report."""

    report_id: str
    labels: Mapping[Observation, Label]

    def __post_init__(self):
        missing = [o.name for o in OBSERVATIONS if o not in self.labels]
        if missing:
            raise ValueError(f"gold annotation missing observations: {missing}")


def read_gold_csv(stream: TextIO) -> Iterator[GoldAnnotation]:
    """Gold files share the labels CSV format (u as -1.0, blank empty)."""
    for report_id, labels in read_label_rows(stream):
        yield GoldAnnotation(report_id=report_id, labels=labels)


def binarize(label: Label, task: Task) -> bool:
    """Map a four-state label onto the task's positive class."""
    if task is Task.MENTION:
        return label is not Label.BLANK
    if task is Task.NEGATION:
        return label is Label.NEGATIVE
    return label is Label.UNCERTAIN


@dataclass
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def add(self, predicted: bool, actual: bool) -> None:
        if predicted and actual:
            self.tp += 1
        elif predicted:
            self.fp += 1
        elif actual:
            self.fn += 1

    def f1(self) -> Optional[float]:
        denominator = 2 * self.tp + self.fp + self.fn
        if denominator == 0:
            return None  # reported as N/A
        return 2 * self.tp / denominator


@dataclass(frozen=True)
class MetricReport:
    """Per-observation F1 (None = N/A) plus macro and micro averages."""

    task: Task
    per_observation: Mapping[Observation, Optional[float]]
    counts: Mapping[Observation, ConfusionCounts]
    macro_average: Optional[float]
    micro_average: Optional[float]


def f1_report(
    pred: Sequence[LabelVector], gold: Sequence[GoldAnnotation], task: Task
) -> MetricReport:
    """Score predictions against gold on one task.

    Macro averages only the defined per-observation values; micro pools
    confusion counts over all 14 observations before dividing.
    """
    pred_by_id = {p.report_id: p for p in pred}
    gold_by_id = {g.report_id: g for g in gold}
    if len(pred_by_id) != len(pred) or len(gold_by_id) != len(gold):
        raise ReportIdMismatch("duplicate report_id in prediction or gold corpus")
    if pred_by_id.keys() != gold_by_id.keys():
        only_pred = sorted(pred_by_id.keys() - gold_by_id.keys())[:5]
        only_gold = sorted(gold_by_id.keys() - pred_by_id.keys())[:5]
        raise ReportIdMismatch(
            f"prediction and gold corpora differ (pred-only {only_pred}, gold-only {only_gold})"
        )

    counts = {observation: ConfusionCounts() for observation in OBSERVATIONS}
    for report_id, prediction in pred_by_id.items():
        annotation = gold_by_id[report_id]
        for observation in OBSERVATIONS:
            counts[observation].add(
                binarize(prediction.labels[observation], task),
                binarize(annotation.labels[observation], task),
            )

    per_observation = {o: counts[o].f1() for o in OBSERVATIONS}
    defined = [f1 for f1 in per_observation.values() if f1 is not None]
    macro = sum(defined) / len(defined) if defined else None
    pooled = ConfusionCounts(
        tp=sum(c.tp for c in counts.values()),
        fp=sum(c.fp for c in counts.values()),
        fn=sum(c.fn for c in counts.values()),
    )
    return MetricReport(
        task=task,
        per_observation=per_observation,
        counts=counts,
        macro_average=macro,
        micro_average=pooled.f1(),
    )


def auroc(scores: Sequence[float], truths: Sequence[bool]) -> float:
    """Area under the ROC curve via the rank-sum (Mann-Whitney) statistic.

    Equals P(score_pos > score_neg) + 0.5 * P(tie) over positive/negative
    pairs, so it is invariant under strictly increasing score transforms.
    """
    if len(scores) != len(truths):
        raise ValueError("scores and truths must have equal length")
    n_pos = sum(1 for t in truths if t)
    n_neg = len(truths) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DegenerateClass("AUROC needs at least one positive and one negative")

    order = sorted(range(len(scores)), key=lambda i: scores[i])
    ranks = [0.0] * len(scores)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and scores[order[j + 1]] == scores[order[i]]:
            j += 1
        tied_rank = (i + j + 2) / 2  # average of 1-based ranks i+1..j+1
        for k in range(i, j + 1):
            ranks[order[k]] = tied_rank
        i = j + 1

    rank_sum_pos = sum(rank for rank, truth in zip(ranks, truths) if truth)
    return (rank_sum_pos - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg)


def brier_scores(probs: Sequence[float], truths: Sequence[bool]) -> tuple[float, float]:
    """Brier score and its prevalence-scaled variant.

    The scaled score is 1 - brier / brier_max where brier_max is the score
    of the constant-prevalence predictor, so 1 is perfect and 0 matches the
    reference model.
    """
    if len(probs) != len(truths):
        raise ValueError("probs and truths must have equal length")
    if not probs:
        raise ValueError("brier_scores needs at least one prediction")
    if any(not 0.0 <= p <= 1.0 for p in probs):
        raise ValueError("probabilities must lie in [0, 1]")
    brier = sum((p - (1.0 if t else 0.0)) ** 2 for p, t in zip(probs, truths)) / len(probs)
    prevalence = sum(1 for t in truths if t) / len(truths)
    if prevalence in (0.0, 1.0):
        raise DegenerateClass("scaled Brier score undefined when only one class is present")
    brier_max = prevalence * (1.0 - prevalence)
    return brier, 1.0 - brier / brier_max


# --- report rendering -----------------------------------------------------------


def report_records(reports: Sequence[MetricReport]) -> list[dict]:
    """One machine-readable record per observation per task, plus averages."""
    records = []
    for report in reports:
        for observation in OBSERVATIONS:
            c = report.counts[observation]
            records.append(
                {
                    "task": report.task.value,
                    "observation": observation.name,
                    "tp": c.tp,
                    "fp": c.fp,
                    "fn": c.fn,
                    "f1": report.per_observation[observation],
                }
            )
        records.append(
            {
                "task": report.task.value,
                "observation": "Macro-average",
                "f1": report.macro_average,
            }
        )
        records.append(
            {
                "task": report.task.value,
                "observation": "Micro-average",
                "f1": report.micro_average,
            }
        )
    return records


def _cell(value: Optional[float]) -> str:
    return "N/A" if value is None else f"{value:.3f}"


def format_table(reports: Sequence[MetricReport]) -> str:
    """Human-readable F1 table: one observation per row, one task per column."""
    headers = ["Observation"] + [f"{r.task.value.capitalize()} F1" for r in reports]
    rows = [[o.name] + [_cell(r.per_observation[o]) for r in reports] for o in OBSERVATIONS]
    rows.append(["Macro-average"] + [_cell(r.macro_average) for r in reports])
    rows.append(["Micro-average"] + [_cell(r.micro_average) for r in reports])
    widths = [max(len(row[i]) for row in [headers] + rows) for i in range(len(headers))]
    lines = [
        "  ".join(headers[i].ljust(widths[i]) for i in range(len(headers))),
        "  ".join("-" * widths[i] for i in range(len(headers))),
    ]
    for row in rows:
        lines.append("  ".join(row[i].ljust(widths[i]) for i in range(len(headers))))
    return "\n".join(lines) + "\n"
