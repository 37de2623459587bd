"""Combine classified mentions into one label per observation per study.

Per observation the precedence is positive > uncertain > negative > blank.
No Finding is derived afterwards: positive exactly when no pathology came
out positive or uncertain.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, replace
from typing import Iterable, Iterator, Mapping, TextIO

from .classification import Certainty, classify_encoded
from .errors import RadlabelError, UnclassifiedMention
from .extraction import Mention, extract_mentions
from .ingest import ReportDocument
from .observations import MENTIONABLE, NO_FINDING, OBSERVATIONS, PATHOLOGIES, BY_NAME, Observation
from .rules import RuleSet


class Label(enum.Enum):
    """One observation's final state, ordered blank < 0 < u < 1."""

    BLANK = "blank"
    NEGATIVE = "0"
    UNCERTAIN = "u"
    POSITIVE = "1"

    @property
    def rank(self) -> int:
        return _RANK[self]


_RANK = {Label.BLANK: 0, Label.NEGATIVE: 1, Label.UNCERTAIN: 2, Label.POSITIVE: 3}

_CERTAINTY_LABEL = {
    Certainty.POSITIVE: Label.POSITIVE,
    Certainty.UNCERTAIN: Label.UNCERTAIN,
    Certainty.NEGATIVE: Label.NEGATIVE,
}

#: CSV cell encoding (u is written as -1.0, blank as an empty cell).
LABEL_TO_CELL = {
    Label.BLANK: "",
    Label.NEGATIVE: "0.0",
    Label.UNCERTAIN: "-1.0",
    Label.POSITIVE: "1.0",
}

_CELL_TO_LABEL = {0.0: Label.NEGATIVE, -1.0: Label.UNCERTAIN, 1.0: Label.POSITIVE}


@dataclass(frozen=True)
class LabelVector:
    """Final labels over all 14 observations for one report."""

    report_id: str
    labels: Mapping[Observation, Label]

    def __post_init__(self):
        missing = [o.name for o in OBSERVATIONS if o not in self.labels]
        if missing:
            raise ValueError(f"label vector missing observations: {missing}")
        if self.labels[NO_FINDING] not in (Label.POSITIVE, Label.BLANK):
            raise ValueError(f"{NO_FINDING.name} must be 1 or blank, got {self.labels[NO_FINDING]}")


def aggregate(mentions: Iterable[Mention]) -> dict[Observation, Label]:
    """Fold classified mentions into labels for the 13 matchable observations."""
    labels = {observation: Label.BLANK for observation in MENTIONABLE}
    for mention in mentions:
        if mention.classification is None:
            raise UnclassifiedMention(
                f"mention of {mention.observation.name} at sentence "
                f"{mention.sentence_index} has no class"
            )
        if mention.observation == NO_FINDING:
            raise RadlabelError(f"{NO_FINDING.name} is derived and cannot carry mentions")
        label = _CERTAINTY_LABEL[mention.classification.value]
        if label.rank > labels[mention.observation].rank:
            labels[mention.observation] = label
    return labels


def derive_no_finding(labels: Mapping[Observation, Label]) -> Label:
    """Positive iff no pathology is positive or uncertain; else blank.

    Support Devices never blocks No Finding (it is equipment, not
    pathology).
    """
    missing = [o.name for o in MENTIONABLE if o not in labels]
    if missing:
        raise ValueError(f"derive_no_finding needs all 13 matchable observations; missing {missing}")
    for pathology in PATHOLOGIES:
        if labels[pathology] in (Label.POSITIVE, Label.UNCERTAIN):
            return Label.BLANK
    return Label.POSITIVE


def label_study(doc: ReportDocument, ruleset: RuleSet) -> LabelVector:
    """Run extraction, classification and aggregation over one document."""
    mentions = extract_mentions(doc, ruleset)
    classified = []
    encoded: dict[int, list[int]] = {}
    for mention in mentions:
        sentence = doc.sentences[mention.sentence_index]
        ids = encoded.get(mention.sentence_index)
        if ids is None:
            ids = encoded[mention.sentence_index] = ruleset.encode_sentence(sentence.lowers)
        outcome = classify_encoded(mention, sentence, ids, ruleset)
        classified.append(replace(mention, classification=outcome))
    labels: dict[Observation, Label] = aggregate(classified)
    labels[NO_FINDING] = derive_no_finding(labels)
    return LabelVector(report_id=doc.report_id, labels=labels)


# --- labels CSV ----------------------------------------------------------------

LABELS_CSV_HEADER = ["report_id"] + [o.name for o in OBSERVATIONS]


def write_labels_csv(vectors: Iterable[LabelVector], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(LABELS_CSV_HEADER)
    for vector in vectors:
        writer.writerow(
            [vector.report_id] + [LABEL_TO_CELL[vector.labels[o]] for o in OBSERVATIONS]
        )


def parse_label_cell(cell: str) -> Label:
    text = cell.strip()
    if text == "":
        return Label.BLANK
    try:
        label = _CELL_TO_LABEL.get(float(text))
    except ValueError:
        label = None
    if label is None:
        raise RadlabelError(f"label cell must be 1.0, 0.0, -1.0 or empty, got {cell!r}")
    return label


def read_label_rows(stream: TextIO) -> Iterator[tuple[str, dict[Observation, Label]]]:
    """Read raw (report_id, labels) rows from any labels-format CSV.

    Gold annotation files share the format but are not bound by the
    LabelVector invariant on No Finding, so this reader stays permissive.
    """
    reader = csv.reader(stream)
    header = next(reader, None)
    if header != LABELS_CSV_HEADER:
        raise RadlabelError(
            "labels CSV header must name report_id and the 14 observations in canonical order"
        )
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(LABELS_CSV_HEADER):
            raise RadlabelError(f"labels CSV line {lineno}: expected {len(LABELS_CSV_HEADER)} cells")
        labels = {
            BY_NAME[name]: parse_label_cell(cell)
            for name, cell in zip(LABELS_CSV_HEADER[1:], row[1:])
        }
        yield row[0], labels


def read_labels_csv(stream: TextIO) -> Iterator[LabelVector]:
    """Read a labeler-output CSV, enforcing the LabelVector invariants."""
    for report_id, labels in read_label_rows(stream):
        yield LabelVector(report_id=report_id, labels=labels)
