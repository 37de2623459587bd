"""Training policies for uncertain labels: targets, loss masks and losses.

Four pure transforms (ignore / zeros / ones / multiclass) plus the
self-training relabel step turn a {0, 1, u, blank} label matrix into
training targets with a boolean loss mask.  Blank cells mean "no mention"
and are always masked out: they cannot supervise.  The masked
cross-entropy and the positive-probability readout for the 3-class policy
live here too, along with the across-views maximum used at inference.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence, TextIO

import numpy as np

from .aggregation import Label, read_label_rows
from .errors import DegenerateTriple, EmptyViews, ShapeMismatch
from .observations import OBSERVATIONS

#: Numeric cell encoding shared with the labels CSV.
POSITIVE, NEGATIVE, UNCERTAIN = 1.0, 0.0, -1.0
BLANK = np.nan

#: Class codes for the multiclass (3-class) policy.
NEG_CLASS, POS_CLASS, UNC_CLASS = 0, 1, 2

#: Probability clamp keeping log() finite.
EPSILON = 1e-7

_LABEL_VALUE = {
    Label.POSITIVE: POSITIVE,
    Label.NEGATIVE: NEGATIVE,
    Label.UNCERTAIN: UNCERTAIN,
    Label.BLANK: BLANK,
}


@dataclass(frozen=True)
class LabelMatrix:
    """Study-by-observation label cells in {0, 1, u(-1), blank(nan)}."""

    report_ids: tuple[str, ...]
    values: np.ndarray  # float64, shape (n_reports, 14)

    def __post_init__(self):
        expected = (len(self.report_ids), len(OBSERVATIONS))
        if self.values.shape != expected:
            raise ShapeMismatch(f"label matrix shape {self.values.shape}, expected {expected}")
        finite = self.values[~np.isnan(self.values)]
        if not np.isin(finite, (POSITIVE, NEGATIVE, UNCERTAIN)).all():
            raise ValueError("label cells must be 1, 0, -1 or nan")

    @classmethod
    def from_rows(cls, rows) -> "LabelMatrix":
        """Build from (report_id, {Observation: Label}) rows."""
        ids = []
        data = []
        for report_id, labels in rows:
            ids.append(report_id)
            data.append([_LABEL_VALUE[labels[o]] for o in OBSERVATIONS])
        values = np.array(data, dtype=np.float64).reshape(len(ids), len(OBSERVATIONS))
        return cls(report_ids=tuple(ids), values=values)

    @classmethod
    def from_csv(cls, stream: TextIO) -> "LabelMatrix":
        return cls.from_rows(read_label_rows(stream))


#: Tolerance on the sum of a 3-class probability triple.
TRIPLE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class PredictionMatrix:
    """Per-cell model probabilities, aligned with a LabelMatrix.

    `values` is (n_reports, 14) of positive-class probabilities, or
    (n_reports, 14, 3) of (p0, p1, pu) triples for 3-class heads; triples
    must sum to one.
    """

    report_ids: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        base = (len(self.report_ids), len(OBSERVATIONS))
        if self.values.shape not in (base, base + (3,)):
            raise ShapeMismatch(
                f"prediction shape {self.values.shape}, expected {base} or {base + (3,)}"
            )
        if np.isnan(self.values).any() or (self.values < 0).any() or (self.values > 1).any():
            raise ValueError("probabilities must lie in [0, 1]")
        if self.values.ndim == 3:
            sums = self.values.sum(axis=2)
            if (np.abs(sums - 1.0) > TRIPLE_TOLERANCE).any():
                raise ValueError("3-class probability triples must sum to 1")

    def positive_probabilities(self) -> np.ndarray:
        """Binary view: triples collapse through the positive/negative softmax."""
        if self.values.ndim == 2:
            return self.values
        p0, p1 = self.values[..., 0], self.values[..., 1]
        mass = p0 + p1
        if (mass == 0.0).any():
            raise DegenerateTriple("a triple has no probability mass on positive or negative")
        return p1 / mass


def read_probability_csv(stream: TextIO) -> PredictionMatrix:
    """Read a per-cell probability CSV (labels header, every cell present)."""
    reader = csv.reader(stream)
    header = next(reader, None)
    if header != ["report_id"] + [o.name for o in OBSERVATIONS]:
        raise ValueError("probability CSV must use the labels CSV header")
    ids = []
    data = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(OBSERVATIONS) + 1:
            raise ValueError(f"probability CSV line {lineno}: expected {len(OBSERVATIONS) + 1} cells")
        try:
            values = [float(cell) for cell in row[1:]]
        except ValueError as exc:
            raise ValueError(f"probability CSV line {lineno}: non-numeric cell") from exc
        ids.append(row[0])
        data.append(values)
    values = np.array(data, dtype=np.float64).reshape(len(ids), len(OBSERVATIONS))
    return PredictionMatrix(report_ids=tuple(ids), values=values)


@dataclass(frozen=True)
class PolicyOutput:
    """Training targets and loss mask produced by one policy.

    `kind` tells how to read `targets`: "hard" and "soft" targets are
    probabilities (nan where masked); "three_class" targets are the
    NEG/POS/UNC class codes (-1 where masked).
    """

    targets: np.ndarray
    mask: np.ndarray  # bool; True = contributes to the loss
    policy: str
    kind: str

    def __post_init__(self):
        if self.targets.shape != self.mask.shape:
            raise ShapeMismatch("targets and mask must share a shape")


BINARY_POLICIES = ("ignore", "zeros", "ones")
POLICIES = BINARY_POLICIES + ("multiclass",)


def apply_policy(labels: LabelMatrix, policy: str) -> PolicyOutput:
    """Map a label matrix to targets and mask under the named policy.

    ignore masks u cells out of the loss; zeros and ones rewrite u to 0 or
    1; multiclass keeps u as its own class.  Blank cells are masked under
    every policy.
    """
    v = labels.values
    blank = np.isnan(v)
    uncertain = v == UNCERTAIN
    if policy == "ignore":
        mask = ~(blank | uncertain)
        targets = np.where(mask, v, np.nan)
        return PolicyOutput(targets, mask, policy, "hard")
    if policy == "zeros":
        targets = np.where(uncertain, NEGATIVE, v)
        return PolicyOutput(targets, ~blank, policy, "hard")
    if policy == "ones":
        targets = np.where(uncertain, POSITIVE, v)
        return PolicyOutput(targets, ~blank, policy, "hard")
    if policy == "multiclass":
        codes = np.full(v.shape, -1, dtype=np.int8)
        codes[v == NEGATIVE] = NEG_CLASS
        codes[v == POSITIVE] = POS_CLASS
        codes[uncertain] = UNC_CLASS
        return PolicyOutput(codes, ~blank, policy, "three_class")
    raise ValueError(f"unknown policy {policy!r}; expected one of {POLICIES}")


def apply_selftrain(labels: LabelMatrix, preds) -> PolicyOutput:
    """Relabel u cells with model predictions; 0 and 1 cells are kept.

    `preds` holds per-cell positive probabilities (a PredictionMatrix or a
    plain array) from a model trained to convergence under the ignore
    policy.  This is the one-shot relabeling step; no iteration is
    performed.
    """
    if isinstance(preds, PredictionMatrix):
        preds = preds.positive_probabilities()
    preds = np.asarray(preds, dtype=np.float64)
    if preds.shape != labels.values.shape:
        raise ShapeMismatch(f"predictions shape {preds.shape}, labels shape {labels.values.shape}")
    if np.isnan(preds).any() or (preds < 0).any() or (preds > 1).any():
        raise ValueError("predictions must be probabilities in [0, 1]")
    v = labels.values
    blank = np.isnan(v)
    targets = np.where(v == UNCERTAIN, preds, v)
    targets = np.where(blank, np.nan, targets)
    return PolicyOutput(targets, ~blank, "selftrain", "soft")


def masked_bce(
    targets: np.ndarray, mask: np.ndarray, preds: np.ndarray, reduction: str = "sum"
) -> float:
    """Binary cross-entropy over unmasked cells only.

    Targets may be soft (in [0, 1]).  Predictions are clamped to
    [EPSILON, 1-EPSILON] before the logs.  `reduction` is "sum" or "mean"
    over unmasked cells; an all-masked input scores 0.0.
    """
    targets = np.asarray(targets, dtype=np.float64)
    preds = np.asarray(preds, dtype=np.float64)
    mask = np.asarray(mask, dtype=bool)
    if targets.shape != mask.shape or preds.shape != mask.shape:
        raise ShapeMismatch("targets, mask and preds must share a shape")
    if reduction not in ("sum", "mean"):
        raise ValueError(f"reduction must be 'sum' or 'mean', got {reduction!r}")
    t = targets[mask]
    if t.size == 0:
        return 0.0
    p = np.clip(preds[mask], EPSILON, 1.0 - EPSILON)
    losses = -(t * np.log(p) + (1.0 - t) * np.log(1.0 - p))
    return float(losses.mean() if reduction == "mean" else losses.sum())


def multiclass_positive_probability(p0: float, p1: float, pu: float) -> float:
    """Positive probability after a softmax restricted to positive/negative.

    Renormalizes (p0, p1) to sum to one and returns the positive share.
    """
    triple = (p0, p1, pu)
    if any(not 0.0 <= p <= 1.0 for p in triple):
        raise ValueError(f"class probabilities must lie in [0, 1]: {triple}")
    if abs(sum(triple) - 1.0) > 1e-9:
        raise ValueError(f"class probabilities must sum to 1: {triple}")
    if p0 + p1 == 0.0:
        raise DegenerateTriple("no probability mass on the positive or negative class")
    return p1 / (p0 + p1)


def combine_views(view_probs: Sequence[Sequence[float]]) -> np.ndarray:
    """Elementwise maximum of per-view probability vectors."""
    if len(view_probs) == 0:
        raise EmptyViews("at least one view is required")
    arrays = [np.asarray(v, dtype=np.float64) for v in view_probs]
    length = arrays[0].shape
    if any(a.shape != length for a in arrays):
        raise ShapeMismatch("all views must have the same length")
    for a in arrays:
        if (a < 0).any() or (a > 1).any():
            raise ValueError("view probabilities must lie in [0, 1]")
    return np.maximum.reduce(arrays)


# --- transform CSV output --------------------------------------------------------

TARGET_CELLS_THREE_CLASS = {POS_CLASS: "1.0", NEG_CLASS: "0.0", UNC_CLASS: "-1.0"}


def _format_target(value: float, kind: str) -> str:
    if kind == "three_class":
        return TARGET_CELLS_THREE_CLASS[int(value)]
    return repr(float(value))


def write_targets_csv(report_ids: Sequence[str], output: PolicyOutput, stream: TextIO) -> None:
    """Targets CSV: labels header, masked cells empty, soft cells decimal."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["report_id"] + [o.name for o in OBSERVATIONS])
    for i, report_id in enumerate(report_ids):
        row = [report_id]
        for j in range(len(OBSERVATIONS)):
            if not output.mask[i, j]:
                row.append("")
            else:
                row.append(_format_target(output.targets[i, j], output.kind))
        writer.writerow(row)


def write_mask_csv(report_ids: Sequence[str], output: PolicyOutput, stream: TextIO) -> None:
    """Sidecar mask CSV: 1 where the cell contributes to the loss."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["report_id"] + [o.name for o in OBSERVATIONS])
    for i, report_id in enumerate(report_ids):
        writer.writerow([report_id] + ["1" if output.mask[i, j] else "0" for j in range(len(OBSERVATIONS))])
