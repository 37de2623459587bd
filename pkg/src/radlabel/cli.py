"""Command-line interface: label reports, evaluate labels, transform labels.

Exit codes: 0 success, 1 usage error, 2 data error.  Outputs are byte
deterministic for identical inputs, including under --workers > 1 (results
are collected in input order).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .aggregation import (
    LABEL_TO_CELL,
    LABELS_CSV_HEADER,
    label_study,
    read_labels_csv,
    write_labels_csv,
)
from .conllu import attach_parses, read_parse_index
from .errors import RadlabelError
from .evaluation import Task, f1_report, format_table, read_gold_csv, report_records
from .ingest import make_document, read_reports_csv
from .observations import OBSERVATIONS
from .policies import (
    LabelMatrix,
    apply_policy,
    apply_selftrain,
    read_probability_csv,
    write_mask_csv,
    write_targets_csv,
)
from .rules import demo_rules_root, load_ruleset

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

#: Root directory holding phrases/ and rules/ when flags are omitted.
RULES_ENV_VAR = "RADLABEL_RULES"


class UsageError(Exception):
    """A flag combination argparse cannot express declaratively."""


class _ArgumentParser(argparse.ArgumentParser):
    """argparse defaults to exit code 2; usage errors here are exit 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="radlabel",
        description="Label chest radiograph observations in radiology report text.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    label = sub.add_parser("label", help="label a reports CSV")
    label.add_argument("--reports", required=True, help="input CSV with header report_id,text")
    label.add_argument("--phrases", help="phrase directory (default: $RADLABEL_RULES/phrases or the bundled demo set)")
    label.add_argument("--rules", help="rule directory (default: $RADLABEL_RULES/rules or the bundled demo set)")
    group = label.add_mutually_exclusive_group()
    group.add_argument("--conllu", help="CoNLL-U file with dependency parses to attach")
    group.add_argument(
        "--surface-only",
        action="store_true",
        help="run without parses; dependency rules never match",
    )
    label.add_argument("--output", required=True, help="labels CSV to write")
    label.add_argument("--workers", type=int, default=1, help="parallel labeling processes")
    label.set_defaults(func=run_label)

    evaluate = sub.add_parser("evaluate", help="score predicted labels against gold labels")
    evaluate.add_argument("--pred", required=True, help="predicted labels CSV")
    evaluate.add_argument("--gold", required=True, help="gold labels CSV (same format)")
    evaluate.add_argument(
        "--task",
        choices=[t.value for t in Task] + ["all"],
        default="all",
        help="which binary task to score (default: all)",
    )
    evaluate.add_argument("--output", help="write machine-readable JSON records here")
    evaluate.set_defaults(func=run_evaluate)

    transform = sub.add_parser("transform", help="apply an uncertainty policy to a labels CSV")
    transform.add_argument("--labels", required=True, help="labels CSV to transform")
    transform.add_argument(
        "--policy",
        required=True,
        choices=["ignore", "zeros", "ones", "multiclass", "selftrain"],
    )
    transform.add_argument("--preds", help="probability CSV (required for --policy selftrain)")
    transform.add_argument("--output", required=True, help="targets CSV to write")
    transform.add_argument("--mask-output", help="mask CSV path (default: <output>.mask.csv)")
    transform.set_defaults(func=run_transform)
    return parser


def _resolve_rule_dirs(args) -> tuple[Path, Path]:
    root = os.environ.get(RULES_ENV_VAR)
    base = Path(root) if root else demo_rules_root()
    phrases = Path(args.phrases) if args.phrases else base / "phrases"
    rules = Path(args.rules) if args.rules else base / "rules"
    return phrases, rules


# Per-worker state, built once in the pool initializer.
_worker_state: dict = {}


def _worker_init(phrases_dir, rules_dir, conllu_path):
    _worker_state["ruleset"] = load_ruleset(phrases_dir, rules_dir)
    if conllu_path:
        with open(conllu_path, encoding="utf-8") as stream:
            _worker_state["parses"] = read_parse_index(stream)
    else:
        _worker_state["parses"] = None


def _worker_label(row: tuple[str, str]) -> list[str]:
    report_id, text = row
    vector = _label_one(report_id, text, _worker_state["ruleset"], _worker_state["parses"])
    return [vector.report_id] + [LABEL_TO_CELL[vector.labels[o]] for o in OBSERVATIONS]


def _label_one(report_id, text, ruleset, parses):
    doc = make_document(report_id, text)
    if parses is not None:
        doc = attach_parses(doc, parses)
    return label_study(doc, ruleset)


def run_label(args) -> int:
    phrases_dir, rules_dir = _resolve_rule_dirs(args)
    ruleset = load_ruleset(phrases_dir, rules_dir)
    if args.conllu:
        with open(args.conllu, encoding="utf-8") as stream:
            parses = read_parse_index(stream)
    else:
        parses = None

    with open(args.reports, newline="", encoding="utf-8") as reports, open(
        args.output, "w", newline="", encoding="utf-8"
    ) as out:
        rows = read_reports_csv(reports)
        if args.workers > 1:
            writer = csv.writer(out, lineterminator="\n")
            writer.writerow(LABELS_CSV_HEADER)
            with ProcessPoolExecutor(
                max_workers=args.workers,
                initializer=_worker_init,
                initargs=(phrases_dir, rules_dir, args.conllu),
            ) as pool:
                for cells in pool.map(_worker_label, rows, chunksize=64):
                    writer.writerow(cells)
        else:
            vectors = (_label_one(rid, text, ruleset, parses) for rid, text in rows)
            write_labels_csv(vectors, out)
    return EXIT_OK


def run_evaluate(args) -> int:
    with open(args.pred, newline="", encoding="utf-8") as stream:
        pred = list(read_labels_csv(stream))
    with open(args.gold, newline="", encoding="utf-8") as stream:
        gold = list(read_gold_csv(stream))
    tasks = list(Task) if args.task == "all" else [Task(args.task)]
    reports = [f1_report(pred, gold, task) for task in tasks]
    sys.stdout.write(format_table(reports))
    if args.output:
        with open(args.output, "w", encoding="utf-8") as out:
            json.dump(report_records(reports), out, indent=2)
            out.write("\n")
    return EXIT_OK


def run_transform(args) -> int:
    if (args.policy == "selftrain") != (args.preds is not None):
        raise UsageError("--preds is required for --policy selftrain and not allowed otherwise")
    with open(args.labels, newline="", encoding="utf-8") as stream:
        matrix = LabelMatrix.from_csv(stream)
    if args.policy == "selftrain":
        with open(args.preds, newline="", encoding="utf-8") as stream:
            preds = read_probability_csv(stream)
        if preds.report_ids != matrix.report_ids:
            raise RadlabelError("prediction CSV must list the same report_ids in the same order")
        output = apply_selftrain(matrix, preds)
    else:
        output = apply_policy(matrix, args.policy)
    mask_path = args.mask_output or f"{args.output}.mask.csv"
    with open(args.output, "w", newline="", encoding="utf-8") as out:
        write_targets_csv(matrix.report_ids, output, out)
    with open(mask_path, "w", newline="", encoding="utf-8") as out:
        write_mask_csv(matrix.report_ids, output, out)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RadlabelError, OSError, ValueError) as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
