"""Command line for the parse preprocessor.

Exit codes match the labeler CLI: 0 success, 1 usage error, 2 data or
backend error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .backends import BackendUnavailable, TokenMisalignment, available_backends
from .preprocess import PreprocessJob, preprocess

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="radlabel-preprocess",
        description="Parse report impressions into CoNLL-U for the radlabel labeler.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--reports", required=True, help="input CSV with header report_id,text")
    parser.add_argument("--output", required=True, help="CoNLL-U file to write")
    parser.add_argument(
        "--backend",
        choices=available_backends(),
        default="heuristic",
        help="dependency parser backend (default: heuristic)",
    )
    parser.add_argument("--model", help="model name for model-based backends")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    job = PreprocessJob(
        reports_csv=Path(args.reports),
        output_conllu=Path(args.output),
        backend=args.backend,
        model=args.model,
    )
    try:
        n_reports, n_sentences = preprocess(job)
    except (BackendUnavailable, TokenMisalignment, OSError, ValueError) as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    print(f"wrote {n_sentences} parsed sentences from {n_reports} reports to {args.output}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
