"""Batch conversion of report CSVs into aligned CoNLL-U files."""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, TextIO

from radlabel.ingest import make_document, read_reports_csv

from .backends import TokenMisalignment, get_backend


@dataclass(frozen=True)
class PreprocessJob:
    """One conversion: reports CSV in, CoNLL-U out, via a named backend."""

    reports_csv: Path
    output_conllu: Path
    backend: str = "heuristic"
    model: Optional[str] = None


def preprocess(job: PreprocessJob) -> tuple[int, int]:
    """Parse every impression sentence and write one CoNLL-U block each.

    Blocks carry ``# report_id`` and ``# sent_index`` metadata matching the
    labeler's alignment contract.  The output file appears atomically.
    Returns (reports, sentences) counts.
    """
    backend = get_backend(job.backend, model=job.model)
    output = Path(job.output_conllu)
    output.parent.mkdir(parents=True, exist_ok=True)

    n_reports = 0
    n_sentences = 0
    fd, tmp_name = tempfile.mkstemp(
        prefix=output.name + ".", suffix=".tmp", dir=output.parent
    )
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as tmp, open(
            job.reports_csv, newline="", encoding="utf-8"
        ) as reports:
            for report_id, text in read_reports_csv(reports):
                if "\n" in report_id or "\r" in report_id:
                    raise ValueError(f"report_id {report_id!r} cannot contain newlines")
                n_reports += 1
                doc = make_document(report_id, text)
                for sent_index, sentence in enumerate(doc.sentences):
                    words = [t.surface for t in sentence.tokens]
                    rows = backend.parse(words)
                    _check_alignment(report_id, sent_index, words, rows)
                    _write_block(tmp, report_id, sent_index, rows)
                    n_sentences += 1
        os.replace(tmp_name, output)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    return n_reports, n_sentences


def _check_alignment(report_id, sent_index, words, rows) -> None:
    forms = [row.form for row in rows]
    if forms != words:
        raise TokenMisalignment(
            f"report {report_id!r} sentence {sent_index}: backend returned "
            f"{len(forms)} tokens {forms!r} for input {words!r}; refusing to realign"
        )


def _write_block(stream: TextIO, report_id: str, sent_index: int, rows) -> None:
    stream.write(f"# report_id = {report_id}\n")
    stream.write(f"# sent_index = {sent_index}\n")
    for i, row in enumerate(rows, start=1):
        head = 0 if row.head is None else row.head + 1
        form = _field(row.form)
        lemma = _field(row.lemma)
        stream.write(
            f"{i}\t{form}\t{lemma}\t{row.upos}\t_\t_\t{head}\t{row.deprel}\t_\t_\n"
        )
    stream.write("\n")


def _field(value: str) -> str:
    # CoNLL-U fields are tab separated; report text can contain anything
    return value.replace("\t", " ") or "_"
