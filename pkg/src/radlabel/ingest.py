"""Report ingestion: impression isolation, sentence segmentation, CSV input.

Reports arrive as free text.  Only the Impression section is labeled; when a
report has no recognizable Impression header the whole text is used so the
labeler stays total.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from typing import Iterator, Optional, TextIO

from .conllu import DependencyGraph
from .errors import RadlabelError


@dataclass(frozen=True)
class Token:
    """A single token within a sentence."""

    surface: str
    lower: str  # case-folded surface
    index: int  # 0-based position in the sentence

    def __post_init__(self):
        if self.lower != self.surface.casefold():
            raise ValueError(f"lower {self.lower!r} is not the case-folded surface {self.surface!r}")


@dataclass(frozen=True)
class Sentence:
    """An ordered run of tokens, optionally carrying a dependency parse."""

    tokens: tuple[Token, ...]
    parse: Optional[DependencyGraph] = None

    def __post_init__(self):
        if not self.tokens:
            raise ValueError("sentence has no tokens")
        if self.parse is not None and len(self.parse) != len(self.tokens):
            raise ValueError(
                f"parse covers {len(self.parse)} tokens but sentence has {len(self.tokens)}"
            )

    @property
    def lowers(self) -> list[str]:
        return [t.lower for t in self.tokens]

    def text(self) -> str:
        return " ".join(t.surface for t in self.tokens)


@dataclass(frozen=True)
class ReportDocument:
    """One report: raw text, its Impression section, and segmented sentences."""

    report_id: str
    raw_text: str
    impression: str
    sentences: tuple[Sentence, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.impression not in self.raw_text:
            raise ValueError("impression must be a contiguous substring of raw_text")


# An Impression header sits at the start of a line (case-insensitive) and is
# followed by a colon.  Any later line-initial ALL-CAPS word with a colon
# terminates the section.
_IMPRESSION_HEADER = re.compile(r"(?im)^[^\S\n]*impression[^\S\n]*:")
_NEXT_SECTION = re.compile(r"(?m)^[^\S\n]*[A-Z]+[^\S\n]*:")

# Word runs stay together; every other non-space character is its own token.
_TOKEN = re.compile(r"\w+|[^\w\s]")

# A sentence ends at . ! or ? followed by whitespace (or end of text).
_SENTENCE_END = re.compile(r"[.!?](?=\s|$)")


def extract_impression(raw_text: str) -> str:
    """Return the Impression section of a report, or the whole text.

    The section runs from the first line-initial ``IMPRESSION:`` header
    (matched case-insensitively) to the next line-initial all-caps header or
    the end of the report, trimmed of surrounding whitespace.  Reports with
    no Impression header are returned unchanged.

    Slicing can promote a mid-line header to line-initial, so extraction
    repeats until stable; the result is idempotent even for degenerate
    inputs like ``IMPRESSION: IMPRESSION: x``.
    """
    text = raw_text
    while True:
        extracted = _extract_once(text)
        if extracted == text:
            return extracted
        text = extracted


def _extract_once(text: str) -> str:
    header = _IMPRESSION_HEADER.search(text)
    if header is None:
        return text
    start = header.end()
    nxt = _NEXT_SECTION.search(text, start)
    end = nxt.start() if nxt else len(text)
    return text[start:end].strip()


def tokenize(text: str) -> list[str]:
    """Split text on whitespace and punctuation; punctuation tokens survive."""
    return _TOKEN.findall(text)


def segment(text: str) -> list[Sentence]:
    """Split text into sentences and tokenize each one.

    Boundaries fall after ``.``, ``!`` or ``?`` when followed by whitespace
    or end of text.  Empty input yields an empty list; trailing text without
    a terminator forms a final sentence.
    """
    sentences = []
    start = 0
    for match in _SENTENCE_END.finditer(text):
        chunk = text[start:match.end()]
        start = match.end()
        sentences.extend(_sentence_from(chunk))
    sentences.extend(_sentence_from(text[start:]))
    return sentences


def _sentence_from(chunk: str) -> list[Sentence]:
    surfaces = tokenize(chunk)
    if not surfaces:
        return []
    tokens = tuple(Token(s, s.casefold(), i) for i, s in enumerate(surfaces))
    return [Sentence(tokens)]


def make_document(report_id: str, raw_text: str) -> ReportDocument:
    """Build a segmented ReportDocument from raw report text."""
    impression = extract_impression(raw_text)
    return ReportDocument(
        report_id=report_id,
        raw_text=raw_text,
        impression=impression,
        sentences=tuple(segment(impression)),
    )


REPORTS_CSV_HEADER = ["report_id", "text"]


def read_reports_csv(stream: TextIO) -> Iterator[tuple[str, str]]:
    """Yield (report_id, text) rows from a reports CSV.

    The file must carry the header ``report_id,text`` and use RFC-4180
    quoting.  Rows are yielded in file order so downstream output ordering
    is reproducible.
    """
    reader = csv.reader(stream)
    header = next(reader, None)
    if header != REPORTS_CSV_HEADER:
        raise RadlabelError(
            f"reports CSV must start with header {','.join(REPORTS_CSV_HEADER)!r}, got {header!r}"
        )
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 2:
            raise RadlabelError(f"reports CSV line {lineno}: expected 2 fields, got {len(row)}")
        yield row[0], row[1]
