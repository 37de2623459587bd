"""CoNLL-U parse ingestion and the dependency graph type.

Parses are produced externally over this package's own tokenization and
aligned to sentences through ``# report_id`` / ``# sent_index`` comment
lines.  Only the ID, FORM, LEMMA, HEAD and DEPREL columns are consumed.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import TYPE_CHECKING, Iterable, Iterator, Optional, TextIO

from .errors import MalformedConllu, TokenCountMismatch

if TYPE_CHECKING:  # pragma: no cover
    from .ingest import ReportDocument

ROOT = -1  # head marker for the root token

#: CoNLL-U column count and the indices this package reads.
_NUM_COLUMNS = 10
_ID, _FORM, _LEMMA, _HEAD, _DEPREL = 0, 1, 2, 6, 7


@dataclass(frozen=True)
class DependencyGraph:
    """A dependency tree over one sentence's tokens.

    ``heads[i]`` is the 0-based head of token i, or ``ROOT`` for the single
    root.  ``relations[i]`` labels the edge to the head.  ``lemmas[i]`` is
    the LEMMA column when the parse supplied one, else None.
    """

    heads: tuple[int, ...]
    relations: tuple[str, ...]
    lemmas: tuple[Optional[str], ...]

    def __post_init__(self):
        n = len(self.heads)
        if len(self.relations) != n or len(self.lemmas) != n:
            raise MalformedConllu("heads, relations and lemmas must have equal length")
        roots = [i for i, h in enumerate(self.heads) if h == ROOT]
        if len(roots) != 1:
            raise MalformedConllu(f"expected exactly one root, found {len(roots)}")
        for i, h in enumerate(self.heads):
            if h != ROOT and not 0 <= h < n:
                raise MalformedConllu(f"token {i} has out-of-range head {h}")
        for i in range(n):
            if self.depth(i) is None:
                raise MalformedConllu(f"token {i} is part of a head cycle")

    def __len__(self) -> int:
        return len(self.heads)

    @property
    def root(self) -> int:
        return self.heads.index(ROOT)

    def depth(self, index: int) -> Optional[int]:
        """Steps from token to the root, or None if caught in a cycle."""
        steps = 0
        node = index
        while self.heads[node] != ROOT:
            node = self.heads[node]
            steps += 1
            if steps > len(self.heads):
                return None
        return steps

    def dependents(self, index: int, relation: str) -> list[int]:
        """Tokens attached to `index` through `relation`."""
        return [
            i for i, (h, r) in enumerate(zip(self.heads, self.relations))
            if h == index and r == relation
        ]


@dataclass(frozen=True)
class ConlluBlock:
    """One parsed sentence as read from a CoNLL-U file."""

    report_id: str
    sent_index: int
    forms: tuple[str, ...]
    graph: DependencyGraph


def iter_blocks(stream: TextIO) -> Iterator[ConlluBlock]:
    """Read CoNLL-U blocks; a blank line terminates each sentence."""
    metadata: dict[str, str] = {}
    rows: list[tuple[int, str, Optional[str], int, str]] = []
    lineno = 0
    for lineno, line in enumerate(stream, start=1):
        line = line.rstrip("\n")
        if not line.strip():
            if rows:
                yield _finish_block(metadata, rows, lineno)
            metadata, rows = {}, []
            continue
        if line.startswith("#"):
            key, sep, value = line[1:].partition("=")
            if sep:
                metadata[key.strip()] = value.strip()
            continue
        cols = line.split("\t")
        if len(cols) != _NUM_COLUMNS:
            raise MalformedConllu(f"line {lineno}: expected {_NUM_COLUMNS} columns, got {len(cols)}")
        if "-" in cols[_ID] or "." in cols[_ID]:
            # multiword-token ranges and empty nodes add no tree nodes
            continue
        try:
            token_id = int(cols[_ID])
            head = int(cols[_HEAD])
        except ValueError as exc:
            raise MalformedConllu(f"line {lineno}: non-integer ID or HEAD") from exc
        lemma = cols[_LEMMA] if cols[_LEMMA] != "_" else None
        rows.append((token_id, cols[_FORM], lemma, head, cols[_DEPREL]))
    if rows:
        yield _finish_block(metadata, rows, lineno + 1)


def _finish_block(metadata, rows, lineno) -> ConlluBlock:
    if "report_id" not in metadata or "sent_index" not in metadata:
        raise MalformedConllu(
            f"block ending near line {lineno} lacks '# report_id' / '# sent_index' metadata"
        )
    try:
        sent_index = int(metadata["sent_index"])
    except ValueError as exc:
        raise MalformedConllu(f"block near line {lineno}: non-integer sent_index") from exc
    ids = [r[0] for r in rows]
    if ids != list(range(1, len(rows) + 1)):
        raise MalformedConllu(f"block near line {lineno}: token IDs are not 1..{len(rows)}")
    n = len(rows)
    heads = []
    for token_id, _, _, head, _ in rows:
        if not 0 <= head <= n:
            raise MalformedConllu(f"block near line {lineno}: HEAD {head} out of range")
        heads.append(ROOT if head == 0 else head - 1)
    graph = DependencyGraph(
        heads=tuple(heads),
        relations=tuple(r[4] for r in rows),
        lemmas=tuple(r[2] for r in rows),
    )
    return ConlluBlock(
        report_id=metadata["report_id"],
        sent_index=sent_index,
        forms=tuple(r[1] for r in rows),
        graph=graph,
    )


ParseIndex = dict[tuple[str, int], ConlluBlock]


def build_index(blocks: Iterable[ConlluBlock]) -> ParseIndex:
    """Index blocks by (report_id, sent_index) for sentence alignment."""
    index: ParseIndex = {}
    for block in blocks:
        key = (block.report_id, block.sent_index)
        if key in index:
            raise MalformedConllu(f"duplicate parse block for report {key[0]!r} sentence {key[1]}")
        index[key] = block
    return index


def read_parse_index(stream: TextIO) -> ParseIndex:
    return build_index(iter_blocks(stream))


def attach_parses(doc: "ReportDocument", index: ParseIndex) -> "ReportDocument":
    """Return a copy of `doc` whose sentences carry their dependency parses.

    Sentences without a matching block keep ``parse = None`` (surface-only
    mode).  Tokens are never altered.
    """
    sentences = []
    for i, sentence in enumerate(doc.sentences):
        block = index.get((doc.report_id, i))
        if block is None:
            sentences.append(sentence)
            continue
        if len(block.forms) != len(sentence.tokens):
            raise TokenCountMismatch(
                f"report {doc.report_id!r} sentence {i}: parse has {len(block.forms)} tokens, "
                f"sentence has {len(sentence.tokens)}"
            )
        sentences.append(replace(sentence, parse=block.graph))
    return replace(doc, sentences=tuple(sentences))
