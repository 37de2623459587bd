"""Parser backends producing one dependency row per input token.

Backends receive the labeler's tokens and must return exactly one row per
token; realignment is never attempted.  Two backends ship:

``heuristic``
    A deterministic, lexicon-driven approximation of universal dependency
    trees for short radiology-style sentences.  It needs no model files,
    which keeps the round trip usable in offline environments.  Lemmas are
    case-folded surface forms.

``spacy``
    Drives an installed spaCy pipeline in pre-tokenized mode.  Raises
    BackendUnavailable when spaCy or the requested model is missing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence


class BackendUnavailable(Exception):
    """The requested parser backend cannot run in this environment."""


class TokenMisalignment(Exception):
    """A backend returned a different token sequence than it was given."""


@dataclass(frozen=True)
class ParsedToken:
    """One CoNLL-U row: 0-based head, None meaning the sentence root."""

    form: str
    lemma: str
    upos: str
    head: Optional[int]
    deprel: str


# --- heuristic backend ----------------------------------------------------------

_DETS = {"the", "a", "an", "this", "that", "these", "those"}
_AUX = {
    "is", "are", "was", "were", "am", "be", "been", "being",
    "has", "have", "had", "do", "does", "did",
    "can", "cannot", "could", "may", "might", "must", "shall", "should",
    "will", "would",
}
_NEG = {"no", "not", "without"}
_ADPS = {
    "of", "in", "on", "at", "by", "for", "with", "to", "from",
    "within", "into", "near", "under", "over", "throughout", "along",
    "around", "behind", "above", "below", "since",
}
_CONJ = {"and", "or", "versus", "vs", "but", "nor"}
_VERBS = {
    "exclude", "excludes", "excluded", "rule", "rules", "ruled",
    "represent", "represents", "represented", "reflect", "reflects",
    "see", "seen", "sees", "saw", "show", "shows", "shown", "showed",
    "demonstrate", "demonstrates", "demonstrated",
    "reveal", "reveals", "revealed", "suggest", "suggests", "suggested",
    "suggesting", "note", "noted", "notes", "identify", "identified",
    "identifies", "visualize", "visualized", "consider", "considered",
    "improve", "improved", "improving", "worsen", "worsened",
    "resolve", "resolved", "remain", "remains", "remained",
    "appear", "appears", "appeared", "compare", "compared",
    "recommend", "recommended", "obtain", "obtained",
    "place", "placed", "remove", "removed", "persist", "persists",
    "increase", "increased", "decrease", "decreased",
}

_UPOS = {
    "NOUN": "NOUN", "VERB": "VERB", "AUX": "AUX", "NEG": "PART",
    "ADP": "ADP", "DET": "DET", "CONJ": "CCONJ", "PUNCT": "PUNCT",
}


def _tag(lower: str) -> str:
    if not any(c.isalnum() for c in lower):
        return "PUNCT"
    if lower in _NEG:
        return "NEG"
    if lower in _AUX:
        return "AUX"
    if lower in _DETS:
        return "DET"
    if lower in _ADPS:
        return "ADP"
    if lower in _CONJ:
        return "CONJ"
    if lower in _VERBS:
        return "VERB"
    return "NOUN"


class HeuristicBackend:
    """Deterministic head attachment from a small closed-class lexicon."""

    name = "heuristic"

    def parse(self, words: Sequence[str]) -> list[ParsedToken]:
        lowers = [w.casefold() for w in words]
        tags = [_tag(w) for w in lowers]
        n = len(words)

        # maximal runs of NOUN tokens; the last token of a run heads it
        runs = []
        start = None
        for i, tag in enumerate(tags + ["PUNCT"]):
            if tag == "NOUN" and start is None:
                start = i
            elif tag != "NOUN" and start is not None:
                runs.append((start, i - 1))
                start = None
        run_head = {}
        for run_start, head in runs:
            for i in range(run_start, head + 1):
                run_head[i] = head

        root = self._pick_root(tags, runs)
        heads: list[Optional[int]] = [None] * n
        rels = ["dep"] * n
        rels[root] = "root"

        first_conjunct: Optional[int] = None
        prev_run_head: Optional[int] = None
        for run_start, head in runs:
            if head == root:
                prev_run_head, first_conjunct = head, head
                continue
            coordinated = prev_run_head is not None and any(
                tags[k] in ("CONJ", "PUNCT") for k in range(prev_run_head + 1, run_start)
            )
            if coordinated:
                heads[head] = first_conjunct if first_conjunct is not None else prev_run_head
                rels[head] = "conj"
            elif self._preceded_by_adp(tags, run_start) and prev_run_head is not None:
                heads[head] = prev_run_head
                rels[head] = "nmod"
            elif head < root:
                heads[head], rels[head] = root, "nsubj"
            else:
                heads[head] = root
                rels[head] = "dobj" if tags[root] == "VERB" else "dep"
            if not coordinated:
                first_conjunct = head
            prev_run_head = head

        for i in range(n):
            if i == root or heads[i] is not None:
                continue
            tag = tags[i]
            if tag == "NOUN":
                heads[i], rels[i] = run_head[i], "compound"
            elif tag == "PUNCT":
                heads[i], rels[i] = root, "punct"
            elif tag == "AUX":
                target = self._next_with_tag(tags, i, {"VERB"})
                heads[i], rels[i] = (target, "aux") if target is not None else (root, "aux")
            elif tag == "NEG":
                target = self._next_with_tag(tags, i, {"NOUN", "VERB"})
                heads[i], rels[i] = (target if target is not None else root), "neg"
                if heads[i] in run_head:
                    heads[i] = run_head[heads[i]]
            elif tag == "DET":
                target = self._next_with_tag(tags, i, {"NOUN"})
                heads[i], rels[i] = (run_head[target] if target is not None else root), "det"
            elif tag == "ADP":
                target = self._next_with_tag(tags, i, {"NOUN"})
                heads[i], rels[i] = (run_head[target] if target is not None else root), "case"
            elif tag == "CONJ":
                target = self._next_with_tag(tags, i, {"NOUN", "VERB"})
                if target is not None and target in run_head:
                    target = run_head[target]
                heads[i], rels[i] = (target if target is not None else root), "cc"
            elif tag == "VERB":
                heads[i], rels[i] = root, "conj"

        heads[root] = None
        return [
            ParsedToken(
                form=words[i],
                lemma=lowers[i],
                upos=_UPOS[tags[i]],
                head=heads[i],
                deprel=rels[i],
            )
            for i in range(n)
        ]

    @staticmethod
    def _pick_root(tags, runs) -> int:
        for i, tag in enumerate(tags):
            if tag == "VERB":
                return i
        if runs:
            return runs[0][1]  # head of the first noun run
        for i, tag in enumerate(tags):
            if tag != "PUNCT":
                return i
        return 0

    @staticmethod
    def _next_with_tag(tags, index, wanted) -> Optional[int]:
        for j in range(index + 1, len(tags)):
            if tags[j] in wanted:
                return j
        return None

    @staticmethod
    def _preceded_by_adp(tags, run_start) -> bool:
        for j in range(run_start - 1, -1, -1):
            if tags[j] == "ADP":
                return True
            if tags[j] not in ("DET",):
                return False
        return False


# --- spaCy backend ------------------------------------------------------------


class SpacyBackend:
    """Pre-tokenized parsing through an installed spaCy model."""

    name = "spacy"

    def __init__(self, model: str = "en_core_web_sm"):
        try:
            import spacy
        except ImportError as exc:
            raise BackendUnavailable("spaCy is not installed (pip install spacy)") from exc
        try:
            self._nlp = spacy.load(model, exclude=["ner"])
        except OSError as exc:
            raise BackendUnavailable(f"spaCy model {model!r} is not installed") from exc
        self._spacy = spacy

    def parse(self, words: Sequence[str]) -> list[ParsedToken]:
        doc = self._spacy.tokens.Doc(self._nlp.vocab, words=list(words))
        for _, component in self._nlp.pipeline:
            doc = component(doc)
        rows = []
        for token in doc:
            is_root = token.head.i == token.i
            rows.append(
                ParsedToken(
                    form=token.text,
                    lemma=(token.lemma_ or token.text).casefold(),
                    upos=token.pos_ or "_",
                    head=None if is_root else token.head.i,
                    deprel="root" if is_root else token.dep_,
                )
            )
        return rows


_BACKENDS = {"heuristic": HeuristicBackend, "spacy": SpacyBackend}


def available_backends() -> tuple[str, ...]:
    return tuple(_BACKENDS)


def get_backend(name: str, model: Optional[str] = None):
    if name not in _BACKENDS:
        raise BackendUnavailable(f"unknown backend {name!r}; available: {', '.join(_BACKENDS)}")
    if name == "spacy":
        return SpacyBackend(model) if model else SpacyBackend()
    return HeuristicBackend()
