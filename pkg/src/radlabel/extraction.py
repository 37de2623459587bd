"""Mention extraction: locate observation phrases in report sentences.

Each observation is matched independently with a greedy leftmost-longest
scan over case-folded tokens, so one observation's mentions never overlap
while different observations may share tokens.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

from . import kernels
from .ingest import ReportDocument
from .observations import Observation
from .rules import PhrasePattern, RuleSet

if TYPE_CHECKING:  # pragma: no cover
    from .classification import MentionClass


@dataclass(frozen=True)
class Mention:
    """A phrase occurrence: token span [start, end) in one sentence."""

    observation: Observation
    sentence_index: int
    start: int
    end: int
    matched_phrase: PhrasePattern
    classification: Optional["MentionClass"] = None

    def __post_init__(self):
        if not 0 <= self.start < self.end:
            raise ValueError(f"empty or negative mention span [{self.start}, {self.end})")

    def surface(self, doc: ReportDocument) -> str:
        tokens = doc.sentences[self.sentence_index].tokens[self.start:self.end]
        return " ".join(t.surface for t in tokens)


def extract_mentions(doc: ReportDocument, ruleset: RuleSet) -> list[Mention]:
    """Find every observation mention in the document's sentences.

    Returns mentions ordered by (sentence_index, start, observation name).
    """
    mentions: list[Mention] = []
    for sentence_index, sentence in enumerate(doc.sentences):
        ids = ruleset.encode_sentence(sentence.lowers)
        found = []
        for observation, (patterns, encoded) in ruleset.phrase_groups.items():
            for start, end, phrase_index in kernels.phrase_scan(ids, encoded):
                found.append(
                    Mention(observation, sentence_index, start, end, patterns[phrase_index])
                )
        found.sort(key=lambda m: (m.start, m.observation.name))
        mentions.extend(found)
    return mentions
