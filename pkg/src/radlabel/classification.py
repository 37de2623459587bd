"""Mention classification through the ordered three-phase rule pipeline.

Phases run pre-negation uncertainty, then negation, then post-negation
uncertainty; within a phase rules apply in file order and the first match
anywhere decides the class.  Unmatched mentions are positive.  Running the
uncertainty rules like "cannot exclude" before the negation rules is what
keeps such mentions from being negated by the bare "exclude" rule.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from . import kernels
from .conllu import ROOT, DependencyGraph
from .extraction import Mention
from .ingest import Sentence
from .rules import (
    PHASE_ORDER,
    DependencyRule,
    Direction,
    Phase,
    Rule,
    RuleSet,
    SurfaceRule,
    encode_pattern,
    MENTION_TOKEN,
    GAP_TOKEN,
)


class Certainty(enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    UNCERTAIN = "uncertain"


#: Class assigned when a rule of the given phase matches.
PHASE_CLASS = {
    Phase.PRE_NEGATION_UNCERTAINTY: Certainty.UNCERTAIN,
    Phase.NEGATION: Certainty.NEGATIVE,
    Phase.POST_NEGATION_UNCERTAINTY: Certainty.UNCERTAIN,
}


@dataclass(frozen=True)
class MentionClass:
    """A classification outcome and the rule that produced it.

    `deciding_rule` is present exactly when a rule matched; the default
    positive class carries no rule.
    """

    value: Certainty
    deciding_rule: Optional[Rule] = None

    def __post_init__(self):
        if (self.value is Certainty.POSITIVE) != (self.deciding_rule is None):
            raise ValueError("deciding_rule must be present iff a rule assigned the class")


def classify_mention(mention: Mention, sentence: Sentence, ruleset: RuleSet) -> MentionClass:
    """Classify one mention; deterministic in (mention, sentence, rules)."""
    ids = ruleset.encode_sentence(sentence.lowers)
    return classify_encoded(mention, sentence, ids, ruleset)


def classify_encoded(
    mention: Mention, sentence: Sentence, sentence_ids: list[int], ruleset: RuleSet
) -> MentionClass:
    """classify_mention for callers that already encoded the sentence."""
    for phase in PHASE_ORDER:
        for rule in ruleset.rules_for(phase):
            if isinstance(rule, SurfaceRule):
                matched = kernels.pattern_match(
                    sentence_ids, ruleset.encoded_patterns[rule], mention.start, mention.end
                )
            else:
                matched = match_dependency(rule, mention, sentence)
            if matched:
                return MentionClass(PHASE_CLASS[phase], rule)
    return MentionClass(Certainty.POSITIVE)


def match_surface(rule: SurfaceRule, mention: Mention, sentence: Sentence) -> bool:
    """True iff the pattern aligns with the sentence around the mention span.

    Literals consume single equal tokens, ``{M}`` consumes exactly the
    mention span, and each ``...`` consumes zero or more tokens, all within
    the sentence.
    """
    vocabulary: dict[str, int] = {}
    for element in rule.pattern:
        if element not in (MENTION_TOKEN, GAP_TOKEN):
            vocabulary.setdefault(element, len(vocabulary))
    pattern_ids = encode_pattern(rule.pattern, vocabulary)
    ids = [vocabulary.get(w, kernels.UNKNOWN) for w in sentence.lowers]
    return kernels.pattern_match(ids, pattern_ids, mention.start, mention.end)


def mention_head(mention: Mention, parse: DependencyGraph) -> int:
    """The span token nearest the root; ties go to the leftmost token."""
    best = mention.start
    best_depth = parse.depth(mention.start)
    for index in range(mention.start + 1, mention.end):
        depth = parse.depth(index)
        if depth < best_depth:
            best, best_depth = index, depth
    return best


def match_dependency(rule: DependencyRule, mention: Mention, sentence: Sentence) -> bool:
    """True iff a trigger token reaches the mention head through the path.

    Sentences without a parse never match (surface-only degradation).
    Trigger lemmas come from the parse's LEMMA column when present, else
    the case-folded token.
    """
    parse = sentence.parse
    if parse is None:
        return False
    lemmas = [
        parse.lemmas[i] if parse.lemmas[i] is not None else token.lower
        for i, token in enumerate(sentence.tokens)
    ]
    head = mention_head(mention, parse)
    for trigger in (i for i, lemma in enumerate(lemmas) if lemma == rule.trigger_lemma):
        frontier = {trigger}
        for relation, direction in rule.path:
            reached: set[int] = set()
            for node in frontier:
                if direction is Direction.HEAD_OF:
                    if parse.relations[node] == relation and parse.heads[node] != ROOT:
                        reached.add(parse.heads[node])
                else:
                    reached.update(parse.dependents(node, relation))
            frontier = reached
            if not frontier:
                break
        if head in frontier:
            return True
    return False
