"""The rule DSL: observation phrase lists and phase-partitioned rules.

A rule directory has the layout::

    phrases/<observation_slug>.txt          one phrase per line
    rules/pre_negation_uncertainty.rules
    rules/negation.rules
    rules/post_negation_uncertainty.rules

Rule lines are either ``surface: <pattern>`` where the pattern mixes literal
tokens, one ``{M}`` mention placeholder and ``...`` gaps, or
``dep: <lemma> <rel>:<dir>[,<rel>:<dir>...]`` with direction ``h`` (step to
the head) or ``d`` (step to a dependent).  ``#`` starts a comment and empty
lines are skipped.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Union

from . import kernels
from .errors import (
    EmptyPhrase,
    MalformedRule,
    MissingMentionPlaceholder,
    RuleFileError,
    UnknownObservationFile,
)
from .ingest import tokenize
from .observations import MENTIONABLE, NO_FINDING, BY_SLUG, Observation

MENTION_TOKEN = "{M}"
GAP_TOKEN = "..."

MAX_DEP_PATH = 3  # longer paths are rare and would make matching superlinear


class Phase(enum.Enum):
    """The three classification phases, in evaluation order."""

    PRE_NEGATION_UNCERTAINTY = "pre_negation_uncertainty"
    NEGATION = "negation"
    POST_NEGATION_UNCERTAINTY = "post_negation_uncertainty"


PHASE_ORDER = (
    Phase.PRE_NEGATION_UNCERTAINTY,
    Phase.NEGATION,
    Phase.POST_NEGATION_UNCERTAINTY,
)


class Direction(enum.Enum):
    HEAD_OF = "h"
    DEPENDENT_OF = "d"


@dataclass(frozen=True)
class PhrasePattern:
    """A literal token sequence announcing one observation."""

    observation: Observation
    tokens: tuple[str, ...]

    def __post_init__(self):
        if not self.tokens:
            raise EmptyPhrase(f"empty phrase for {self.observation.name}")
        if any(t != t.casefold() for t in self.tokens):
            raise ValueError("phrase tokens must be case-folded")


@dataclass(frozen=True)
class SurfaceRule:
    """A token pattern matched around a mention.

    `pattern` holds literal tokens plus exactly one MENTION_TOKEN and any
    number of GAP_TOKEN elements.
    """

    phase: Phase
    pattern: tuple[str, ...]
    source: str = field(default="", compare=False)

    def __post_init__(self):
        if self.pattern.count(MENTION_TOKEN) != 1:
            raise MissingMentionPlaceholder(
                f"surface rule must contain exactly one {MENTION_TOKEN}: {self.source or self.pattern}"
            )


@dataclass(frozen=True)
class DependencyRule:
    """A trigger lemma plus a relation path leading to the mention head."""

    phase: Phase
    trigger_lemma: str
    path: tuple[tuple[str, Direction], ...]
    source: str = field(default="", compare=False)

    def __post_init__(self):
        if not 1 <= len(self.path) <= MAX_DEP_PATH:
            raise MalformedRule(
                f"dependency path must have 1..{MAX_DEP_PATH} steps: {self.source or self.path}"
            )


Rule = Union[SurfaceRule, DependencyRule]


@dataclass(frozen=True)
class RuleSet:
    """Compiled phrases and rules; immutable and shareable across workers.

    `rules` is ordered phase-major (pre-negation, negation, post-negation)
    and by file order within a phase.
    """

    phrases: tuple[PhrasePattern, ...]
    rules: tuple[Rule, ...]

    def __post_init__(self):
        indices = [PHASE_ORDER.index(r.phase) for r in self.rules]
        if indices != sorted(indices):
            raise ValueError("rules must be ordered by phase (pre, negation, post)")

    def rules_for(self, phase: Phase) -> tuple[Rule, ...]:
        return self._by_phase[phase]

    @cached_property
    def _by_phase(self) -> dict[Phase, tuple[Rule, ...]]:
        return {
            phase: tuple(r for r in self.rules if r.phase is phase)
            for phase in PHASE_ORDER
        }

    def phrases_for(self, observation: Observation) -> tuple[PhrasePattern, ...]:
        return tuple(p for p in self.phrases if p.observation == observation)

    # -- compiled lookups (derived, cached on first use) ----------------------

    @cached_property
    def vocabulary(self) -> dict[str, int]:
        """Interned token ids over every phrase token and surface literal."""
        vocab: dict[str, int] = {}
        for phrase in self.phrases:
            for token in phrase.tokens:
                vocab.setdefault(token, len(vocab))
        for rule in self.rules:
            if isinstance(rule, SurfaceRule):
                for element in rule.pattern:
                    if element not in (MENTION_TOKEN, GAP_TOKEN):
                        vocab.setdefault(element, len(vocab))
        return vocab

    @cached_property
    def phrase_groups(self) -> dict[Observation, tuple[list[PhrasePattern], list[list[int]]]]:
        """Per observation: its phrase patterns and their encoded token ids."""
        groups: dict[Observation, tuple[list[PhrasePattern], list[list[int]]]] = {}
        for phrase in self.phrases:
            patterns, encoded = groups.setdefault(phrase.observation, ([], []))
            patterns.append(phrase)
            encoded.append([self.vocabulary[t] for t in phrase.tokens])
        return groups

    @cached_property
    def encoded_patterns(self) -> dict[SurfaceRule, list[int]]:
        out = {}
        for rule in self.rules:
            if isinstance(rule, SurfaceRule):
                out[rule] = encode_pattern(rule.pattern, self.vocabulary)
        return out

    def encode_sentence(self, lowers: list[str]) -> list[int]:
        vocab = self.vocabulary
        return [vocab.get(w, kernels.UNKNOWN) for w in lowers]


def encode_pattern(pattern: tuple[str, ...], vocabulary: dict[str, int]) -> list[int]:
    ids = []
    for element in pattern:
        if element == MENTION_TOKEN:
            ids.append(kernels.MENTION)
        elif element == GAP_TOKEN:
            ids.append(kernels.GAP)
        else:
            # every literal must be interned, or it could collide with the
            # UNKNOWN id used for out-of-vocabulary sentence tokens
            ids.append(vocabulary[element])
    return ids


def compile_ruleset(phrases, rules) -> RuleSet:
    """Build, normalizing rule order to phase-major without reordering files."""
    by_phase = {phase: [] for phase in PHASE_ORDER}
    for rule in rules:
        by_phase[rule.phase].append(rule)
    ordered = tuple(rule for phase in PHASE_ORDER for rule in by_phase[phase])
    return RuleSet(phrases=tuple(phrases), rules=ordered)


# --- file parsing -------------------------------------------------------------


def _iter_content_lines(path: Path):
    """Yield (lineno, stripped_line), skipping empty lines and # comments.

    Whitespace-only lines are *not* blank: they are surfaced to the caller
    as empty content so each parser can reject them with its own error.
    """
    text = path.read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if raw == "":
            continue
        stripped = raw.strip()
        if stripped.startswith("#"):
            continue
        yield lineno, stripped


def parse_phrase_file(path: Path, observation: Observation) -> list[PhrasePattern]:
    patterns = []
    seen = set()
    for lineno, line in _iter_content_lines(path):
        if not line:
            raise EmptyPhrase(f"{path.name}:{lineno}: phrase line has no tokens")
        tokens = tuple(tokenize(line.casefold()))
        if not tokens:
            raise EmptyPhrase(f"{path.name}:{lineno}: phrase line has no tokens")
        if tokens in seen:
            continue
        seen.add(tokens)
        patterns.append(PhrasePattern(observation, tokens))
    return patterns


def parse_phrase_dir(directory: Path) -> list[PhrasePattern]:
    """Load every ``<slug>.txt`` phrase file in `directory`.

    Files are read in sorted name order; duplicate phrases within an
    observation are dropped.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise RuleFileError(f"phrase directory not found: {directory}")
    patterns = []
    for path in sorted(directory.glob("*.txt")):
        slug = path.stem
        observation = BY_SLUG.get(slug)
        if observation is None:
            raise UnknownObservationFile(f"{path.name}: no observation has slug {slug!r}")
        if observation == NO_FINDING:
            raise UnknownObservationFile(
                f"{path.name}: {NO_FINDING.name} is derived from the other labels and has no phrases"
            )
        patterns.extend(parse_phrase_file(path, observation))
    return patterns


def parse_rule_file(path: Path, phase: Phase) -> list[Rule]:
    """Parse one phase's rule file into compiled rules, in file order."""
    path = Path(path)
    rules: list[Rule] = []
    for lineno, line in _iter_content_lines(path):
        source = f"{path.name}:{lineno}"
        if not line:
            raise MalformedRule(f"{source}: rule line has no content")
        kind, sep, rest = line.partition(":")
        kind = kind.strip()
        rest = rest.strip()
        if not sep or kind not in ("surface", "dep") or not rest:
            raise MalformedRule(f"{source}: expected 'surface: <pattern>' or 'dep: <lemma> <path>'")
        if kind == "surface":
            rules.append(_parse_surface(rest, phase, source))
        else:
            rules.append(_parse_dep(rest, phase, source))
    return rules


def _parse_surface(text: str, phase: Phase, source: str) -> SurfaceRule:
    elements: list[str] = []
    mentions = 0
    for word in text.split():
        if word == MENTION_TOKEN:
            elements.append(MENTION_TOKEN)
            mentions += 1
        elif word == GAP_TOKEN:
            elements.append(GAP_TOKEN)
        elif "{" in word or "}" in word:
            raise MalformedRule(f"{source}: stray brace in {word!r} (mention placeholder is {MENTION_TOKEN})")
        else:
            # literals are tokenized like report text so multi-token words align
            elements.extend(tokenize(word.casefold()))
    if mentions == 0:
        raise MissingMentionPlaceholder(f"{source}: surface pattern lacks {MENTION_TOKEN}")
    if mentions > 1:
        raise MalformedRule(f"{source}: more than one {MENTION_TOKEN} in pattern")
    return SurfaceRule(phase=phase, pattern=tuple(elements), source=source)


def _parse_dep(text: str, phase: Phase, source: str) -> DependencyRule:
    parts = text.split()
    if len(parts) != 2:
        raise MalformedRule(f"{source}: expected 'dep: <lemma> <rel>:<dir>[,<rel>:<dir>...]'")
    lemma, path_spec = parts
    steps = []
    for step in path_spec.split(","):
        rel, sep, direction = step.partition(":")
        if not sep or not rel:
            raise MalformedRule(f"{source}: bad path step {step!r}")
        try:
            steps.append((rel, Direction(direction)))
        except ValueError:
            raise MalformedRule(f"{source}: direction must be 'h' or 'd' in {step!r}") from None
    if len(steps) > MAX_DEP_PATH:
        raise MalformedRule(f"{source}: dependency path longer than {MAX_DEP_PATH} steps")
    return DependencyRule(phase=phase, trigger_lemma=lemma.casefold(), path=tuple(steps), source=source)


def load_ruleset(phrases_dir: Path, rules_dir: Path) -> RuleSet:
    """Load a full rule directory (all three phase files must exist)."""
    rules_dir = Path(rules_dir)
    phrases = parse_phrase_dir(Path(phrases_dir))
    rules: list[Rule] = []
    for phase in PHASE_ORDER:
        path = rules_dir / f"{phase.value}.rules"
        if not path.is_file():
            raise RuleFileError(f"missing rule file: {path}")
        rules.extend(parse_rule_file(path, phase))
    return compile_ruleset(phrases, rules)


# --- serialization (inverse of parsing) ---------------------------------------


def serialize_rule(rule: Rule) -> str:
    if isinstance(rule, SurfaceRule):
        return "surface: " + " ".join(rule.pattern)
    steps = ",".join(f"{rel}:{direction.value}" for rel, direction in rule.path)
    return f"dep: {rule.trigger_lemma} {steps}"


def serialize_rules(ruleset: RuleSet, phase: Phase) -> str:
    return "".join(serialize_rule(r) + "\n" for r in ruleset.rules_for(phase))


def serialize_phrases(ruleset: RuleSet) -> dict[str, str]:
    """Phrase file contents keyed by observation slug."""
    files: dict[str, list[str]] = {}
    for phrase in ruleset.phrases:
        files.setdefault(phrase.observation.slug, []).append(" ".join(phrase.tokens))
    return {slug: "".join(line + "\n" for line in lines) for slug, lines in files.items()}


def demo_rules_root() -> Path:
    """Location of the packaged demonstration rule set."""
    from importlib.resources import files

    return Path(str(files("radlabel").joinpath("data")))
