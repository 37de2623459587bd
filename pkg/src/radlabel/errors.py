"""Exception hierarchy for the labeling pipeline."""


class RadlabelError(Exception):
    """Base class for all package errors."""


# --- ingest -----------------------------------------------------------------

class MalformedConllu(RadlabelError):
    """A CoNLL-U line or block violates the format or graph invariants."""


class TokenCountMismatch(RadlabelError):
    """A CoNLL-U block's token count differs from the sentence it targets."""


# --- rule files -------------------------------------------------------------

class RuleFileError(RadlabelError):
    """Base class for rule and phrase file problems."""


class UnknownObservationFile(RuleFileError):
    """A phrase file name does not map to a matchable observation."""


class EmptyPhrase(RuleFileError):
    """A non-comment phrase line contains no tokens."""


class MalformedRule(RuleFileError):
    """A rule line does not follow the rule grammar."""


class MissingMentionPlaceholder(MalformedRule):
    """A surface rule pattern lacks the {M} mention placeholder."""


# --- labeling ---------------------------------------------------------------

class UnclassifiedMention(RadlabelError):
    """Aggregation received a mention without a classification."""


# --- evaluation -------------------------------------------------------------

class ReportIdMismatch(RadlabelError):
    """Prediction and gold corpora do not cover the same report ids."""


class DegenerateClass(RadlabelError):
    """A metric needing both classes was given only one."""


# --- policies ---------------------------------------------------------------

class ShapeMismatch(RadlabelError):
    """Two matrices that must share a shape do not."""


class DegenerateTriple(RadlabelError):
    """A 3-class probability triple has no mass on positive or negative."""


class EmptyViews(RadlabelError):
    """View combination received no views."""
