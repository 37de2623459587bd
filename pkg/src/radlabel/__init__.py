"""Rule-based labeling of chest radiograph observations in radiology reports.

The pipeline reads free-text reports, extracts observation mentions from
the Impression section, classifies each mention as positive, negative or
uncertain through a three-phase rule pipeline, and aggregates mention
classes into per-study labels.  Evaluation metrics and the uncertain-label
training policies live alongside.
"""

__version__ = "0.1.0"

from .aggregation import Label, LabelVector, aggregate, derive_no_finding, label_study
from .classification import Certainty, MentionClass, classify_mention
from .conllu import DependencyGraph, attach_parses, read_parse_index
from .extraction import Mention, extract_mentions
from .ingest import ReportDocument, Sentence, Token, extract_impression, make_document, segment
from .observations import OBSERVATIONS, Observation
from .rules import DependencyRule, Phase, PhrasePattern, RuleSet, SurfaceRule, load_ruleset

__all__ = [
    "Certainty",
    "DependencyGraph",
    "DependencyRule",
    "Label",
    "LabelVector",
    "Mention",
    "MentionClass",
    "OBSERVATIONS",
    "Observation",
    "Phase",
    "PhrasePattern",
    "ReportDocument",
    "RuleSet",
    "Sentence",
    "SurfaceRule",
    "Token",
    "aggregate",
    "attach_parses",
    "classify_mention",
    "derive_no_finding",
    "extract_impression",
    "extract_mentions",
    "label_study",
    "load_ruleset",
    "make_document",
    "read_parse_index",
    "segment",
]
