"""Turn report CSVs into CoNLL-U files the radlabel loader can attach.

The labeler's own tokenization is authoritative: every sentence is
segmented and tokenized by radlabel first and the parser backend runs in
pre-tokenized mode, so the emitted FORM column always aligns with the
labeler's tokens.
"""

__version__ = "0.1.0"

from .backends import BackendUnavailable, TokenMisalignment, available_backends, get_backend
from .preprocess import PreprocessJob, preprocess

__all__ = [
    "BackendUnavailable",
    "PreprocessJob",
    "TokenMisalignment",
    "available_backends",
    "get_backend",
    "preprocess",
]
