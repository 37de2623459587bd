"""Token matching kernels: compiled extension with a pure-Python fallback.

Sentences and patterns are pre-encoded as lists of ints so the hot loops
never touch strings.  The compiled kernel (`_speedups`, built from Cython)
is preferred; set ``RADLABEL_PURE=1`` to force the pure implementation,
e.g. for benchmarking.

Encoding:
  * interned vocabulary ids are >= 0
  * ``UNKNOWN`` marks sentence tokens absent from the rule vocabulary
  * ``GAP`` and ``MENTION`` mark the ``...`` and ``{M}`` pattern elements
"""

import os

UNKNOWN = -1
GAP = -2
MENTION = -3

if os.environ.get("RADLABEL_PURE"):
    from . import _pure as _impl
else:
    try:
        from . import _speedups as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _pure as _impl

phrase_scan = _impl.phrase_scan
pattern_match = _impl.pattern_match


def implementation() -> str:
    """Name of the active kernel: 'compiled' or 'pure'."""
    return _impl.IMPLEMENTATION
