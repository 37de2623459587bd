"""Pure-Python matching kernels; the reference for the compiled versions."""

IMPLEMENTATION = "pure"

_GAP = -2
_MENTION = -3


def phrase_scan(sent, phrases):
    """Greedy leftmost-longest scan of one observation's phrases.

    `sent` is a list of token ids; `phrases` a list of id lists.  Returns
    non-overlapping (start, end, phrase_index) matches: at each position the
    longest matching phrase wins and scanning resumes past it.
    """
    n = len(sent)
    matches = []
    i = 0
    while i < n:
        best_len = 0
        best_idx = -1
        for idx, phrase in enumerate(phrases):
            plen = len(phrase)
            if plen <= best_len or i + plen > n:
                continue
            for k in range(plen):
                if sent[i + k] != phrase[k]:
                    break
            else:
                best_len = plen
                best_idx = idx
        if best_len:
            matches.append((i, i + best_len, best_idx))
            i += best_len
        else:
            i += 1
    return matches


def pattern_match(sent, pattern, m_start, m_end):
    """Align a surface pattern against a sentence around a mention span.

    The ``{M}`` element consumes exactly [m_start, m_end); literals consume
    single equal tokens; each gap consumes >= 0 tokens.  Elements consume
    adjacent tokens, and context outside the aligned region is free.
    """
    m = pattern.index(_MENTION)
    return _match_back(sent, pattern[:m], m - 1, m_start) and _match_fwd(
        sent, pattern[m + 1:], 0, m_end
    )


def _match_fwd(sent, elems, ei, pos):
    # consume tokens starting exactly at pos
    n = len(sent)
    k = len(elems)
    while ei < k and elems[ei] != _GAP:
        if pos >= n or sent[pos] != elems[ei]:
            return False
        ei += 1
        pos += 1
    if ei == k:
        return True
    for q in range(pos, n + 1):
        if _match_fwd(sent, elems, ei + 1, q):
            return True
    return False


def _match_back(sent, elems, ei, pos):
    # consume tokens ending exactly at pos (exclusive)
    while ei >= 0 and elems[ei] != _GAP:
        if pos <= 0 or sent[pos - 1] != elems[ei]:
            return False
        ei -= 1
        pos -= 1
    if ei < 0:
        return True
    for q in range(pos, -1, -1):
        if _match_back(sent, elems, ei - 1, q):
            return True
    return False
