# cython: language_level=3
"""Compiled matching kernels; behavior mirrors kernels._pure exactly."""

IMPLEMENTATION = "compiled"

cdef int GAP = -2
cdef int MENTION = -3


def phrase_scan(list sent, list phrases):
    """Greedy leftmost-longest scan of one observation's phrases."""
    cdef Py_ssize_t n = len(sent)
    cdef Py_ssize_t i = 0, k, plen, idx
    cdef Py_ssize_t best_len, best_idx
    cdef list phrase
    cdef bint ok
    matches = []
    while i < n:
        best_len = 0
        best_idx = -1
        for idx in range(len(phrases)):
            phrase = <list> phrases[idx]
            plen = len(phrase)
            if plen <= best_len or i + plen > n:
                continue
            ok = True
            for k in range(plen):
                if <int> sent[i + k] != <int> phrase[k]:
                    ok = False
                    break
            if ok:
                best_len = plen
                best_idx = idx
        if best_len > 0:
            matches.append((i, i + best_len, best_idx))
            i += best_len
        else:
            i += 1
    return matches


def pattern_match(list sent, list pattern, Py_ssize_t m_start, Py_ssize_t m_end):
    """Align a surface pattern against a sentence around a mention span."""
    cdef Py_ssize_t m = pattern.index(MENTION)
    if not _match_back(sent, pattern, m - 1, m_start):
        return False
    return _match_fwd(sent, pattern, m + 1, m_end)


cdef bint _match_fwd(list sent, list pattern, Py_ssize_t ei, Py_ssize_t pos):
    # consume tokens starting exactly at pos; pattern elements from ei on
    cdef Py_ssize_t n = len(sent)
    cdef Py_ssize_t k = len(pattern)
    cdef Py_ssize_t q
    cdef int e
    while ei < k:
        e = <int> pattern[ei]
        if e == GAP:
            break
        if pos >= n or <int> sent[pos] != e:
            return False
        ei += 1
        pos += 1
    if ei == k:
        return True
    for q in range(pos, n + 1):
        if _match_fwd(sent, pattern, ei + 1, q):
            return True
    return False


cdef bint _match_back(list sent, list pattern, Py_ssize_t ei, Py_ssize_t pos):
    # consume tokens ending exactly at pos (exclusive); elements ei down to 0
    cdef Py_ssize_t q
    cdef int e
    while ei >= 0:
        e = <int> pattern[ei]
        if e == GAP:
            break
        if pos <= 0 or <int> sent[pos - 1] != e:
            return False
        ei -= 1
        pos -= 1
    if ei < 0:
        return True
    for q in range(pos, -1, -1):
        if _match_back(sent, pattern, ei - 1, q):
            return True
    return False
