"""Pure-Python scan kernel.

Mirrors the compiled kernel in ``_scan_cy.pyx`` exactly: same transition
encoding, same boundary rule, same output order. Any behavioral
difference between the two is a bug (the test suite cross-checks them).
"""

from __future__ import annotations

KERNEL = "python"


def raw_matches(folded, trans, fail, out_len, out_pat, out_link):
    """All automaton matches over the folded text, boundary-checked.

    Returns (start_char, end_char, pattern_id) triples in end order.
    ``trans`` maps (state << 21) | codepoint to the next state; missing
    transitions resolve through the failure links. A match is kept only
    when bounded by non-alphanumeric characters or the string edges.
    """
    n = len(folded)
    matches = []
    state = 0
    get = trans.get
    for i in range(n):
        c = ord(folded[i])
        nxt = get((state << 21) | c)
        while nxt is None and state:
            state = fail[state]
            nxt = get((state << 21) | c)
        state = nxt if nxt is not None else 0
        s = state if out_len[state] else out_link[state]
        while s:
            start = i + 1 - out_len[s]
            if (start == 0 or not folded[start - 1].isalnum()) and (
                i + 1 == n or not folded[i + 1].isalnum()
            ):
                matches.append((start, i + 1, out_pat[s]))
            s = out_link[s]
    return matches
