"""String similarity for leaf nodes that carry text but no structure.

Parameters are the usual published ones: character bigrams with the Dice
coefficient, and Jaro-Winkler with prefix scale 0.1 over at most 4
characters (applied without a boost threshold).
"""

from collections import Counter

PREFIX_SCALE = 0.1
MAX_PREFIX = 4


def bigrams(s: str) -> Counter:
    return Counter(s[i : i + 2] for i in range(len(s) - 1))


def bigram_similarity(s1: str, s2: str) -> float:
    """Dice coefficient over character bigram multisets."""
    if len(s1) < 2 or len(s2) < 2:
        return 1.0 if s1 == s2 else 0.0
    b1, b2 = bigrams(s1), bigrams(s2)
    common = sum((b1 & b2).values())
    return 2.0 * common / (sum(b1.values()) + sum(b2.values()))


def jaro(s1: str, s2: str) -> float:
    if s1 == s2:
        return 1.0
    n1, n2 = len(s1), len(s2)
    if not n1 or not n2:
        return 0.0
    window = max(0, max(n1, n2) // 2 - 1)
    used = [False] * n2
    matched1 = []
    for i, ch in enumerate(s1):
        lo, hi = max(0, i - window), min(n2, i + window + 1)
        for j in range(lo, hi):
            if not used[j] and s2[j] == ch:
                used[j] = True
                matched1.append(ch)
                break
    m = len(matched1)
    if not m:
        return 0.0
    matched2 = [s2[j] for j in range(n2) if used[j]]
    transpositions = sum(a != b for a, b in zip(matched1, matched2)) / 2
    return (m / n1 + m / n2 + (m - transpositions) / m) / 3


def jaro_winkler(s1: str, s2: str) -> float:
    j = jaro(s1, s2)
    prefix = 0
    for a, b in zip(s1[:MAX_PREFIX], s2[:MAX_PREFIX]):
        if a != b:
            break
        prefix += 1
    return j + prefix * PREFIX_SCALE * (1.0 - j)
