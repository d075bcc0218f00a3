"""Independent reference implementations used to check the fast paths.

These deliberately avoid the package's kernel code: levenshtein is a memoized
recursion over the full definition, jaro follows the textbook procedure
step by step, and the metric oracle counts per-label outcomes by enumeration.
"""

import functools


def levenshtein_oracle(a: str, b: str) -> int:
    @functools.lru_cache(maxsize=None)
    def rec(i, j):
        if i == 0:
            return j
        if j == 0:
            return i
        return min(
            rec(i - 1, j) + 1,
            rec(i, j - 1) + 1,
            rec(i - 1, j - 1) + (a[i - 1] != b[j - 1]),
        )

    return rec(len(a), len(b))


def jaro_oracle(a: str, b: str) -> float:
    if not a and not b:
        return 1.0
    if not a or not b:
        return 0.0
    # the window cannot be negative or equal single characters would not
    # match, contradicting "1.0 iff equal non-empty strings"
    window = max(max(len(a), len(b)) // 2 - 1, 0)
    matched_in_b = [False] * len(b)
    a_matches = []
    b_match_positions = []
    for i, ch in enumerate(a):
        lo = max(0, i - window)
        hi = min(len(b), i + window + 1)
        for j in range(lo, hi):
            if not matched_in_b[j] and b[j] == ch:
                matched_in_b[j] = True
                a_matches.append(ch)
                b_match_positions.append(j)
                break
    m = len(a_matches)
    if m == 0:
        return 0.0
    b_matches = [b[j] for j in sorted(b_match_positions)]
    transpositions = sum(x != y for x, y in zip(a_matches, b_matches)) // 2
    return (m / len(a) + m / len(b) + (m - transpositions) / m) / 3


def jaro_winkler_oracle(a: str, b: str, prefix_scale: float) -> float:
    j = jaro_oracle(a, b)
    prefix = 0
    while prefix < min(4, len(a), len(b)) and a[prefix] == b[prefix]:
        prefix += 1
    return j + prefix * prefix_scale * (1 - j)


def per_label_counts_oracle(golds, preds, universe):
    """Brute-force tp/fp/fn per label by scanning the full lists each time."""
    counts = {}
    for label in universe:
        tp = sum(1 for g, p in zip(golds, preds) if g == label and p == label)
        fp = sum(1 for g, p in zip(golds, preds) if g != label and p == label)
        fn = sum(1 for g, p in zip(golds, preds) if g == label and p != label)
        counts[label] = (tp, fp, fn)
    return counts


def macro_f1_oracle(golds, preds, universe) -> float:
    f1s = []
    for tp, fp, fn in per_label_counts_oracle(golds, preds, universe).values():
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1s.append(
            2 * precision * recall / (precision + recall) if precision + recall else 0.0
        )
    return sum(f1s) / len(f1s)
