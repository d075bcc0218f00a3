"""Fallback similarity kernels: vectorized numpy where the recurrence allows."""

import numpy as np

BACKEND = "numpy"


def jaro_kernel(a, b):
    la = a.shape[0]
    lb = b.shape[0]
    if la == 0 and lb == 0:
        return 1.0
    if la == 0 or lb == 0:
        return 0.0
    window = max(max(la, lb) // 2 - 1, 0)
    a_flags = np.zeros(la, np.bool_)
    b_flags = np.zeros(lb, np.bool_)
    matches = 0
    for i in range(la):
        lo = max(i - window, 0)
        hi = min(i + window + 1, lb)
        for j in range(lo, hi):
            if not b_flags[j] and b[j] == a[i]:
                a_flags[i] = True
                b_flags[j] = True
                matches += 1
                break
    if matches == 0:
        return 0.0
    matched_a = a[a_flags]
    matched_b = b[b_flags]
    t = int(np.count_nonzero(matched_a != matched_b)) // 2
    m = float(matches)
    return (m / la + m / lb + (m - t) / m) / 3.0


def levenshtein_kernel(a, b):
    la = a.shape[0]
    lb = b.shape[0]
    if la == 0:
        return int(lb)
    if lb == 0:
        return int(la)
    offsets = np.arange(lb + 1, dtype=np.int64)
    prev = offsets.copy()
    cur = np.empty(lb + 1, dtype=np.int64)
    for i in range(la):
        cur[0] = i + 1
        cur[1:] = np.minimum(prev[:-1] + (b != a[i]), prev[1:] + 1)
        # chained insertions cur[j] = min(cur[j], cur[j-1] + 1) as a prefix-min
        cur = np.minimum.accumulate(cur - offsets) + offsets
        prev, cur = cur, prev
    return int(prev[lb])
