"""JIT-compiled similarity kernels operating on UTF-32 codepoint arrays."""

import numpy as np
from numba import njit

BACKEND = "numba"


@njit(cache=True)
def jaro_kernel(a, b):
    la = a.shape[0]
    lb = b.shape[0]
    if la == 0 and lb == 0:
        return 1.0
    if la == 0 or lb == 0:
        return 0.0
    window = max(la, lb) // 2 - 1
    if window < 0:
        window = 0
    a_flags = np.zeros(la, np.bool_)
    b_flags = np.zeros(lb, np.bool_)
    matches = 0
    for i in range(la):
        lo = i - window
        if lo < 0:
            lo = 0
        hi = i + window + 1
        if hi > lb:
            hi = lb
        for j in range(lo, hi):
            if not b_flags[j] and b[j] == a[i]:
                a_flags[i] = True
                b_flags[j] = True
                matches += 1
                break
    if matches == 0:
        return 0.0
    # transpositions: matched characters out of order, counted in halves
    half_t = 0
    k = 0
    for i in range(la):
        if a_flags[i]:
            while not b_flags[k]:
                k += 1
            if a[i] != b[k]:
                half_t += 1
            k += 1
    t = half_t // 2
    m = float(matches)
    return (m / la + m / lb + (m - t) / m) / 3.0


@njit(cache=True)
def levenshtein_kernel(a, b):
    la = a.shape[0]
    lb = b.shape[0]
    if la == 0:
        return lb
    if lb == 0:
        return la
    prev = np.arange(lb + 1)
    cur = np.empty(lb + 1, np.int64)
    for i in range(1, la + 1):
        cur[0] = i
        for j in range(1, lb + 1):
            d = prev[j - 1] if a[i - 1] == b[j - 1] else prev[j - 1] + 1
            if prev[j] + 1 < d:
                d = prev[j] + 1
            if cur[j - 1] + 1 < d:
                d = cur[j - 1] + 1
            cur[j] = d
        prev, cur = cur, prev
    return prev[lb]
