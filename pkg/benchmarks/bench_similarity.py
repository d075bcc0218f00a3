"""Benchmark the JIT kernels against the numpy fallbacks.

Runs all-pairs Jaro and Levenshtein over random name-like strings, which is
the shape of work cross-document resolution does. Usage:

    python benchmarks/bench_similarity.py [--names 300] [--repeat 3]
"""

import argparse
import random
import time

from stakenli.similarity import _codes, _numba_kernels, _numpy_kernels

FIRST = ["rahul", "sonia", "narendra", "amit", "mehbooba", "arvind", "mamata",
         "nitin", "sharad", "uddhav", "sushma", "pranab", "medha", "urjit"]
LAST = ["gandhi", "modi", "shah", "mufti", "kejriwal", "banerjee", "gadkari",
        "pawar", "thackeray", "yadav", "swaraj", "mukherjee", "patkar", "patel"]


def make_names(n, seed=7):
    rng = random.Random(seed)
    names = []
    for _ in range(n):
        name = f"{rng.choice(FIRST)} {rng.choice(LAST)}"
        if rng.random() < 0.3:
            chars = list(name)
            i = rng.randrange(len(chars) - 1)
            chars[i], chars[i + 1] = chars[i + 1], chars[i]
            name = "".join(chars)
        names.append(name)
    return [_codes(name) for name in names]


def all_pairs(kernels, codes):
    total = 0.0
    count = 0
    for i in range(len(codes)):
        for j in range(i + 1, len(codes)):
            total += kernels.jaro_kernel(codes[i], codes[j])
            total += kernels.levenshtein_kernel(codes[i], codes[j])
            count += 2
    return total, count


def bench(kernels, codes, repeat):
    all_pairs(kernels, codes[:10])  # warm up (JIT compile for the numba path)
    best = float("inf")
    for _ in range(repeat):
        started = time.perf_counter()
        checksum, count = all_pairs(kernels, codes)
        best = min(best, time.perf_counter() - started)
    return best, checksum, count


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--names", type=int, default=300)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    codes = make_names(args.names)
    results = {}
    for label, kernels in (("numba", _numba_kernels), ("numpy", _numpy_kernels)):
        elapsed, checksum, count = bench(kernels, codes, args.repeat)
        results[label] = elapsed
        rate = count / elapsed / 1e3
        print(f"{label:6s}  {elapsed:8.3f}s  {rate:10.1f} kcalls/s  checksum={checksum:.6f}")
    print(f"speedup numba vs numpy: {results['numpy'] / results['numba']:.1f}x")


if __name__ == "__main__":
    main()
