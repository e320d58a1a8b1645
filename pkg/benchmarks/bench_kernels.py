#!/usr/bin/env python3
"""Time the numba and numpy backends of the two hot kernels.

    python3 benchmarks/bench_kernels.py --chars 1000000 --queries 200

The corruption kernel decides the fate of every character; the distance scan
compares one query against the whole lexicon. Both backends must return
identical arrays, which is checked before timing.
"""

import argparse
import random
import time

import numpy as np

from typonoise import _kernels as K
from typonoise.generator import ErrorGenerator, GenerationConfig
from typonoise.noise_model import Coefficients
from typonoise.pipeline import induce_from_path
from typonoise.suggester import VocabularyScan, load_lexicon


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def bench_decide(model, n, repeat, seed):
    rng = np.random.default_rng(seed)
    gen = ErrorGenerator(model, GenerationConfig(Coefficients.uniform(0.4)))
    codes = rng.integers(-1, 26, n)
    trans_ok = np.zeros(n, dtype=np.bool_)
    trans_ok[:-1] = (codes[:-1] >= 0) & (codes[1:] >= 0)
    u = rng.random((n, K.N_UNIFORMS))
    args = (codes, trans_ok, u) + gen.tables
    a, b = K.decide_numba(*args), K.decide_numpy(*args)
    assert all(np.array_equal(x, y) for x, y in zip(a, b)), "backends disagree"
    return best_of(lambda: K.decide_numba(*args), repeat), best_of(lambda: K.decide_numpy(*args), repeat)


def bench_scan(lexicon, queries, repeat, seed):
    scan = VocabularyScan(lexicon)
    rng = random.Random(seed)
    words = [w for w in scan.words if len(w) > 3]
    qs = [rng.choice(words)[::-1] for _ in range(queries)]
    encoded = []
    for q in qs:
        rows = np.flatnonzero(np.abs(scan.lengths - len(q)) <= 2)
        query = np.array([scan._lookup[c] for c in q], dtype=np.int64)
        words_ = np.ascontiguousarray(scan.codes[rows, : len(q) + 2])
        encoded.append((query, words_, scan.lengths[rows]))
    for args in encoded[:5]:
        assert np.array_equal(K.osa_many_numba(*args), K.osa_many_numpy(*args)), "backends disagree"

    def run(fn):
        return lambda: [fn(*args) for args in encoded]

    return best_of(run(K.osa_many_numba), repeat), best_of(run(K.osa_many_numpy), repeat)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--chars", type=int, default=1_000_000, help="positions for the corruption kernel")
    ap.add_argument("--queries", type=int, default=200, help="lexicon scans")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--seed-corpus", help="typo pairs for the model (default: bundled)")
    args = ap.parse_args()

    if not K.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    if args.seed_corpus:
        model = induce_from_path(args.seed_corpus)[0]
    else:
        from importlib import resources

        with resources.as_file(resources.files("typonoise") / "data" / "seed_pairs_en.tsv") as path:
            model = induce_from_path(path)[0]

    # warm the JIT so compile time is not counted
    bench_decide(model, 1000, 1, args.seed)
    fast, slow = bench_decide(model, args.chars, args.repeat, args.seed)
    print(f"corruption kernel, {args.chars} chars: numba {fast * 1e3:8.1f} ms  numpy {slow * 1e3:8.1f} ms  "
          f"x{slow / fast:.1f}")

    lexicon = load_lexicon()
    fast, slow = bench_scan(lexicon, args.queries, args.repeat, args.seed)
    print(f"distance scan, {args.queries} queries x {len(lexicon)} words: numba {fast * 1e3:8.1f} ms  "
          f"numpy {slow * 1e3:8.1f} ms  x{slow / fast:.1f}")


if __name__ == "__main__":
    main()
