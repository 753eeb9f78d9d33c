"""Benchmark the JIT kernels against their pure-numpy fallbacks.

Usage: python benchmarks/bench_kernels.py [--repeats 5]

Runs both paths in-process (the numba variants are exposed alongside the
fallbacks whenever numba is importable), so no env flag juggling needed.
"""

import argparse
import time

import numpy as np

from wordgraph import accel


def timeit(fn, *args, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def bench_cosine(repeats):
    print("cosine scan: rows x dim, numba vs numpy fallback")
    rng = np.random.default_rng(0)
    for rows, dim in [(2_000, 64), (20_000, 256), (50_000, 768)]:
        matrix = rng.normal(size=(rows, dim))
        norms = np.sqrt(np.einsum("ij,ij->i", matrix, matrix))
        query = rng.normal(size=dim)
        accel.cosine_scores_numba(matrix, norms, query)  # compile outside timing
        t_jit = timeit(accel.cosine_scores_numba, matrix, norms, query, repeats=repeats)
        t_np = timeit(accel.cosine_scores_numpy, matrix, norms, query, repeats=repeats)
        print(
            f"  {rows:6d} x {dim:4d}:  numba {t_jit * 1e3:8.2f} ms   "
            f"numpy {t_np * 1e3:8.2f} ms   speedup {t_np / t_jit:5.2f}x"
        )


def gibbs_state(rng, n_docs, vocab, n_topics, n_tokens):
    doc_ids = rng.integers(0, n_docs, size=n_tokens).astype(np.int64)
    word_ids = rng.integers(0, vocab, size=n_tokens).astype(np.int64)
    assignments = rng.integers(0, n_topics, size=n_tokens).astype(np.int64)
    doc_topic = np.zeros((n_docs, n_topics), dtype=np.int64)
    topic_word = np.zeros((n_topics, vocab), dtype=np.int64)
    topic_totals = np.zeros(n_topics, dtype=np.int64)
    np.add.at(doc_topic, (doc_ids, assignments), 1)
    np.add.at(topic_word, (assignments, word_ids), 1)
    np.add.at(topic_totals, assignments, 1)
    return [doc_ids, word_ids, assignments, doc_topic, topic_word, topic_totals]


def bench_gibbs(repeats):
    print("collapsed-Gibbs sweep: tokens x topics, numba vs interpreted fallback")
    rng = np.random.default_rng(1)
    for n_tokens, n_topics in [(10_000, 5), (50_000, 25), (200_000, 25)]:
        uniforms = rng.random(n_tokens)
        warm = gibbs_state(rng, 500, 2_000, n_topics, n_tokens)
        accel.gibbs_sweep_numba(*warm, 0.5, 0.01, uniforms)  # compile outside timing

        def run(fn):
            state = gibbs_state(np.random.default_rng(2), 500, 2_000, n_topics, n_tokens)
            return timeit(fn, *state, 0.5, 0.01, uniforms, repeats=repeats)

        t_jit = run(accel.gibbs_sweep_numba)
        t_py = run(accel.gibbs_sweep_python)
        print(
            f"  {n_tokens:7d} x {n_topics:2d}:  numba {t_jit * 1e3:8.2f} ms   "
            f"python {t_py * 1e3:8.2f} ms   speedup {t_py / t_jit:7.1f}x"
        )


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()
    if not accel.NUMBA_ENABLED:
        raise SystemExit("numba is disabled (WORDGRAPH_NO_NUMBA set); nothing to compare")
    bench_cosine(args.repeats)
    bench_gibbs(args.repeats)


if __name__ == "__main__":
    main()
