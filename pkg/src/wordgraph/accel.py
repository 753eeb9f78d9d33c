"""JIT-accelerated numeric kernels with a pure-numpy fallback.

Set ``WORDGRAPH_NO_NUMBA=1`` in the environment to skip numba compilation;
the fallback path must produce the same results (bit-identical for the
Gibbs sweep, which shares one source function; up to float rounding for
the cosine scan, where the fallback uses BLAS instead of an explicit loop).
The dispatch decision is made once, at import time.
"""

import os

import numpy as np

NUMBA_ENABLED = os.environ.get("WORDGRAPH_NO_NUMBA", "").strip().lower() not in (
    "1",
    "true",
    "yes",
)

if NUMBA_ENABLED:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        NUMBA_ENABLED = False


def cosine_scores_numpy(matrix, norms, query):
    """Cosine similarity of every row of `matrix` against `query`.

    `norms` holds the precomputed row L2 norms. Rows with zero norm (and
    every row, if the query has zero norm) score -1.0 so they can never
    clear a similarity threshold in [-1, 1].

    Dot products are computed as elementwise multiply + sum rather than
    gemv: BLAS may fuse multiply-adds, which perturbs near-ties by one ulp
    relative to the JIT loop.
    """
    qnorm = float(np.sqrt((query * query).sum()))
    out = np.full(matrix.shape[0], -1.0)
    if qnorm == 0.0:
        return out
    scores = (matrix * query).sum(axis=1)
    np.divide(scores, norms * qnorm, out=out, where=norms > 0.0)
    return out


def _cosine_scores_loop(matrix, norms, query):
    n, d = matrix.shape
    q = 0.0
    for j in range(d):
        q += query[j] * query[j]
    qnorm = np.sqrt(q)
    out = np.empty(n)
    for i in range(n):
        if qnorm == 0.0 or norms[i] == 0.0:
            out[i] = -1.0
        else:
            s = 0.0
            for j in range(d):
                s += matrix[i, j] * query[j]
            out[i] = s / (norms[i] * qnorm)
    return out


def _gibbs_sweep_impl(
    doc_ids,
    word_ids,
    assignments,
    doc_topic,
    topic_word,
    topic_totals,
    alpha,
    beta,
    uniforms,
):
    """One collapsed-Gibbs pass over every token position, in place.

    Each position is resampled from
    p(z=t) ~ (doc_topic[d,t] + alpha) * (topic_word[t,w] + beta)
             / (topic_totals[t] + beta * V)
    by inverse-CDF against the supplied per-position uniforms, so the
    result is a pure function of its inputs (identical under JIT and
    interpreted execution).
    """
    n_topics = topic_word.shape[0]
    vbeta = beta * topic_word.shape[1]
    cumulative = np.empty(n_topics)
    for i in range(doc_ids.shape[0]):
        d = doc_ids[i]
        w = word_ids[i]
        z = assignments[i]
        doc_topic[d, z] -= 1
        topic_word[z, w] -= 1
        topic_totals[z] -= 1
        total = 0.0
        for t in range(n_topics):
            total += (
                (doc_topic[d, t] + alpha)
                * (topic_word[t, w] + beta)
                / (topic_totals[t] + vbeta)
            )
            cumulative[t] = total
        u = uniforms[i] * total
        z_new = 0
        while z_new < n_topics - 1 and cumulative[z_new] < u:
            z_new += 1
        assignments[i] = z_new
        doc_topic[d, z_new] += 1
        topic_word[z_new, w] += 1
        topic_totals[z_new] += 1


gibbs_sweep_python = _gibbs_sweep_impl

if NUMBA_ENABLED:
    cosine_scores_numba = njit(cache=True)(_cosine_scores_loop)
    gibbs_sweep_numba = njit(cache=True)(_gibbs_sweep_impl)
    cosine_scores = cosine_scores_numba
    gibbs_sweep = gibbs_sweep_numba
else:
    cosine_scores = cosine_scores_numpy
    gibbs_sweep = gibbs_sweep_python
