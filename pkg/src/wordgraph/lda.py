"""Latent Dirichlet allocation by collapsed Gibbs sampling.

Documents are reduced to index arrays over a filtered vocabulary; the
per-sweep resampling pass lives in `accel` so it can run JIT-compiled or
interpreted with identical results.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import accel
from .corpus import Corpus, UNK_TOKEN, URL_TOKEN

logger = logging.getLogger(__name__)

DEFAULT_STOPLIST = frozenset(
    """a an and are as at be but by for from has have i if in is it its me my
    of on or our so that the their them they this to was we were what when
    which who will with you your""".split()
)


@dataclass
class LdaConfig:
    num_topics: int
    alpha: Optional[float] = None  # None -> 50 / num_topics
    beta: float = 0.01
    sweeps: int = 1000
    rng_seed: int = 0

    def resolved_alpha(self) -> float:
        return 50.0 / self.num_topics if self.alpha is None else self.alpha

    def to_dict(self) -> dict:
        return {
            "num_topics": self.num_topics,
            "alpha": self.resolved_alpha(),
            "beta": self.beta,
            "sweeps": self.sweeps,
            "rng_seed": self.rng_seed,
        }


@dataclass
class LdaModel:
    topic_word_counts: np.ndarray  # [num_topics, vocab]
    doc_topic_counts: np.ndarray  # [docs, num_topics]
    topic_totals: np.ndarray  # [num_topics]
    assignments: np.ndarray  # per token position
    vocab_index: dict[str, int]
    config: LdaConfig
    doc_lengths: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    perplexity_trace: list[float] = field(default_factory=list)

    @property
    def num_topics(self) -> int:
        return self.topic_word_counts.shape[0]

    @property
    def vocab_size(self) -> int:
        return self.topic_word_counts.shape[1]

    def vocab_tokens(self) -> list[str]:
        ordered = [""] * len(self.vocab_index)
        for token, col in self.vocab_index.items():
            ordered[col] = token
        return ordered

    def check_counts(self):
        """Count-consistency invariants; cheap enough to run every sweep."""
        assert (self.topic_word_counts.sum(axis=1) == self.topic_totals).all()
        assert (self.doc_topic_counts.sum(axis=1) == self.doc_lengths).all()
        assert (self.topic_word_counts >= 0).all()
        assert (self.doc_topic_counts >= 0).all()
        assert ((0 <= self.assignments) & (self.assignments < self.num_topics)).all()


def _filter_tokens(corpus: Corpus, stoplist, min_token_freq: int) -> list[list[str]]:
    counts: dict[str, int] = {}
    for doc in corpus:
        for token in doc.tokens:
            counts[token] = counts.get(token, 0) + 1
    dropped = {URL_TOKEN, UNK_TOKEN} | set(stoplist)
    kept = []
    for doc in corpus:
        kept.append(
            [
                t
                for t in doc.tokens
                if t not in dropped and counts[t] >= min_token_freq
            ]
        )
    return kept


def fit_lda(
    corpus: Corpus,
    config: LdaConfig,
    *,
    stoplist=None,
    min_token_freq: int = 5,
    check_invariants: bool = False,
    trace_every: int = 0,
) -> LdaModel:
    """Collapsed Gibbs sampling from random assignments.

    Preprocessing drops stoplist tokens, <url>/<unk>, and tokens rarer than
    `min_token_freq` corpus-wide. `trace_every` > 0 records a perplexity
    checkpoint after initialization and every that many sweeps (plus the
    final sweep). Fixed rng_seed makes the fit bit-reproducible.
    """
    if config.num_topics < 2:
        raise ValueError("num_topics must be >= 2")
    if len(corpus.documents) == 0:
        raise ValueError("empty corpus")
    stop = DEFAULT_STOPLIST if stoplist is None else frozenset(stoplist)
    docs_tokens = _filter_tokens(corpus, stop, min_token_freq)
    vocab = sorted({t for tokens in docs_tokens for t in tokens})
    if not vocab:
        raise ValueError("empty vocabulary after filtering")
    vocab_index = {t: i for i, t in enumerate(vocab)}

    doc_ids = []
    word_ids = []
    for d, tokens in enumerate(docs_tokens):
        for t in tokens:
            doc_ids.append(d)
            word_ids.append(vocab_index[t])
    doc_ids = np.asarray(doc_ids, dtype=np.int64)
    word_ids = np.asarray(word_ids, dtype=np.int64)

    n_docs = len(docs_tokens)
    k = config.num_topics
    v = len(vocab)
    alpha = config.resolved_alpha()
    beta = config.beta

    rng = np.random.default_rng(config.rng_seed)
    assignments = rng.integers(0, k, size=doc_ids.shape[0], dtype=np.int64)

    doc_topic = np.zeros((n_docs, k), dtype=np.int64)
    topic_word = np.zeros((k, v), dtype=np.int64)
    topic_totals = np.zeros(k, dtype=np.int64)
    np.add.at(doc_topic, (doc_ids, assignments), 1)
    np.add.at(topic_word, (assignments, word_ids), 1)
    np.add.at(topic_totals, assignments, 1)

    model = LdaModel(
        topic_word_counts=topic_word,
        doc_topic_counts=doc_topic,
        topic_totals=topic_totals,
        assignments=assignments,
        vocab_index=vocab_index,
        config=config,
        doc_lengths=np.bincount(doc_ids, minlength=n_docs).astype(np.int64),
    )

    def record():
        model.perplexity_trace.append(
            _perplexity_from_positions(model, doc_ids, word_ids)
        )

    if trace_every > 0:
        record()
    for sweep in range(1, config.sweeps + 1):
        uniforms = rng.random(doc_ids.shape[0])
        accel.gibbs_sweep(
            doc_ids,
            word_ids,
            assignments,
            doc_topic,
            topic_word,
            topic_totals,
            alpha,
            beta,
            uniforms,
        )
        if check_invariants:
            model.check_counts()
        if trace_every > 0 and (sweep % trace_every == 0 or sweep == config.sweeps):
            record()
    return model


def _point_estimates(model: LdaModel):
    alpha = model.config.resolved_alpha()
    beta = model.config.beta
    k = model.num_topics
    v = model.vocab_size
    theta = (model.doc_topic_counts + alpha) / (
        model.doc_topic_counts.sum(axis=1, keepdims=True) + k * alpha
    )
    phi = (model.topic_word_counts + beta) / (
        model.topic_totals[:, None] + v * beta
    )
    return theta, phi


def _perplexity_from_positions(model, doc_ids, word_ids) -> float:
    theta, phi = _point_estimates(model)
    token_probs = np.einsum("dk,kd->d", theta[doc_ids], phi[:, word_ids])
    return float(np.exp(-np.log(token_probs).mean()))


def perplexity(model: LdaModel, corpus: Corpus) -> float:
    """exp(-mean log p(w|d)) under point-estimated topic mixtures.

    `corpus` documents map to model rows by position; tokens outside the
    model vocabulary are skipped.
    """
    if len(corpus.documents) != model.doc_topic_counts.shape[0]:
        raise ValueError("corpus does not match the model's document count")
    doc_ids = []
    word_ids = []
    for d, doc in enumerate(corpus):
        for token in doc.tokens:
            col = model.vocab_index.get(token)
            if col is not None:
                doc_ids.append(d)
                word_ids.append(col)
    if not doc_ids:
        raise ValueError("no usable tokens: corpus shares no vocabulary with the model")
    return _perplexity_from_positions(
        model, np.asarray(doc_ids, dtype=np.int64), np.asarray(word_ids, dtype=np.int64)
    )


def top_words(model: LdaModel, topic: int, n: int) -> list[str]:
    """n highest-weight tokens of one topic, ties broken lexicographically."""
    if not 0 <= topic < model.num_topics:
        raise IndexError(f"topic {topic} out of range [0, {model.num_topics})")
    if n < 1:
        raise ValueError("n must be >= 1")
    tokens = model.vocab_tokens()
    weights = model.topic_word_counts[topic] + model.config.beta
    order = sorted(range(len(tokens)), key=lambda i: (-weights[i], tokens[i]))
    return [tokens[i] for i in order[:n]]


def topic_report(model: LdaModel, n_words: int = 10) -> dict:
    """JSON-ready topic summary with smoothed word weights."""
    tokens = model.vocab_tokens()
    beta = model.config.beta
    topics = []
    for t in range(model.num_topics):
        denom = float(model.topic_totals[t] + model.vocab_size * beta)
        entry = []
        for token in top_words(model, t, n_words):
            col = model.vocab_index[token]
            weight = float(model.topic_word_counts[t, col] + beta) / denom
            entry.append({"token": token, "weight": weight})
        topics.append({"id": t, "top_words": entry})
    return {
        "config": model.config.to_dict(),
        "topics": topics,
        "perplexity_trace": list(model.perplexity_trace),
    }
