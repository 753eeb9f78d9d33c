"""Shared fixture builders for the test suite."""

from pathlib import Path

import numpy as np

from wordgraph.corpus import Corpus, Document

DATA_DIR = Path(__file__).parent / "data"

CIRCLE_TOKENS = [f"a{deg:03d}" for deg in range(0, 360, 30)]


def circle_entries() -> dict:
    """12 unit vectors at 30-degree steps; token names encode the angle."""
    return {
        f"a{deg:03d}": np.array(
            [np.cos(np.deg2rad(deg)), np.sin(np.deg2rad(deg))], dtype=np.float64
        )
        for deg in range(0, 360, 30)
    }


def random_table(rng: np.random.Generator, n_tokens: int, dim: int):
    from wordgraph.embeddings import EmbeddingTable

    entries = {f"w{i:04d}": rng.normal(size=dim) for i in range(n_tokens)}
    return EmbeddingTable(dim, entries)


def make_corpus(token_lists, labels=None, tokenizer_id="simple") -> Corpus:
    docs = []
    for i, tokens in enumerate(token_lists):
        docs.append(
            Document(
                id=str(i),
                text=" ".join(tokens),
                tokens=list(tokens),
                gold_labels=set(labels[i]) if labels else set(),
            )
        )
    return Corpus(docs, tokenizer_id=tokenizer_id)
