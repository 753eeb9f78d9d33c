"""Weakly-supervised keyword expansion over word-embedding graphs."""

from .corpus import (
    Corpus,
    CorpusFormatError,
    Document,
    Vocabulary,
    WordPieceVocab,
    ingest,
    select_seed_texts,
    tokenize,
    vocabulary,
)
from .embeddings import (
    EmbeddingParseError,
    EmbeddingTable,
    SimilarityHit,
    cosine_similarity,
    load_embeddings,
    top_k_similar,
)
from .evaluate import (
    BowLogRegModel,
    ConfusionCounts,
    EvalReport,
    confusion,
    f1_from_pr,
    predict_bow_logreg,
    prf,
    project_gold,
    train_bow_logreg,
    upsample,
)
from .lda import LdaConfig, LdaModel, fit_lda, perplexity, top_words
from .retrieval import RetrievalResult, classify, retrieve
from .search import (
    SearchConfig,
    SearchResult,
    SeedNotFoundError,
    WordGraph,
    bmdwgs,
    bwgs,
    export_graph,
    query_embedding,
    update_context_embedding,
)

__version__ = "0.1.0"

__all__ = [
    "BowLogRegModel",
    "ConfusionCounts",
    "Corpus",
    "CorpusFormatError",
    "Document",
    "EmbeddingParseError",
    "EmbeddingTable",
    "EvalReport",
    "LdaConfig",
    "LdaModel",
    "RetrievalResult",
    "SearchConfig",
    "SearchResult",
    "SeedNotFoundError",
    "SimilarityHit",
    "Vocabulary",
    "WordGraph",
    "WordPieceVocab",
    "bmdwgs",
    "bwgs",
    "classify",
    "confusion",
    "cosine_similarity",
    "export_graph",
    "f1_from_pr",
    "fit_lda",
    "ingest",
    "load_embeddings",
    "perplexity",
    "predict_bow_logreg",
    "prf",
    "project_gold",
    "query_embedding",
    "retrieve",
    "select_seed_texts",
    "tokenize",
    "top_k_similar",
    "top_words",
    "train_bow_logreg",
    "update_context_embedding",
    "upsample",
    "vocabulary",
]
