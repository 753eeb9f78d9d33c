"""Keyword-containment retrieval: a document is positive iff it contains
at least one keyword under the corpus tokenizer."""

import json
import logging
from dataclasses import dataclass, field
from typing import Sequence

from .corpus import Corpus, Document

logger = logging.getLogger(__name__)


@dataclass
class RetrievalResult:
    positive_ids: list[str]
    matched_keywords: dict[str, set[str]]
    keyword_hit_counts: dict[str, int]
    n_documents: int = 0
    warnings: list[str] = field(default_factory=list)

    @property
    def rate(self) -> float:
        return len(self.positive_ids) / self.n_documents if self.n_documents else 0.0


def classify(doc: Document, keywords: set[str]) -> bool:
    """True iff the document's tokens intersect the keyword set."""
    return not keywords.isdisjoint(doc.tokens)


def retrieve(corpus: Corpus, keywords: Sequence[str]) -> RetrievalResult:
    """Scan the corpus for documents containing any keyword.

    Under a simple (word-level) tokenizer, '##'-prefixed continuation
    pieces can never occur in a document, so they are skipped with a
    warning; under wordpiece tokenization they match directly. Matching is
    exact token equality, no stemming.
    """
    ordered = list(dict.fromkeys(keywords))
    result = RetrievalResult(
        positive_ids=[],
        matched_keywords={},
        keyword_hit_counts={k: 0 for k in ordered},
        n_documents=len(corpus),
    )
    if not ordered:
        msg = "empty keyword list: nothing can be retrieved"
        logger.warning(msg)
        result.warnings.append(msg)
        return result

    usable = set(ordered)
    if corpus.tokenizer_id.startswith("simple"):
        for kw in ordered:
            if kw.startswith("##"):
                msg = f"keyword {kw!r} skipped: continuation pieces cannot occur under simple tokenization"
                logger.warning(msg)
                result.warnings.append(msg)
                usable.discard(kw)

    for doc in corpus:
        matched = doc.token_set() & usable
        if matched:
            result.positive_ids.append(doc.id)
            result.matched_keywords[doc.id] = matched
            for kw in matched:
                result.keyword_hit_counts[kw] += 1
    return result


def result_to_jsonl(result: RetrievalResult) -> str:
    """One `{"id", "matched"}` line per positive document, corpus order."""
    lines = [
        json.dumps(
            {"id": doc_id, "matched": sorted(result.matched_keywords[doc_id])},
            sort_keys=True,
        )
        for doc_id in result.positive_ids
    ]
    return "".join(line + "\n" for line in lines)


def result_summary(result: RetrievalResult) -> dict:
    return {
        "n_positive": len(result.positive_ids),
        "rate": result.rate,
        "keyword_hit_counts": dict(result.keyword_hit_counts),
        "warnings": list(result.warnings),
    }
