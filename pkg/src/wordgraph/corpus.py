"""Document ingestion, tokenization, vocabularies, and seed-text selection."""

import csv
import json
import logging
import string
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

logger = logging.getLogger(__name__)

_PUNCT = string.punctuation
_MAX_WORDPIECE_CHARS = 100

URL_TOKEN = "<url>"
UNK_TOKEN = "<unk>"


class CorpusFormatError(ValueError):
    """Raised when a corpus file is malformed."""


@dataclass
class Document:
    id: str
    text: str
    tokens: list[str] = field(default_factory=list)
    gold_labels: set[str] = field(default_factory=set)

    def token_set(self) -> set[str]:
        return set(self.tokens)


@dataclass
class Corpus:
    documents: list[Document]
    tokenizer_id: str = "simple"

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)

    def ids(self) -> list[str]:
        return [doc.id for doc in self.documents]


@dataclass
class Vocabulary:
    counts: Counter
    doc_freq: Counter

    def tokens(self) -> set[str]:
        return set(self.counts)

    def __contains__(self, token: str) -> bool:
        return token in self.counts

    def __len__(self) -> int:
        return len(self.counts)


class WordPieceVocab:
    """Greedy longest-match subword segmentation with '##' continuations."""

    def __init__(self, tokens: Iterable[str]):
        self.tokens = set(tokens)
        if not self.tokens:
            raise CorpusFormatError("wordpiece vocab is empty")

    @classmethod
    def from_file(cls, path) -> "WordPieceVocab":
        try:
            with open(path, encoding="utf-8") as fh:
                return cls(line.strip() for line in fh if line.strip())
        except FileNotFoundError:
            raise CorpusFormatError(f"wordpiece vocab missing: {path}")

    def segment(self, word: str) -> list[str]:
        """Split one word into pieces; the whole word becomes <unk> when any
        span cannot be matched."""
        if len(word) > _MAX_WORDPIECE_CHARS:
            return [UNK_TOKEN]
        pieces = []
        start = 0
        while start < len(word):
            end = len(word)
            match = None
            while start < end:
                piece = word[start:end]
                if start > 0:
                    piece = "##" + piece
                if piece in self.tokens:
                    match = piece
                    break
                end -= 1
            if match is None:
                return [UNK_TOKEN]
            pieces.append(match)
            start = end
        return pieces


def _clean_words(text: str) -> list[str]:
    """Lowercase, split on whitespace, collapse URLs, strip edge punctuation."""
    out = []
    for raw in text.lower().split():
        if raw.startswith("http://") or raw.startswith("https://"):
            out.append(URL_TOKEN)
            continue
        word = raw.strip(_PUNCT)
        if word:
            out.append(word)
    return out


def tokenize(
    text: str,
    mode: str = "simple",
    wordpiece_vocab: Optional[WordPieceVocab] = None,
) -> list[str]:
    """Deterministic tokenization.

    'simple' lowercases, splits on whitespace, strips leading/trailing
    punctuation, drops empties, and collapses URLs to <url>. 'wordpiece'
    applies the same cleanup, then greedy longest-match segmentation of
    each word against the supplied vocab.
    """
    words = _clean_words(text)
    if mode == "simple":
        return words
    if mode == "wordpiece":
        if wordpiece_vocab is None:
            raise CorpusFormatError("wordpiece mode requires a vocab")
        pieces: list[str] = []
        for word in words:
            if word == URL_TOKEN:
                pieces.append(word)
            else:
                pieces.extend(wordpiece_vocab.segment(word))
        return pieces
    raise ValueError(f"unknown tokenizer mode {mode!r}")


def _labels_from(value) -> set[str]:
    if value is None:
        return set()
    if isinstance(value, str):
        return {part for part in value.split("|") if part}
    return {str(v) for v in value}


def ingest(
    path,
    format: str = "jsonl",
    tokenizer: str = "simple",
    wordpiece_vocab_path=None,
) -> Corpus:
    """Read a corpus file ('jsonl', 'csv', or 'plain-lines') and tokenize it."""
    vocab = None
    tokenizer_id = tokenizer
    if tokenizer == "wordpiece":
        vocab = WordPieceVocab.from_file(wordpiece_vocab_path)
        tokenizer_id = f"wordpiece:{wordpiece_vocab_path}"

    records: list[tuple[str, str, set[str]]] = []
    with open(path, encoding="utf-8") as fh:
        if format == "plain-lines":
            for i, line in enumerate(fh):
                records.append((str(i), line.rstrip("\n"), set()))
        elif format == "jsonl":
            for i, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError:
                    raise CorpusFormatError(f"invalid json at line {i}")
                for fieldname in ("id", "text"):
                    if fieldname not in obj:
                        raise CorpusFormatError(f"missing field {fieldname!r} at line {i}")
                records.append((str(obj["id"]), str(obj["text"]), _labels_from(obj.get("labels"))))
        elif format == "csv":
            reader = csv.DictReader(fh)
            if reader.fieldnames is None:
                raise CorpusFormatError("empty file")
            for fieldname in ("id", "text"):
                if fieldname not in reader.fieldnames:
                    raise CorpusFormatError(f"missing column {fieldname!r} in csv header")
            for i, row in enumerate(reader, start=2):
                if row["id"] is None or row["text"] is None:
                    raise CorpusFormatError(f"missing field at line {i}")
                records.append((row["id"], row["text"], _labels_from(row.get("labels"))))
        else:
            raise ValueError(f"unknown corpus format {format!r}")

    if not records:
        raise CorpusFormatError("empty file")

    seen: set[str] = set()
    documents = []
    for doc_id, text, labels in records:
        if doc_id in seen:
            raise CorpusFormatError(f"duplicate id {doc_id!r}")
        seen.add(doc_id)
        documents.append(
            Document(
                id=doc_id,
                text=text,
                tokens=tokenize(text, mode=tokenizer, wordpiece_vocab=vocab),
                gold_labels=labels,
            )
        )
    return Corpus(documents, tokenizer_id=tokenizer_id)


def vocabulary(corpus: Corpus) -> Vocabulary:
    """Exact token counts and document frequencies over a corpus."""
    counts: Counter = Counter()
    doc_freq: Counter = Counter()
    for doc in corpus:
        counts.update(doc.tokens)
        doc_freq.update(doc.token_set())
    return Vocabulary(counts=counts, doc_freq=doc_freq)


def select_seed_texts(
    corpus: Corpus,
    seed_words: Sequence[str],
    n: int,
    mode: str = "any",
    shuffle_seed: Optional[int] = None,
) -> Corpus:
    """Weak-supervision subset: documents containing the seed word(s).

    mode='all' takes the first n documents whose token set contains every
    seed word; mode='any' takes, per seed word, the first n documents
    containing it, deduplicated. "First" follows corpus order unless
    `shuffle_seed` requests a seeded random scan order. The selection is
    returned in corpus order either way.
    """
    if not seed_words:
        raise ValueError("seed_words must be non-empty")
    if n < 1:
        raise ValueError("n must be >= 1")
    if mode not in ("any", "all"):
        raise ValueError(f"unknown selection mode {mode!r}")

    order = list(range(len(corpus.documents)))
    if shuffle_seed is not None:
        np.random.default_rng(shuffle_seed).shuffle(order)

    picked: set[int] = set()
    if mode == "all":
        wanted = set(seed_words)
        taken = 0
        for idx in order:
            if taken >= n:
                break
            if wanted <= corpus.documents[idx].token_set():
                picked.add(idx)
                taken += 1
    else:
        for word in seed_words:
            taken = 0
            for idx in order:
                if taken >= n:
                    break
                if word in corpus.documents[idx].token_set():
                    picked.add(idx)
                    taken += 1

    if not picked:
        logger.warning("no documents matched seed words %s (mode=%s)", list(seed_words), mode)
    selected = [corpus.documents[i] for i in sorted(picked)]
    return Corpus(selected, tokenizer_id=corpus.tokenizer_id)
