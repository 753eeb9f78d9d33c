"""Word-embedding tables: file loading, cosine geometry, top-k scans."""

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np

from . import accel

logger = logging.getLogger(__name__)


class EmbeddingParseError(ValueError):
    """Raised when an embedding file cannot be parsed."""

    def __init__(self, message, line: Optional[int] = None):
        if line is not None:
            message = f"{message} at line {line}"
        super().__init__(message)
        self.line = line


class MalformedHeaderError(EmbeddingParseError):
    pass


class InconsistentVectorLengthError(EmbeddingParseError):
    pass


class NonFiniteComponentError(EmbeddingParseError):
    pass


class DuplicateTokenError(EmbeddingParseError):
    pass


class SimilarityHit(NamedTuple):
    token: str
    similarity: float


@dataclass
class EmbeddingTable:
    """Immutable token -> dense vector map of a fixed dimensionality."""

    dim: int
    entries: dict[str, np.ndarray]
    _tokens: tuple[str, ...] = field(init=False, repr=False, default=())
    _matrix: Optional[np.ndarray] = field(init=False, repr=False, default=None)
    _norms: Optional[np.ndarray] = field(init=False, repr=False, default=None)

    def __post_init__(self):
        if self.dim <= 0:
            raise ValueError("embedding dimension must be positive")
        for token, vec in self.entries.items():
            if token == "":
                raise ValueError("empty-string token forbidden")
            arr = np.asarray(vec, dtype=np.float64)
            if arr.shape != (self.dim,):
                raise ValueError(
                    f"vector for {token!r} has {arr.size} components, expected {self.dim}"
                )
            if not np.isfinite(arr).all():
                raise ValueError(f"vector for {token!r} has non-finite components")
            self.entries[token] = arr

    def __contains__(self, token: str) -> bool:
        return token in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def vector(self, token: str) -> np.ndarray:
        return self.entries[token]

    def restrict(self, tokens: Iterable[str]) -> "EmbeddingTable":
        """Sub-table over `tokens` (sorted order); unknown tokens are ignored."""
        kept = {t: self.entries[t] for t in sorted(set(tokens)) if t in self.entries}
        return EmbeddingTable(self.dim, kept)

    def _scan_arrays(self):
        if self._matrix is None or len(self._tokens) != len(self.entries):
            self._tokens = tuple(self.entries)
            self._matrix = (
                np.stack([self.entries[t] for t in self._tokens])
                if self._tokens
                else np.zeros((0, self.dim))
            )
            self._norms = np.sqrt(np.einsum("ij,ij->i", self._matrix, self._matrix))
        return self._tokens, self._matrix, self._norms


def _parse_vec_text(lines: Iterable[str]) -> EmbeddingTable:
    it = iter(lines)
    try:
        header = next(it)
    except StopIteration:
        raise MalformedHeaderError("empty file, expected '<count> <dim>' header", line=1)
    parts = header.split()
    if len(parts) != 2:
        raise MalformedHeaderError("malformed header, expected '<count> <dim>'", line=1)
    try:
        count, dim = int(parts[0]), int(parts[1])
    except ValueError:
        raise MalformedHeaderError("malformed header, expected two integers", line=1)
    if count < 0 or dim <= 0:
        raise MalformedHeaderError("malformed header, count/dim out of range", line=1)

    entries: dict[str, np.ndarray] = {}
    lineno = 1
    for raw in it:
        lineno += 1
        if not raw.strip():
            continue
        fields = raw.split()
        token = fields[0]
        if len(fields) - 1 != dim:
            raise InconsistentVectorLengthError("inconsistent vector length", line=lineno)
        try:
            vec = np.array(fields[1:], dtype=np.float64)
        except ValueError:
            raise EmbeddingParseError("unparseable vector component", line=lineno)
        if not np.isfinite(vec).all():
            raise NonFiniteComponentError("non-finite vector component", line=lineno)
        if token in entries:
            raise DuplicateTokenError(f"duplicate token {token!r}", line=lineno)
        if token == "":
            raise EmbeddingParseError("empty token", line=lineno)
        entries[token] = vec
    if len(entries) != count:
        logger.warning(
            "header declared %d vectors but %d were parsed", count, len(entries)
        )
    return EmbeddingTable(dim, entries)


def _parse_jsonl(lines: Iterable[str]) -> EmbeddingTable:
    entries: dict[str, np.ndarray] = {}
    dim = None
    lineno = 0
    for raw in lines:
        lineno += 1
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError:
            raise EmbeddingParseError("invalid json record", line=lineno)
        if not isinstance(obj, dict) or "token" not in obj or "vec" not in obj:
            raise EmbeddingParseError("record must have 'token' and 'vec'", line=lineno)
        token = obj["token"]
        if not isinstance(token, str) or token == "":
            raise EmbeddingParseError("token must be a non-empty string", line=lineno)
        vec = np.asarray(obj["vec"], dtype=np.float64)
        if dim is None:
            if vec.size == 0:
                raise EmbeddingParseError("zero-length vector", line=lineno)
            dim = int(vec.size)
        if vec.shape != (dim,):
            raise InconsistentVectorLengthError("inconsistent vector length", line=lineno)
        if not np.isfinite(vec).all():
            raise NonFiniteComponentError("non-finite vector component", line=lineno)
        if token in entries:
            raise DuplicateTokenError(f"duplicate token {token!r}", line=lineno)
        entries[token] = vec
    if dim is None:
        raise EmbeddingParseError("no records found", line=1)
    return EmbeddingTable(dim, entries)


def load_embeddings(path, format: str = "vec-text") -> EmbeddingTable:
    """Load an embedding table from `path` in 'vec-text' or 'jsonl' format."""
    if format not in ("vec-text", "jsonl"):
        raise ValueError(f"unknown embedding format {format!r}")
    with open(path, encoding="utf-8") as fh:
        if format == "vec-text":
            return _parse_vec_text(fh)
        return _parse_jsonl(fh)


def cosine_similarity(a: Sequence[float], b: Sequence[float]) -> float:
    """Cosine of the angle between a and b; -1.0 if either norm is zero.

    The sentinel keeps degenerate (all-zero) vectors from ever being
    selected by a threshold in [-1, 1] without aborting a search.
    """
    av = np.asarray(a, dtype=np.float64)
    bv = np.asarray(b, dtype=np.float64)
    if av.shape != bv.shape:
        raise ValueError(f"dimension mismatch: {av.shape} vs {bv.shape}")
    na = math.sqrt(float(np.dot(av, av)))
    nb = math.sqrt(float(np.dot(bv, bv)))
    if na == 0.0 or nb == 0.0:
        return -1.0
    return float(np.dot(av, bv)) / (na * nb)


def top_k_similar(
    table: EmbeddingTable,
    query: Sequence[float],
    k: int,
    threshold: float,
    exclude: Iterable[str] = (),
) -> list[SimilarityHit]:
    """At most k tokens with cosine >= threshold, best first.

    Ties are broken by ascending token so results are reproducible across
    platforms and scan orders.
    """
    if k <= 0:
        raise ValueError("k must be a positive integer")
    q = np.asarray(query, dtype=np.float64)
    if q.shape != (table.dim,):
        raise ValueError(f"query has {q.size} components, expected {table.dim}")
    excluded = set(exclude)
    tokens, matrix, norms = table._scan_arrays()
    if not tokens:
        return []
    scores = accel.cosine_scores(matrix, norms, q)
    survivors = [
        (tokens[i], float(scores[i]))
        for i in range(len(tokens))
        if scores[i] >= threshold and tokens[i] not in excluded
    ]
    survivors.sort(key=lambda hit: (-hit[1], hit[0]))
    return [SimilarityHit(t, s) for t, s in survivors[:k]]
