"""Context-guided breadth-ordered keyword expansion over an embedding vocabulary.

A run starts from a seed token and repeatedly expands the most similar
neighbors of a mixed query embedding (running context average blended with
the current token's vector), level by level, until the depth budget or the
frontier is exhausted. The multi-seed variant unions independent runs.
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .corpus import Vocabulary
from .embeddings import EmbeddingTable, cosine_similarity, top_k_similar

logger = logging.getLogger(__name__)


class SeedNotFoundError(KeyError):
    """Seed token has no embedding; the search cannot start."""


@dataclass(frozen=True)
class SearchConfig:
    min_sim_thresh: float
    max_depth: int
    top_k: int
    context_mix: float = 0.5

    def __post_init__(self):
        if not -1.0 <= self.min_sim_thresh <= 1.0:
            raise ValueError("min_sim_thresh must be in [-1, 1]")
        if self.max_depth < 0:
            raise ValueError("max_depth must be >= 0")
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")
        if not 0.0 <= self.context_mix <= 1.0:
            raise ValueError("context_mix must be in [0, 1]")

    def to_dict(self) -> dict:
        return {
            "min_sim_thresh": self.min_sim_thresh,
            "max_depth": self.max_depth,
            "top_k": self.top_k,
            "context_mix": self.context_mix,
        }


@dataclass
class GraphNode:
    embedding: np.ndarray
    depth: int
    parent: Optional[str] = None


@dataclass
class WordGraph:
    nodes: dict[str, GraphNode] = field(default_factory=dict)
    edges: set[tuple[str, str]] = field(default_factory=set)

    def add_node(self, token: str, embedding: np.ndarray, depth: int, parent=None):
        self.nodes[token] = GraphNode(embedding=embedding, depth=depth, parent=parent)

    def add_edge(self, parent: str, child: str):
        self.edges.add((parent, child))


@dataclass
class SearchResult:
    keywords: list[str]
    graph: WordGraph
    context_trace: list[np.ndarray]
    seeds: tuple[str, ...]
    config: SearchConfig

    def to_report(self) -> dict:
        """JSON-ready report: seeds, config, keywords with depth/parent, trace."""
        return {
            "seeds": list(self.seeds),
            "config": self.config.to_dict(),
            "keywords": [
                {
                    "token": token,
                    "depth": self.graph.nodes[token].depth,
                    "parent": self.graph.nodes[token].parent,
                }
                for token in self.keywords
            ],
            "context_trace": [[float(x) for x in vec] for vec in self.context_trace],
        }


def query_embedding(
    cemb: np.ndarray, token_emb: np.ndarray, context_mix: float
) -> np.ndarray:
    """Convex mix of the running context and the current token's vector."""
    a = np.asarray(cemb, dtype=np.float64)
    b = np.asarray(token_emb, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    if not 0.0 <= context_mix <= 1.0:
        raise ValueError("context_mix must be in [0, 1]")
    return context_mix * a + (1.0 - context_mix) * b


def update_context_embedding(
    cemb: np.ndarray, selected: Sequence[np.ndarray]
) -> np.ndarray:
    """Mean of the current context vector and the m selected embeddings."""
    out = np.asarray(cemb, dtype=np.float64).copy()
    for vec in selected:
        v = np.asarray(vec, dtype=np.float64)
        if v.shape != out.shape:
            raise ValueError(f"dimension mismatch: {v.shape} vs {out.shape}")
        out += v
    return out / (len(selected) + 1)


def bwgs(
    table: EmbeddingTable,
    vocab: Vocabulary,
    seed: str,
    config: SearchConfig,
) -> SearchResult:
    """Single-seed word-graph search.

    The seed sits at depth 0 and initializes the context embedding. Popping
    a node at depth d < max_depth scores every unvisited candidate against
    the mixed query embedding, keeps those above the similarity threshold,
    and enqueues the top_k best at depth d+1. Once a whole depth level has
    been popped, the context embedding is re-averaged with the (at most
    top_k) newly discovered embeddings closest to it. Nodes at max_depth
    are popped into the keyword list but never expanded.
    """
    if seed not in table:
        raise SeedNotFoundError(f"seed {seed!r} has no embedding")
    vocab_tokens = vocab.tokens()
    if seed not in vocab_tokens:
        logger.warning("seed %r not in candidate vocabulary; searching anyway", seed)
    universe = (vocab_tokens & set(table.entries)) | {seed}
    subtable = table.restrict(universe)

    graph = WordGraph()
    graph.add_node(seed, table.vector(seed), depth=0, parent=None)
    cemb = table.vector(seed).copy()
    visited = {seed}
    keywords: list[str] = []
    trace: list[np.ndarray] = []

    level = [seed]
    depth = 0
    while level:
        discovered: list[str] = []
        for token in level:
            keywords.append(token)
            if depth >= config.max_depth:
                continue
            query = query_embedding(cemb, table.vector(token), config.context_mix)
            hits = top_k_similar(
                subtable,
                query,
                k=config.top_k,
                threshold=config.min_sim_thresh,
                exclude=visited,
            )
            for hit in hits:
                visited.add(hit.token)
                graph.add_node(hit.token, table.vector(hit.token), depth + 1, parent=token)
                graph.add_edge(token, hit.token)
                discovered.append(hit.token)
        if depth < config.max_depth:
            ranked = sorted(
                discovered,
                key=lambda t: (-cosine_similarity(table.vector(t), cemb), t),
            )
            chosen = ranked[: config.top_k]
            cemb = update_context_embedding(cemb, [table.vector(t) for t in chosen])
            trace.append(cemb.copy())
        level = discovered
        depth += 1

    return SearchResult(
        keywords=keywords,
        graph=graph,
        context_trace=trace,
        seeds=(seed,),
        config=config,
    )


def bmdwgs(
    table: EmbeddingTable,
    vocab: Vocabulary,
    seeds: Sequence[str],
    config: SearchConfig,
) -> SearchResult:
    """Multi-seed search: independent single-seed runs, unioned.

    Keywords keep first-occurrence order across runs (seed-list order, then
    per-run pop order); merged nodes keep the depth/parent from the first
    run that discovered them; edge sets are unioned; context traces are
    concatenated in seed order.
    """
    if not seeds:
        raise ValueError("seeds must be non-empty")
    for seed in seeds:
        if seed not in table:
            raise SeedNotFoundError(f"seed {seed!r} has no embedding")

    merged = WordGraph()
    keywords: list[str] = []
    seen: set[str] = set()
    trace: list[np.ndarray] = []
    for seed in seeds:
        run = bwgs(table, vocab, seed, config)
        for token in run.keywords:
            if token not in seen:
                seen.add(token)
                keywords.append(token)
                merged.nodes[token] = run.graph.nodes[token]
        merged.edges |= run.graph.edges
        trace.extend(run.context_trace)

    return SearchResult(
        keywords=keywords,
        graph=merged,
        context_trace=trace,
        seeds=tuple(seeds),
        config=config,
    )


def _dot_quote(token: str) -> str:
    return '"' + token.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_graph(graph: WordGraph, format: str = "dot") -> str:
    """Deterministic serialization: nodes sorted by token, edges by pair."""
    nodes = sorted(graph.nodes)
    edges = sorted(graph.edges)
    if format == "dot":
        lines = ["digraph wordgraph {"]
        for token in nodes:
            lines.append(f"  {_dot_quote(token)} [depth={graph.nodes[token].depth}];")
        for parent, child in edges:
            lines.append(f"  {_dot_quote(parent)} -> {_dot_quote(child)};")
        lines.append("}")
        return "\n".join(lines) + "\n"
    if format == "json":
        payload = {
            "nodes": [
                {
                    "token": token,
                    "depth": graph.nodes[token].depth,
                    "parent": graph.nodes[token].parent,
                }
                for token in nodes
            ],
            "edges": [{"parent": a, "child": b} for a, b in edges],
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"
    raise ValueError(f"unknown graph export format {format!r}")
