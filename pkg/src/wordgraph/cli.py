"""Command-line pipeline: seed texts -> search -> retrieval -> topics -> eval.

One JSON run-config file drives every stage; individual flags override
config values. Outputs are deterministic: rerunning an unchanged config
reproduces every file byte for byte.
"""

import argparse
import hashlib
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .corpus import Corpus, CorpusFormatError, ingest, select_seed_texts, vocabulary
from .embeddings import EmbeddingParseError, load_embeddings
from .evaluate import EvalReport, confusion
from .evaluate import project_gold as _project_gold
from .lda import LdaConfig, fit_lda, topic_report
from .retrieval import result_summary, result_to_jsonl, retrieve
from .search import SearchConfig, SeedNotFoundError, bmdwgs, bwgs, export_graph

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_DATA_ERROR = 3
EXIT_SEARCH_ERROR = 4


class ConfigError(ValueError):
    """Bad or incomplete run configuration."""


class DataError(ValueError):
    """Inputs were readable as files but unusable as data."""


@dataclass
class RunConfig:
    embeddings_path: Optional[str] = None
    corpus_path: Optional[str] = None
    tokenizer: str = "simple"
    wordpiece_vocab: Optional[str] = None
    seed_words: list[str] = field(default_factory=list)
    search: SearchConfig = field(
        default_factory=lambda: SearchConfig(
            min_sim_thresh=0.4, max_depth=2, top_k=4, context_mix=0.5
        )
    )
    seed_text_count: int = 50
    shuffle_seed: Optional[int] = None
    lda: LdaConfig = field(default_factory=lambda: LdaConfig(num_topics=25))
    lda_min_token_freq: int = 5
    lda_stoplist: Optional[str] = None
    lda_trace_every: int = 0
    eval_targets: list[str] = field(default_factory=list)
    output_dir: str = "out"
    corpus_format: Optional[str] = None
    embeddings_format: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "embeddings_path": self.embeddings_path,
            "corpus_path": self.corpus_path,
            "tokenizer": self.tokenizer,
            "wordpiece_vocab": self.wordpiece_vocab,
            "seed_words": list(self.seed_words),
            "search": self.search.to_dict(),
            "seed_text_count": self.seed_text_count,
            "shuffle_seed": self.shuffle_seed,
            "lda": {
                **self.lda.to_dict(),
                "min_token_freq": self.lda_min_token_freq,
                "stoplist": self.lda_stoplist,
                "trace_every": self.lda_trace_every,
            },
            "eval_targets": list(self.eval_targets),
            "output_dir": self.output_dir,
            "corpus_format": self.resolved_corpus_format(),
            "embeddings_format": self.resolved_embeddings_format(),
        }

    def resolved_corpus_format(self) -> Optional[str]:
        if self.corpus_format:
            return self.corpus_format
        if self.corpus_path is None:
            return None
        suffix = Path(self.corpus_path).suffix
        return {"jsonl": "jsonl", "csv": "csv"}.get(suffix.lstrip("."), "plain-lines")

    def resolved_embeddings_format(self) -> Optional[str]:
        if self.embeddings_format:
            return self.embeddings_format
        if self.embeddings_path is None:
            return None
        return "jsonl" if self.embeddings_path.endswith(".jsonl") else "vec-text"


def _build_config(file_values: dict, overrides: dict) -> RunConfig:
    merged = dict(file_values)
    for key, value in overrides.items():
        if value is not None:
            merged[key] = value

    search_values = {
        "min_sim_thresh": 0.4,
        "max_depth": 2,
        "top_k": 4,
        "context_mix": 0.5,
    }
    search_values.update(file_values.get("search", {}))
    for cfg_key, ov_key in [
        ("min_sim_thresh", "threshold"),
        ("max_depth", "max_depth"),
        ("top_k", "top_k"),
        ("context_mix", "context_mix"),
    ]:
        if overrides.get(ov_key) is not None:
            search_values[cfg_key] = overrides[ov_key]

    lda_values = {"num_topics": 25, "alpha": None, "beta": 0.01, "sweeps": 1000, "rng_seed": 0}
    lda_extra = {"min_token_freq": 5, "stoplist": None, "trace_every": 0}
    for key, value in file_values.get("lda", {}).items():
        if key in lda_extra:
            lda_extra[key] = value
        else:
            lda_values[key] = value
    for cfg_key, ov_key in [("num_topics", "num_topics"), ("sweeps", "sweeps"), ("rng_seed", "rng_seed")]:
        if overrides.get(ov_key) is not None:
            lda_values[cfg_key] = overrides[ov_key]

    if int(merged.get("seed_text_count", 50)) < 1:
        raise ConfigError("seed_text_count must be >= 1")
    try:
        return RunConfig(
            embeddings_path=merged.get("embeddings_path"),
            corpus_path=merged.get("corpus_path"),
            tokenizer=merged.get("tokenizer", "simple"),
            wordpiece_vocab=merged.get("wordpiece_vocab"),
            seed_words=list(merged.get("seed_words", [])),
            search=SearchConfig(**search_values),
            seed_text_count=int(merged.get("seed_text_count", 50)),
            shuffle_seed=merged.get("shuffle_seed"),
            lda=LdaConfig(**lda_values),
            lda_min_token_freq=int(lda_extra["min_token_freq"]),
            lda_stoplist=lda_extra["stoplist"],
            lda_trace_every=int(lda_extra["trace_every"]),
            eval_targets=list(merged.get("eval_targets", [])),
            output_dir=merged.get("output_dir", "out"),
            corpus_format=merged.get("corpus_format"),
            embeddings_format=merged.get("embeddings_format"),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc))


def load_run_config(config_path: Optional[str], overrides: dict) -> RunConfig:
    file_values: dict = {}
    if config_path is not None:
        try:
            with open(config_path, encoding="utf-8") as fh:
                file_values = json.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {config_path}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid json: {exc}")
        if not isinstance(file_values, dict):
            raise ConfigError("config file must hold a json object")
    return _build_config(file_values, overrides)


def _sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _write_text(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="\n")


def _require(cfg: RunConfig, *fields_needed: str):
    for name in fields_needed:
        if not getattr(cfg, name):
            raise ConfigError(f"missing required config field: {name}")


def _load_corpus(cfg: RunConfig) -> Corpus:
    try:
        return ingest(
            cfg.corpus_path,
            format=cfg.resolved_corpus_format(),
            tokenizer=cfg.tokenizer,
            wordpiece_vocab_path=cfg.wordpiece_vocab,
        )
    except FileNotFoundError:
        raise DataError(f"corpus file not found: {cfg.corpus_path}")


def _load_table(cfg: RunConfig):
    try:
        return load_embeddings(cfg.embeddings_path, format=cfg.resolved_embeddings_format())
    except FileNotFoundError:
        raise DataError(f"embeddings file not found: {cfg.embeddings_path}")


def _input_hashes(cfg: RunConfig, **extra_paths) -> dict:
    hashes = {}
    if cfg.embeddings_path:
        hashes["embeddings"] = _sha256(cfg.embeddings_path)
    if cfg.corpus_path:
        hashes["corpus"] = _sha256(cfg.corpus_path)
    for name, path in extra_paths.items():
        if path is not None:
            hashes[name] = _sha256(path)
    return hashes


def cmd_expand(cfg: RunConfig) -> dict:
    """Run the graph search and write keywords.json + graph.dot."""
    _require(cfg, "embeddings_path", "corpus_path", "seed_words", "output_dir")
    table = _load_table(cfg)
    corpus = _load_corpus(cfg)
    mode = "all" if len(cfg.seed_words) > 1 else "any"
    seed_texts = select_seed_texts(
        corpus,
        cfg.seed_words,
        n=cfg.seed_text_count,
        mode=mode,
        shuffle_seed=cfg.shuffle_seed,
    )
    vocab = vocabulary(seed_texts)
    if len(cfg.seed_words) == 1:
        result = bwgs(table, vocab, cfg.seed_words[0], cfg.search)
    else:
        result = bmdwgs(table, vocab, cfg.seed_words, cfg.search)

    out = Path(cfg.output_dir)
    inputs = _input_hashes(cfg)
    # the search report carries its own "config" (the search parameters);
    # the full run config is embedded under a distinct key
    report = {"run_config": cfg.to_dict(), "inputs": inputs, **result.to_report()}
    keywords_path = out / "keywords.json"
    _write_text(keywords_path, _canonical_json(report))

    header = (
        f"// config: {json.dumps(cfg.to_dict(), sort_keys=True)}\n"
        f"// inputs: {json.dumps(inputs, sort_keys=True)}\n"
    )
    graph_path = out / "graph.dot"
    _write_text(graph_path, header + export_graph(result.graph, format="dot"))
    return {"keywords": str(keywords_path), "graph": str(graph_path)}


def _read_keywords_file(path) -> list[str]:
    try:
        with open(path, encoding="utf-8") as fh:
            report = json.load(fh)
    except FileNotFoundError:
        raise DataError(f"keywords file not found: {path}")
    except json.JSONDecodeError:
        raise DataError(f"keywords file is not valid json: {path}")
    try:
        return [entry["token"] for entry in report["keywords"]]
    except (KeyError, TypeError):
        raise DataError(f"keywords file has no keywords list: {path}")


def cmd_retrieve(cfg: RunConfig, keywords_file) -> dict:
    """Classify the corpus against a keyword list; write jsonl + summary."""
    _require(cfg, "corpus_path", "output_dir")
    corpus = _load_corpus(cfg)
    keywords = _read_keywords_file(keywords_file)
    result = retrieve(corpus, keywords)

    out = Path(cfg.output_dir)
    retrieved_path = out / "retrieved.jsonl"
    _write_text(retrieved_path, result_to_jsonl(result))
    summary = {
        "run_config": cfg.to_dict(),
        "inputs": _input_hashes(cfg, keywords=keywords_file),
        **result_summary(result),
    }
    summary_path = out / "retrieval_summary.json"
    _write_text(summary_path, _canonical_json(summary))
    return {"retrieved": str(retrieved_path), "summary": str(summary_path)}


def _read_positive_ids(path) -> list[str]:
    try:
        with open(path, encoding="utf-8") as fh:
            return [json.loads(line)["id"] for line in fh if line.strip()]
    except FileNotFoundError:
        raise DataError(f"retrieval file not found: {path}")
    except (json.JSONDecodeError, KeyError):
        raise DataError(f"retrieval file is not id/matched jsonl: {path}")


def cmd_topics(cfg: RunConfig, retrieval_file) -> dict:
    """Fit LDA on the retrieved documents; write topics.json."""
    _require(cfg, "corpus_path", "output_dir")
    corpus = _load_corpus(cfg)
    positive = set(_read_positive_ids(retrieval_file))
    subset = Corpus(
        [doc for doc in corpus if doc.id in positive],
        tokenizer_id=corpus.tokenizer_id,
    )
    if len(subset) == 0:
        raise DataError("empty corpus for LDA: retrieval returned no documents")

    stoplist = None
    if cfg.lda_stoplist:
        try:
            with open(cfg.lda_stoplist, encoding="utf-8") as fh:
                stoplist = frozenset(line.strip() for line in fh if line.strip())
        except FileNotFoundError:
            raise DataError(f"stoplist file not found: {cfg.lda_stoplist}")
    trace_every = cfg.lda_trace_every or max(1, cfg.lda.sweeps // 10)
    try:
        model = fit_lda(
            subset,
            cfg.lda,
            stoplist=stoplist,
            min_token_freq=cfg.lda_min_token_freq,
            trace_every=trace_every,
        )
    except ValueError as exc:
        raise DataError(str(exc))

    # topic_report carries its own "config" (the LDA parameters)
    report = {
        "run_config": cfg.to_dict(),
        "inputs": _input_hashes(cfg, retrieval=retrieval_file),
        "seed_words": list(cfg.seed_words),
        "n_documents": len(subset),
        **topic_report(model),
    }
    topics_path = Path(cfg.output_dir) / "topics.json"
    _write_text(topics_path, _canonical_json(report))
    return {"topics": str(topics_path)}


def cmd_eval(cfg: RunConfig, retrieval_file) -> dict:
    """Score retrieval positives against projected gold labels."""
    _require(cfg, "corpus_path", "output_dir")
    if not cfg.eval_targets:
        raise ConfigError("eval requires non-empty eval_targets")
    corpus = _load_corpus(cfg)
    predicted = _read_positive_ids(retrieval_file)
    gold = _project_gold(corpus, cfg.eval_targets)
    counts = confusion(predicted, gold, corpus.ids())
    echo = {
        "seed_words": list(cfg.seed_words),
        "min_sim_thresh": cfg.search.min_sim_thresh,
        "max_depth": cfg.search.max_depth,
        "top_k": cfg.search.top_k,
        "eval_targets": sorted(cfg.eval_targets),
    }
    report = EvalReport.from_counts(counts, config_echo=echo)

    out = Path(cfg.output_dir)
    payload = {
        "run_config": cfg.to_dict(),
        "inputs": _input_hashes(cfg, retrieval=retrieval_file),
        **report.to_dict(),
    }
    eval_path = out / "eval.json"
    _write_text(eval_path, _canonical_json(payload))
    table_path = out / "eval.txt"
    table_meta = (
        f"# config: {json.dumps(cfg.to_dict(), sort_keys=True)}\n"
        f"# inputs: {json.dumps(payload['inputs'], sort_keys=True)}\n"
    )
    _write_text(table_path, report.to_table() + table_meta)
    return {"report": str(eval_path), "table": str(table_path)}


def cmd_pipeline(cfg: RunConfig) -> dict:
    """expand -> retrieve -> topics (+ eval when labels exist), plus manifest."""
    out = Path(cfg.output_dir)
    stages = {}
    notices = []

    expand_files = cmd_expand(cfg)
    stages["expand"] = expand_files
    retrieve_files = cmd_retrieve(cfg, expand_files["keywords"])
    stages["retrieve"] = retrieve_files
    topics_files = cmd_topics(cfg, retrieve_files["retrieved"])
    stages["topics"] = topics_files

    corpus = _load_corpus(cfg)
    has_labels = any(doc.gold_labels for doc in corpus)
    if cfg.eval_targets and has_labels:
        stages["eval"] = cmd_eval(cfg, retrieve_files["retrieved"])
    elif not has_labels:
        notices.append("eval skipped: corpus has no gold labels")
    else:
        notices.append("eval skipped: no eval_targets configured")

    rel_stages = {
        stage: {name: str(Path(p).name) for name, p in files.items()}
        for stage, files in stages.items()
    }
    output_hashes = {
        str(Path(p).name): _sha256(p) for files in stages.values() for p in files.values()
    }
    manifest = {
        "run_config": cfg.to_dict(),
        "inputs": _input_hashes(cfg),
        "stages": rel_stages,
        "output_hashes": output_hashes,
        "notices": notices,
    }
    manifest_path = out / "manifest.json"
    _write_text(manifest_path, _canonical_json(manifest))
    result = {stage: files for stage, files in stages.items()}
    result["manifest"] = {"manifest": str(manifest_path)}
    return result


def _parse_int(value) -> Optional[int]:
    return None if value is None else int(value)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wordgraph",
        description="Weakly-supervised keyword expansion, retrieval, topics, and evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("expand", "retrieve", "topics", "eval", "pipeline"):
        p = sub.add_parser(name)
        p.add_argument("--config", help="json run-config file")
        p.add_argument("--embeddings", help="embedding table path")
        p.add_argument("--corpus", help="corpus path")
        p.add_argument("--seeds", help="comma-separated seed words")
        p.add_argument("--threshold", type=float, help="minimum cosine similarity")
        p.add_argument("--max-depth", type=int, dest="max_depth")
        p.add_argument("--top-k", type=int, dest="top_k")
        p.add_argument("--context-mix", type=float, dest="context_mix")
        p.add_argument("--num-topics", type=int, dest="num_topics")
        p.add_argument("--sweeps", type=int)
        p.add_argument("--rng-seed", type=int, dest="rng_seed")
        p.add_argument("--tokenizer", choices=["simple", "wordpiece"])
        p.add_argument("--wordpiece-vocab", dest="wordpiece_vocab")
        p.add_argument("--seed-text-count", type=int, dest="seed_text_count")
        p.add_argument("--shuffle-seed", type=int, dest="shuffle_seed")
        p.add_argument("--eval-targets", dest="eval_targets", help="comma-separated labels")
        p.add_argument("--out", help="output directory")
        if name == "retrieve":
            p.add_argument("--keywords", help="keywords.json from expand")
        if name in ("topics", "eval"):
            p.add_argument("--retrieval", help="retrieved.jsonl from retrieve")
    return parser


def _overrides_from_args(args: argparse.Namespace) -> dict:
    return {
        "embeddings_path": args.embeddings,
        "corpus_path": args.corpus,
        "seed_words": args.seeds.split(",") if args.seeds else None,
        "threshold": args.threshold,
        "max_depth": args.max_depth,
        "top_k": args.top_k,
        "context_mix": args.context_mix,
        "num_topics": args.num_topics,
        "sweeps": args.sweeps,
        "rng_seed": args.rng_seed,
        "tokenizer": args.tokenizer,
        "wordpiece_vocab": args.wordpiece_vocab,
        "seed_text_count": args.seed_text_count,
        "shuffle_seed": args.shuffle_seed,
        "eval_targets": args.eval_targets.split(",") if args.eval_targets else None,
        "output_dir": args.out,
    }


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        cfg = load_run_config(args.config, _overrides_from_args(args))
        if args.command == "expand":
            files = cmd_expand(cfg)
        elif args.command == "retrieve":
            keywords_file = args.keywords or str(Path(cfg.output_dir) / "keywords.json")
            files = cmd_retrieve(cfg, keywords_file)
        elif args.command == "topics":
            retrieval_file = args.retrieval or str(Path(cfg.output_dir) / "retrieved.jsonl")
            files = cmd_topics(cfg, retrieval_file)
        elif args.command == "eval":
            retrieval_file = args.retrieval or str(Path(cfg.output_dir) / "retrieved.jsonl")
            files = cmd_eval(cfg, retrieval_file)
        else:
            nested = cmd_pipeline(cfg)
            files = {f"{stage}.{name}": p for stage, fs in nested.items() for name, p in fs.items()}
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except SeedNotFoundError as exc:
        print(f"search error: {exc}", file=sys.stderr)
        return EXIT_SEARCH_ERROR
    except (CorpusFormatError, EmbeddingParseError, DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA_ERROR
    for name, path in files.items():
        print(f"{name}: {path}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
