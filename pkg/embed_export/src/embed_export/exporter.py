"""Per-token embedding export from a masked language model.

For every token type occurring in the corpus, the exported vector is the
mean, over all of that type's occurrences, of the sum of the last N
hidden-state layers at the occurrence's position. Output is the plain
`vec-text` interchange format (`<count> <dim>` header, one token + vector
per line) plus a sidecar `.meta.json` describing the run.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import torch

logger = logging.getLogger(__name__)

STRUCTURAL_SPECIALS = ("cls_token", "sep_token", "pad_token", "mask_token")


class ExportError(RuntimeError):
    """Export cannot produce a valid embedding table."""


@dataclass
class ExportConfig:
    corpus_path: str
    model_name_or_path: str
    output_path: str
    fine_tune: bool = False
    epochs: int = 5
    learning_rate: float = 1e-5
    batch_size: int = 8
    max_seq_len: int = 128
    layers_to_sum: int = 4
    corpus_format: Optional[str] = None  # inferred from suffix when None

    def __post_init__(self):
        if self.epochs < 1 or self.batch_size < 1 or self.max_seq_len < 2:
            raise ValueError("epochs, batch_size, max_seq_len must be positive")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.layers_to_sum < 1:
            raise ValueError("layers_to_sum must be positive")

    def resolved_format(self) -> str:
        if self.corpus_format:
            return self.corpus_format
        return "jsonl" if self.corpus_path.endswith(".jsonl") else "plain-lines"


def load_texts(path, format: str) -> list[str]:
    texts = []
    with open(path, encoding="utf-8") as fh:
        if format == "jsonl":
            for i, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError:
                    raise ExportError(f"invalid json at line {i} of {path}")
                if "text" not in obj:
                    raise ExportError(f"missing 'text' field at line {i} of {path}")
                texts.append(str(obj["text"]))
        elif format == "plain-lines":
            texts = [line.rstrip("\n") for line in fh]
        else:
            raise ExportError(f"unknown corpus format {format!r}")
    return [t for t in texts if t.strip()]


def _load_model(config: ExportConfig):
    from transformers import AutoModelForMaskedLM, AutoTokenizer

    try:
        tokenizer = AutoTokenizer.from_pretrained(config.model_name_or_path)
        model = AutoModelForMaskedLM.from_pretrained(config.model_name_or_path)
    except Exception as exc:
        raise ExportError(f"cannot load model {config.model_name_or_path!r}: {exc}")
    depth = model.config.num_hidden_layers
    if config.layers_to_sum > depth:
        raise ExportError(
            f"layers_to_sum={config.layers_to_sum} exceeds model depth {depth}"
        )
    return tokenizer, model


def fine_tune_mlm(model, tokenizer, texts, config: ExportConfig):
    """Masked-language-model fine-tuning on the corpus, in place."""
    from transformers import DataCollatorForLanguageModeling

    torch.manual_seed(0)
    collator = DataCollatorForLanguageModeling(tokenizer=tokenizer, mlm_probability=0.15)
    encodings = tokenizer(texts, truncation=True, max_length=config.max_seq_len)
    dataset = [{"input_ids": ids} for ids in encodings["input_ids"]]
    loader = torch.utils.data.DataLoader(
        dataset,
        batch_size=config.batch_size,
        shuffle=True,
        collate_fn=collator,
        generator=torch.Generator().manual_seed(0),
    )
    optimizer = torch.optim.AdamW(model.parameters(), lr=config.learning_rate)
    model.train()
    for epoch in range(config.epochs):
        total = 0.0
        for batch in loader:
            optimizer.zero_grad()
            loss = model(**batch).loss
            loss.backward()
            optimizer.step()
            total += float(loss.detach())
        logger.info("fine-tune epoch %d/%d loss %.4f", epoch + 1, config.epochs, total)
    model.eval()


def _corpus_token_types(tokenizer, texts) -> set[str]:
    types: set[str] = set()
    for text in texts:
        types.update(tokenizer.tokenize(text))
    return types


def export_embeddings(config: ExportConfig) -> str:
    """Run the export; returns the written vec-text path."""
    texts = load_texts(config.corpus_path, config.resolved_format())
    if not texts:
        raise ExportError("empty corpus")
    tokenizer, model = _load_model(config)
    if config.fine_tune:
        fine_tune_mlm(model, tokenizer, texts, config)

    types = _corpus_token_types(tokenizer, texts)
    skip = {
        getattr(tokenizer, name)
        for name in STRUCTURAL_SPECIALS
        if getattr(tokenizer, name, None) is not None
    }

    dim = model.config.hidden_size
    sums: dict[str, np.ndarray] = {}
    counts: dict[str, int] = {}
    model.eval()
    with torch.no_grad():
        for start in range(0, len(texts), config.batch_size):
            batch = texts[start : start + config.batch_size]
            enc = tokenizer(
                batch,
                padding=True,
                truncation=True,
                max_length=config.max_seq_len,
                return_tensors="pt",
            )
            out = model(**enc, output_hidden_states=True)
            summed = torch.stack(out.hidden_states[-config.layers_to_sum :]).sum(dim=0)
            for row in range(len(batch)):
                ids = enc["input_ids"][row]
                mask = enc["attention_mask"][row]
                tokens = tokenizer.convert_ids_to_tokens(ids)
                for pos, token in enumerate(tokens):
                    if not mask[pos] or token in skip:
                        continue
                    vec = summed[row, pos].numpy().astype(np.float64)
                    if token in sums:
                        sums[token] += vec
                        counts[token] += 1
                    else:
                        sums[token] = vec
                        counts[token] = 1

    missing = sorted(types - set(sums))
    if missing:
        raise ExportError(
            f"token {missing[0]!r} has zero occurrences after truncation "
            f"({len(missing)} affected)"
        )

    out_path = Path(config.output_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    ordered = sorted(types)
    lines = [f"{len(ordered)} {dim}"]
    for token in ordered:
        vec = sums[token] / counts[token]
        if not np.isfinite(vec).all():
            raise ExportError(f"non-finite embedding for token {token!r}")
        lines.append(token + " " + " ".join(repr(float(x)) for x in vec))
    out_path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")

    meta = {
        "model": config.model_name_or_path,
        "pooling": "mean over occurrences of the summed hidden states",
        "layers_summed": config.layers_to_sum,
        "fine_tuned": config.fine_tune,
        "epochs": config.epochs if config.fine_tune else 0,
        "learning_rate": config.learning_rate,
        "batch_size": config.batch_size,
        "max_seq_len": config.max_seq_len,
        "n_texts": len(texts),
        "n_tokens": len(ordered),
        "dim": dim,
    }
    Path(str(out_path) + ".meta.json").write_text(
        json.dumps(meta, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    logger.info("wrote %d vectors (dim %d) to %s", len(ordered), dim, out_path)
    return str(out_path)
