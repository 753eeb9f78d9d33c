"""Retrieval scoring (precision/recall/F1) and the bag-of-words logistic
regression baseline with minority upsampling."""

import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .corpus import Corpus, Document

logger = logging.getLogger(__name__)

DEFAULT_HYPER = {"epochs": 100, "learning_rate": 0.1, "l2": 1e-4, "seed": 0}


class TrainingDivergedError(RuntimeError):
    """Loss became non-finite during gradient descent."""


@dataclass
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


def confusion(
    predicted_positive_ids: Iterable[str],
    gold_positive_ids: Iterable[str],
    all_ids: Iterable[str],
) -> ConfusionCounts:
    predicted = set(predicted_positive_ids)
    gold = set(gold_positive_ids)
    universe = set(all_ids)
    stray = (predicted | gold) - universe
    if stray:
        raise ValueError(f"ids outside the evaluated universe: {sorted(stray)[:5]}")
    tp = len(predicted & gold)
    fp = len(predicted - gold)
    fn = len(gold - predicted)
    tn = len(universe) - tp - fp - fn
    return ConfusionCounts(tp=tp, fp=fp, fn=fn, tn=tn)


def f1_from_pr(precision: float, recall: float) -> float:
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def prf(counts: ConfusionCounts) -> tuple[float, float, float]:
    """(precision, recall, f1); zero denominators score 0."""
    p = counts.tp / (counts.tp + counts.fp) if counts.tp + counts.fp else 0.0
    r = counts.tp / (counts.tp + counts.fn) if counts.tp + counts.fn else 0.0
    return p, r, f1_from_pr(p, r)


@dataclass
class EvalReport:
    precision: float
    recall: float
    f1: float
    counts: ConfusionCounts
    config_echo: dict = field(default_factory=dict)

    @classmethod
    def from_counts(cls, counts: ConfusionCounts, config_echo=None) -> "EvalReport":
        p, r, f1 = prf(counts)
        return cls(precision=p, recall=r, f1=f1, counts=counts, config_echo=config_echo or {})

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "counts": {
                "tp": self.counts.tp,
                "fp": self.counts.fp,
                "fn": self.counts.fn,
                "tn": self.counts.tn,
            },
            "config_echo": self.config_echo,
        }

    def to_table(self) -> str:
        """Aligned text row: seed words, threshold, max depth, top k, P, R, F1."""
        echo = self.config_echo
        seeds = ",".join(echo.get("seed_words", [])) or "-"
        headers = ["seed words", "threshold", "max depth", "top k", "P", "R", "F1"]
        row = [
            seeds,
            _fmt(echo.get("min_sim_thresh")),
            _fmt(echo.get("max_depth")),
            _fmt(echo.get("top_k")),
            f"{self.precision:.3f}",
            f"{self.recall:.3f}",
            f"{self.f1:.3f}",
        ]
        widths = [max(len(h), len(v)) for h, v in zip(headers, row)]
        head = "  ".join(h.ljust(w) for h, w in zip(headers, widths))
        body = "  ".join(v.ljust(w) for v, w in zip(row, widths))
        return head + "\n" + body + "\n"


def _fmt(value) -> str:
    return "-" if value is None else str(value)


def project_gold(corpus: Corpus, target_labels: Iterable[str]) -> set[str]:
    """Ids of documents whose gold labels intersect the target set."""
    targets = set(target_labels)
    if not targets:
        raise ValueError("target_labels must be non-empty")
    return {doc.id for doc in corpus if doc.gold_labels & targets}


def upsample(corpus: Corpus, gold_positive_ids: Iterable[str], seed: int) -> Corpus:
    """Duplicate minority-class documents (with replacement, seeded) until
    the classes balance; duplicate ids get a '#up<i>' suffix."""
    gold = set(gold_positive_ids)
    positives = [d for d in corpus if d.id in gold]
    negatives = [d for d in corpus if d.id not in gold]
    if not positives or not negatives:
        raise ValueError("both classes must be non-empty to upsample")

    minority, majority = (positives, negatives) if len(positives) < len(negatives) else (
        negatives,
        positives,
    )
    deficit = len(majority) - len(minority)
    rng = np.random.default_rng(seed)
    documents = list(corpus.documents)
    for i in range(deficit):
        src = minority[int(rng.integers(0, len(minority)))]
        documents.append(
            Document(
                id=f"{src.id}#up{i}",
                text=src.text,
                tokens=list(src.tokens),
                gold_labels=set(src.gold_labels),
            )
        )
    return Corpus(documents, tokenizer_id=corpus.tokenizer_id)


@dataclass
class BowLogRegModel:
    vocab_index: dict[str, int]
    weights: np.ndarray
    bias: float
    training_meta: dict = field(default_factory=dict)


def _features(documents: Sequence[Document], vocab_index: dict[str, int]) -> np.ndarray:
    x = np.zeros((len(documents), len(vocab_index)))
    for row, doc in enumerate(documents):
        for token in doc.token_set():
            col = vocab_index.get(token)
            if col is not None:
                x[row, col] = 1.0
    return x


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _loss_and_grad(x, y, weights, bias, l2):
    """Mean sigmoid cross-entropy + (l2/2)|w|^2, with analytic gradient."""
    z = x @ weights + bias
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * l2 * np.dot(weights, weights))
    residual = _sigmoid(z) - y
    grad_w = x.T @ residual / x.shape[0] + l2 * weights
    grad_b = float(residual.mean())
    return loss, grad_w, grad_b


def train_bow_logreg(
    corpus: Corpus,
    gold_positive_ids: Iterable[str],
    hyper: Optional[dict] = None,
) -> BowLogRegModel:
    """Full-batch gradient descent on binary presence features.

    Weights start at zero, so zero epochs predict probability 0.5
    everywhere. Deterministic for a given corpus and hyperparameters.
    """
    params = dict(DEFAULT_HYPER)
    params.update(hyper or {})
    gold = set(gold_positive_ids)
    y = np.array([1.0 if d.id in gold else 0.0 for d in corpus])
    if len(set(y.tolist())) < 2:
        raise ValueError("training requires both classes present")

    vocab_index = {t: i for i, t in enumerate(sorted({t for d in corpus for t in d.tokens}))}
    x = _features(corpus.documents, vocab_index)
    weights = np.zeros(len(vocab_index))
    bias = 0.0
    lr = params["learning_rate"]
    l2 = params["l2"]
    for epoch in range(params["epochs"]):
        loss, grad_w, grad_b = _loss_and_grad(x, y, weights, bias, l2)
        if not np.isfinite(loss):
            raise TrainingDivergedError(f"non-finite loss at epoch {epoch}")
        weights -= lr * grad_w
        bias -= lr * grad_b
    return BowLogRegModel(
        vocab_index=vocab_index,
        weights=weights,
        bias=bias,
        training_meta={
            "epochs": params["epochs"],
            "learning_rate": lr,
            "l2": l2,
            "upsample_seed": params["seed"],
        },
    )


def predict_proba_bow_logreg(model: BowLogRegModel, doc: Document) -> float:
    z = model.bias
    for token in doc.token_set():
        col = model.vocab_index.get(token)
        if col is not None:
            z += model.weights[col]
    return float(_sigmoid(np.array([z]))[0])


def predict_bow_logreg(model: BowLogRegModel, doc: Document) -> bool:
    """Positive iff sigmoid(w.x + b) exceeds 0.5 strictly; OOV tokens are
    ignored, so an all-OOV document behaves like an empty one."""
    return predict_proba_bow_logreg(model, doc) > 0.5
