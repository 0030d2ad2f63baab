"""Embedding backends for Token2Vector and Item2Vector.

Two backends share one model format: a skip-gram model trained with
negative sampling (single-threaded SGD, bit-reproducible for a fixed
seed), and a hashed baseline whose rows are a pure function of
(token, dim, seed), useful as a deterministic reference backend.

Model directory layout: vocab.txt (token-per-line with header),
weights.f32 (row-major little-endian float32, vocab_size x dim) and
meta.json with the training configuration.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import CorruptModel, EmptyCorpus, IdOutOfRange, SifkitError
from .items import SifItem
from .rng import SplitMix64, fnv1a64
from .tokenizer import (
    PAD_ID,
    TokenSeq,
    TokenizerConfig,
    Vocab,
    build_vocab,
    encode,
    load_vocab,
    save_vocab,
    tokenize_item,
)

_MIN_LR = 1e-4


@dataclass(frozen=True)
class TrainConfig:
    dim: int = 128
    window: int = 5
    min_count: int = 20
    negatives: int = 5
    epochs: int = 10
    learning_rate: float = 0.025  # linear decay to 1e-4
    seed: int = 0

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if self.window < 1:
            raise ValueError(f"window must be >= 1, got {self.window}")
        if self.negatives < 1:
            raise ValueError(f"negatives must be >= 1, got {self.negatives}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.min_count < 1:
            raise ValueError(f"min_count must be >= 1, got {self.min_count}")


@dataclass(frozen=True)
class EmbeddingModel:
    vocab: Vocab
    matrix: np.ndarray  # (vocab_size, dim) float32
    meta: dict

    def __post_init__(self):
        if self.matrix.shape[0] != len(self.vocab):
            raise CorruptModel(
                f"matrix has {self.matrix.shape[0]} rows, vocab has {len(self.vocab)}")
        if self.matrix.ndim != 2 or self.matrix.shape[1] < 1:
            raise CorruptModel(f"bad matrix shape {self.matrix.shape}")
        if not np.all(np.isfinite(self.matrix)):
            raise CorruptModel("matrix contains non-finite values")

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __eq__(self, other):
        if not isinstance(other, EmbeddingModel):
            return NotImplemented
        return (self.vocab == other.vocab and self.meta == other.meta
                and self.matrix.dtype == other.matrix.dtype
                and np.array_equal(self.matrix, other.matrix))


# --- negative-sampling loss and gradients ----------------------------------------
# Kept as standalone array functions so the analytic gradients can be
# checked against finite differences in float64.

def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))

def pair_loss(center_vec, context_vecs, labels) -> float:
    """Loss of one training pair: -log s(u.v) - sum log s(-u_neg.v)."""
    scores = context_vecs @ center_vec
    signs = np.where(labels, 1.0, -1.0)
    return float(-np.sum(np.log(_sigmoid(signs * scores))))


def pair_grads(center_vec, context_vecs, labels):
    """Analytic gradients of pair_loss w.r.t. the center row and context rows."""
    scores = context_vecs @ center_vec
    g = _sigmoid(scores) - np.where(labels, 1.0, 0.0)  # dL/dscore
    grad_center = g @ context_vecs
    grad_contexts = np.outer(g, center_vec)
    return grad_center, grad_contexts


def _unigram_table(counts: np.ndarray) -> np.ndarray:
    """Cumulative unigram^0.75 distribution for negative sampling."""
    weights = counts.astype(np.float64) ** 0.75
    return np.cumsum(weights)


def train_skipgram(corpus, cfg: TrainConfig = TrainConfig()) -> EmbeddingModel:
    """Skip-gram with negative sampling over token sequences.

    Deterministic for a fixed seed: single-threaded updates, all random
    draws (init, negative sampling) from one splitmix64 stream. Per-epoch
    mean pair losses are recorded in meta["epoch_losses"].
    """
    seqs = [s.tokens if isinstance(s, TokenSeq) else tuple(s) for s in corpus]
    vocab = build_vocab(seqs, cfg.min_count)
    word_ids_start = 4  # specials take 0-3
    n_words = len(vocab) - word_ids_start
    if n_words == 0:
        raise EmptyCorpus(f"no tokens with frequency >= {cfg.min_count}")

    counts = np.zeros(n_words, dtype=np.int64)
    id_seqs = []
    for tokens in seqs:
        ids = [vocab.index[t] for t in tokens if t in vocab.index]
        ids = [i for i in ids if i >= word_ids_start]
        for i in ids:
            counts[i - word_ids_start] += 1
        if len(ids) >= 2:
            id_seqs.append(ids)
    if not id_seqs:
        raise EmptyCorpus("no sequence keeps >= 2 in-vocabulary tokens")

    rng = SplitMix64(cfg.seed)
    dim = cfg.dim
    center = np.zeros((len(vocab), dim), dtype=np.float32)
    for row in range(len(vocab)):
        for col in range(dim):
            center[row, col] = (rng.next_unit() - 0.5) / dim
    context = np.zeros((len(vocab), dim), dtype=np.float32)

    cum = _unigram_table(counts)
    total_weight = cum[-1]

    def draw_negative() -> int:
        r = rng.next_unit() * total_weight
        return int(np.searchsorted(cum, r, side="right")) + word_ids_start

    total_centers = cfg.epochs * sum(len(ids) for ids in id_seqs)
    processed = 0
    lr0 = cfg.learning_rate
    epoch_losses = []
    for _ in range(cfg.epochs):
        loss_sum = 0.0
        pair_count = 0
        for ids in id_seqs:
            for pos, c in enumerate(ids):
                lr = max(_MIN_LR, lr0 * (1.0 - processed / total_centers))
                processed += 1
                lo = max(0, pos - cfg.window)
                hi = min(len(ids), pos + cfg.window + 1)
                v = center[c]
                for j in range(lo, hi):
                    if j == pos:
                        continue
                    o = ids[j]
                    rows = [o]
                    for _ in range(cfg.negatives):
                        neg = draw_negative()
                        if neg != o:
                            rows.append(neg)
                    ctx = context[rows]
                    labels = np.zeros(len(rows), dtype=bool)
                    labels[0] = True
                    loss_sum += pair_loss(v, ctx, labels)
                    pair_count += 1
                    g_center, g_ctx = pair_grads(v, ctx, labels)
                    context[rows] -= lr * g_ctx
                    v = v - lr * g_center
                center[c] = v
        epoch_losses.append(loss_sum / pair_count)

    meta = {
        "algo": "skipgram",
        "dim": cfg.dim,
        "seed": cfg.seed,
        "window": cfg.window,
        "negatives": cfg.negatives,
        "epochs": cfg.epochs,
        "learning_rate": cfg.learning_rate,
        "min_count": cfg.min_count,
        "vocab_size": len(vocab),
        "epoch_losses": epoch_losses,
    }
    return EmbeddingModel(vocab, center, meta)


def hashed_baseline(vocab: Vocab, dim: int, seed: int = 0) -> EmbeddingModel:
    """Deterministic embedding rows: splitmix64 stream keyed by token hash.

    Row for token t is dim draws from SplitMix64(fnv1a64(t) XOR seed),
    each mapped to uniform [-0.5/dim, 0.5/dim); bit-exact across runs and
    platforms.
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    matrix = np.zeros((len(vocab), dim), dtype=np.float32)
    for row, token in enumerate(vocab.tokens):
        rng = SplitMix64(fnv1a64(token) ^ (seed & (2**64 - 1)))
        for col in range(dim):
            matrix[row, col] = (rng.next_unit() - 0.5) / dim
    meta = {
        "algo": "hashed",
        "dim": dim,
        "seed": seed,
        "window": None,
        "negatives": None,
        "epochs": None,
        "learning_rate": None,
        "min_count": vocab.min_count,
        "vocab_size": len(vocab),
    }
    return EmbeddingModel(vocab, matrix, meta)


# --- vector interfaces --------------------------------------------------------------

def t2v(model: EmbeddingModel, seq) -> np.ndarray:
    """One row per token id; shape (len(seq), dim) float32."""
    if isinstance(seq, TokenSeq):
        if seq.ids is None:
            raise ValueError("t2v requires an encoded sequence")
        ids = seq.ids
    else:
        ids = tuple(seq)
    if not ids:
        return np.zeros((0, model.dim), dtype=model.matrix.dtype)
    arr = np.asarray(ids, dtype=np.int64)
    if arr.min() < 0 or arr.max() >= len(model.vocab):
        bad = arr[(arr < 0) | (arr >= len(model.vocab))][0]
        raise IdOutOfRange(f"id {bad} outside [0, {len(model.vocab)})")
    return model.matrix[arr]


def i2v(model: EmbeddingModel, item: SifItem,
        cfg: TokenizerConfig = TokenizerConfig()) -> np.ndarray:
    """Mean of the item's token vectors (non-PAD); zero vector when empty."""
    seq = encode(tokenize_item(item, cfg), model.vocab)
    ids = tuple(i for i in seq.ids if i != PAD_ID)
    if not ids:
        return np.zeros(model.dim, dtype=np.float64)
    rows = t2v(model, ids)
    return rows.mean(axis=0, dtype=np.float64)


# --- persistence ----------------------------------------------------------------------

def save_model(model: EmbeddingModel, model_dir):
    out = Path(model_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_vocab(model.vocab, out / "vocab.txt")
    weights = np.ascontiguousarray(model.matrix, dtype="<f4")
    (out / "weights.f32").write_bytes(weights.tobytes())
    (out / "meta.json").write_text(
        json.dumps(model.meta, ensure_ascii=False, indent=2), encoding="utf-8")


def load_model(model_dir) -> EmbeddingModel:
    src = Path(model_dir)
    for name in ("vocab.txt", "weights.f32", "meta.json"):
        if not (src / name).is_file():
            raise CorruptModel(f"model directory {src} is missing {name}")
    vocab = load_vocab(src / "vocab.txt")
    meta = json.loads((src / "meta.json").read_text(encoding="utf-8"))
    dim = meta.get("dim")
    vocab_size = meta.get("vocab_size")
    if not isinstance(dim, int) or dim < 1:
        raise CorruptModel(f"meta.json has invalid dim {dim!r}")
    if vocab_size != len(vocab):
        raise CorruptModel(
            f"meta.json says vocab_size={vocab_size}, vocab.txt has {len(vocab)}")
    raw = (src / "weights.f32").read_bytes()
    expected = len(vocab) * dim * 4
    if len(raw) != expected:
        raise CorruptModel(
            f"weights.f32 holds {len(raw)} bytes, expected {expected} "
            f"({len(vocab)} x {dim} float32)")
    matrix = np.frombuffer(raw, dtype="<f4").reshape(len(vocab), dim).copy()
    return EmbeddingModel(vocab, matrix, meta)
