"""Corpus streaming, dataset materialization, batching, figure resolution.

build_dataset distributes pure per-item tokenization over a worker pool
with an order-preserving merge, so its output is identical for any worker
count. Batch shuffling is Fisher-Yates over the toolkit PRNG, making the
epoch order a pure function of (seed, item count).
"""

from __future__ import annotations

import base64
import binascii
import json
import os
from dataclasses import dataclass
from pathlib import Path

from .errors import (
    BadBase64,
    DatasetBuildError,
    EmptyDataset,
    MalformedJson,
    MissingAsset,
    MissingContent,
    RangeViolation,
    SifkitError,
)
from .items import Segment, SegmentKind, SifItem, item_to_record, parse_record
from .rng import SplitMix64, fisher_yates
from .tokenizer import (
    PAD_ID,
    Batch,
    TokenSeq,
    TokenizerConfig,
    Vocab,
    collate,
    encode,
    load_vocab,
    save_vocab,
    tokenize_item,
)

ASSET_DIR_ENV = "SIFKIT_ASSET_DIR"


class JsonlReader:
    """Iterates SifItems from a JSONL file, in file order; blank lines skip.

    Fail-fast by default: a malformed line raises MalformedJson with its
    line number. With skip_bad=True bad lines are counted in ``rejected``
    instead.
    """

    def __init__(self, path, skip_bad: bool = False):
        self.path = Path(path)
        self.skip_bad = skip_bad
        self.rejected = 0

    def __iter__(self):
        with open(self.path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    yield parse_record(line)
                except (MalformedJson, MissingContent, RangeViolation) as exc:
                    if self.skip_bad:
                        self.rejected += 1
                        continue
                    raise MalformedJson(str(exc), line=lineno) from exc


def read_jsonl(path, skip_bad: bool = False) -> JsonlReader:
    return JsonlReader(path, skip_bad=skip_bad)


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


@dataclass(frozen=True)
class EduDataset:
    items: tuple[SifItem, ...]
    token_seqs: tuple[TokenSeq, ...]
    vocab: Vocab
    tokenizer_cfg: TokenizerConfig

    def __len__(self):
        return len(self.items)


# Worker state for multi-process builds; initialized per process.
_WORKER_CFG: TokenizerConfig | None = None
_WORKER_VOCAB: Vocab | None = None


def _init_worker(cfg, vocab):
    global _WORKER_CFG, _WORKER_VOCAB
    _WORKER_CFG = cfg
    _WORKER_VOCAB = vocab


def _tokenize_one(item):
    try:
        return True, encode(tokenize_item(item, _WORKER_CFG), _WORKER_VOCAB)
    except SifkitError as exc:
        return False, str(exc)


def build_dataset(items, cfg: TokenizerConfig, vocab: Vocab,
                  workers: int = 1) -> EduDataset:
    """Tokenize and encode items; result is invariant in ``workers``."""
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    items = tuple(items)
    if workers == 1 or len(items) < 2:
        _init_worker(cfg, vocab)
        results = [_tokenize_one(item) for item in items]
    else:
        import multiprocessing as mp

        with mp.Pool(workers, initializer=_init_worker, initargs=(cfg, vocab)) as pool:
            results = pool.map(_tokenize_one, items, chunksize=64)
    failures = [(i, payload) for i, (ok, payload) in enumerate(results) if not ok]
    if failures:
        raise DatasetBuildError(failures)
    return EduDataset(items, tuple(payload for _, payload in results), vocab, cfg)


def iterate_batches(ds: EduDataset, batch_size: int, shuffle: bool = False,
                    seed: int = 0):
    """Yield Batch objects covering every item exactly once per epoch."""
    if batch_size < 1:
        raise ValueError(f"batch_size must be >= 1, got {batch_size}")
    n = len(ds)
    if n == 0:
        raise EmptyDataset("dataset has no items")
    order = fisher_yates(n, SplitMix64(seed)) if shuffle else list(range(n))
    for start in range(0, n, batch_size):
        chunk = order[start:start + batch_size]
        yield collate([ds.token_seqs[i] for i in chunk], pad_id=PAD_ID)


def resolve_figure(segment: Segment, asset_dir=None) -> bytes:
    """Figure bytes: base64 payloads decode, uuid payloads read <uuid>.png.

    ``asset_dir`` defaults to $SIFKIT_ASSET_DIR, then the working directory.
    """
    if segment.kind not in (SegmentKind.FIGURE, SegmentKind.FIGURE_FORMULA):
        raise ValueError(f"segment kind {segment.kind.value} is not figure-like")
    if segment.is_base64:
        try:
            return base64.b64decode(segment.payload, validate=True)
        except (binascii.Error, ValueError) as exc:
            raise BadBase64(f"invalid base64 figure payload: {exc}") from exc
    if asset_dir is None:
        asset_dir = os.environ.get(ASSET_DIR_ENV, ".")
    path = Path(asset_dir) / f"{segment.payload}.png"
    if not path.is_file():
        raise MissingAsset(f"no asset file {path}")
    return path.read_bytes()


# --- optional on-disk cache -----------------------------------------------------

def save_cache(ds: EduDataset, cache_dir):
    """Cache layout: meta.json, vocab.txt, ids.jsonl (one row per item)."""
    cache = Path(cache_dir)
    cache.mkdir(parents=True, exist_ok=True)
    cfg = ds.tokenizer_cfg
    meta = {
        "item_count": len(ds),
        "tokenizer": {
            "mode": cfg.mode.value,
            "formula": cfg.formula.value,
            "symbol": "".join(sorted(cfg.symbol)),
            "distinct_marks": cfg.distinct_marks,
            "lowercase": cfg.text.lowercase,
            "keep_punct": cfg.text.keep_punct,
            "stopwords": sorted(cfg.text.stopwords),
        },
    }
    (cache / "meta.json").write_text(
        json.dumps(meta, ensure_ascii=False, indent=2), encoding="utf-8")
    save_vocab(ds.vocab, cache / "vocab.txt")
    write_jsonl(cache / "ids.jsonl", (
        {**item_to_record(item), "tokens": list(seq.tokens), "ids": list(seq.ids)}
        for item, seq in zip(ds.items, ds.token_seqs)
    ))


def load_cache(cache_dir) -> EduDataset:
    from .text import TextTokConfig

    cache = Path(cache_dir)
    meta = json.loads((cache / "meta.json").read_text(encoding="utf-8"))
    tok = meta["tokenizer"]
    cfg = TokenizerConfig(
        mode=tok["mode"],
        formula=tok["formula"],
        symbol=frozenset(tok["symbol"]),
        distinct_marks=tok["distinct_marks"],
        text=TextTokConfig(
            lowercase=tok["lowercase"],
            keep_punct=tok["keep_punct"],
            stopwords=frozenset(tok["stopwords"]),
        ),
    )
    vocab = load_vocab(cache / "vocab.txt")
    items = []
    seqs = []
    with open(cache / "ids.jsonl", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            items.append(parse_record(json.dumps(
                {k: v for k, v in rec.items() if k not in ("tokens", "ids")},
                ensure_ascii=False)))
            seqs.append(TokenSeq(tuple(rec["tokens"]), tuple(rec["ids"])))
    if len(items) != meta["item_count"]:
        raise MalformedJson(
            f"cache ids.jsonl has {len(items)} rows, meta says {meta['item_count']}")
    return EduDataset(tuple(items), tuple(seqs), vocab, cfg)
