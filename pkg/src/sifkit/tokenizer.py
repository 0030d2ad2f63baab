"""Tokenizer facade: parse -> segment -> tokenize, plus vocabulary and batching.

Three named tokenizers mirror common usage: "pure_text" (linear formula
tokens, figures and marks symbolized), "ast_formula" (structural formula
tokens from the AST), and "custom" (any combination, including distinct
mark tokens instead of the collapsed "[MARK]").
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .errors import (
    EmptyBatch,
    EmptyCorpus,
    NotSif,
    SifkitError,
    TokenizeError,
)
from .items import PLACEHOLDERS, SegmentKind, SifItem
from .formula import ast_tokenize, linear_tokenize, parse_formula
from .segment import kinds_for_flags, seg
from .sif import is_sif, to_sif
from .text import TextTokConfig, tokenize_text

PAD_TOKEN, UNK_TOKEN, BOS_TOKEN, EOS_TOKEN = "<pad>", "<unk>", "<bos>", "<eos>"
SPECIAL_TOKENS = (PAD_TOKEN, UNK_TOKEN, BOS_TOKEN, EOS_TOKEN)
PAD_ID, UNK_ID, BOS_ID, EOS_ID = 0, 1, 2, 3

FIGURE_TOKEN = "[FIGURE]"
MARK_TOKEN = "[MARK]"
_DISTINCT_MARKS = {"Blank": "[BLANK]", "Choice": "[CHOICE]"}


class TokenizerMode(str, Enum):
    PURE_TEXT = "pure_text"
    AST_FORMULA = "ast_formula"
    CUSTOM = "custom"


class FormulaTok(str, Enum):
    LINEAR = "linear"
    AST = "ast"


@dataclass(frozen=True)
class TokenizerConfig:
    mode: TokenizerMode = TokenizerMode.PURE_TEXT
    text: TextTokConfig = TextTokConfig()
    formula: FormulaTok = FormulaTok.LINEAR
    symbol: frozenset[str] = frozenset()
    distinct_marks: bool = False

    def __post_init__(self):
        object.__setattr__(self, "mode", TokenizerMode(self.mode))
        object.__setattr__(self, "formula", FormulaTok(self.formula))
        object.__setattr__(self, "symbol", frozenset(self.symbol))
        kinds_for_flags(self.symbol)  # validates the flags
        if self.mode is TokenizerMode.PURE_TEXT:
            if self.formula is not FormulaTok.LINEAR:
                raise ValueError("pure_text mode requires linear formula tokens")
            if self.distinct_marks:
                raise ValueError("pure_text mode collapses marks to [MARK]")
        elif self.mode is TokenizerMode.AST_FORMULA:
            if self.formula is not FormulaTok.AST:
                raise ValueError("ast_formula mode requires AST formula tokens")
            if self.distinct_marks:
                raise ValueError("ast_formula mode collapses marks to [MARK]")

    @classmethod
    def pure_text(cls, symbol=(), text=TextTokConfig()):
        return cls(TokenizerMode.PURE_TEXT, text, FormulaTok.LINEAR, frozenset(symbol))

    @classmethod
    def ast_formula(cls, symbol=(), text=TextTokConfig()):
        return cls(TokenizerMode.AST_FORMULA, text, FormulaTok.AST, frozenset(symbol))

    @classmethod
    def custom(cls, formula=FormulaTok.LINEAR, symbol=(), text=TextTokConfig(),
               distinct_marks=False):
        return cls(TokenizerMode.CUSTOM, text, FormulaTok(formula),
                   frozenset(symbol), distinct_marks)


@dataclass(frozen=True)
class TokenSeq:
    tokens: tuple[str, ...]
    ids: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if self.ids is not None:
            object.__setattr__(self, "ids", tuple(self.ids))
            if len(self.ids) != len(self.tokens):
                raise ValueError("ids and tokens must align")

    def __len__(self):
        return len(self.tokens)


def _mark_token(segment, distinct: bool) -> str:
    if not distinct:
        return MARK_TOKEN
    if segment.kind is SegmentKind.QUES_MARK:
        return _DISTINCT_MARKS[segment.payload]
    return PLACEHOLDERS[segment.kind]  # [TAG] / [SEP]


def tokenize_item(item: SifItem, cfg: TokenizerConfig = TokenizerConfig()) -> TokenSeq:
    """Full preprocessing of one item: SIF conversion, segmentation, tokens.

    Figures always contribute the "[FIGURE]" token and marks their mark
    token; masked kinds contribute their placeholder only.
    """
    content = item.content
    try:
        if not is_sif(content):
            content = to_sif(content)
        segments = seg(content, cfg.symbol)
    except SifkitError as exc:
        raise TokenizeError(str(exc), item_id=item.id) from exc

    tokens: list[str] = []
    for segment in segments:
        if segment.kind in segments.masked_kinds:
            tokens.append(PLACEHOLDERS[segment.kind])
            continue
        if segment.kind is SegmentKind.TEXT:
            tokens.extend(tokenize_text(segment.payload, cfg.text))
        elif segment.kind is SegmentKind.FORMULA:
            try:
                if cfg.formula is FormulaTok.AST:
                    formula_tokens = ast_tokenize(parse_formula(segment.payload))
                else:
                    formula_tokens = linear_tokenize(segment.payload)
            except SifkitError as exc:
                raise TokenizeError(
                    f"formula {segment.payload!r}: {exc}", item_id=item.id
                ) from exc
            tokens.extend(t.text for t in formula_tokens)
        elif segment.kind in (SegmentKind.FIGURE, SegmentKind.FIGURE_FORMULA):
            tokens.append(FIGURE_TOKEN)
        else:
            tokens.append(_mark_token(segment, cfg.distinct_marks))
    return TokenSeq(tuple(tokens))


# --- vocabulary -----------------------------------------------------------------

@dataclass(frozen=True)
class Vocab:
    tokens: tuple[str, ...]
    min_count: int = 1
    index: dict = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if tuple(self.tokens[:4]) != SPECIAL_TOKENS:
            raise ValueError("vocab must start with the 4 special tokens")
        object.__setattr__(self, "index", {t: i for i, t in enumerate(self.tokens)})
        if len(self.index) != len(self.tokens):
            raise ValueError("vocab contains duplicate tokens")

    def __len__(self):
        return len(self.tokens)

    def __contains__(self, token):
        return token in self.index

    def id_of(self, token: str) -> int:
        return self.index.get(token, UNK_ID)

    def decode(self, ids) -> list[str]:
        return [self.tokens[i] if 0 <= i < len(self.tokens) else UNK_TOKEN
                for i in ids]


def build_vocab(corpora, min_count: int = 1) -> Vocab:
    """Frequency vocabulary over token sequences.

    Tokens with frequency >= min_count enter, ordered by (frequency desc,
    token asc) after the four specials.
    """
    if min_count < 1:
        raise ValueError(f"min_count must be >= 1, got {min_count}")
    counts: dict[str, int] = {}
    empty = True
    for seq in corpora:
        empty = False
        tokens = seq.tokens if isinstance(seq, TokenSeq) else seq
        for tok in tokens:
            counts[tok] = counts.get(tok, 0) + 1
    if empty:
        raise EmptyCorpus("no token sequences in corpus")
    kept = sorted(
        (tok for tok, c in counts.items() if c >= min_count and tok not in SPECIAL_TOKENS),
        key=lambda tok: (-counts[tok], tok),
    )
    return Vocab(SPECIAL_TOKENS + tuple(kept), min_count)


def encode(seq: TokenSeq, vocab: Vocab, add_bos_eos: bool = False) -> TokenSeq:
    """Map tokens to ids; out-of-vocabulary tokens map to the UNK id."""
    tokens = seq.tokens if isinstance(seq, TokenSeq) else tuple(seq)
    if add_bos_eos:
        tokens = (BOS_TOKEN,) + tuple(tokens) + (EOS_TOKEN,)
    ids = tuple(vocab.id_of(t) for t in tokens)
    return TokenSeq(tokens, ids)


def save_vocab(vocab: Vocab, path):
    """One token per line after a '#min_count=N' header; line order is id order."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"#min_count={vocab.min_count}\n")
        for token in vocab.tokens:
            fh.write(token + "\n")


def load_vocab(path) -> Vocab:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline()
        if not header.startswith("#min_count="):
            raise ValueError(f"{path}: missing '#min_count=' header")
        min_count = int(header[len("#min_count="):].strip())
        tokens = tuple(line.rstrip("\n") for line in fh)
    return Vocab(tokens, min_count)


# --- batching ---------------------------------------------------------------------

@dataclass(frozen=True)
class Batch:
    ids: np.ndarray  # (batch_size, width) int64
    lengths: tuple[int, ...]
    pad_id: int

    def __eq__(self, other):
        if not isinstance(other, Batch):
            return NotImplemented
        return (self.pad_id == other.pad_id and self.lengths == other.lengths
                and np.array_equal(self.ids, other.ids))


def collate(seqs, pad_id: int = PAD_ID, max_len: int | None = None) -> Batch:
    """Pad encoded sequences on the right into a fixed-shape id matrix.

    Width is the longest sequence, capped at max_len; longer sequences are
    truncated from the right.
    """
    id_rows = []
    for s in seqs:
        ids = s.ids if isinstance(s, TokenSeq) else tuple(s)
        if ids is None:
            raise ValueError("collate requires encoded sequences")
        id_rows.append(ids)
    if not id_rows:
        raise EmptyBatch("cannot collate an empty sequence list")
    width = max(len(r) for r in id_rows)
    if max_len is not None:
        width = min(width, max_len)
    matrix = np.full((len(id_rows), width), pad_id, dtype=np.int64)
    lengths = []
    for i, row in enumerate(id_rows):
        n = min(len(row), width)
        matrix[i, :n] = row[:n]
        lengths.append(n)
    return Batch(matrix, tuple(lengths), pad_id)
