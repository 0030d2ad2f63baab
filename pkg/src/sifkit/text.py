"""Word-level tokenization of text segments (English and Chinese).

ASCII alphabetic runs become word tokens; CJK ideographs are one token
each; punctuation is kept as single-character tokens unless configured
away. Chinese is split per character rather than through a learned
segmenter, which keeps the output deterministic with zero external
models; a ``word_segmenter`` hook accepts a replacement for the
alphabetic/CJK handling when a dictionary-based segmenter is wanted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional


def _is_cjk(ch: str) -> bool:
    o = ord(ch)
    return 0x4E00 <= o <= 0x9FFF or 0x3400 <= o <= 0x4DBF


@dataclass(frozen=True)
class TextTokConfig:
    lowercase: bool = True
    keep_punct: bool = True
    stopwords: frozenset[str] = frozenset()
    # optional replacement for the default word splitting; takes the raw
    # text and returns tokens, applied before lowercasing/stopword removal
    word_segmenter: Optional[Callable[[str], list[str]]] = None


def tokenize_text(text: str, cfg: TextTokConfig = TextTokConfig()) -> list[str]:
    if cfg.word_segmenter is not None:
        tokens = list(cfg.word_segmenter(text))
    else:
        tokens = []
        word_start = None
        for idx, ch in enumerate(text):
            if ch.isascii() and ch.isalpha():
                if word_start is None:
                    word_start = idx
                continue
            if word_start is not None:
                tokens.append(text[word_start:idx])
                word_start = None
            if ch.isspace():
                continue
            if _is_cjk(ch):
                tokens.append(ch)
            elif ch.isdigit():
                tokens.append(ch)
            elif cfg.keep_punct:
                tokens.append(ch)
        if word_start is not None:
            tokens.append(text[word_start:])

    if cfg.lowercase:
        tokens = [t.lower() for t in tokens]
    if cfg.stopwords:
        tokens = [t for t in tokens if t not in cfg.stopwords]
    return tokens


def load_stopwords(path) -> frozenset[str]:
    """Stopword file: UTF-8, one token per line, '#' starts a comment."""
    words = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                words.add(line)
    return frozenset(words)
