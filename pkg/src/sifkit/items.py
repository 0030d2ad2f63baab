"""Core data model: educational items, segments, and segment lists.

An item's ``content`` is a SIF string. Segmentation decomposes it into typed
segments; rendering an unmasked segment list reproduces the source string
byte for byte. Masked kinds render as fixed placeholder tokens instead.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .errors import MalformedJson, MissingContent, RangeViolation


class SegmentKind(str, Enum):
    TEXT = "text"
    FORMULA = "formula"
    FIGURE = "figure"
    FIGURE_FORMULA = "figure_formula"
    TAG = "tag"
    SEP = "sep"
    QUES_MARK = "ques_mark"


# Placeholder emitted when a segment's kind is masked.
PLACEHOLDERS = {
    SegmentKind.TEXT: "[TEXT]",
    SegmentKind.FORMULA: "[FORMULA]",
    SegmentKind.FIGURE: "[FIGURE]",
    SegmentKind.FIGURE_FORMULA: "[FIGURE]",
    SegmentKind.TAG: "[TAG]",
    SegmentKind.SEP: "[SEP]",
    SegmentKind.QUES_MARK: "[MARK]",
}

QUES_MARK_BLANK = "Blank"
QUES_MARK_CHOICE = "Choice"


@dataclass(frozen=True)
class Segment:
    """One typed span of a SIF string.

    ``payload`` holds the exact inner text: formula body between the dollar
    signs, figure uuid or base64 data, tag name, or mark name. ``is_base64``
    distinguishes ``\\FigureBase64{...}`` from ``\\FigureID{...}`` so that
    rendering is exact.
    """

    kind: SegmentKind
    payload: str
    is_base64: bool = False

    def source(self) -> str:
        """The SIF syntax this segment renders to when unmasked."""
        k = self.kind
        if k is SegmentKind.TEXT:
            return self.payload
        if k is SegmentKind.FORMULA:
            return f"${self.payload}$"
        if k is SegmentKind.FIGURE:
            if self.is_base64:
                return f"$\\FigureBase64{{{self.payload}}}$"
            return f"$\\FigureID{{{self.payload}}}$"
        if k is SegmentKind.FIGURE_FORMULA:
            return f"$\\FormFigureID{{{self.payload}}}$"
        if k is SegmentKind.TAG:
            return f"$\\SIFTag{{{self.payload}}}$"
        if k is SegmentKind.SEP:
            return "$\\SIFSep$"
        # question mark: payload is "Blank" or "Choice"
        return f"$\\SIF{self.payload}$"


@dataclass(frozen=True)
class SegmentList:
    """Ordered segments plus the set of kinds currently symbolized."""

    segments: tuple[Segment, ...]
    masked_kinds: frozenset[SegmentKind] = frozenset()

    def mask(self, kinds) -> "SegmentList":
        """New list with ``kinds`` added to the masked set; segments unchanged."""
        return SegmentList(self.segments, self.masked_kinds | frozenset(kinds))

    def __iter__(self):
        return iter(self.segments)

    def __len__(self):
        return len(self.segments)


def render(segs: SegmentList) -> str:
    """Concatenate segments back into SIF syntax.

    Segments whose kind is masked emit their placeholder token instead of
    their source form; an unmasked list reproduces the originating string.
    """
    parts = []
    for seg in segs.segments:
        if seg.kind in segs.masked_kinds:
            parts.append(PLACEHOLDERS[seg.kind])
        else:
            parts.append(seg.source())
    return "".join(parts)


@dataclass(frozen=True)
class SifItem:
    """One educational item: SIF content plus structured side information."""

    content: str
    id: Optional[str] = None
    options: Optional[tuple[str, ...]] = None
    answer: Optional[str] = None
    knowledge: Optional[tuple[str, ...]] = None
    difficulty: Optional[float] = None
    discrimination: Optional[float] = None
    quality: Optional[tuple[int, int]] = None  # (score 1-5, scenario 1-3)

    def __post_init__(self):
        if self.content is None:
            raise MissingContent("item content must not be null")
        if self.difficulty is not None and not 0.0 <= self.difficulty <= 1.0:
            raise RangeViolation(
                f"difficulty {self.difficulty} outside [0, 1]"
            )
        if self.quality is not None:
            score, scenario = self.quality
            if not 1 <= score <= 5:
                raise RangeViolation(f"quality score {score} outside [1, 5]")
            if scenario not in (1, 2, 3):
                raise RangeViolation(
                    f"quality scenario {scenario} not in {{1, 2, 3}}"
                )


def parse_record(json_text: str) -> SifItem:
    """Parse one JSON object into a SifItem.

    Recognized fields: id, content, options, answer, knowledge, difficulty,
    discrimination, quality ({"score": int, "label": int}); everything else
    is ignored.
    """
    try:
        obj = json.loads(json_text)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedJson(str(exc)) from exc
    if not isinstance(obj, dict):
        raise MalformedJson("expected a JSON object")
    if "content" not in obj or obj["content"] is None:
        raise MissingContent("record has no 'content' field")
    content = obj["content"]
    if not isinstance(content, str):
        raise MalformedJson("'content' must be a string")

    quality = None
    if obj.get("quality") is not None:
        q = obj["quality"]
        if not isinstance(q, dict) or "score" not in q or "label" not in q:
            raise MalformedJson("'quality' must be {score, label}")
        quality = (int(q["score"]), int(q["label"]))

    def _tuple_of_str(key):
        val = obj.get(key)
        if val is None:
            return None
        if not isinstance(val, list) or not all(isinstance(x, str) for x in val):
            raise MalformedJson(f"'{key}' must be a list of strings")
        return tuple(val)

    return SifItem(
        content=content,
        id=obj.get("id"),
        options=_tuple_of_str("options"),
        answer=obj.get("answer"),
        knowledge=_tuple_of_str("knowledge"),
        difficulty=obj.get("difficulty"),
        discrimination=obj.get("discrimination"),
        quality=quality,
    )


def item_to_record(item: SifItem) -> dict:
    """Inverse of parse_record for the recognized fields; drops None fields."""
    rec: dict = {}
    if item.id is not None:
        rec["id"] = item.id
    rec["content"] = item.content
    if item.options is not None:
        rec["options"] = list(item.options)
    if item.answer is not None:
        rec["answer"] = item.answer
    if item.knowledge is not None:
        rec["knowledge"] = list(item.knowledge)
    if item.difficulty is not None:
        rec["difficulty"] = item.difficulty
    if item.discrimination is not None:
        rec["discrimination"] = item.discrimination
    if item.quality is not None:
        rec["quality"] = {"score": item.quality[0], "label": item.quality[1]}
    return rec
