"""Component segmentation: SIF string -> typed SegmentList, with masking.

Symbol flags select which kinds are masked: ``t`` text, ``f`` formulas,
``g`` figures (plain and formula figures), ``m`` marks (question marks,
tags and separators).
"""

from __future__ import annotations

import re

from .errors import NotSif
from .items import (
    QUES_MARK_BLANK,
    QUES_MARK_CHOICE,
    Segment,
    SegmentKind,
    SegmentList,
)
from .sif import _scan, validate

SYMBOL_FLAGS = {
    "t": (SegmentKind.TEXT,),
    "f": (SegmentKind.FORMULA,),
    "g": (SegmentKind.FIGURE, SegmentKind.FIGURE_FORMULA),
    "m": (SegmentKind.QUES_MARK, SegmentKind.TAG, SegmentKind.SEP),
}

_TAG_RE = re.compile(r"\\SIFTag\{([^{}$]+)\}\Z")
_FIGURE_RE = re.compile(r"\\(FormFigure|Figure)ID\{([^{}$\s]+)\}\Z")
_FIGURE_B64_RE = re.compile(r"\\FigureBase64\{([A-Za-z0-9+/]+={0,2})\}\Z")


def kinds_for_flags(symbol) -> frozenset[SegmentKind]:
    """Expand a flag collection ('fgm', {'f','g'}, ...) into segment kinds."""
    kinds: set[SegmentKind] = set()
    for flag in symbol or ():
        if flag not in SYMBOL_FLAGS:
            raise ValueError(f"unknown symbol flag {flag!r}; expected subset of 'tfgm'")
        kinds.update(SYMBOL_FLAGS[flag])
    return frozenset(kinds)


def _classify_math(body: str) -> Segment:
    if body == "\\SIFBlank":
        return Segment(SegmentKind.QUES_MARK, QUES_MARK_BLANK)
    if body == "\\SIFChoice":
        return Segment(SegmentKind.QUES_MARK, QUES_MARK_CHOICE)
    if body == "\\SIFSep":
        return Segment(SegmentKind.SEP, "")
    m = _TAG_RE.match(body)
    if m:
        return Segment(SegmentKind.TAG, m.group(1))
    m = _FIGURE_RE.match(body)
    if m:
        kind = (SegmentKind.FIGURE_FORMULA if m.group(1) == "FormFigure"
                else SegmentKind.FIGURE)
        return Segment(kind, m.group(2))
    m = _FIGURE_B64_RE.match(body)
    if m:
        return Segment(SegmentKind.FIGURE, m.group(1), is_base64=True)
    return Segment(SegmentKind.FORMULA, body)


def filter_segments(segs: SegmentList, kind: SegmentKind) -> list[Segment]:
    """Segments of the given kind, in original order; ``segs`` unchanged."""
    return [s for s in segs.segments if s.kind == kind]


def seg(sif: str, symbol=()) -> SegmentList:
    """Decompose a SIF string into segments; flags mask kinds for rendering.

    The segments partition the input in order, so rendering the unmasked
    list reproduces the input exactly. Raises NotSif when the input fails
    validation.
    """
    masked = kinds_for_flags(symbol)
    report = validate(sif)
    if not report.valid:
        first = report.violations[0]
        raise NotSif(
            f"input is not SIF: {first.code.value} at bytes {first.span}: {first.message}",
            report=report,
        )
    segments = []
    for kind, a, b in _scan(sif):
        if kind == "text":
            segments.append(Segment(SegmentKind.TEXT, sif[a:b]))
        else:  # "math"; "lonely" cannot occur in validated input
            segments.append(_classify_math(sif[a + 1:b - 1]))
    return SegmentList(tuple(segments), masked)
