import pytest

from sifkit.errors import NotSif
from sifkit.items import SegmentKind, render
from sifkit.segment import filter_segments, kinds_for_flags, seg


MIXED = "若$x>0$,如图$\\FigureID{ab12}$,则$\\SIFBlank$"


def test_seg_example():
    segs = seg(MIXED)
    assert [(s.kind, s.payload) for s in segs] == [
        (SegmentKind.TEXT, "若"),
        (SegmentKind.FORMULA, "x>0"),
        (SegmentKind.TEXT, ",如图"),
        (SegmentKind.FIGURE, "ab12"),
        (SegmentKind.TEXT, ",则"),
        (SegmentKind.QUES_MARK, "Blank"),
    ]


def test_seg_masked_render():
    segs = seg(MIXED, symbol={"f", "g", "m"})
    assert render(segs) == "若[FORMULA],如图[FIGURE],则[MARK]"
    unmasked = seg(MIXED)
    assert segs.segments == unmasked.segments


def test_seg_pure_text():
    segs = seg("纯文本")
    assert [(s.kind, s.payload) for s in segs] == [(SegmentKind.TEXT, "纯文本")]


def test_seg_rejects_invalid():
    with pytest.raises(NotSif):
        seg("bare digit 3")


def test_seg_flag_validation():
    with pytest.raises(ValueError):
        kinds_for_flags("xyz")
    assert kinds_for_flags("fgm") == frozenset({
        SegmentKind.FORMULA, SegmentKind.FIGURE, SegmentKind.FIGURE_FORMULA,
        SegmentKind.QUES_MARK, SegmentKind.TAG, SegmentKind.SEP})


def test_filter_segments():
    segs = seg(MIXED)
    figures = filter_segments(segs, SegmentKind.FIGURE)
    assert [s.payload for s in figures] == ["ab12"]
    formulas = filter_segments(seg("$a$$b$$c$"), SegmentKind.FORMULA)
    assert [s.payload for s in formulas] == ["a", "b", "c"]
    assert filter_segments(seg(""), SegmentKind.TEXT) == []


def test_special_segments():
    segs = seg("$\\SIFTag{options}$$\\SIFSep$$\\SIFChoice$$\\FormFigureID{ff}$"
               "$\\FigureBase64{AQID}$")
    kinds = [s.kind for s in segs]
    assert kinds == [SegmentKind.TAG, SegmentKind.SEP, SegmentKind.QUES_MARK,
                     SegmentKind.FIGURE_FORMULA, SegmentKind.FIGURE]
    assert segs.segments[0].payload == "options"
    assert segs.segments[4].is_base64


def test_round_trip_golden(golden_items):
    for item in golden_items:
        assert render(seg(item.content)) == item.content


def test_round_trip_corpus(sif_corpus):
    for s in sif_corpus:
        segs = seg(s)
        assert render(segs) == s


def test_no_adjacent_text_segments(sif_corpus):
    for s in sif_corpus[:200]:
        kinds = [x.kind for x in seg(s)]
        assert all(not (a is SegmentKind.TEXT and b is SegmentKind.TEXT)
                   for a, b in zip(kinds, kinds[1:]))


def test_mask_invariance(sif_corpus):
    for s in sif_corpus[:200]:
        plain = seg(s)
        masked = seg(s, "tfgm")
        assert plain.segments == masked.segments
        assert masked.masked_kinds == kinds_for_flags("tfgm")
