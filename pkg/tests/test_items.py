import json

import pytest
from hypothesis import given, strategies as st

from sifkit.errors import MalformedJson, MissingContent, RangeViolation
from sifkit.items import (
    QUES_MARK_BLANK,
    Segment,
    SegmentKind,
    SegmentList,
    SifItem,
    item_to_record,
    parse_record,
    render,
)


def test_parse_record_minimal():
    item = parse_record('{"content":"$x$","difficulty":0.5}')
    assert item.content == "$x$"
    assert item.difficulty == 0.5
    assert item.options is None


def test_parse_record_golden_english(golden_items):
    item = next(i for i in golden_items if i.id == "english")
    assert item.content.startswith("Knowing what colors look good $\\SIFBlank$")
    assert len(item.options) == 4
    assert item.answer == "$C$"
    assert item.difficulty == 0.569


def test_parse_record_range_violation():
    with pytest.raises(RangeViolation):
        parse_record('{"content":"x","difficulty":1.7}')
    with pytest.raises(RangeViolation):
        parse_record('{"content":"x","quality":{"score":6,"label":1}}')
    with pytest.raises(RangeViolation):
        parse_record('{"content":"x","quality":{"score":3,"label":9}}')


def test_parse_record_errors():
    with pytest.raises(MalformedJson):
        parse_record("{nope")
    with pytest.raises(MissingContent):
        parse_record('{"id":"a"}')
    with pytest.raises(MissingContent):
        parse_record('{"content":null}')
    with pytest.raises(MalformedJson):
        parse_record('{"content":7}')


def test_unrecognized_fields_ignored():
    item = parse_record('{"content":"x","banana":3}')
    assert item.content == "x"


def test_empty_content_is_valid():
    assert parse_record('{"content":""}').content == ""


def test_render_pure_text():
    segs = SegmentList((Segment(SegmentKind.TEXT, "你好"),))
    assert render(segs) == "你好"


def test_render_mixed_and_masked():
    segs = SegmentList((
        Segment(SegmentKind.TEXT, "若"),
        Segment(SegmentKind.FORMULA, "x>0"),
        Segment(SegmentKind.QUES_MARK, QUES_MARK_BLANK),
    ))
    assert render(segs) == "若$x>0$$\\SIFBlank$"
    masked = segs.mask({SegmentKind.FORMULA})
    assert render(masked) == "若[FORMULA]$\\SIFBlank$"


def test_masking_idempotent_and_structure_preserving():
    segs = SegmentList((Segment(SegmentKind.TEXT, "a"),
                        Segment(SegmentKind.FORMULA, "x")))
    once = segs.mask({SegmentKind.FORMULA})
    twice = once.mask({SegmentKind.FORMULA})
    assert once == twice
    assert once.segments == segs.segments


record_strategy = st.fixed_dictionaries(
    {"content": st.text(max_size=30)},
    optional={
        "id": st.text(min_size=1, max_size=8),
        "options": st.lists(st.text(max_size=10), max_size=4),
        "answer": st.text(max_size=10),
        "knowledge": st.lists(st.text(min_size=1, max_size=6), max_size=3),
        "difficulty": st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
        "discrimination": st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
        "quality": st.fixed_dictionaries(
            {"score": st.integers(1, 5), "label": st.integers(1, 3)}),
    },
)


@given(record_strategy)
def test_record_round_trip(record):
    item = parse_record(json.dumps(record, ensure_ascii=False))
    back = item_to_record(item)
    assert back == record
    again = parse_record(json.dumps(back, ensure_ascii=False))
    assert again == item
