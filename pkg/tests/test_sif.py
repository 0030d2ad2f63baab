import pytest
from hypothesis import given, settings, strategies as st

from sifkit.errors import Unconvertible
from sifkit.sif import ViolationCode, is_sif, to_sif, validate

from conftest import make_raw_string, make_sif_string
import random


def codes(s):
    return [v.code for v in validate(s).violations]


def test_is_sif_examples():
    assert is_sif("Knowing what colors look good $\\SIFBlank$ your skin is "
                  "of great importance when you buy clothes.")
    assert is_sif("")
    assert not is_sif("The slope k is 3")


def test_bare_math_tokens_flagged():
    report = validate("The slope k is 3")
    assert [v.code for v in report.violations] == [
        ViolationCode.BARE_MATH_TOKEN, ViolationCode.BARE_MATH_TOKEN]
    spans = [v.span for v in report.violations]
    assert spans == [(10, 11), (15, 16)]  # "k" and "3"


def test_validate_unbalanced_dollar():
    report = validate("$x+$y$")
    assert ViolationCode.UNBALANCED_DOLLAR in [v.code for v in report.violations]
    dollar = next(v for v in report.violations
                  if v.code is ViolationCode.UNBALANCED_DOLLAR)
    assert dollar.span == (5, 6)


def test_validate_bad_style_label():
    report = validate("$\\textf{hi, qz}$")
    assert [v.code for v in report.violations] == [ViolationCode.BAD_STYLE_LABEL]


def test_validate_good_formula():
    assert validate("$\\frac{x}{2}$").valid


def test_style_label_rules():
    assert is_sif("$\\textf{生,u}$")
    assert not is_sif("$\\textf{text, ub}$")  # not alphabetical
    assert not is_sif("$\\textf{text, bb}$")  # repeated label
    assert is_sif("$\\textf{text, bu}$")
    assert not is_sif("$\\textf{text}$")
    assert not is_sif("$\\textf{text, }$")


def test_figure_forms():
    assert is_sif("$\\FigureID{001b16ae-e7af-11eb-be0e-40f2e9c851ac}$")
    assert is_sif("$\\FormFigureID{ab12}$")
    assert is_sif("$\\FigureBase64{AQID}$")
    assert codes("$\\FigureID{}$") == [ViolationCode.BAD_FIGURE_REF]
    assert codes("$\\FigureBase64{???}$") == [ViolationCode.BAD_FIGURE_REF]
    assert codes("$x+\\FigureID{a}$") == [ViolationCode.BAD_FIGURE_REF]


def test_special_token_forms():
    assert is_sif("$\\SIFBlank$") and is_sif("$\\SIFChoice$") and is_sif("$\\SIFSep$")
    assert is_sif("$\\SIFTag{options}$")
    assert codes("$\\SIFBlank $") == [ViolationCode.BAD_SPECIAL_TOKEN]
    assert codes("$\\SIFTag$") == [ViolationCode.BAD_SPECIAL_TOKEN]
    assert codes("$x+\\SIFBlank$") == [ViolationCode.BAD_SPECIAL_TOKEN]
    # un-dollared special commands are backslash-outside-math
    assert ViolationCode.NON_SIF_CHAR in codes("\\SIFBlank")


def test_unconverted_blank_and_choice_flagged():
    assert codes("天空__大地") == [ViolationCode.BAD_SPECIAL_TOKEN]
    assert codes("选出正确答案()") == [ViolationCode.BAD_SPECIAL_TOKEN]
    assert codes("选出正确答案（ ）") == [ViolationCode.BAD_SPECIAL_TOKEN]
    assert is_sif("这是(括号内容)文字")


def test_brace_and_backslash_violations():
    assert ViolationCode.UNBALANCED_BRACE in codes("${x$")
    assert ViolationCode.UNBALANCED_BRACE in codes("$x}$")
    assert ViolationCode.BAD_SPECIAL_TOKEN in codes("$\\ frac{x}{2}$")
    assert ViolationCode.BAD_SPECIAL_TOKEN in codes("$x\\ $")
    # a trailing backslash escapes the closing dollar, unbalancing the region
    assert ViolationCode.UNBALANCED_DOLLAR in codes("$x\\$")


def test_non_sif_char():
    report = validate("希腊字母α出现")
    assert [v.code for v in report.violations] == [ViolationCode.NON_SIF_CHAR]


def test_spans_are_byte_offsets():
    s = "数k"
    report = validate(s)
    (violation,) = report.violations
    # "数" is 3 bytes in UTF-8
    assert violation.span == (3, 4)
    assert s.encode("utf-8")[3:4] == b"k"


def test_to_sif_examples():
    assert to_sif("如果x=2,求x+1的值") == "如果$x=2$,求$x+1$的值"
    assert to_sif("选出正确答案()") == "选出正确答案$\\SIFChoice$"
    assert to_sif("天空__大地") == "天空$\\SIFBlank$大地"
    assert to_sif("The slope k is 3") == "The slope $k$ is $3$"


def test_to_sif_fixpoint_on_valid(golden_items):
    for item in golden_items:
        assert to_sif(item.content) == item.content


def test_to_sif_unconvertible():
    with pytest.raises(Unconvertible):
        to_sif("货币 α 符号")
    with pytest.raises(Unconvertible):
        to_sif("cost is $5")


def test_golden_items_valid(golden_items):
    assert len(golden_items) == 8
    for item in golden_items:
        assert is_sif(item.content), item.id


def test_conversion_laws_on_corpus(raw_corpus):
    for raw in raw_corpus:
        converted = to_sif(raw)
        assert is_sif(converted)
        assert to_sif(converted) == converted


def test_agreement_on_corpus(sif_corpus, raw_corpus):
    for s in sif_corpus + raw_corpus:
        assert is_sif(s) == validate(s).valid


_raw_text = st.text(
    alphabet=st.sampled_from(
        "数列函已知求的若则中点 abcxyz word勾股定理，。,.?()（）_+-=123<>/岁月"),
    max_size=40,
)


@settings(max_examples=300, deadline=None)
@given(_raw_text)
def test_to_sif_properties_random(raw):
    try:
        converted = to_sif(raw)
    except Unconvertible:
        return
    assert is_sif(converted)
    assert to_sif(converted) == converted


def test_validation_deterministic(sif_corpus):
    sample = sif_corpus[:50]
    first = [validate(s) for s in sample]
    second = [validate(s) for s in reversed(sample)][::-1]
    assert first == second
