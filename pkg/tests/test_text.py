from hypothesis import given, strategies as st

from sifkit.text import TextTokConfig, load_stopwords, tokenize_text


def test_english_words_lowercased():
    assert tokenize_text("Knowing what colors") == ["knowing", "what", "colors"]


def test_empty():
    assert tokenize_text("") == []


def test_cjk_per_character():
    assert tokenize_text("则数列") == ["则", "数", "列"]


def test_punctuation_kept_by_default():
    assert tokenize_text("你好,世界。") == ["你", "好", ",", "世", "界", "。"]
    cfg = TextTokConfig(keep_punct=False)
    assert tokenize_text("你好,世界。", cfg) == ["你", "好", "世", "界"]


def test_no_lowercase():
    cfg = TextTokConfig(lowercase=False)
    assert tokenize_text("Hello World", cfg) == ["Hello", "World"]


def test_stopwords_after_lowercase():
    cfg = TextTokConfig(stopwords=frozenset({"the"}))
    assert tokenize_text("The cat", cfg) == ["cat"]


def test_word_segmenter_hook():
    cfg = TextTokConfig(word_segmenter=lambda s: s.split("|"))
    assert tokenize_text("数列|极限", cfg) == ["数列|极限".split("|")[0], "极限"]


def test_stopword_file(tmp_path):
    path = tmp_path / "stop.txt"
    path.write_text("# comment\nthe\n\n了 # trailing\n", encoding="utf-8")
    assert load_stopwords(path) == frozenset({"the", "了"})


_text = st.text(
    alphabet=st.sampled_from("abc XYZ 数列，。,.!？ \t\n"), max_size=40)


@given(_text)
def test_determinism_and_no_empty_tokens(text):
    cfg = TextTokConfig()
    first = tokenize_text(text, cfg)
    assert first == tokenize_text(text, cfg)
    assert all(tok for tok in first)


@given(_text)
def test_tokens_are_subsequence_without_lowercase(text):
    cfg = TextTokConfig(lowercase=False)
    tokens = tokenize_text(text, cfg)
    concatenated = "".join(tokens)
    it = iter(text)
    assert all(ch in it for ch in concatenated)
