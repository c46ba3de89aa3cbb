import unicodedata
from collections import Counter

import pytest
from hypothesis import given, strategies as st

from sembangla.errors import TextEncodingError
from sembangla.text import (
    Script,
    SentenceType,
    detect_sentence_type,
    normalize,
    split_sentences,
    tokenize,
)

BENGALI = "".join(chr(c) for c in range(0x0980, 0x0A00) if unicodedata.name(chr(c), ""))
# NFC expands these three (composition exclusions), so they are kept out of
# the length-bound property and covered by a dedicated test instead.
EXPANDING = {"\u09dc", "\u09dd", "\u09df"}
text_chars = st.sampled_from(
    [c for c in BENGALI if c not in EXPANDING]
    + list(" \t\n?!।.,abcXYZ019") + ["\u200c", "\u200d"]
)
texts = st.text(text_chars, max_size=40)


def test_whitespace_collapse():
    assert normalize("কটা  বাজে ?") == "কটা বাজে ?"


def test_trim_and_mixed_whitespace():
    assert normalize("  সে\t\nএল।  ") == "সে এল।"


def test_decomposed_clusters_match_composition_oracle():
    # 20 consonant clusters written decomposed (two-part vowel signs spelled
    # as their halves); the result must equal an NFC oracle byte for byte.
    bases = [chr(c) for c in range(0x0995, 0x09B9) if unicodedata.category(chr(c)) == "Lo"]
    halves = ["\u09c7\u09be", "\u09c7\u09d7"]  # o-kar, au-kar
    samples = [b + halves[i % 2] for i, b in enumerate(bases[:20])]
    assert len(samples) == 20
    for s in samples:
        out = normalize(s)
        assert out.encode("utf-8") == unicodedata.normalize("NFC", s).encode("utf-8")
        assert len(out) == 2 and unicodedata.is_normalized("NFC", out)


def test_decomposed_ko_equals_composed():
    decomposed = "\u0995\u09c7\u09be"
    composed = "\u0995\u09cb"
    assert normalize(decomposed).encode() == normalize(composed).encode()
    assert normalize("\u0995\u09c7") == "\u0995\u09c7"  # e-kar has no decomposition


def test_composition_exclusions_expand():
    # U+09DC is canonically equivalent to ড + nukta and NFC keeps it decomposed.
    assert normalize("\u09dc") == "\u09a1\u09bc"


def test_invalid_utf8_reports_byte_offset():
    with pytest.raises(TextEncodingError) as exc:
        normalize("কটা".encode() + b"\xff")
    assert exc.value.offset == 9


def test_joiners_kept_inside_words_and_stripped_at_edges():
    inside = "\u0995\u09cd\u200d\u09b7"
    assert normalize(inside) == inside
    assert normalize("\u200cকর\u200d ?") == "কর ?"


@given(texts)
def test_normalize_idempotent(x):
    assert normalize(normalize(x)) == normalize(x)


@given(texts)
def test_normalize_length_bound(x):
    assert len(normalize(x)) <= len(x)


@given(texts)
def test_normalized_is_nfc(x):
    assert unicodedata.is_normalized("NFC", normalize(x))


def test_tokenize_query():
    assert [t.surface for t in tokenize("কটা বাজে?")] == ["কটা", "বাজে", "?"]


def test_tokenize_empty():
    assert tokenize("") == []


def test_tokenize_trailing_punct():
    toks = tokenize("রান করেছে?")
    assert len(toks) == 3
    assert toks[-1].script is Script.PUNCT
    assert toks[0].script is Script.BENGALI


def test_token_scripts():
    toks = tokenize("IPL ২০১১ 99 ক্রিকেট")
    assert [t.script for t in toks] == [Script.LATIN, Script.DIGIT, Script.DIGIT, Script.BENGALI]
    assert toks[0].normalized == "ipl"


@given(texts)
def test_tokenize_preserves_code_points(x):
    text = normalize(x)
    toks = tokenize(text)
    assert Counter("".join(t.surface for t in toks)) == Counter(c for c in text if not c.isspace())


@given(texts)
def test_token_spans_disjoint_and_nonempty(x):
    text = normalize(x)
    prev_end = 0
    for t in tokenize(text):
        a, b = t.char_span
        assert a < b and a >= prev_end
        assert text[a:b] == t.surface
        assert unicodedata.is_normalized("NFC", t.normalized)
        prev_end = b


def test_split_two_dandas():
    assert split_sentences("সে এল। সে গেল।") == ["সে এল।", "সে গেল।"]


def test_split_no_terminator():
    assert split_sentences("সে এল") == ["সে এল"]


def test_split_mixed_types():
    parts = split_sentences("ভাল! কেন?")
    assert parts == ["ভাল!", "কেন?"]
    kinds = [detect_sentence_type(tokenize(p)) for p in parts]
    assert kinds == [SentenceType.EXCLAMATORY, SentenceType.INTERROGATIVE]


def test_split_keeps_decimal():
    assert split_sentences("দাম 3.5 টাকা। ঠিক?") == ["দাম 3.5 টাকা।", "ঠিক?"]


@given(texts)
def test_split_keeps_every_terminator_once(x):
    text = normalize(x)
    joined = " ".join(split_sentences(text))
    for term in "।?!.":
        assert joined.count(term) == text.count(term)
    assert all(s for s in split_sentences(text))


@pytest.mark.parametrize("text,kind", [
    ("কটা বাজে?", SentenceType.INTERROGATIVE),
    ("সে এল।", SentenceType.DECLARATIVE),
    ("He came.", SentenceType.DECLARATIVE),
    ("বাহ!", SentenceType.EXCLAMATORY),
    ("সে এল", SentenceType.UNKNOWN),
    ("", SentenceType.UNKNOWN),
])
def test_detect_sentence_type(text, kind):
    assert detect_sentence_type(tokenize(text)) is kind


@given(texts)
def test_detect_total_and_never_imperative(x):
    toks = tokenize(normalize(x))
    kind = detect_sentence_type(toks)
    assert kind is detect_sentence_type(toks)
    assert kind is not SentenceType.IMPERATIVE
