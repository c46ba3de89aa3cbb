import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sembangla.errors import DataError
from sembangla.features import (
    DENSE_FEATURES,
    N_DENSE,
    SCHEMA_VERSION,
    SynonymLexicon,
    build_vocabulary,
    entropy,
    expand_query,
    vectorize,
)
from sembangla.morphology import analyze_query
from sembangla.text import tokenize

words = st.lists(st.sampled_from(list("abcdefgh")), min_size=1, max_size=12)


def test_vocabulary_counts():
    v = build_vocabulary(["a b", "a"])
    assert v.doc_freq("a") == 2 and v.doc_freq("b") == 1 and v.total_documents == 2
    assert v.idf_of("a") == pytest.approx(1.0, abs=1e-12)
    assert "z" not in v and v.doc_freq("z") == 0


def test_vocabulary_counts_documents_not_occurrences():
    v = build_vocabulary(["a a a", "b"])
    assert v.doc_freq("a") == 1


def test_empty_corpus():
    with pytest.raises(DataError):
        build_vocabulary([])


def test_term_ids_dense_and_sorted():
    v = build_vocabulary(["c b", "a"])
    assert v.terms == ["a", "b", "c"]
    assert [v.term_ids[t] for t in v.terms] == [0, 1, 2]
    assert (v.df >= 1).all()


def test_vectorize_hand_example():
    v = build_vocabulary(["a b"])  # idf(a) = idf(b) = 1
    fv = vectorize("a a b", v)
    np.testing.assert_allclose(fv.weights, [2 / math.sqrt(5), 1 / math.sqrt(5)], atol=1e-12)
    np.testing.assert_allclose(fv.weights, [0.894, 0.447], atol=1e-3)
    assert fv.dense[0] == 3 and fv.dense[1] == 2


def test_vectorize_omits_absent_and_oov():
    v = build_vocabulary(["a b c"])
    fv = vectorize("a z", v)
    assert fv.ids.tolist() == [v.term_ids["a"]]
    assert fv.dense[0] == 2  # the OOV token still counts in length


def test_dense_schema(table, lexicon):
    toks = tokenize("সে রান করেছে?")
    v = build_vocabulary([toks])
    fv = vectorize(toks, v, analyze_query(toks, table, lexicon))
    assert len(fv.dense) == N_DENSE == len(DENSE_FEATURES)
    assert fv.schema == SCHEMA_VERSION
    d = dict(zip(DENSE_FEATURES, fv.dense))
    assert d["tense=PresentPerfect"] == 1.0
    assert d["type=Interrogative"] == 1.0
    assert sum(v for k, v in d.items() if k.startswith("tense=")) == 1.0


@given(words, words)
def test_sparse_unit_norm_and_sorted(doc, query):
    v = build_vocabulary([" ".join(doc)])
    fv = vectorize(" ".join(query), v)
    if len(fv.ids):
        assert abs(np.linalg.norm(fv.weights) - 1.0) <= 1e-9
        assert (np.diff(fv.ids) > 0).all()
        assert (fv.weights >= 0).all() and np.isfinite(fv.weights).all()
    assert fv == vectorize(" ".join(query), v)


@pytest.mark.parametrize("text,bits", [
    ("a b c d", 2.0),
    ("a a b b", 1.0),
    ("a a a b", 0.8113),
])
def test_entropy_examples(text, bits):
    assert entropy(text) == pytest.approx(bits, abs=1e-4)


def test_entropy_empty():
    with pytest.raises(DataError):
        entropy([])


@given(words)
def test_entropy_bounds(ws):
    h = entropy(ws)
    distinct = len(set(ws))
    assert -1e-12 <= h <= math.log2(distinct) + 1e-12
    assert (abs(h) < 1e-12) == (distinct == 1)


def test_synonym_lexicon_drops_self_mapping():
    lex = SynonymLexicon.parse("ক\tক,খ\n")
    assert lex.get("ক") == ("খ",)


def test_expand_picks_highest_df():
    vocab = build_vocabulary(["p"] * 2 + ["q"] * 5 + ["r"])
    lex = SynonymLexicon({"x": ["p", "q"]})
    out, replaced = expand_query(tokenize("x r"), lex, vocab)
    assert [t.normalized for t in out] == ["q", "r"]
    assert replaced == [("x", "q")]


def test_expand_leaves_known_and_unlisted():
    vocab = build_vocabulary(["a b"])
    lex = SynonymLexicon({"a": ["b"]})
    out, replaced = expand_query(tokenize("a zz"), lex, vocab)
    assert [t.normalized for t in out] == ["a", "zz"] and replaced == []


@given(words)
def test_expand_noop_when_all_known(ws):
    vocab = build_vocabulary([" ".join(ws)])
    lex = SynonymLexicon({w: ["h"] for w in ws})
    toks = tokenize(" ".join(ws))
    out, replaced = expand_query(toks, lex, vocab)
    assert out == toks and replaced == []
