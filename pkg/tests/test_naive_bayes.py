import numpy as np
import pytest
from hypothesis import given, strategies as st

from helpers import count_dataset, text_dataset
from oracles import nb_direct_product
from sembangla.classifiers import Dataset, train_naive_bayes
from sembangla.errors import DataError, SchemaMismatchError
from sembangla.features import FeatureVector, vectorize


def test_hand_example():
    data, vocab = count_dataset(["x x y", "y z z"], ["A", "B"])
    model = train_naive_bayes(data, alpha=1.0)
    q, _ = count_dataset(["x"], ["A"], ["A", "B"], vocab)
    p = model.predict_proba(q.X)[0]
    # p(x|A) = 3/6, p(x|B) = 1/6, equal priors
    assert abs(p[0] - 0.75) <= 1e-9 and abs(p[1] - 0.25) <= 1e-9


def test_hand_example_with_dense_block():
    # identical dense values in both classes cancel out of the posterior
    data, vocab = text_dataset(["x x y", "y z z"], ["A", "B"])
    model = train_naive_bayes(data)
    p = model.predict_proba(vectorize("x", vocab))
    np.testing.assert_allclose(p, [0.75, 0.25], atol=1e-9)


def test_empty_vector_gives_prior():
    data, vocab = count_dataset(["a", "a b", "b"], ["A", "A", "B"])
    model = train_naive_bayes(data)
    q, _ = count_dataset([""], ["A"], ["A", "B"], vocab)
    np.testing.assert_allclose(model.predict_proba(q.X)[0], [2 / 3, 1 / 3], atol=1e-12)


def test_likelihoods_sum_to_one():
    data, _ = text_dataset(["a b c", "c d", "d d e"], ["A", "B", "B"])
    model = train_naive_bayes(data, alpha=0.5)
    np.testing.assert_allclose(np.exp(model.log_likelihood).sum(axis=1), 1.0, atol=1e-12)
    for table in model.bin_log_likelihood:
        np.testing.assert_allclose(np.exp(table).sum(axis=1), 1.0, atol=1e-12)


def test_errors():
    data, _ = count_dataset(["a"], ["A"], ["A", "B"])
    with pytest.raises(DataError):
        train_naive_bayes(data)
    with pytest.raises(DataError):
        train_naive_bayes(data.subset([]))


def test_schema_mismatch():
    data, vocab = text_dataset(["a", "b"], ["A", "B"])
    model = train_naive_bayes(data)
    fv = vectorize("a", vocab)
    bad = FeatureVector(fv.ids, fv.weights, fv.counts, fv.dense, schema="fv0-d3")
    with pytest.raises(SchemaMismatchError):
        model.predict_proba(bad)


docs = st.lists(st.text(st.sampled_from("abcdefghij"), min_size=1, max_size=6)
                .map(lambda s: " ".join(s)), min_size=2, max_size=6)


@given(docs, docs, st.text(st.sampled_from("abcdefghij"), max_size=6))
def test_log_space_equals_direct_product(da, db, query):
    n = min(len(da), len(db))  # balanced classes
    da, db = da[:n], db[:n]
    vocab = sorted({t for d in da + db for t in d.split()})
    assert len(vocab) <= 10
    data, _ = count_dataset(da + db, ["A"] * n + ["B"] * n, ["A", "B"], vocab)
    model = train_naive_bayes(data)
    q = " ".join(query)
    qd, _ = count_dataset([q], ["A"], ["A", "B"], vocab)
    expected = nb_direct_product([[d.split() for d in da], [d.split() for d in db]],
                                 q.split(), set(vocab))
    got = model.predict_proba(qd.X)[0]
    np.testing.assert_allclose(got, expected, rtol=1e-9, atol=0)


@given(st.integers(0, 1000))
def test_duplication_with_scaled_alpha(seed):
    rng = np.random.default_rng(seed)
    data, vocab = text_dataset(
        [" ".join(rng.choice(list("abcdef"), rng.integers(1, 6))) for _ in range(8)],
        ["A", "B"] * 4)
    doubled = Dataset(data.X.rows(np.r_[np.arange(8), np.arange(8)]),
                      np.r_[data.y, data.y], data.categories)
    m1 = train_naive_bayes(data, alpha=1.0)
    m2 = train_naive_bayes(doubled, alpha=2.0)
    np.testing.assert_allclose(m1.predict_proba(data.X), m2.predict_proba(data.X),
                               atol=1e-12, rtol=0)


def test_predict_ties_lowest_index():
    data, vocab = count_dataset(["a", "b"], ["A", "B"])
    model = train_naive_bayes(data)
    q, _ = count_dataset([""], ["A"], ["A", "B"], vocab)
    assert model.predict(q.X)[0] == 0
