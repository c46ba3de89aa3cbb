import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import dense_dataset
from oracles import entropy_bits, gain_ratio
from sembangla.classifiers import Dataset, FeatureMatrix, train_decision_tree
from sembangla.classifiers.tree import added_errors, best_split
from sembangla.errors import DataError


def mixed_dataset(presence, dense, y, K=2):
    presence = np.asarray(presence, dtype=float)
    n = len(y)
    X = FeatureMatrix(presence, presence.copy(), np.asarray(dense, dtype=float).reshape(n, -1))
    return Dataset(X, y, [f"c{k}" for k in range(K)])


def test_single_informative_feature():
    data = mixed_dataset([[1, 0], [1, 1], [0, 0], [0, 1]], np.zeros((4, 1)), [0, 0, 1, 1])
    model = train_decision_tree(data)
    assert model.depth() == 1
    assert (model.predict(data.X) == data.y).all()


def test_identical_labels_single_leaf():
    data = dense_dataset([[0.0], [1.0], [2.0]], [1, 1, 1])
    model = train_decision_tree(data)
    assert model.n_leaves == 1 and model.depth() == 0
    assert (model.predict(data.X) == 1).all()


def test_pure_leaf_probability_one():
    data = dense_dataset([[0.0], [0.1], [5.0], [5.1]], [0, 0, 1, 1])
    model = train_decision_tree(data)
    P = model.predict_proba(data.X)
    assert np.array_equal(P.max(axis=1), np.ones(4))


def test_xor_unpruned_depth_two():
    # four points cannot be split twice with two per leaf, so min_leaf is 1
    data = dense_dataset([[0, 0], [0, 1], [1, 0], [1, 1]], [0, 1, 1, 0])
    model = train_decision_tree(data, min_leaf=1, prune=False)
    assert model.depth() == 2
    assert (model.predict(data.X) == data.y).all()


def test_empty_data():
    with pytest.raises(DataError):
        train_decision_tree(dense_dataset(np.zeros((0, 1)), []))


@pytest.mark.parametrize("N,e,rate", [(6, 0, 0.206), (9, 0, 0.143), (1, 0, 0.75)])
def test_pessimistic_bound_textbook_values(N, e, rate):
    assert (e + added_errors(N, e, 0.25)) / N == pytest.approx(rate, abs=5e-4)


def test_pessimistic_bound_normal_approximation():
    # exact binomial gives 0.157; the normal approximation is within 0.005
    assert (1 + added_errors(16, 1, 0.25)) / 16 == pytest.approx(0.157, abs=5e-3)


def test_pruning_collapses_unhelpful_subtree():
    rng = np.random.default_rng(0)
    D = rng.random((40, 3))
    y = (rng.random(40) < 0.5).astype(int)  # labels independent of features
    data = dense_dataset(D, y)
    full = train_decision_tree(data, prune=False)
    pruned = train_decision_tree(data, prune=True)
    assert pruned.n_leaves < full.n_leaves


@settings(max_examples=60)
@given(st.integers(0, 100_000), st.integers(6, 50), st.integers(1, 3))
def test_chosen_split_has_max_gain_ratio(seed, n, min_leaf):
    rng = np.random.default_rng(seed)
    n_terms = 3
    P = (rng.random((n, n_terms)) < 0.4).astype(float)
    D = rng.integers(0, 5, size=(n, 2)).astype(float)
    y = rng.integers(0, 3, size=n)
    Z = np.hstack([P, D])
    split = best_split(Z, y, 3, n_terms, min_leaf)

    best = -1.0
    labels = y.tolist()
    for f in range(Z.shape[1]):
        col = Z[:, f].tolist()
        if f < n_terms:
            thresholds = [0.5]
        else:
            v = sorted(set(col))
            thresholds = [(a + b) / 2 for a, b in zip(v, v[1:])]
        for t in thresholds:
            left = sum(c <= t for c in col)
            if left < min_leaf or n - left < min_leaf:
                continue
            h = entropy_bits(labels)
            l = [lab for c, lab in zip(col, labels) if c <= t]
            r = [lab for c, lab in zip(col, labels) if c > t]
            gain = h - len(l) / n * entropy_bits(l) - len(r) / n * entropy_bits(r)
            if gain > 1e-12:
                best = max(best, gain_ratio(col, labels, t))
    if best < 0:
        return  # no positive-gain split: the fallback rule applies
    assert split is not None
    assert split.gain_ratio == pytest.approx(best, abs=1e-9)
    assert gain_ratio(Z[:, split.feature].tolist(), labels, split.threshold) == pytest.approx(best, abs=1e-9)


@settings(max_examples=25)
@given(st.integers(0, 100_000))
def test_distributions_valid(seed):
    rng = np.random.default_rng(seed)
    data = dense_dataset(rng.random((30, 2)), rng.integers(0, 2, 30))
    P = train_decision_tree(data).predict_proba(data.X)
    assert (P >= 0).all()
    np.testing.assert_allclose(P.sum(axis=1), 1.0, atol=1e-12)
