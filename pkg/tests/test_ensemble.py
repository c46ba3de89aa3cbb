import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from helpers import dense_dataset
from oracles import all_assignments, vote_oracle
from sembangla.classifiers import FeatureMatrix, train_all
from sembangla.ensemble import (
    SOURCES,
    EnsembleConfig,
    Prediction,
    Source,
    classify_with_null,
    route_recursive,
    vote,
)
from sembangla.errors import DataError
from sembangla.retrieval import CategoryTree

LABELS = ["A", "B", "C", "D", None]


def preds(*labels):
    return [Prediction(l, s) for l, s in zip(labels, SOURCES)]


class Fixed:
    """Stand-in model returning one fixed distribution."""

    def __init__(self, categories, proba, kind="nb"):
        self.categories = list(categories)
        self.proba = np.asarray(proba, dtype=float)
        self.kind = kind

    def predict_proba(self, features):
        return self.proba


def node_models(categories, proba):
    return {s.value: Fixed(categories, proba, s.value) for s in SOURCES}


def make_tree(paths):
    tree = CategoryTree()
    for i, p in enumerate(paths):
        tree.add(p, f"s{i}")
    return tree


def test_exhaustive_oracle():
    cases = list(all_assignments(LABELS))
    assert len(cases) == 625
    for labels in cases:
        out = vote(preds(*labels))
        winners, all_null = vote_oracle(labels)
        assert out.all_null == all_null
        assert frozenset(out.winners) == winners, labels
        assert sum(out.weights.values()) + out.null_weight == pytest.approx(1.0, abs=1e-12)
        for w in out.weights.values():
            assert (w / 0.25) == pytest.approx(round(w / 0.25), abs=1e-12)


@pytest.mark.parametrize("labels,winners,weight", [
    (("A", "A", "A", "B"), {"A"}, 0.75),
    (("A", "B", "C", "D"), {"A", "B", "C", "D"}, 0.25),
    (("A", None, None, None), {"A"}, 0.25),
    (("A", "B", None, None), {"A", "B"}, 0.25),
    (("A", "A", "A", "A"), {"A"}, 1.0),
    (("A", "A", "B", "B"), {"A", "B"}, 0.5),
])
def test_vote_examples(labels, winners, weight):
    out = vote(preds(*labels))
    assert set(out.winners) == winners
    assert out.weights["A"] == weight


def test_all_null():
    out = vote(preds(None, None, None, None))
    assert out.all_null and out.winners == () and out.null_weight == 1.0


def test_vote_needs_four_sources():
    with pytest.raises(DataError):
        vote(preds("A", "B", "C"))
    with pytest.raises(DataError):
        vote([Prediction("A", Source.NB)] * 4)


def test_weights_must_sum_to_one():
    with pytest.raises(DataError):
        EnsembleConfig(per_classifier_weight=0.3)


@given(st.tuples(*[st.sampled_from(LABELS)] * 4), st.permutations(range(4)))
def test_permutation_invariant(labels, perm):
    a = vote(preds(*labels))
    b = vote(preds(*[labels[i] for i in perm]))
    assert set(a.winners) == set(b.winners) and a.weights == b.weights
    agree = max((labels.count(c) for c in LABELS[:4]), default=0)
    if agree >= 3:
        assert len(a.winners) == 1
    if len(a.winners) == 4:
        assert len(set(labels)) == 4 and None not in labels


FLOOR = EnsembleConfig(null_proba_floor=0.4)


@pytest.mark.parametrize("proba,expected", [
    ([0.9, 0.1], "x"),
    ([1 / 7] * 7, None),
    ([0.4, 0.3, 0.3], "x"),  # equality emits the category
    ([0.39, 0.31, 0.3], None),
])
def test_classify_with_null(proba, expected):
    cats = ["x", "y", "z", "u", "v", "w", "t"][: len(proba)]
    p = classify_with_null(Fixed(cats, proba), None, FLOOR)
    assert p.category == expected and p.source is Source.NB


def test_route_single_level():
    tree = make_tree([("A",), ("B",)])
    r = route_recursive(None, tree, {(): node_models(["A", "B"], [0.9, 0.1])})
    assert r.paths == [("A",)] and not r.fallback


def test_route_multi_winner_explores_both():
    tree = make_tree([("A", "a1"), ("A", "a2"), ("B", "b1"), ("B", "b2")])
    root = {s.value: Fixed(["A", "B"], [0.9, 0.1] if i % 2 else [0.1, 0.9], s.value)
            for i, s in enumerate(SOURCES)}
    models = {(): root,
              ("A",): node_models(["a1", "a2"], [0.8, 0.2]),
              ("B",): node_models(["b1", "b2"], [0.3, 0.7])}
    r = route_recursive(None, tree, models)
    assert sorted(r.paths) == [("A", "a1"), ("B", "b2")]
    assert [n for n, _ in r.votes] == [(), ("A",), ("B",)]


def test_single_child_passes_through():
    tree = make_tree([("A", "only")])
    assert route_recursive(None, tree, {}).paths == [("A", "only")]


def test_missing_models_name_node():
    tree = make_tree([("A", "a1"), ("A", "a2"), ("B",)])
    with pytest.raises(DataError, match="node A"):
        route_recursive(None, tree, {(): node_models(["A", "B"], [1.0, 0.0])})


def test_all_null_root_falls_back():
    tree = make_tree([("A",), ("B",), ("C",)])
    r = route_recursive(None, tree, {(): node_models(["A", "B", "C"], [0.34, 0.33, 0.33])},
                        FLOOR)
    assert r.paths == [()] and r.fallback


def test_two_level_separable():
    # root separates on x0, the A subtree on x1; every classifier agrees
    rng = np.random.default_rng(0)
    pts = rng.random((80, 2))
    top = np.where(pts[:, 0] < 0.5, 0, 1)
    sub = np.where(pts[:, 1] < 0.5, 0, 1)
    margin = (np.abs(pts[:, 0] - 0.5) > 0.1) & (np.abs(pts[:, 1] - 0.5) > 0.1)
    pts, top, sub = pts[margin], top[margin], sub[margin]
    hp = {"mlp": {"epochs": 800, "seed": 42}}
    root = train_all(dense_dataset(pts, top, ("A", "B")), hp)
    in_a = top == 0
    node_a = train_all(dense_dataset(pts[in_a], sub[in_a], ("a1", "a2")), hp)
    tree = make_tree([("A", "a1"), ("A", "a2"), ("B",)])
    q = FeatureMatrix(np.zeros((1, 0)), np.zeros((1, 0)), np.array([[0.1, 0.9]]))
    r = route_recursive(q, tree, {(): root, ("A",): node_a})
    assert r.paths == [("A", "a2")]
    # audit: each edge was a winner of the vote at its parent
    outcomes = dict(r.votes)
    for path in r.paths:
        for i in range(len(path)):
            if path[:i] in outcomes:
                assert path[i] in outcomes[path[:i]].winners
