"""C4.5-style decision tree: gain-ratio splits and pessimistic pruning.

Term features enter as binary presence tests, dense features as
midpoint-threshold tests.  Every split is stored uniformly as
``x[feature] <= threshold`` -> left.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from ..errors import DataError
from .base import Classifier, Dataset, presence_and_dense

_EPS = 1e-12


def _entropy_rows(counts: np.ndarray) -> np.ndarray:
    """Entropy (bits) of each row of a class-count matrix."""
    counts = np.atleast_2d(counts).astype(np.float64)
    tot = counts.sum(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(tot > 0, counts / np.where(tot > 0, tot, 1), 0.0)
        logs = np.where(p > 0, np.log2(np.where(p > 0, p, 1.0)), 0.0)
    return -(p * logs).sum(axis=1)


@dataclass(frozen=True)
class Split:
    feature: int
    threshold: float
    gain: float
    gain_ratio: float


def candidate_splits(Z: np.ndarray, y: np.ndarray, K: int, n_terms: int, min_leaf: int):
    """All admissible splits at a node with their gain and gain ratio.

    Columns ``< n_terms`` are binary presence columns (one threshold, 0.5);
    the rest get a threshold at every midpoint of consecutive distinct values.
    Both branches must hold at least ``min_leaf`` examples.
    """
    n = len(y)
    Y = np.zeros((n, K))
    Y[np.arange(n), y] = 1.0
    parent = Y.sum(axis=0)
    h_parent = _entropy_rows(parent)[0]
    feats, thrs, gains, ratios = [], [], [], []

    def score(left_counts, cols, thresholds):
        n_left = left_counts.sum(axis=1)
        n_right = n - n_left
        ok = (n_left >= min_leaf) & (n_right >= min_leaf)
        if not ok.any():
            return
        lc = left_counts[ok]
        rc = parent - lc
        nl = n_left[ok] / n
        nr = n_right[ok] / n
        gain = h_parent - nl * _entropy_rows(lc) - nr * _entropy_rows(rc)
        split_info = -(nl * np.log2(nl) + nr * np.log2(nr))
        feats.extend(cols[ok])
        thrs.extend(thresholds[ok])
        gains.extend(gain)
        ratios.extend(gain / split_info)

    if n_terms:
        P = Z[:, :n_terms] > 0.5
        absent_counts = (~P).T.astype(np.float64) @ Y  # left branch = absent
        score(absent_counts, np.arange(n_terms), np.full(n_terms, 0.5))
    for f in range(n_terms, Z.shape[1]):
        col = Z[:, f]
        order = np.argsort(col, kind="stable")
        sc = col[order]
        cum = np.cumsum(Y[order], axis=0)
        boundary = np.flatnonzero(sc[1:] > sc[:-1])  # last index of each left block
        if len(boundary) == 0:
            continue
        thresholds = (sc[boundary] + sc[boundary + 1]) / 2.0
        score(cum[boundary], np.full(len(boundary), f), thresholds)
    return (np.array(feats, dtype=np.int64), np.array(thrs, dtype=np.float64),
            np.array(gains), np.array(ratios))


def best_split(Z, y, K, n_terms, min_leaf) -> Split | None:
    """Highest gain-ratio split with positive gain.

    When the node is impure but no split gains information (XOR-like
    interactions), the first admissible candidate is returned so that
    deeper tests can still separate the classes; pruning removes such
    splits when they do not pay off.
    """
    feats, thrs, gains, ratios = candidate_splits(Z, y, K, n_terms, min_leaf)
    if len(feats) == 0:
        return None
    positive = gains > _EPS
    if positive.any():
        masked = np.where(positive, ratios, -np.inf)
        i = int(np.argmax(masked))
    else:
        i = 0
    return Split(int(feats[i]), float(thrs[i]), float(gains[i]), float(ratios[i]))


def added_errors(N: float, e: float, confidence: float) -> float:
    """Extra errors of C4.5's pessimistic upper confidence bound."""
    if confidence > 0.5 or confidence <= 0:
        raise DataError("pruning confidence must lie in (0, 0.5]")
    if e < 1:
        base = N * (1 - confidence ** (1.0 / N))
        if e == 0:
            return base
        return base + e * (added_errors(N, 1.0, confidence) - base)
    if e + 0.5 >= N:
        return max(N - e, 0.0)
    z = norm.ppf(1 - confidence)
    f = (e + 0.5) / N
    r = (f + z * z / (2 * N) + z * math.sqrt(f / N - f * f / N + z * z / (4 * N * N))) / (1 + z * z / N)
    return r * N - e


class _Node:
    __slots__ = ("counts", "split", "left", "right")

    def __init__(self, counts):
        self.counts = counts
        self.split = None
        self.left = None
        self.right = None

    @property
    def is_leaf(self):
        return self.split is None


class TreeModel(Classifier):
    kind = "tree"

    def __init__(self, categories, n_terms, schema, hyperparams,
                 feature, threshold, left, right, counts):
        super().__init__(categories, n_terms, schema, hyperparams)
        self.feature = feature      # (nodes,) -1 at leaves
        self.threshold = threshold
        self.left = left
        self.right = right
        self.counts = counts        # (nodes, K) training class counts

    @property
    def n_nodes(self):
        return len(self.feature)

    @property
    def n_leaves(self):
        return int((self.feature < 0).sum())

    def depth(self, node=0) -> int:
        if self.feature[node] < 0:
            return 0
        return 1 + max(self.depth(self.left[node]), self.depth(self.right[node]))

    def leaf_index(self, Z: np.ndarray) -> np.ndarray:
        out = np.empty(len(Z), dtype=np.int64)
        for r in range(len(Z)):
            node = 0
            while self.feature[node] >= 0:
                if Z[r, self.feature[node]] <= self.threshold[node]:
                    node = self.left[node]
                else:
                    node = self.right[node]
            out[r] = node
        return out

    def _proba(self, X):
        leaves = self.leaf_index(presence_and_dense(X))
        c = self.counts[leaves]
        tot = c.sum(axis=1, keepdims=True)
        return c / tot

    def describe(self) -> str:
        lines = []

        def walk(node, indent):
            if self.feature[node] < 0:
                c = self.counts[node]
                lines.append(f"{indent}-> {self.categories[int(np.argmax(c))]} {c.astype(int).tolist()}")
                return
            f, t = self.feature[node], self.threshold[node]
            name = f"term#{f}" if f < self.n_terms else f"dense#{f - self.n_terms}"
            lines.append(f"{indent}{name} <= {t:g}")
            walk(self.left[node], indent + "|  ")
            lines.append(f"{indent}{name} > {t:g}")
            walk(self.right[node], indent + "|  ")

        walk(0, "")
        return "\n".join(lines)

    def get_state(self):
        return self._base_meta(), {
            "feature": self.feature, "threshold": self.threshold,
            "left": self.left, "right": self.right, "counts": self.counts,
        }

    @classmethod
    def from_state(cls, meta, a):
        return cls(meta["categories"], meta["n_terms"], meta["schema"], meta["hyperparams"],
                   a["feature"], a["threshold"], a["left"], a["right"], a["counts"])


def _grow(Z, y, K, n_terms, min_leaf) -> _Node:
    node = _Node(np.bincount(y, minlength=K).astype(np.float64))
    if (node.counts > 0).sum() <= 1 or len(y) < 2 * min_leaf:
        return node
    split = best_split(Z, y, K, n_terms, min_leaf)
    if split is None:
        return node
    go_left = Z[:, split.feature] <= split.threshold
    node.split = split
    node.left = _grow(Z[go_left], y[go_left], K, n_terms, min_leaf)
    node.right = _grow(Z[~go_left], y[~go_left], K, n_terms, min_leaf)
    return node


def _leaf_estimate(counts, confidence):
    N = counts.sum()
    e = N - counts.max()
    return e + added_errors(N, e, confidence)


def _prune(node: _Node, confidence: float) -> float:
    """Prune bottom-up; returns the node's estimated error count."""
    leaf_est = _leaf_estimate(node.counts, confidence)
    if node.is_leaf:
        return leaf_est
    subtree_est = _prune(node.left, confidence) + _prune(node.right, confidence)
    if subtree_est >= leaf_est:
        node.split = node.left = node.right = None
        return leaf_est
    return subtree_est


def _flatten(root: _Node, K: int):
    feature, threshold, left, right, counts = [], [], [], [], []
    stack = [(root, None, None)]
    while stack:
        node, parent, side = stack.pop()
        idx = len(feature)
        if parent is not None:
            (left if side == "L" else right)[parent] = idx
        feature.append(node.split.feature if node.split else -1)
        threshold.append(node.split.threshold if node.split else 0.0)
        left.append(-1)
        right.append(-1)
        counts.append(node.counts)
        if node.split:
            stack.append((node.right, idx, "R"))
            stack.append((node.left, idx, "L"))
    return (np.array(feature, dtype=np.int64), np.array(threshold),
            np.array(left, dtype=np.int64), np.array(right, dtype=np.int64),
            np.array(counts).reshape(-1, K))


def train_decision_tree(data: Dataset, min_leaf: int = 2, confidence: float = 0.25,
                        prune: bool = True) -> TreeModel:
    if len(data) == 0:
        raise DataError("cannot train a decision tree on empty data")
    if min_leaf < 1:
        raise DataError("min_leaf must be at least 1")
    K = data.n_categories
    Z = presence_and_dense(data.X)
    root = _grow(Z, data.y, K, data.X.n_terms, min_leaf)
    if prune:
        _prune(root, confidence)
    arrays = _flatten(root, K)
    return TreeModel(data.categories, data.X.n_terms, data.X.schema,
                     {"min_leaf": min_leaf, "confidence": confidence, "prune": prune},
                     *arrays)
