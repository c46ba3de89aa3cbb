"""Multinomial Naive Bayes over term counts with Laplace smoothing.

Dense meta-features are discretized into quartile bins fitted on the
training data and treated as extra categorical attributes.
"""

from __future__ import annotations

import numpy as np

from ..errors import DataError
from .base import Classifier, Dataset, FeatureMatrix, _softmax_rows


def _quartile_edges(col: np.ndarray) -> np.ndarray:
    # Empirical (step) quantiles: duplicating the sample leaves them unchanged.
    return np.unique(np.quantile(col, [0.25, 0.5, 0.75], method="inverted_cdf"))


class NaiveBayesModel(Classifier):
    kind = "nb"

    def __init__(self, categories, n_terms, schema, hyperparams,
                 log_prior, log_likelihood, bin_edges, bin_log_likelihood):
        super().__init__(categories, n_terms, schema, hyperparams)
        self.log_prior = log_prior                  # (K,)
        self.log_likelihood = log_likelihood        # (K, V) log p(term | class)
        self.bin_edges = bin_edges                  # list of (B_j - 1,) arrays
        self.bin_log_likelihood = bin_log_likelihood  # list of (K, B_j)

    def log_scores(self, X: FeatureMatrix) -> np.ndarray:
        """Unnormalized log posteriors, ``(n, K)``."""
        scores = X.counts @ self.log_likelihood.T + self.log_prior
        for j, (edges, table) in enumerate(zip(self.bin_edges, self.bin_log_likelihood)):
            bins = np.searchsorted(edges, X.dense[:, j], side="right")
            scores = scores + table[:, bins].T
        return scores

    def _proba(self, X):
        return _softmax_rows(self.log_scores(X))

    def get_state(self):
        meta = self._base_meta()
        arrays = {"log_prior": self.log_prior, "log_likelihood": self.log_likelihood}
        for j, (e, t) in enumerate(zip(self.bin_edges, self.bin_log_likelihood)):
            arrays[f"bin_edges_{j}"] = e
            arrays[f"bin_ll_{j}"] = t
        meta["n_dense"] = len(self.bin_edges)
        return meta, arrays

    @classmethod
    def from_state(cls, meta, arrays):
        n = meta["n_dense"]
        return cls(meta["categories"], meta["n_terms"], meta["schema"], meta["hyperparams"],
                   arrays["log_prior"], arrays["log_likelihood"],
                   [arrays[f"bin_edges_{j}"] for j in range(n)],
                   [arrays[f"bin_ll_{j}"] for j in range(n)])


def train_naive_bayes(data: Dataset, alpha: float = 1.0) -> NaiveBayesModel:
    if len(data) == 0:
        raise DataError("cannot train Naive Bayes on empty data")
    if alpha <= 0:
        raise DataError("alpha must be positive")
    K = data.n_categories
    class_n = data.class_counts()
    missing = [data.categories[k] for k in range(K) if class_n[k] == 0]
    if missing:
        raise DataError(f"category without training examples: {', '.join(missing)}")
    Y = np.zeros((len(data), K))
    Y[np.arange(len(data)), data.y] = 1.0

    log_prior = np.log(class_n / class_n.sum())
    term_counts = Y.T @ data.X.counts                      # (K, V)
    V = data.X.n_terms
    denom = term_counts.sum(axis=1, keepdims=True) + alpha * V
    log_likelihood = np.log((term_counts + alpha) / denom)

    edges_all, tables = [], []
    for j in range(data.X.dense.shape[1]):
        col = data.X.dense[:, j]
        edges = _quartile_edges(col)
        bins = np.searchsorted(edges, col, side="right")
        B = len(edges) + 1
        counts = np.zeros((K, B))
        np.add.at(counts, (data.y, bins), 1.0)
        table = np.log((counts + alpha) / (class_n[:, None] + alpha * B))
        edges_all.append(edges)
        tables.append(table)

    return NaiveBayesModel(data.categories, V, data.X.schema, {"alpha": alpha},
                           log_prior, log_likelihood, edges_all, tables)
