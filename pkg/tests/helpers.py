"""Small builders shared by the classifier tests."""

import numpy as np

from sembangla.classifiers import Dataset, FeatureMatrix
from sembangla.features import N_DENSE, build_vocabulary, vectorize


def text_dataset(docs, labels, categories=None):
    vocab = build_vocabulary(docs)
    X = FeatureMatrix.stack([vectorize(d, vocab) for d in docs], len(vocab))
    categories = categories or sorted(set(labels))
    y = [categories.index(l) for l in labels]
    return Dataset(X, y, categories), vocab


def dense_dataset(points, y, categories=("a", "b")):
    """Only dense columns; no term block."""
    D = np.asarray(points, dtype=float)
    n = len(D)
    X = FeatureMatrix(np.zeros((n, 0)), np.zeros((n, 0)), D)
    return Dataset(X, y, categories)


def pad_dense(points):
    D = np.zeros((len(points), N_DENSE))
    D[:, : np.shape(points)[1]] = points
    return D


def count_dataset(docs, labels, categories=None, vocab=None):
    """Term counts only (no dense block), for the pure multinomial checks."""
    vocab = vocab or sorted({t for d in docs for t in d.split()})
    index = {t: i for i, t in enumerate(vocab)}
    C = np.zeros((len(docs), len(vocab)))
    for r, d in enumerate(docs):
        for t in d.split():
            if t in index:
                C[r, index[t]] += 1
    categories = list(categories or sorted(set(labels)))
    X = FeatureMatrix(C, C.copy(), np.zeros((len(docs), 0)))
    return Dataset(X, [categories.index(l) for l in labels], categories), vocab
