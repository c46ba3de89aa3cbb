"""Shared training data containers and the classifier contract."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import DataError, SchemaMismatchError
from ..features import SCHEMA_VERSION, FeatureVector


@dataclass
class FeatureMatrix:
    """Row-stacked feature vectors: raw term counts, TF-IDF weights, dense."""

    counts: np.ndarray
    weights: np.ndarray
    dense: np.ndarray
    schema: str = SCHEMA_VERSION

    @property
    def n_rows(self) -> int:
        return self.dense.shape[0]

    @property
    def n_terms(self) -> int:
        return self.counts.shape[1]

    def __len__(self):
        return self.n_rows

    def rows(self, idx) -> "FeatureMatrix":
        idx = np.asarray(idx)
        return FeatureMatrix(self.counts[idx], self.weights[idx], self.dense[idx], self.schema)

    @classmethod
    def stack(cls, vectors: Sequence[FeatureVector], n_terms: int) -> "FeatureMatrix":
        if not vectors:
            raise DataError("no feature vectors to stack")
        schema = vectors[0].schema
        n_dense = len(vectors[0].dense)
        counts = np.zeros((len(vectors), n_terms))
        weights = np.zeros((len(vectors), n_terms))
        dense = np.zeros((len(vectors), n_dense))
        for r, fv in enumerate(vectors):
            if fv.schema != schema:
                raise SchemaMismatchError(f"mixed schemas {schema!r} and {fv.schema!r}")
            if len(fv.ids) and fv.ids[-1] >= n_terms:
                raise SchemaMismatchError(f"term id {fv.ids[-1]} outside vocabulary of {n_terms}")
            counts[r, fv.ids] = fv.counts
            weights[r, fv.ids] = fv.weights
            dense[r] = fv.dense
        return cls(counts, weights, dense, schema)


@dataclass(frozen=True)
class LabeledExample:
    features: FeatureVector
    category: str


class Dataset:
    """Feature matrix plus integer labels into an ordered category list."""

    def __init__(self, X: FeatureMatrix, y, categories: Sequence[str]):
        self.X = X
        self.y = np.asarray(y, dtype=np.int64)
        self.categories = tuple(categories)
        if len(self.y) != X.n_rows:
            raise DataError("label count does not match feature rows")
        if len(self.y) and (self.y.min() < 0 or self.y.max() >= len(self.categories)):
            raise DataError("label index outside category list")

    def __len__(self):
        return len(self.y)

    @property
    def n_categories(self) -> int:
        return len(self.categories)

    def subset(self, idx) -> "Dataset":
        idx = np.asarray(idx, dtype=np.int64)
        return Dataset(self.X.rows(idx), self.y[idx], self.categories)

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.y, minlength=self.n_categories)

    @classmethod
    def from_examples(cls, examples: Sequence[LabeledExample], n_terms: int,
                      categories: Sequence[str] | None = None) -> "Dataset":
        if categories is None:
            categories = sorted({e.category for e in examples})
        index = {c: i for i, c in enumerate(categories)}
        try:
            y = [index[e.category] for e in examples]
        except KeyError as exc:
            raise DataError(f"category {exc.args[0]!r} not in the category set") from None
        X = FeatureMatrix.stack([e.features for e in examples], n_terms)
        return cls(X, y, categories)


def as_matrix(features, n_terms: int) -> tuple[FeatureMatrix, bool]:
    """Coerce one vector or a matrix to a matrix; flag whether it was single."""
    if isinstance(features, FeatureMatrix):
        return features, False
    if isinstance(features, FeatureVector):
        return FeatureMatrix.stack([features], n_terms), True
    raise TypeError(f"expected FeatureVector or FeatureMatrix, got {type(features).__name__}")


def argmax_lowest(proba: np.ndarray) -> np.ndarray | int:
    """Argmax along the last axis; ties go to the lowest index."""
    return np.argmax(proba, axis=-1)  # numpy already returns the first maximum


def require_finite(X: FeatureMatrix) -> None:
    if not (np.isfinite(X.counts).all() and np.isfinite(X.dense).all()):
        raise DataError("non-finite feature value")


def presence_and_dense(X: FeatureMatrix) -> np.ndarray:
    """Binary term presence followed by the dense block."""
    return np.hstack([(X.counts > 0).astype(np.float64), X.dense])


class Classifier:
    """Common surface of the four trained models.

    Subclasses implement ``_proba(X: FeatureMatrix) -> (n, K)`` and the
    ``get_state`` / ``from_state`` pair used for persistence.
    """

    kind = "base"

    def __init__(self, categories, n_terms, schema, hyperparams):
        self.categories = tuple(categories)
        self.n_terms = int(n_terms)
        self.schema = schema
        self.hyperparams = dict(hyperparams)

    def _check_schema(self, X: FeatureMatrix) -> None:
        if X.schema != self.schema:
            raise SchemaMismatchError(
                f"feature schema {X.schema!r} does not match model schema {self.schema!r}"
            )
        if X.n_terms != self.n_terms:
            raise SchemaMismatchError(
                f"vocabulary size {X.n_terms} does not match model's {self.n_terms}"
            )

    def predict_proba(self, features) -> np.ndarray:
        if isinstance(features, FeatureVector) and features.schema != self.schema:
            raise SchemaMismatchError(
                f"feature schema {features.schema!r} does not match model schema {self.schema!r}"
            )
        X, single = as_matrix(features, self.n_terms)
        self._check_schema(X)
        P = self._proba(X)
        return P[0] if single else P

    def predict(self, features):
        """Index of the most probable category (lowest index on ties)."""
        P = self.predict_proba(features)
        idx = argmax_lowest(P)
        return int(idx) if np.ndim(idx) == 0 else idx

    def predict_label(self, features) -> str:
        return self.categories[self.predict(features)]

    def _base_meta(self) -> dict:
        return {
            "kind": self.kind,
            "categories": list(self.categories),
            "n_terms": self.n_terms,
            "schema": self.schema,
            "hyperparams": self.hyperparams,
        }

    def get_state(self) -> tuple[dict, dict[str, np.ndarray]]:
        raise NotImplementedError

    @classmethod
    def from_state(cls, meta: dict, arrays: dict[str, np.ndarray]) -> "Classifier":
        raise NotImplementedError


def _softmax_rows(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)
