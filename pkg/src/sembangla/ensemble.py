"""Hard-label weighted voting over the four classifiers and recursive
routing down the category tree.

Each classifier carries a quarter of the vote.  A category wins alone when
it collects more than half; otherwise every distinct non-null prediction
survives and is explored at the next level.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import DataError, InvariantError


class Source(enum.Enum):
    NB = "nb"
    SVM = "svm"
    TREE = "tree"
    MLP = "mlp"


SOURCES = tuple(Source)


@dataclass(frozen=True)
class Prediction:
    category: str | None  # None is a NULL prediction
    source: Source


@dataclass(frozen=True)
class EnsembleConfig:
    per_classifier_weight: float = 0.25
    win_threshold: float = 0.50
    null_proba_floor: float = 0.25

    def __post_init__(self):
        if abs(4 * self.per_classifier_weight - 1.0) > 1e-12:
            raise DataError("four classifier weights must sum to 1")


@dataclass(frozen=True)
class VoteOutcome:
    winners: tuple[str, ...]
    weights: dict = field(hash=False)
    null_weight: float = 0.0
    all_null: bool = False

    @property
    def single(self) -> str | None:
        return self.winners[0] if len(self.winners) == 1 else None

    def to_dict(self) -> dict:
        return {"winners": list(self.winners),
                "weights": {k: self.weights[k] for k in sorted(self.weights)},
                "null_weight": self.null_weight, "all_null": self.all_null}


def vote(preds: Sequence[Prediction], config: EnsembleConfig = EnsembleConfig()) -> VoteOutcome:
    if len(preds) != 4 or {p.source for p in preds} != set(SOURCES):
        raise DataError("vote needs exactly one prediction from each of the four classifiers")
    w = config.per_classifier_weight
    weights: dict[str, float] = {}
    nulls = 0
    for p in preds:
        if p.category is None:
            nulls += 1
        else:
            weights[p.category] = weights.get(p.category, 0.0) + w
    null_weight = nulls * w
    if not weights:
        return VoteOutcome((), weights, null_weight, all_null=True)
    ranked = tuple(sorted(weights, key=lambda c: (-weights[c], c)))
    top = ranked[0]
    if weights[top] > config.win_threshold:
        return VoteOutcome((top,), weights, null_weight)
    # all-distinct and every weaker split keep every non-null candidate
    return VoteOutcome(ranked, weights, null_weight)


def classify_with_null(model, features, config: EnsembleConfig = EnsembleConfig(),
                       source: Source | None = None) -> Prediction:
    """Argmax category, or NULL when the top probability is below the floor."""
    proba = np.asarray(model.predict_proba(features))
    if proba.ndim == 2:
        if proba.shape[0] != 1:
            raise DataError("classify_with_null takes a single query")
        proba = proba[0]
    source = source or Source(model.kind)
    k = int(np.argmax(proba))
    if proba[k] < config.null_proba_floor:
        return Prediction(None, source)
    return Prediction(model.categories[k], source)


def vote_models(models: Mapping[str, object], features, config: EnsembleConfig) -> VoteOutcome:
    preds = [classify_with_null(models[s.value], features, config, s) for s in SOURCES]
    return vote(preds, config)


@dataclass
class Routing:
    paths: list[tuple[str, ...]]
    votes: list[tuple[tuple[str, ...], VoteOutcome]] = field(default_factory=list)
    fallback: bool = False

    def to_dict(self) -> dict:
        return {
            "paths": [list(p) for p in self.paths],
            "votes": [{"node": list(n), **o.to_dict()} for n, o in self.votes],
            "fallback": self.fallback,
        }


def route_recursive(features, tree, models: Mapping[tuple, Mapping[str, object]],
                    config: EnsembleConfig = EnsembleConfig()) -> Routing:
    """Breadth-first descent keeping every vote winner.

    ``tree`` needs ``children(path) -> list[str]``.  A node whose vote is
    all-NULL terminates there, so its whole subtree is searched; at the root
    this means the entire repository.
    """
    routing = Routing([])
    frontier = [()]
    while frontier:
        nxt = []
        for path in frontier:
            kids = tree.children(path)
            if not kids:
                routing.paths.append(path)
                continue
            if len(kids) == 1:
                nxt.append(path + (kids[0],))
                continue
            node_models = models.get(path)
            if node_models is None or any(s.value not in node_models for s in SOURCES):
                raise DataError(f"no trained models for node {'/'.join(path) or '<root>'}")
            outcome = vote_models(node_models, features, config)
            routing.votes.append((path, outcome))
            if outcome.all_null:
                routing.paths.append(path)
                if not path:
                    routing.fallback = True
                continue
            for c in outcome.winners:
                if c not in kids:
                    raise InvariantError(f"vote winner {c!r} is not a child of {path}")
                nxt.append(path + (c,))
        frontier = nxt
    return routing
