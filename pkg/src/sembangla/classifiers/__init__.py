from .base import (
    Classifier,
    Dataset,
    FeatureMatrix,
    LabeledExample,
    argmax_lowest,
)
from .mlp import MLPModel, train_mlp
from .naive_bayes import NaiveBayesModel, train_naive_bayes
from .svm import SVMModel, train_svm_smo
from .tree import TreeModel, train_decision_tree

KINDS = ("nb", "svm", "tree", "mlp")

MODEL_CLASSES = {
    "nb": NaiveBayesModel,
    "svm": SVMModel,
    "tree": TreeModel,
    "mlp": MLPModel,
}

TRAINERS = {
    "nb": train_naive_bayes,
    "svm": train_svm_smo,
    "tree": train_decision_tree,
    "mlp": train_mlp,
}


def train_classifier(kind: str, data: Dataset, **hyperparams) -> Classifier:
    try:
        trainer = TRAINERS[kind]
    except KeyError:
        raise ValueError(f"unknown classifier kind {kind!r}") from None
    return trainer(data, **hyperparams)


def train_all(data: Dataset, hyperparams: dict | None = None) -> dict[str, Classifier]:
    """Train the four classifiers on one dataset, keyed by kind."""
    hyperparams = hyperparams or {}
    return {k: train_classifier(k, data, **hyperparams.get(k, {})) for k in KINDS}


__all__ = [
    "Classifier", "Dataset", "FeatureMatrix", "LabeledExample", "argmax_lowest",
    "NaiveBayesModel", "SVMModel", "TreeModel", "MLPModel",
    "train_naive_bayes", "train_svm_smo", "train_decision_tree", "train_mlp",
    "train_classifier", "train_all", "KINDS", "MODEL_CLASSES", "TRAINERS",
]
