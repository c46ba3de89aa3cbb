"""Cross-validation, percentage splits, confusion matrices and the
classification metric set (accuracy, kappa, MAE, RMSE, RAE, RRSE and
per-category precision/recall).

Error metrics follow the usual toolkit convention: MAE and RMSE compare
full predicted distributions to one-hot truth, averaged over instances
and categories; RAE and RRSE divide them by the errors of a predictor
that always emits the training-set category prior.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import DataError

NONE_LABEL = "<none>"


def kfold_split(n: int, k: int, seed: int) -> list[list[int]]:
    """Seeded shuffle, then ``k`` contiguous folds whose sizes differ by at most one."""
    if k < 2 or k > n:
        raise DataError(f"need 2 <= k <= n, got k={k}, n={n}")
    perm = np.random.default_rng(seed).permutation(n)
    base, extra = divmod(n, k)
    folds, start = [], 0
    for i in range(k):
        size = base + (1 if i < extra else 0)
        folds.append(perm[start:start + size].tolist())
        start += size
    return folds


def percentage_split(n: int, pct: float, seed: int = 1, shuffle: bool = True):
    """``(train, test)`` index lists; train is the first ``floor(n*pct/100)``.

    ``pct == 100`` is the resubstitution mode: train and test are both
    every instance.
    """
    if pct == 100:
        idx = list(range(n))
        return idx, list(idx)
    if not 0 < pct < 100:
        raise DataError(f"percentage must lie in (0, 100), got {pct}")
    n_train = math.floor(Fraction(str(pct)) * n / 100)
    if n_train == 0 or n_train == n:
        raise DataError(f"{pct}% of {n} instances leaves an empty train or test set")
    order = np.random.default_rng(seed).permutation(n).tolist() if shuffle else list(range(n))
    return order[:n_train], order[n_train:]


@dataclass
class ConfusionMatrix:
    counts: np.ndarray        # rows = actual, columns = predicted
    categories: tuple[str, ...]

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        if self.categories != other.categories:
            raise DataError("cannot add confusion matrices over different categories")
        return ConfusionMatrix(self.counts + other.counts, self.categories)

    def to_text(self) -> str:
        cats = list(self.categories)
        width = max(6, *(len(c) for c in cats), len(str(self.counts.max(initial=0))) + 1)
        head = " " * width + " " + " ".join(c.rjust(width) for c in cats) + "   <- predicted"
        lines = [head]
        for c, row in zip(cats, self.counts):
            lines.append(c.rjust(width) + " " + " ".join(str(int(v)).rjust(width) for v in row))
        return "\n".join(lines)

    def to_tsv(self) -> str:
        lines = ["actual\\predicted\t" + "\t".join(self.categories)]
        for c, row in zip(self.categories, self.counts):
            lines.append(c + "\t" + "\t".join(str(int(v)) for v in row))
        return "\n".join(lines) + "\n"


def confusion(pred: Sequence, truth: Sequence, categories: Sequence | None = None) -> ConfusionMatrix:
    if len(pred) != len(truth):
        raise DataError(f"{len(pred)} predictions for {len(truth)} instances")
    if len(pred) == 0:
        raise DataError("confusion matrix needs at least one instance")
    if categories is None:
        categories = sorted(set(pred) | set(truth), key=str)
    index = {c: i for i, c in enumerate(categories)}
    m = np.zeros((len(categories), len(categories)), dtype=np.int64)
    for p, t in zip(pred, truth):
        try:
            m[index[t], index[p]] += 1
        except KeyError as exc:
            raise DataError(f"label {exc.args[0]!r} outside the category list") from None
    return ConfusionMatrix(m, tuple(str(c) for c in categories))


@dataclass
class EvalReport:
    accuracy: float
    kappa: float | None
    mae: float
    rmse: float
    rae: float | None
    rrse: float | None
    precision: dict[str, float]
    recall: dict[str, float]
    confusion: ConfusionMatrix
    n_instances: int
    n_train: int | None = None
    n_test: int | None = None
    folds: list["EvalReport"] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        d = {
            "accuracy": self.accuracy,
            "kappa": self.kappa,
            "mean_absolute_error": self.mae,
            "root_mean_squared_error": self.rmse,
            "relative_absolute_error": self.rae,
            "root_relative_squared_error": self.rrse,
            "precision": dict(self.precision),
            "recall": dict(self.recall),
            "confusion": {"categories": list(self.confusion.categories),
                          "counts": self.confusion.counts.tolist()},
            "n_instances": self.n_instances,
        }
        if self.n_train is not None:
            d["n_train"] = self.n_train
            d["n_test"] = self.n_test
        if self.folds:
            d["fold_accuracy"] = [f.accuracy for f in self.folds]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2, sort_keys=True)

    def to_text(self) -> str:
        def pct(v):
            return "n/a" if v is None else f"{100 * v:.4f} %"

        def num(v):
            return "n/a" if v is None else f"{v:.4f}"

        correct = int(np.trace(self.confusion.counts[:, :len(self.confusion.categories)]))
        rows = [
            ("Correctly Classified Instances", f"{correct}  ({pct(self.accuracy)})"),
            ("Incorrectly Classified Instances",
             f"{self.confusion.total - correct}  ({pct(1 - self.accuracy)})"),
            ("Kappa statistic", num(self.kappa)),
            ("Mean absolute error", num(self.mae)),
            ("Root mean squared error", num(self.rmse)),
            ("Relative absolute error", pct(self.rae)),
            ("Root relative squared error", pct(self.rrse)),
            ("Total Number of Instances", str(self.n_instances)),
        ]
        if self.n_train is not None:
            rows.append(("Train / test instances", f"{self.n_train} / {self.n_test}"))
        width = max(len(r[0]) for r in rows)
        out = [f"{name.ljust(width)}  {value}" for name, value in rows]
        out.append("")
        cw = max(9, *(len(c) for c in self.precision))
        out.append(f"{'category'.ljust(cw)}  precision  recall")
        for c in self.precision:
            out.append(f"{c.ljust(cw)}  {self.precision[c]:9.4f}  {self.recall[c]:6.4f}")
        out.append("")
        out.append("=== Confusion Matrix ===")
        out.append(self.confusion.to_text())
        return "\n".join(out)


def _ratio(num, den):
    return None if den == 0 else num / den


def compute_metrics(cm: ConfusionMatrix, proba: np.ndarray | None = None,
                    truth: Sequence[int] | None = None,
                    prior: np.ndarray | None = None) -> EvalReport:
    """Metric set from a confusion matrix and optional per-instance distributions.

    ``truth`` holds category indices aligned with ``proba`` rows.  Without
    ``proba`` the predictions are taken as one-hot.  ``prior`` is the
    baseline distribution for RAE/RRSE (defaults to the truth marginals).
    Extra predicted-only columns (such as an abstention label) count as
    errors but get no precision/recall entry of their own.
    """
    C = cm.counts
    total = int(C.sum())
    if total < 1:
        raise DataError("confusion matrix is empty")
    K = C.shape[0]
    diag = int(np.trace(C))
    rows = C.sum(axis=1)
    cols = C.sum(axis=0)
    acc = Fraction(diag, total)
    pe = Fraction(int(np.dot(rows, cols)), total * total)
    kappa = None if pe == 1 else float((acc - pe) / (1 - pe))

    truth_counts = rows.astype(np.float64)
    if prior is None:
        prior = truth_counts / total
    prior = np.asarray(prior, dtype=np.float64)
    n_out = len(prior)

    if proba is not None:
        proba = np.asarray(proba, dtype=np.float64)
        truth = np.asarray(truth, dtype=np.int64)
        if proba.shape[0] != len(truth):
            raise DataError("one distribution per instance is required")
        onehot = np.zeros_like(proba)
        onehot[np.arange(len(truth)), truth] = 1.0
        diff = proba - onehot
        mae = float(np.abs(diff).sum() / (len(truth) * proba.shape[1]))
        rmse = math.sqrt(float((diff ** 2).sum() / (len(truth) * proba.shape[1])))
        n_out = proba.shape[1]
    else:
        errors = total - diag
        mae = 2.0 * errors / (total * n_out)
        rmse = math.sqrt(mae)

    # prior-baseline errors, per truth category, weighted by instance counts
    base_abs = 0.0
    base_sq = 0.0
    sq_sum = float((prior ** 2).sum())
    for k in range(min(K, n_out)):
        if truth_counts[k]:
            base_abs += truth_counts[k] * 2.0 * (1.0 - prior[k])
            base_sq += truth_counts[k] * (sq_sum - prior[k] ** 2 + (1.0 - prior[k]) ** 2)
    base_mae = base_abs / (total * n_out)
    base_rmse = math.sqrt(base_sq / (total * n_out))

    cats = cm.categories
    precision, recall = {}, {}
    for k in range(K):
        if cats[k] == NONE_LABEL:
            continue
        precision[cats[k]] = float(C[k, k] / cols[k]) if cols[k] else 0.0
        recall[cats[k]] = float(C[k, k] / rows[k]) if rows[k] else 0.0

    return EvalReport(float(acc), kappa, mae, rmse, _ratio(mae, base_mae),
                      _ratio(rmse, base_rmse), precision, recall, cm, total)


def _mean(values):
    vals = [v for v in values if v is not None]
    return float(np.mean(vals)) if vals else None


def average_reports(reports: Sequence[EvalReport]) -> EvalReport:
    """Unweighted mean of scalar metrics; confusion matrices are summed."""
    cm = reports[0].confusion
    for r in reports[1:]:
        cm = cm + r.confusion
    cats = list(reports[0].precision)
    return EvalReport(
        accuracy=_mean(r.accuracy for r in reports),
        kappa=_mean(r.kappa for r in reports),
        mae=_mean(r.mae for r in reports),
        rmse=_mean(r.rmse for r in reports),
        rae=_mean(r.rae for r in reports),
        rrse=_mean(r.rrse for r in reports),
        precision={c: _mean(r.precision[c] for r in reports) for c in cats},
        recall={c: _mean(r.recall[c] for r in reports) for c in cats},
        confusion=cm,
        n_instances=sum(r.n_instances for r in reports),
        folds=list(reports),
    )


@dataclass
class PredictionRecord:
    index: int
    fold: int
    truth: str
    predicted: str
    proba: list[float]

    def to_json(self) -> str:
        return json.dumps({"index": self.index, "fold": self.fold, "truth": self.truth,
                           "predicted": self.predicted, "proba": self.proba},
                          ensure_ascii=False)


def evaluate_predictor(predictor, test, prior=None, fold: int = 0, indices=None):
    """Score a trained predictor on a :class:`Dataset`.

    ``predictor.predict`` may return -1 for "no single answer" (used by the
    ensemble); such instances land in an extra ``<none>`` column.
    """
    P = np.asarray(predictor.predict_proba(test.X))
    pred = np.asarray(predictor.predict(test.X))
    cats = list(test.categories)
    labels = [cats[p] if p >= 0 else NONE_LABEL for p in pred]
    truth = [cats[t] for t in test.y]
    cat_list = cats + ([NONE_LABEL] if NONE_LABEL in labels else [])
    cm = confusion(labels, truth, cat_list)
    report = compute_metrics(cm, P, test.y, prior)
    idx = indices if indices is not None else range(len(test))
    records = [PredictionRecord(int(i), fold, t, l, [float(v) for v in row])
               for i, t, l, row in zip(idx, truth, labels, P)]
    return report, records


def _pad(cm: ConfusionMatrix, cats: list[str]) -> ConfusionMatrix:
    if list(cm.categories) == cats:
        return cm
    m = np.zeros((len(cats), len(cats)), dtype=np.int64)
    pos = [cats.index(c) for c in cm.categories]
    m[np.ix_(pos, pos)] = cm.counts
    return ConfusionMatrix(m, tuple(cats))


def _harmonize(reports):
    cats = list(reports[0].confusion.categories)
    for r in reports:
        for c in r.confusion.categories:
            if c not in cats:
                cats.append(c)
    for r in reports:
        r.confusion = _pad(r.confusion, cats)
    return reports


def cross_validate(train_fn: Callable, dataset, k: int = 10, seed: int = 1,
                   max_attempts: int = 10, on_fold: Callable | None = None):
    """k-fold cross-validation.

    Returns ``(averaged_report, fold_reports, predictions)``.  Seeds are
    retried (``seed, seed+1, ...``) until every training fold contains
    every category present in the data.
    """
    n = len(dataset)
    if n < k:
        raise DataError(f"{n} instances cannot fill {k} folds")
    present = set(np.flatnonzero(dataset.class_counts()).tolist())
    if len(present) < 2:
        raise DataError("cross-validation needs at least two categories")
    folds = None
    for attempt in range(max_attempts):
        candidate = kfold_split(n, k, seed + attempt)
        missing = None
        for i, test_idx in enumerate(candidate):
            mask = np.ones(n, dtype=bool)
            mask[test_idx] = False
            lacking = present - set(dataset.y[mask].tolist())
            if lacking:
                missing = (i, dataset.categories[min(lacking)])
                break
        if missing is None:
            folds = candidate
            break
    if folds is None:
        raise DataError(f"fold {missing[0]} has no training example of category {missing[1]!r}")
    reports, predictions = [], []
    for i, test_idx in enumerate(folds):
        mask = np.ones(n, dtype=bool)
        mask[test_idx] = False
        train = dataset.subset(np.flatnonzero(mask))
        test = dataset.subset(test_idx)
        model = train_fn(train)
        prior = train.class_counts() / len(train)
        rep, preds = evaluate_predictor(model, test, prior, fold=i, indices=test_idx)
        reports.append(rep)
        predictions.extend(preds)
        if on_fold is not None:
            on_fold(i, model, train, test, test_idx)
    _harmonize(reports)
    return average_reports(reports), reports, predictions


def split_evaluate(train_fn: Callable, dataset, pct: float = 66.0, seed: int = 1,
                   shuffle: bool = True):
    train_idx, test_idx = percentage_split(len(dataset), pct, seed, shuffle)
    train = dataset.subset(train_idx)
    test = dataset.subset(test_idx)
    model = train_fn(train)
    prior = train.class_counts() / len(train)
    report, preds = evaluate_predictor(model, test, prior, indices=test_idx)
    report.n_train, report.n_test = len(train_idx), len(test_idx)
    return report, preds
