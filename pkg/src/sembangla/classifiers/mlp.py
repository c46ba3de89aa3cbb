"""Sigmoid multilayer perceptron trained by per-example backpropagation.

Input layer: the ``top_k`` terms ranked by chi-squared association with
the categories (as presence bits) followed by every dense feature min-max
scaled to [0, 1], so zero features stay zero and inputs stay sparse.  One
sigmoid hidden layer, one sigmoid output per category, squared-error loss,
momentum SGD over a freshly shuffled order each epoch.
"""

from __future__ import annotations

import math

import numba
import numpy as np

from ..errors import DataError, TrainingError
from .base import Classifier, Dataset, FeatureMatrix

MAX_AUTO_HIDDEN = 64


def chi2_scores(presence: np.ndarray, y: np.ndarray, K: int) -> np.ndarray:
    """Chi-squared statistic of each binary column against the labels."""
    n = len(y)
    Y = np.zeros((n, K))
    Y[np.arange(n), y] = 1.0
    class_n = Y.sum(axis=0)
    present = presence.T @ Y                       # (V, K)
    absent = class_n - present
    col_p = present.sum(axis=1, keepdims=True)
    col_a = n - col_p
    score = np.zeros(presence.shape[1])
    for obs, tot in ((present, col_p), (absent, col_a)):
        exp = tot * class_n / n
        with np.errstate(divide="ignore", invalid="ignore"):
            cell = np.where(exp > 0, (obs - exp) ** 2 / np.where(exp > 0, exp, 1), 0.0)
        score += cell.sum(axis=1)
    return score


def select_terms(presence, y, K, top_k) -> np.ndarray:
    """Indices of the ``top_k`` best-scoring terms seen in training, by id."""
    scores = chi2_scores(presence, y, K)
    seen = np.flatnonzero(presence.any(axis=0))
    order = seen[np.lexsort((seen, -scores[seen]))]
    return np.sort(order[:top_k])


@numba.njit(cache=True)
def _sigmoid(z):
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


@numba.njit(cache=True)
def _catch_up(W1T, V1T, row, pending, momentum):
    # Apply ``pending`` zero-gradient momentum steps to one input's weights.
    if pending <= 0:
        return
    mk = momentum ** pending
    if momentum == 1.0:
        factor = float(pending)
    else:
        factor = momentum * (1.0 - mk) / (1.0 - momentum)
    for j in range(W1T.shape[1]):
        W1T[row, j] += V1T[row, j] * factor
        V1T[row, j] *= mk


@numba.njit(cache=True)
def _train(X, T, W1T, b1, W2, b2, V1T, vb1, V2, vb2, lr, momentum, epochs, seed, losses):
    """In-place momentum SGD.  Returns -1 on success or the failing epoch.

    Input weights are held transposed (inputs x hidden).  Inputs that are
    zero for the current example receive no gradient, so their
    momentum-only updates are deferred and applied in closed form the next
    time the input is active (and once more at the end).
    """
    n, I = X.shape
    H = W1T.shape[1]
    K = W2.shape[0]
    np.random.seed(seed)
    h = np.empty(H)
    o = np.empty(K)
    do = np.empty(K)
    dh = np.empty(H)
    applied = np.zeros(I, dtype=np.int64)
    active = np.empty(I, dtype=np.int64)
    step = 0
    for ep in range(epochs):
        order = np.random.permutation(n)
        total = 0.0
        for r in range(n):
            x = X[order[r]]
            t = T[order[r]]
            na = 0
            for i in range(I):
                if x[i] != 0.0:
                    active[na] = i
                    na += 1
                    _catch_up(W1T, V1T, i, step - applied[i], momentum)
            for j in range(H):
                h[j] = b1[j]
            for a in range(na):
                i = active[a]
                xi = x[i]
                for j in range(H):
                    h[j] += W1T[i, j] * xi
            for j in range(H):
                h[j] = _sigmoid(h[j])
            for k in range(K):
                s = b2[k]
                for j in range(H):
                    s += W2[k, j] * h[j]
                o[k] = _sigmoid(s)
                err = o[k] - t[k]
                total += 0.5 * err * err
                do[k] = err * o[k] * (1.0 - o[k])
            for j in range(H):
                s = 0.0
                for k in range(K):
                    s += W2[k, j] * do[k]
                dh[j] = s * h[j] * (1.0 - h[j])
            for k in range(K):
                for j in range(H):
                    V2[k, j] = momentum * V2[k, j] - lr * do[k] * h[j]
                    W2[k, j] += V2[k, j]
                vb2[k] = momentum * vb2[k] - lr * do[k]
                b2[k] += vb2[k]
            for a in range(na):
                i = active[a]
                xi = x[i]
                for j in range(H):
                    V1T[i, j] = momentum * V1T[i, j] - lr * dh[j] * xi
                    W1T[i, j] += V1T[i, j]
                applied[i] = step + 1
            for j in range(H):
                vb1[j] = momentum * vb1[j] - lr * dh[j]
                b1[j] += vb1[j]
            step += 1
        if not math.isfinite(total):
            return ep
        losses[ep] = total / (n * K) * 2.0  # mean squared error
    for i in range(I):
        _catch_up(W1T, V1T, i, step - applied[i], momentum)
    return -1


def forward(params, X):
    W1, b1, W2, b2 = params
    Hd = 1.0 / (1.0 + np.exp(-(X @ W1.T + b1)))
    O = 1.0 / (1.0 + np.exp(-(Hd @ W2.T + b2)))
    return Hd, O


def loss_and_grad(params, X, T):
    """Summed squared-error loss ``0.5 * sum((o - t)**2)`` and its gradient."""
    W1, b1, W2, b2 = params
    Hd, O = forward(params, X)
    err = O - T
    loss = 0.5 * float((err ** 2).sum())
    dO = err * O * (1 - O)
    gW2 = dO.T @ Hd
    gb2 = dO.sum(axis=0)
    dH = (dO @ W2) * Hd * (1 - Hd)
    gW1 = dH.T @ X
    gb1 = dH.sum(axis=0)
    return loss, (gW1, gb1, gW2, gb2)


def sgd_step(params, velocities, x, t, lr, momentum):
    """One numpy reference update on a single example (mirrors the kernel)."""
    _, grads = loss_and_grad(params, x[None, :], t[None, :])
    new_v = tuple(momentum * v - lr * g for v, g in zip(velocities, grads))
    new_p = tuple(p + v for p, v in zip(params, new_v))
    return new_p, new_v


class MLPModel(Classifier):
    kind = "mlp"

    def __init__(self, categories, n_terms, schema, hyperparams,
                 selected, dense_min, dense_span, W1, b1, W2, b2, losses):
        super().__init__(categories, n_terms, schema, hyperparams)
        self.selected = selected
        self.dense_min = dense_min
        self.dense_span = dense_span
        self.W1, self.b1, self.W2, self.b2 = W1, b1, W2, b2
        self.losses = losses

    @property
    def params(self):
        return (self.W1, self.b1, self.W2, self.b2)

    def transform(self, X: FeatureMatrix) -> np.ndarray:
        return _inputs(X, self.selected, self.dense_min, self.dense_span)

    def raw_outputs(self, X: FeatureMatrix) -> np.ndarray:
        return forward(self.params, self.transform(X))[1]

    def _proba(self, X):
        O = self.raw_outputs(X)
        tot = O.sum(axis=1, keepdims=True)
        K = O.shape[1]
        return np.where(tot > 0, O / np.where(tot > 0, tot, 1.0), 1.0 / K)

    def get_state(self):
        return self._base_meta(), {
            "selected": self.selected, "dense_min": self.dense_min,
            "dense_span": self.dense_span, "W1": self.W1, "b1": self.b1,
            "W2": self.W2, "b2": self.b2, "losses": self.losses,
        }

    @classmethod
    def from_state(cls, meta, a):
        return cls(meta["categories"], meta["n_terms"], meta["schema"], meta["hyperparams"],
                   a["selected"], a["dense_min"], a["dense_span"],
                   a["W1"], a["b1"], a["W2"], a["b2"], a["losses"])


def _inputs(X: FeatureMatrix, selected, dmin, span) -> np.ndarray:
    terms = (X.counts[:, selected] > 0).astype(np.float64)
    dense = (X.dense - dmin) / span
    return np.ascontiguousarray(np.hstack([terms, dense]))


def auto_hidden(n_inputs: int, n_categories: int) -> int:
    return min(MAX_AUTO_HIDDEN, math.ceil((n_inputs + n_categories) / 2))


def train_mlp(data: Dataset, hidden: int | str = "auto", lr: float = 0.3,
              momentum: float = 0.2, epochs: int = 500, top_k: int = 500,
              seed: int = 0) -> MLPModel:
    if len(data) == 0:
        raise DataError("cannot train an MLP on empty data")
    if top_k < 1:
        raise DataError("top_k must be at least 1")
    K = data.n_categories
    presence = (data.X.counts > 0).astype(np.float64)
    selected = select_terms(presence, data.y, K, top_k)
    D = data.X.dense
    dmin = D.min(axis=0)
    span = D.max(axis=0) - dmin
    span = np.where(span > 0, span, 1.0)
    Xin = _inputs(data.X, selected, dmin, span)
    n_in = Xin.shape[1]
    H = auto_hidden(n_in, K) if hidden == "auto" else int(hidden)
    if H < 1:
        raise DataError("hidden layer needs at least one unit")

    rng = np.random.default_rng(seed)
    W1 = rng.uniform(-0.5, 0.5, (H, n_in))
    b1 = rng.uniform(-0.5, 0.5, H)
    W2 = rng.uniform(-0.5, 0.5, (K, H))
    b2 = rng.uniform(-0.5, 0.5, K)
    T = np.zeros((len(data), K))
    T[np.arange(len(data)), data.y] = 1.0
    losses = np.full(epochs, np.nan)
    W1T = np.ascontiguousarray(W1.T)
    bad = _train(Xin, T, W1T, b1, W2, b2, np.zeros_like(W1T), np.zeros_like(b1),
                 np.zeros_like(W2), np.zeros_like(b2), float(lr), float(momentum),
                 int(epochs), int(seed), losses)
    W1 = np.ascontiguousarray(W1T.T)
    if bad >= 0:
        raise TrainingError(f"non-finite training loss at epoch {bad}")
    hp = {"hidden": H, "lr": lr, "momentum": momentum, "epochs": epochs,
          "top_k": top_k, "seed": seed}
    return MLPModel(data.categories, data.X.n_terms, data.X.schema, hp,
                    selected, dmin, span, W1, b1, W2, b2, losses)
