"""Linear SVM trained by sequential minimal optimization, one machine per
category pair.

Inputs are binary term presence plus min-max scaled dense features.
Multiclass probabilities are pairwise vote fractions.
"""

from __future__ import annotations

from itertools import combinations

import numba
import numpy as np

from ..errors import DataError
from .base import Classifier, Dataset, presence_and_dense, require_finite


@numba.njit(cache=True)
def _take_step(i, j, K, y, alpha, E, b, C):
    if i == j:
        return False, b
    ai, aj = alpha[i], alpha[j]
    if y[i] != y[j]:
        L = max(0.0, aj - ai)
        H = min(C, C + aj - ai)
    else:
        L = max(0.0, ai + aj - C)
        H = min(C, ai + aj)
    if H - L < 1e-12:
        return False, b
    eta = 2.0 * K[i, j] - K[i, i] - K[j, j]
    if eta >= 0.0:
        return False, b
    aj_new = aj - y[j] * (E[i] - E[j]) / eta
    if aj_new > H:
        aj_new = H
    elif aj_new < L:
        aj_new = L
    if abs(aj_new - aj) < 1e-8 * (aj_new + aj + 1e-8):
        return False, b
    ai_new = ai + y[i] * y[j] * (aj - aj_new)
    if ai_new < 0.0:
        ai_new = 0.0
    elif ai_new > C:
        ai_new = C
    dai = ai_new - ai
    daj = aj_new - aj
    b1 = b - E[i] - y[i] * dai * K[i, i] - y[j] * daj * K[i, j]
    b2 = b - E[j] - y[i] * dai * K[i, j] - y[j] * daj * K[j, j]
    if 0.0 < ai_new < C:
        b_new = b1
    elif 0.0 < aj_new < C:
        b_new = b2
    else:
        b_new = 0.5 * (b1 + b2)
    alpha[i] = ai_new
    alpha[j] = aj_new
    db = b_new - b
    for k in range(E.shape[0]):
        E[k] += y[i] * dai * K[k, i] + y[j] * daj * K[k, j] + db
    return True, b_new


@numba.njit(cache=True)
def _smo(K, y, C, tol, max_passes, max_iter, seed):
    n = y.shape[0]
    np.random.seed(seed)
    alpha = np.zeros(n)
    E = -y.copy()  # f(x) = 0 before training
    b = 0.0
    passes = 0
    it = 0
    while passes < max_passes and it < max_iter:
        changed = 0
        for i in range(n):
            r = E[i] * y[i]
            if (r < -tol and alpha[i] < C) or (r > tol and alpha[i] > 0.0):
                # second-choice heuristic first, then a random sweep
                best_j = -1
                best_gap = -1.0
                for j in range(n):
                    gap = abs(E[i] - E[j])
                    if j != i and gap > best_gap:
                        best_gap = gap
                        best_j = j
                ok, b = _take_step(i, best_j, K, y, alpha, E, b, C)
                if not ok:
                    order = np.random.permutation(n)
                    for jj in range(n):
                        ok, b = _take_step(i, order[jj], K, y, alpha, E, b, C)
                        if ok:
                            break
                if ok:
                    changed += 1
        it += 1
        if changed == 0:
            passes += 1
        else:
            passes = 0
    return alpha, b, it


def smo_binary(X: np.ndarray, y: np.ndarray, C=1.0, tol=1e-3, max_passes=10,
               max_iter=10_000, seed=0):
    """Train one linear machine; ``y`` in {+1, -1}.

    Returns ``(w, b, alpha)`` with decision value ``w @ x + b``.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    K = X @ X.T
    alpha, b, _ = _smo(K, y, float(C), float(tol), int(max_passes), int(max_iter), int(seed))
    w = (alpha * y) @ X
    return w, float(b), alpha


class SVMModel(Classifier):
    kind = "svm"

    def __init__(self, categories, n_terms, schema, hyperparams,
                 dense_min, dense_span, pairs, W, bias, alphas, alpha_offsets):
        super().__init__(categories, n_terms, schema, hyperparams)
        self.dense_min = dense_min
        self.dense_span = dense_span
        self.pairs = pairs              # (M, 2) int, a < b
        self.W = W                      # (M, d)
        self.bias = bias                # (M,)
        self.alphas = alphas            # concatenated support coefficients
        self.alpha_offsets = alpha_offsets

    def transform(self, X) -> np.ndarray:
        Z = presence_and_dense(X)
        V = X.n_terms
        Z[:, V:] = (Z[:, V:] - self.dense_min) / self.dense_span
        return Z

    def decision_values(self, X) -> np.ndarray:
        return self.transform(X) @ self.W.T + self.bias

    def _proba(self, X):
        D = self.decision_values(X)
        K = len(self.categories)
        votes = np.zeros((D.shape[0], K))
        for m, (a, b) in enumerate(self.pairs):
            win_a = D[:, m] >= 0.0
            votes[win_a, a] += 1.0
            votes[~win_a, b] += 1.0
        frac = votes / (K - 1)
        return frac / frac.sum(axis=1, keepdims=True)

    def machine_alphas(self, m: int) -> np.ndarray:
        return self.alphas[self.alpha_offsets[m]:self.alpha_offsets[m + 1]]

    def get_state(self):
        meta = self._base_meta()
        return meta, {
            "dense_min": self.dense_min, "dense_span": self.dense_span,
            "pairs": self.pairs, "W": self.W, "bias": self.bias,
            "alphas": self.alphas, "alpha_offsets": self.alpha_offsets,
        }

    @classmethod
    def from_state(cls, meta, a):
        return cls(meta["categories"], meta["n_terms"], meta["schema"], meta["hyperparams"],
                   a["dense_min"], a["dense_span"], a["pairs"], a["W"], a["bias"],
                   a["alphas"], a["alpha_offsets"])


def train_svm_smo(data: Dataset, C: float = 1.0, tol: float = 1e-3, max_passes: int = 10,
                  seed: int = 1) -> SVMModel:
    present = np.flatnonzero(data.class_counts())
    if len(present) < 2:
        raise DataError("SVM training needs at least two categories")
    require_finite(data.X)
    D = data.X.dense
    dmin = D.min(axis=0) if len(D) else np.zeros(D.shape[1])
    span = D.max(axis=0) - dmin if len(D) else np.ones(D.shape[1])
    span = np.where(span > 0, span, 1.0)
    model = SVMModel(data.categories, data.X.n_terms, data.X.schema,
                     {"C": C, "tol": tol, "max_passes": max_passes, "seed": seed},
                     dmin, span, None, None, None, None, None)
    Z = model.transform(data.X)
    K = data.n_categories
    pairs, W, bias, alphas, offsets = [], [], [], [], [0]
    for a, b in combinations(range(K), 2):
        mask = (data.y == a) | (data.y == b)
        if not (data.y == a).any() or not (data.y == b).any():
            # pair unseen in training: constant vote for whichever exists
            w = np.zeros(Z.shape[1])
            bb = 1.0 if (data.y == a).any() else -1.0
            al = np.zeros(0)
        else:
            yy = np.where(data.y[mask] == a, 1.0, -1.0)
            w, bb, al = smo_binary(Z[mask], yy, C, tol, max_passes,
                                   seed=seed * 7919 + a * K + b)
        pairs.append((a, b))
        W.append(w)
        bias.append(bb)
        alphas.append(al)
        offsets.append(offsets[-1] + len(al))
    model.pairs = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    model.W = np.array(W).reshape(len(pairs), Z.shape[1])
    model.bias = np.array(bias)
    model.alphas = np.concatenate(alphas) if alphas else np.zeros(0)
    model.alpha_offsets = np.array(offsets, dtype=np.int64)
    return model
