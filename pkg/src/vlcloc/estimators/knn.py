"""Brute-force k-nearest-neighbours regression."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin

from ._base import check_array, check_is_fitted, check_n_features, check_X_y

__all__ = ["KNNRegressor"]

_CHUNK = 256


class KNNRegressor(RegressorMixin, BaseEstimator):
    """Uniform-weight KNN regression with Euclidean distance.

    Neighbours are ordered by distance, ties by lowest training row index.
    Candidates are screened with the expanded ``|a|^2 + |b|^2 - 2ab`` form and
    then re-ranked on exact distances, so ranking never depends on the
    cancellation error of the fast path.
    """

    def __init__(self, n_neighbors: int = 3):
        self.n_neighbors = n_neighbors

    def fit(self, X, y):
        X, y = check_X_y(X, y, multi_output=True)
        if int(self.n_neighbors) < 1:
            raise ValueError(f"n_neighbors must be >= 1, got {self.n_neighbors}")
        self.fit_X_ = X.copy()
        self.fit_y_ = y.copy()
        self._sq_norms = np.einsum("ij,ij->i", X, X)
        self.n_features_in_ = X.shape[1]
        return self

    def kneighbors(self, X, n_neighbors=None):
        """Return ``(distances, indices)``, each of shape ``(n_queries, k)``."""
        check_is_fitted(self)
        X = check_array(X)
        check_n_features(self, X)
        k = int(self.n_neighbors if n_neighbors is None else n_neighbors)
        n_train = len(self.fit_X_)
        if not 1 <= k <= n_train:
            raise ValueError(f"k={k} must lie in [1, {n_train}] (training rows)")
        if not hasattr(self, "_sq_norms"):
            self._sq_norms = np.einsum("ij,ij->i", self.fit_X_, self.fit_X_)

        dist = np.empty((len(X), k))
        idx = np.empty((len(X), k), dtype=np.int64)
        max_sq = self._sq_norms.max()
        for start in range(0, len(X), _CHUNK):
            Q = X[start:start + _CHUNK]
            q_sq = np.einsum("ij,ij->i", Q, Q)
            d2 = q_sq[:, None] + self._sq_norms[None, :] - 2.0 * (Q @ self.fit_X_.T)
            if k < n_train:
                kth = np.partition(d2, k - 1, axis=1)[:, k - 1]
            else:
                kth = d2.max(axis=1)
            slack = 1e-8 * (q_sq + max_sq) + 1e-300
            for r in range(len(Q)):
                cand = np.flatnonzero(d2[r] <= kth[r] + slack[r])
                exact = np.sqrt(np.sum((self.fit_X_[cand] - Q[r]) ** 2, axis=1))
                order = np.lexsort((cand, exact))[:k]
                dist[start + r] = exact[order]
                idx[start + r] = cand[order]
        return dist, idx

    def predict(self, X):
        _, idx = self.kneighbors(X)
        return self.fit_y_[idx].mean(axis=1)
