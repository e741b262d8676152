"""Input validation helpers and the feature scaler shared by all estimators."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

__all__ = ["check_array", "check_X_y", "check_is_fitted", "check_n_features", "ZScoreScaler", "dbm_to_mw"]


def check_array(X, name: str = "X", ensure_2d: bool = True) -> np.ndarray:
    """Float copy-free view of ``X`` with finiteness and shape checks."""
    X = np.asarray(X, dtype=float)
    if ensure_2d:
        if X.ndim == 1:
            raise ValueError(f"{name} must be 2-D, got a 1-D array; reshape(1, -1) for a single sample")
        if X.ndim != 2:
            raise ValueError(f"{name} must be 2-D, got shape {X.shape}")
    if X.size == 0 or len(X) == 0:
        raise ValueError(f"{name} is empty")
    if not np.isfinite(X).all():
        raise ValueError(f"{name} contains NaN or infinity")
    return X


def check_X_y(X, y, multi_output: bool = False):
    X = check_array(X)
    y = np.asarray(y, dtype=float)
    if not multi_output and y.ndim == 2 and y.shape[1] == 1:
        y = y.ravel()
    if (y.ndim != 1 and not multi_output) or len(y) != len(X):
        raise ValueError(f"y of shape {y.shape} does not match X of shape {X.shape}")
    if not np.isfinite(y).all():
        raise ValueError("y contains NaN or infinity")
    return X, y


def check_is_fitted(est, attr: str = "n_features_in_") -> None:
    if not hasattr(est, attr):
        raise NotFittedError(f"{type(est).__name__} is not fitted yet; call fit first")


def check_n_features(est, X: np.ndarray) -> None:
    if X.shape[1] != est.n_features_in_:
        raise ValueError(f"X has {X.shape[1]} features, but {type(est).__name__} was fitted with "
                         f"{est.n_features_in_}")


def dbm_to_mw(X: np.ndarray) -> np.ndarray:
    return np.power(10.0, np.asarray(X, dtype=float) / 10.0)


class ZScoreScaler(TransformerMixin, BaseEstimator):
    """Per-column standardization; zero-variance columns are only centred."""

    def fit(self, X, y=None):
        X = check_array(X)
        self.mean_ = X.mean(axis=0)
        std = X.std(axis=0)
        self.scale_ = np.where(std > 0, std, 1.0)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self)
        X = check_array(X)
        check_n_features(self, X)
        return (X - self.mean_) / self.scale_
