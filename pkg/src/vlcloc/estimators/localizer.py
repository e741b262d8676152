"""Per-axis localization: one single-output regressor for x, one for y."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Optional

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, clone

from ..dataset import FingerprintDataset, subsample
from ..geometry import AnchorKind
from ._base import ZScoreScaler, check_array, check_is_fitted, check_X_y, dbm_to_mw
from .classic import ClassicLocalizer
from .knn import KNNRegressor
from .mlp import MLPRegressor, gradient_check, init_params
from .svr import SVR

log = logging.getLogger(__name__)

__all__ = ["AxisLocalizer", "EstimatorSpec", "EstimatorModel", "KINDS", "fit", "predict",
           "knn_neighbors", "mlp_gradient_check", "snap_to_grid"]

KINDS = ("knn", "mlp", "svr", "classic_vlc", "classic_rf")
LEARNED = ("knn", "mlp", "svr")

DEFAULT_PARAMS: Dict[str, Dict[str, Any]] = {
    "knn": {"n_neighbors": 3},
    "mlp": {"hidden_layer_sizes": [64, 64], "learning_rate": 1e-3, "momentum": 0.9,
            "n_epochs": 200, "batch_size": 256},
    "svr": {"C": 10.0, "epsilon": 0.05, "gamma": "scale", "tol": 1e-3},
    "classic_vlc": {"max_iter": 100, "step_tol": 1e-6},
    "classic_rf": {"max_iter": 100, "step_tol": 1e-6},
}

SVR_MAX_TRAIN_ROWS = 5000


def snap_to_grid(P: np.ndarray, spacing: float) -> np.ndarray:
    return np.round(P / spacing) * spacing


class AxisLocalizer(RegressorMixin, BaseEstimator):
    """Fit a clone of ``regressor`` separately on each planar axis.

    Parameters
    ----------
    regressor : estimator
        Single-output regressor with ``fit``/``predict``.
    scaling : {"zscore", "none"}
        Feature standardization fitted on training features only.
    feature_domain : {"dbm", "linear"}
        ``"linear"`` converts dBm features to milliwatts before scaling.
    snap : float or None
        Round predictions to multiples of this grid spacing.
    """

    def __init__(self, regressor=None, scaling: str = "zscore", feature_domain: str = "dbm",
                 snap: Optional[float] = None):
        self.regressor = regressor
        self.scaling = scaling
        self.feature_domain = feature_domain
        self.snap = snap

    def _features(self, X):
        X = check_array(X)
        if self.feature_domain == "linear":
            X = dbm_to_mw(X)
        elif self.feature_domain != "dbm":
            raise ValueError(f"feature_domain must be 'dbm' or 'linear', got {self.feature_domain!r}")
        return X

    def fit(self, X, y):
        X, Y = check_X_y(self._features(X), y, multi_output=True)
        if Y.ndim != 2 or Y.shape[1] != 2:
            raise ValueError(f"targets must have shape (n, 2), got {Y.shape}")
        if self.scaling == "zscore":
            self.scaler_ = ZScoreScaler().fit(X)
            X = self.scaler_.transform(X)
        elif self.scaling == "none":
            self.scaler_ = None
        else:
            raise ValueError(f"scaling must be 'zscore' or 'none', got {self.scaling!r}")
        base = self.regressor if self.regressor is not None else KNNRegressor()
        self.estimators_ = [clone(base).fit(X, Y[:, axis]) for axis in (0, 1)]
        self.n_features_in_ = X.shape[1]
        return self

    def transform_features(self, X):
        check_is_fitted(self)
        X = self._features(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, but the model was fitted with {self.n_features_in_}")
        return self.scaler_.transform(X) if self.scaler_ is not None else X

    def predict(self, X):
        Xs = self.transform_features(X)
        P = np.column_stack([est.predict(Xs) for est in self.estimators_])
        return snap_to_grid(P, self.snap) if self.snap else P


@dataclass(frozen=True)
class EstimatorSpec:
    kind: str = "knn"
    params: Dict[str, Any] = field(default_factory=dict)
    scaling: str = "zscore"
    feature_domain: str = "dbm"
    snap: Optional[float] = None
    max_train_rows: Optional[int] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown estimator kind {self.kind!r}; expected one of {KINDS}")
        merged = {**DEFAULT_PARAMS[self.kind], **(self.params or {})}
        object.__setattr__(self, "params", merged)
        if self.max_train_rows is None and self.kind == "svr":
            object.__setattr__(self, "max_train_rows", SVR_MAX_TRAIN_ROWS)
        p = merged
        if self.kind == "knn" and int(p["n_neighbors"]) < 1:
            raise ValueError("knn needs n_neighbors >= 1")
        if self.kind == "mlp" and min(int(h) for h in p["hidden_layer_sizes"]) < 1:
            raise ValueError("mlp layer sizes must be >= 1")
        if self.kind == "svr":
            if not p["C"] > 0 or not p["epsilon"] >= 0:
                raise ValueError("svr needs C > 0 and epsilon >= 0")
            if p["gamma"] != "scale" and not float(p["gamma"]) > 0:
                raise ValueError("svr gamma must be 'scale' or positive")

    @property
    def label(self) -> str:
        return {"knn": "KNN", "mlp": "NN", "svr": "SVM",
                "classic_vlc": "Classic VLC", "classic_rf": "Classic WiFi"}[self.kind]

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "EstimatorSpec":
        return cls(**d)

    def make_estimator(self, seed: int = 0):
        if self.kind in LEARNED:
            hyper = dict(self.params)
            if self.kind == "knn":
                reg = KNNRegressor(**hyper)
            elif self.kind == "mlp":
                hyper["hidden_layer_sizes"] = tuple(hyper["hidden_layer_sizes"])
                reg = MLPRegressor(random_state=seed, **hyper)
            else:
                reg = SVR(**hyper)
            return AxisLocalizer(reg, self.scaling, self.feature_domain, self.snap)
        return ClassicLocalizer(**self.params)


@dataclass
class EstimatorModel:
    """A fitted localizer plus what it was trained on."""

    spec: EstimatorSpec
    estimator: Any
    seed: int = 0
    n_train_rows: int = 0
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def predict(self, features) -> np.ndarray:
        P = self.estimator.predict(np.atleast_2d(np.asarray(features, dtype=float)))
        if self.spec.snap and not isinstance(self.estimator, AxisLocalizer):
            P = snap_to_grid(P, self.spec.snap)
        return P


def _diagnostics(spec: EstimatorSpec, est) -> Dict[str, Any]:
    if not isinstance(est, AxisLocalizer):
        return {}
    diag = {}
    for axis, reg in zip("xy", est.estimators_):
        if spec.kind == "mlp":
            diag[axis] = {"epochs": reg.n_iter_, "loss_first": reg.loss_curve_[0], "loss_last": reg.loss_curve_[-1]}
        elif spec.kind == "svr":
            diag[axis] = {"iterations": reg.n_iter_, "kkt_gap": reg.kkt_gap_,
                          "support_vectors": int(len(reg.support_)), "converged": bool(reg.converged_)}
        else:
            diag[axis] = {"rows": int(len(reg.fit_X_))}
    return diag


def fit(spec: EstimatorSpec, train: FingerprintDataset, seed: int = 0) -> EstimatorModel:
    """Fit ``spec`` on ``train``; deterministic in ``(spec, train, seed)``."""
    if len(train) == 0:
        raise ValueError("training set is empty")
    if spec.kind in LEARNED:
        if spec.max_train_rows is not None and len(train) > spec.max_train_rows:
            log.info("%s: subsampling training set from %d to %d rows", spec.label, len(train), spec.max_train_rows)
            train = subsample(train, spec.max_train_rows, seed)
        est = spec.make_estimator(seed).fit(train.features, train.targets)
    else:
        want = AnchorKind.VLC_LED if spec.kind == "classic_vlc" else AnchorKind.RF_AP
        if not train.anchors or any(a.kind is not want for a in train.anchors):
            raise ValueError(f"{spec.label} needs a manifest of {want.value} anchors")
        est = ClassicLocalizer(anchors=list(train.anchors), channel=train.channel,
                               rx_height=float(np.median(train.z)), **spec.params).fit(train.features)
    model = EstimatorModel(spec, est, seed=seed, n_train_rows=len(train))
    model.diagnostics = _diagnostics(spec, est)
    return model


def predict(model: EstimatorModel, features) -> np.ndarray:
    """Planar ``(x, y)`` for one RSS vector (shape ``(2,)``) or many (``(n, 2)``)."""
    features = np.asarray(features, dtype=float)
    P = model.predict(features)
    return P[0] if features.ndim == 1 else P


def knn_neighbors(model: EstimatorModel, features, k: int):
    """``(index, distance)`` pairs in scaled feature space, nearest first."""
    if model.spec.kind != "knn":
        raise ValueError("knn_neighbors needs a KNN model")
    loc = model.estimator
    Xs = loc.transform_features(np.atleast_2d(np.asarray(features, dtype=float)))
    dist, idx = loc.estimators_[0].kneighbors(Xs, k)
    return [(int(i), float(d)) for i, d in zip(idx[0], dist[0])]


def mlp_gradient_check(spec: EstimatorSpec, X, y, seed: int = 0, step: float = 1e-5) -> float:
    """Max relative error of backprop vs central differences on a fresh network."""
    if spec.kind != "mlp":
        raise ValueError("mlp_gradient_check needs an MLP spec")
    X = check_array(X)
    if len(X) > 32:
        raise ValueError("gradient check is limited to 32 rows")
    y = np.asarray(y, dtype=float).ravel()
    sizes = [X.shape[1], *map(int, spec.params["hidden_layer_sizes"]), 1]
    rng = np.random.default_rng(seed)
    params = init_params(sizes, rng)
    # zero biases put all-inactive rows exactly on the ReLU kink, where differences are invalid
    params = [(W, rng.uniform(-0.1, 0.1, size=b.shape)) for W, b in params]
    return gradient_check(params, X, y, step)
