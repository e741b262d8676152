"""Per-axis localizers behind a scikit-learn style fit/predict contract."""

from ._base import ZScoreScaler
from .classic import ClassicLocalizer, classic_locate
from .knn import KNNRegressor
from .localizer import (AxisLocalizer, EstimatorModel, EstimatorSpec, fit, knn_neighbors,
                        mlp_gradient_check, predict)
from .mlp import MLPRegressor
from .serialize import load_model, save_model
from .svr import SVR

__all__ = [
    "AxisLocalizer", "ClassicLocalizer", "EstimatorModel", "EstimatorSpec", "KNNRegressor",
    "MLPRegressor", "SVR", "ZScoreScaler", "classic_locate", "fit", "knn_neighbors", "load_model",
    "mlp_gradient_check", "predict", "save_model",
]
