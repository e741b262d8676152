import json

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from vlcloc.estimators import (AxisLocalizer, EstimatorSpec, KNNRegressor, MLPRegressor, SVR, ZScoreScaler,
                               fit, load_model, save_model)
from vlcloc.estimators.serialize import model_documents, model_from_documents


def test_get_params_and_clone():
    loc = AxisLocalizer(KNNRegressor(5), scaling="none", snap=0.1)
    params = loc.get_params()
    assert params["regressor__n_neighbors"] == 5
    assert params["snap"] == 0.1
    c = clone(loc).set_params(regressor__n_neighbors=2)
    assert c.regressor.n_neighbors == 2 and loc.regressor.n_neighbors == 5


def test_regressors_compose_with_pipeline():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(80, 3))
    y = X[:, 0] * 2
    for reg in (KNNRegressor(3), SVR(), MLPRegressor(hidden_layer_sizes=(8,), n_epochs=20)):
        pipe = make_pipeline(ZScoreScaler(), reg).fit(X, y)
        assert pipe.predict(X).shape == (80,)
        assert -1 <= pipe.score(X, y) <= 1


def test_not_fitted_and_arity_errors(small_ds):
    with pytest.raises(NotFittedError):
        AxisLocalizer().predict(small_ds.features)
    model = fit(EstimatorSpec("knn"), small_ds)
    with pytest.raises(ValueError, match="features"):
        model.predict(small_ds.features[:, :10])


def test_scaler_zero_variance_guard():
    X = np.column_stack([np.ones(5), np.arange(5.0)])
    Z = ZScoreScaler().fit(X).transform(X)
    assert np.all(Z[:, 0] == 0)
    assert np.isfinite(Z).all()


def test_snap_to_grid(small_ds):
    model = fit(EstimatorSpec("knn", snap=0.1), small_ds)
    P = model.predict(small_ds.features[:20] + 0.05)
    assert np.allclose(P / 0.1, np.round(P / 0.1), atol=1e-9)


def test_linear_feature_domain(small_ds):
    model = fit(EstimatorSpec("knn", {"n_neighbors": 1}, feature_domain="linear"), small_ds)
    assert np.array_equal(model.predict(small_ds.features[:5]), small_ds.targets[:5])


def test_spec_validation():
    with pytest.raises(ValueError):
        EstimatorSpec("knn", {"n_neighbors": 0})
    with pytest.raises(ValueError):
        EstimatorSpec("svr", {"C": 0})
    with pytest.raises(ValueError):
        EstimatorSpec("mlp", {"hidden_layer_sizes": [0]})
    with pytest.raises(ValueError):
        EstimatorSpec("forest")


def test_svr_training_rows_capped(small_ds, caplog):
    spec = EstimatorSpec("svr", max_train_rows=100)
    with caplog.at_level("INFO"):
        model = fit(spec, small_ds, seed=1)
    assert model.n_train_rows == 100
    assert "subsampling training set from 162 to 100" in caplog.text
    assert EstimatorSpec("svr").max_train_rows == 5000


@pytest.mark.parametrize("kind,params", [("knn", {}), ("mlp", {"n_epochs": 3}), ("svr", {}), ("classic_vlc", {})])
def test_serialization_round_trip(tmp_path, small_ds, kind, params):
    model = fit(EstimatorSpec(kind, params), small_ds, seed=2)
    paths = save_model(model, tmp_path, f"model_{kind}")
    assert len(paths) == (1 if kind.startswith("classic") else 2)
    back = load_model(paths)
    Q = small_ds.features[:25]
    assert np.array_equal(back.predict(Q), model.predict(Q))
    doc = json.loads(paths[0].read_text())
    assert doc["format"] == "vlcloc.model" and doc["version"] == 1
    assert doc["n_train_rows"] == len(small_ds)


def test_model_documents_byte_identical_across_fits(small_ds):
    spec = EstimatorSpec("mlp", {"n_epochs": 3})
    a = json.dumps(model_documents(fit(spec, small_ds, seed=8)), sort_keys=True)
    b = json.dumps(model_documents(fit(spec, small_ds, seed=8)), sort_keys=True)
    assert a == b


def test_model_documents_reject_bad_version(small_ds):
    docs = model_documents(fit(EstimatorSpec("knn"), small_ds))
    docs["x"]["version"] = 99
    with pytest.raises(ValueError, match="version"):
        model_from_documents(list(docs.values()))
