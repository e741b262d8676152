"""Versioned JSON documents for fitted models, one document per axis."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Dict, List

import numpy as np

from ..channel import ChannelParams
from ..geometry import Anchor
from ._base import ZScoreScaler
from .classic import ClassicLocalizer
from .knn import KNNRegressor
from .localizer import EstimatorModel, EstimatorSpec
from .mlp import MLPRegressor
from .svr import SVR

__all__ = ["FORMAT", "VERSION", "model_documents", "model_from_documents", "save_model", "load_model"]

FORMAT = "vlcloc.model"
VERSION = 1


def _regressor_doc(reg) -> dict:
    if isinstance(reg, KNNRegressor):
        return {"n_neighbors": int(reg.n_neighbors), "fit_X": reg.fit_X_.tolist(), "fit_y": reg.fit_y_.tolist()}
    if isinstance(reg, MLPRegressor):
        return {"hyper": {**reg.get_params(), "hidden_layer_sizes": list(reg.hidden_layer_sizes)},
                "layers": [{"W": W.tolist(), "b": b.tolist()} for W, b in reg.params_],
                "y_mean": reg.y_mean_, "y_scale": reg.y_scale_, "loss_curve": list(reg.loss_curve_)}
    if isinstance(reg, SVR):
        return {"hyper": reg.get_params(), "support_vectors": reg.support_vectors_.tolist(),
                "support": reg.support_.tolist(), "dual_coef": reg.dual_coef_.tolist(),
                "intercept": reg.intercept_, "gamma": reg.gamma_, "n_iter": reg.n_iter_,
                "kkt_gap": reg.kkt_gap_, "converged": bool(reg.converged_)}
    raise TypeError(f"cannot serialize {type(reg).__name__}")


def _regressor_from_doc(kind: str, d: dict, n_features: int):
    if kind == "knn":
        reg = KNNRegressor(d["n_neighbors"])
        reg.fit_X_ = np.array(d["fit_X"], dtype=float).reshape(-1, n_features)
        reg.fit_y_ = np.array(d["fit_y"], dtype=float)
    elif kind == "mlp":
        hyper = dict(d["hyper"])
        hyper["hidden_layer_sizes"] = tuple(hyper["hidden_layer_sizes"])
        reg = MLPRegressor(**hyper)
        reg.params_ = [(np.array(L["W"], dtype=float), np.array(L["b"], dtype=float)) for L in d["layers"]]
        reg.y_mean_, reg.y_scale_ = d["y_mean"], d["y_scale"]
        reg.loss_curve_ = d["loss_curve"]
        reg.n_iter_ = hyper["n_epochs"]
    elif kind == "svr":
        reg = SVR(**d["hyper"])
        reg.support_vectors_ = np.array(d["support_vectors"], dtype=float).reshape(-1, n_features)
        reg.support_ = np.array(d["support"], dtype=np.int64)
        reg.dual_coef_ = np.array(d["dual_coef"], dtype=float)
        reg.intercept_, reg.gamma_ = d["intercept"], d["gamma"]
        reg.n_iter_, reg.kkt_gap_, reg.converged_ = d["n_iter"], d["kkt_gap"], d["converged"]
    else:
        raise ValueError(f"unknown regressor kind {kind!r}")
    reg.n_features_in_ = n_features
    return reg


def _header(model: EstimatorModel) -> dict:
    return {"format": FORMAT, "version": VERSION, "spec": model.spec.to_dict(), "seed": model.seed,
            "n_train_rows": model.n_train_rows, "diagnostics": model.diagnostics}


def model_documents(model: EstimatorModel) -> Dict[str, dict]:
    """``{"x": doc, "y": doc}`` for learned models, ``{"xy": doc}`` for classic ones."""
    est = model.estimator
    if isinstance(est, ClassicLocalizer):
        doc = _header(model)
        doc["axis"] = "xy"
        doc["classic"] = {"anchors": [a.to_dict() for a in est.anchors],
                          "channel": (est.channel or ChannelParams()).to_dict(), "rx_height": est.rx_height}
        return {"xy": doc}
    docs = {}
    scaler = None
    if est.scaler_ is not None:
        scaler = {"mean": est.scaler_.mean_.tolist(), "scale": est.scaler_.scale_.tolist()}
    for axis, reg in zip("xy", est.estimators_):
        doc = _header(model)
        doc.update(axis=axis, n_features=int(est.n_features_in_), scaler=scaler, regressor=_regressor_doc(reg))
        docs[axis] = doc
    return docs


def model_from_documents(docs: List[dict]) -> EstimatorModel:
    by_axis = {}
    for d in docs:
        if d.get("format") != FORMAT:
            raise ValueError(f"not a {FORMAT} document")
        if d.get("version") != VERSION:
            raise ValueError(f"unsupported model version {d.get('version')}")
        by_axis[d["axis"]] = d
    first = docs[0]
    spec = EstimatorSpec.from_dict(first["spec"])
    if "xy" in by_axis:
        c = by_axis["xy"]["classic"]
        est = ClassicLocalizer(anchors=[Anchor.from_dict(a) for a in c["anchors"]],
                               channel=ChannelParams.from_dict(c["channel"]), rx_height=c["rx_height"],
                               **spec.params).fit()
    else:
        if set(by_axis) != {"x", "y"}:
            raise ValueError(f"need both x and y axis documents, got {sorted(by_axis)}")
        n = int(by_axis["x"]["n_features"])
        est = spec.make_estimator(first["seed"])
        sc = by_axis["x"]["scaler"]
        if sc is not None:
            est.scaler_ = ZScoreScaler()
            est.scaler_.mean_ = np.array(sc["mean"], dtype=float)
            est.scaler_.scale_ = np.array(sc["scale"], dtype=float)
            est.scaler_.n_features_in_ = n
        else:
            est.scaler_ = None
        est.estimators_ = [_regressor_from_doc(spec.kind, by_axis[a]["regressor"], n) for a in "xy"]
        est.n_features_in_ = n
    return EstimatorModel(spec, est, seed=first["seed"], n_train_rows=first["n_train_rows"],
                          diagnostics=first.get("diagnostics", {}))


def _dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def save_model(model: EstimatorModel, out_dir, stem: str) -> List[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for axis, doc in model_documents(model).items():
        p = out_dir / f"{stem}_{axis}.json"
        p.write_text(_dumps(doc), encoding="utf-8")
        paths.append(p)
    return paths


def load_model(paths) -> EstimatorModel:
    docs = [json.loads(Path(p).read_text(encoding="utf-8")) for p in paths]
    if not docs:
        raise ValueError("no model documents given")
    return model_from_documents(docs)
