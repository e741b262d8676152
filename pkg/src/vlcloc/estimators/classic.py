"""Non-learning baseline: invert the channel to ranges, then multilaterate.

Optical RSS is inverted assuming an upward-facing receiver, for which the
emission and incidence angles coincide and the gain collapses to

    P = P_t (m + 1) A T g h^(m+1) / (2 pi d^(m+3)).

Radio RSS is inverted through the log-distance path-loss law. The position
then minimizes the squared range residuals by Gauss-Newton.
"""

from __future__ import annotations

import logging
import math
import warnings
from typing import NamedTuple, Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import ConvergenceWarning

from ..channel import ChannelParams, lambertian_order
from ..geometry import Anchor, AnchorKind
from ._base import check_array, check_is_fitted, check_n_features

log = logging.getLogger(__name__)

__all__ = ["LocateResult", "InsufficientAnchorsError", "rss_to_range", "gauss_newton_2d",
           "classic_locate", "ClassicLocalizer"]


class InsufficientAnchorsError(ValueError):
    pass


class LocateResult(NamedTuple):
    position: np.ndarray
    converged: bool
    n_iter: int
    cost: float


def rss_to_range(rss: np.ndarray, kinds: Sequence[AnchorKind], params: ChannelParams,
                 vertical: float) -> np.ndarray:
    """Noise-free channel inversion, one 3-D range per RSS value."""
    rss = np.asarray(rss, dtype=float)
    out = np.empty_like(rss)
    for i, (v, kind) in enumerate(zip(rss, kinds)):
        if kind is AnchorKind.VLC_LED:
            e, r = params.emitter, params.receiver
            m = lambertian_order(e.half_power_semi_angle)
            p_watts = 10.0 ** (v / 10.0) / 1000.0
            k = (e.tx_power * (m + 1) * r.detector_area * r.filter_gain * r.concentrator_gain
                 * vertical ** (m + 1) / (2 * math.pi))
            d = (k / p_watts) ** (1.0 / (m + 3))
            out[i] = max(d, vertical)
        else:
            rf = params.rf
            out[i] = rf.ref_distance * 10.0 ** ((rf.tx_power - rf.ref_loss - v) / (10.0 * rf.path_loss_exponent))
    return out


def gauss_newton_2d(anchors_xy: np.ndarray, ranges: np.ndarray, vertical: np.ndarray,
                    x0: np.ndarray, max_iter: int = 100, step_tol: float = 1e-6) -> LocateResult:
    """Minimize sum_i (sqrt(|p - a_i|^2 + v_i^2) - r_i)^2 over planar p."""
    p = np.asarray(x0, dtype=float).copy()

    def residuals(q):
        delta = q[None, :] - anchors_xy
        pred = np.sqrt(np.einsum("ij,ij->i", delta, delta) + vertical ** 2)
        return pred - ranges, delta, pred

    res, delta, pred = residuals(p)
    best, best_cost = p.copy(), float(res @ res)
    for it in range(1, max_iter + 1):
        J = delta / pred[:, None]
        step, *_ = np.linalg.lstsq(J, -res, rcond=None)
        if not np.all(np.isfinite(step)):
            break
        p = p + step
        res, delta, pred = residuals(p)
        cost = float(res @ res)
        if cost < best_cost:
            best, best_cost = p.copy(), cost
        if np.linalg.norm(step) < step_tol:
            return LocateResult(best, True, it, best_cost)
    return LocateResult(best, False, max_iter, best_cost)


def classic_locate(features, anchors: Sequence[Anchor], params: ChannelParams,
                   rx_height: float, max_iter: int = 100, step_tol: float = 1e-6) -> LocateResult:
    """Planar position from one RSS vector by model inversion.

    Anchors whose RSS sits at the floor are ignored; at least three must
    remain. The search starts at the strongest anchor.
    """
    features = np.asarray(features, dtype=float).ravel()
    if len(features) != len(anchors):
        raise ValueError(f"{len(features)} RSS values for {len(anchors)} anchors")
    usable = features > params.noise.rss_floor
    if usable.sum() < 3:
        raise InsufficientAnchorsError(f"only {int(usable.sum())} anchors above the RSS floor; need 3")
    pos = np.array([a.position.as_array() for a in anchors])[usable]
    kinds = [a.kind for a, u in zip(anchors, usable) if u]
    vertical = pos[:, 2] - rx_height
    ranges = rss_to_range(features[usable], kinds, params, float(np.mean(vertical)))
    x0 = pos[int(np.argmax(features[usable])), :2]
    return gauss_newton_2d(pos[:, :2], ranges, vertical, x0, max_iter, step_tol)


class ClassicLocalizer(BaseEstimator):
    """Estimator wrapper around :func:`classic_locate`.

    ``fit`` learns nothing; it records the feature arity. Rows with fewer
    than three usable anchors fall back to the strongest anchor's position.
    """

    def __init__(self, anchors: Optional[Sequence[Anchor]] = None, channel: Optional[ChannelParams] = None,
                 rx_height: float = 1.0, max_iter: int = 100, step_tol: float = 1e-6):
        self.anchors = anchors
        self.channel = channel
        self.rx_height = rx_height
        self.max_iter = max_iter
        self.step_tol = step_tol

    def fit(self, X=None, y=None):
        if not self.anchors:
            raise ValueError("ClassicLocalizer needs the anchor manifest")
        n = len(self.anchors)
        if X is not None:
            X = check_array(X)
            if X.shape[1] != n:
                raise ValueError(f"X has {X.shape[1]} features for {n} anchors")
        self.n_features_in_ = n
        return self

    def predict(self, X):
        check_is_fitted(self)
        X = check_array(X)
        check_n_features(self, X)
        params = self.channel or ChannelParams()
        anchors = sorted(self.anchors, key=lambda a: a.index)
        xy = np.array([[a.position.x, a.position.y] for a in anchors])
        out = np.empty((len(X), 2))
        failed = diverged = 0
        for r, row in enumerate(X):
            try:
                res = classic_locate(row, anchors, params, self.rx_height, self.max_iter, self.step_tol)
            except InsufficientAnchorsError:
                failed += 1
                out[r] = xy[int(np.argmax(row))]
                continue
            diverged += not res.converged
            out[r] = res.position
        if failed or diverged:
            warnings.warn(f"classic localization: {failed} rows with < 3 usable anchors, "
                          f"{diverged} rows without Gauss-Newton convergence", ConvergenceWarning)
        return out
